"""End-to-end resolution drivers over a global fan of charts.

Each chart of the ambient carries the chart positions of its cone's rays,
the split of positions into vanishing and invertible variables, and the
reduced presentation of the strict transform.  A global step selects the
charts of maximal Hilbert-Samuel function, computes the invariant and its
prescribed centre in each, takes the largest value, and star-subdivides at
the corresponding face in every chart that sees it.  After all charts are
smooth, a second pass removes tangencies between the strict transform and
the recorded exceptional divisors.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .binomial import (Binomial, BinomialIdeal, standard_basis)
from .fan import Cone, Fan, FanError, barycentre, orthant, star_subdivision
from .hypersurface import LinearForm
from .lattice import hermite_form, hnf_member
from .marked import (ChartEnv, ExceptionalRecord, Invariant, MarkedError,
                     build_marked, chart_invariant, marked_invariant,
                     theta_ideal)
from .samuel import ChartPresentation, hs_compare, presentation


class DriverError(RuntimeError):
    pass


class BudgetError(DriverError):
    pass


@dataclass
class DriverChart:
    """One maximal cone of the evolving fan, with the transform's data."""

    name: str
    rays: tuple            # ray id per chart position
    x_pos: tuple[int, ...]  # chart position of each vanishing-variable slot
    y_pos: tuple[int, ...]  # chart position of each invertible-variable slot
    cp: ChartPresentation

    def position_kind(self, p: int):
        if p in self.x_pos:
            return ("x", self.x_pos.index(p))
        return ("y", self.y_pos.index(p))

    def env(self, divisor_of_ray) -> ChartEnv:
        divisors = tuple(divisor_of_ray[self.rays[p]] for p in self.x_pos)
        return ChartEnv(len(self.x_pos), divisors, self.cp.solved_tails())


def _transform_triple(alpha, beta, gamma, dx, dy, kind, slot):
    """Pull one binomial through the substitution of a blowup chart and
    strip the exceptional content; dx/dy index the centre's slots."""
    deg1 = sum(alpha[i] for i in dx)
    deg2 = sum(beta[i] for i in dx) + sum(gamma[j] for j in dy)
    if kind == "x":
        ordc = min(deg1, deg2)
        a2 = list(alpha)
        b2 = list(beta)
        a2[slot] = deg1 - ordc
        b2[slot] = deg2 - ordc
        return tuple(a2), tuple(b2), tuple(gamma)
    g2 = list(gamma)
    g2[slot] = deg2 - deg1
    return tuple(alpha), tuple(beta), tuple(g2)


def _blow_driver_chart(chart: DriverChart, positions, new_rays, names,
                       budget: int):
    """Children of one chart under the blowup at the face on ``positions``.

    ``new_rays`` maps each chart position of the centre to the id of the
    ray replacing it (all equal: the barycentre ray)."""
    dx = [chart.x_pos.index(p) for p in positions if p in chart.x_pos]
    dy = [chart.y_pos.index(p) for p in positions if p in chart.y_pos]
    sb = chart.cp.basis
    out = []
    for p in positions:
        kind, slot = chart.position_kind(p)
        triples = []
        for f in sb.elements:
            triples.append(_transform_triple(f.alpha, f.beta, f.gamma,
                                             dx, dy, kind, slot))
        zero_a = tuple(0 for _ in range(sb.num_x))
        for row in sb.lattice.basis():
            triples.append(_transform_triple(zero_a, zero_a, row,
                                             dx, dy, kind, slot))
        ideal = BinomialIdeal.make(sb.num_x, sb.num_y, triples)
        cp2 = presentation(ideal, budget)
        demoted = cp2.basis.demoted
        x_pos = tuple(q for i, q in enumerate(chart.x_pos)
                      if i not in demoted)
        y_pos = chart.y_pos + tuple(chart.x_pos[i] for i in demoted)
        rays = tuple(new_rays[q] if q == p else r
                     for q, r in enumerate(chart.rays))
        out.append(DriverChart(f"{chart.name}/{names[p]}", rays,
                               x_pos, y_pos, cp2))
    return out


@dataclass
class GlobalStep:
    index: int
    phase: str                    # "samuel" or "separation"
    centre_faces: tuple           # tuple of frozensets of ray vectors
    centre_vars: dict             # chart name -> sorted variable names
    inv_tail: tuple
    mu: Fraction | None
    j_set: tuple
    max_order: int

    def to_json(self) -> str:
        def enc(t):
            return [str(x) for x in t]

        return json.dumps({
            "step": self.index,
            "phase": self.phase,
            "centres": sorted(sorted(list(map(list, f))) for f in
                              self.centre_faces),
            "centre_vars": {k: list(v) for k, v in
                            sorted(self.centre_vars.items())},
            "inv": enc(self.inv_tail),
            "mu": str(self.mu) if self.mu is not None else None,
            "j_set": sorted(map(str, self.j_set)),
            "max_order": self.max_order,
        }, sort_keys=True, separators=(",", ":"))


@dataclass
class ResolutionProblem:
    rank: int
    mode: str = "canonical-binomial"   # toric | canonical-toric | canonical-binomial
    ambient: Fan | None = None
    ideal: BinomialIdeal | None = None
    lam: LinearForm | None = None
    characteristic: int = 0
    names: tuple[str, ...] | None = None
    budget: int | None = None

    @staticmethod
    def from_ideal(ideal: BinomialIdeal, mode="canonical-binomial",
                   budget=None) -> "ResolutionProblem":
        n = ideal.num_x + ideal.num_y
        names = tuple(ideal.x_names or (f"x{i}" for i in range(ideal.num_x)))
        names += tuple(ideal.y_names or (f"y{i}" for i in range(ideal.num_y)))
        return ResolutionProblem(n, mode, orthant(n), ideal, None,
                                 ideal.characteristic, names, budget)

    @staticmethod
    def from_linear_form(lam: LinearForm, ambient: Fan | None = None,
                         mode="canonical-toric", budget=None):
        n = len(lam.values_on_basis)
        return ResolutionProblem(n, mode, ambient or orthant(n), None,
                                 LinearForm.make(lam.values_on_basis),
                                 0, tuple(f"x{i}" for i in range(n)), budget)

    def default_budget(self) -> int:
        if self.budget is not None:
            return self.budget
        total = 0
        if self.ideal is not None:
            for g in self.ideal.generators:
                total += sum(g.alpha) + sum(g.beta) + sum(abs(t) for t in g.gamma)
        if self.lam is not None:
            total += sum(abs(t) for t in self.lam.values_on_basis)
        return max(200, 10 * total * self.rank)


@dataclass
class ResolutionResult:
    steps: list[GlobalStep]
    charts: list[DriverChart]
    fan: Fan
    erecord: ExceptionalRecord
    theta_clean: bool

    def blowup_count(self) -> int:
        return len(self.steps)

    def trace_jsonl(self) -> str:
        return "\n".join(s.to_json() for s in self.steps)

    def max_order(self) -> int:
        return max((max((f.order() for f in c.cp.basis.elements), default=0)
                    for c in self.charts), default=0)


def _hypersurface_ideal(lam: LinearForm, cone: Cone) -> BinomialIdeal:
    gamma = [lam(v) for v in cone.vertices]
    if not any(gamma):
        raise DriverError("the linear form vanishes on a whole chart")
    plus = tuple(max(g, 0) for g in gamma)
    minus = tuple(max(-g, 0) for g in gamma)
    n = len(gamma)
    return BinomialIdeal.make(n, 0, [(minus, plus, ())])


def _initial_charts(problem: ResolutionProblem, budget: int):
    charts = []
    ray_vectors = {}
    divisor_of_ray = {}
    fan = problem.ambient or orthant(problem.rank)
    base_rays = {}
    for k, v in enumerate(fan.rays()):
        rid = ("base", k)
        base_rays[v] = rid
        ray_vectors[rid] = v
        divisor_of_ray[rid] = ("orig", k)
    for idx, cone in enumerate(fan.maximal_cones):
        if problem.ideal is not None:
            if len(fan.maximal_cones) > 1:
                raise DriverError("explicit ideals are supported on the "
                                  "affine ambient only; use a linear form "
                                  "for subdivided fans")
            std = orthant(problem.rank).maximal_cones[0]
            if cone != std:
                raise DriverError("explicit ideals need the standard chart")
            ideal = problem.ideal
        else:
            ideal = _hypersurface_ideal(problem.lam, cone)
        cp = presentation(ideal, budget)
        n = problem.rank
        demoted = cp.basis.demoted
        x0 = [p for p in range(ideal.num_x)]
        x_pos = tuple(p for i, p in enumerate(x0) if i not in demoted)
        y_pos = tuple(range(ideal.num_x, n)) + tuple(x0[i] for i in demoted)
        rays = tuple(base_rays[v] for v in cone.vertices)
        name = f"U{idx}" if len(fan.maximal_cones) > 1 else "U"
        charts.append(DriverChart(name, rays, x_pos, y_pos, cp))
    return charts, ray_vectors, divisor_of_ray


def _initial_erecord(problem: ResolutionProblem) -> ExceptionalRecord:
    if problem.mode == "toric":
        return ExceptionalRecord(tuple(("orig", k)
                                       for k in range(problem.rank)))
    if problem.mode in ("canonical-toric", "canonical-binomial"):
        return ExceptionalRecord(())
    raise DriverError(f"unknown mode {problem.mode!r}")


def _cmp_heads(h1, h2) -> str:
    return hs_compare(h1, h2)


def _pick_maximal_heads(scored):
    """Charts whose Hilbert-Samuel head is the maximum; heads must be
    pairwise comparable where it matters."""
    best = []
    for item in scored:
        if not best:
            best = [item]
            continue
        verdict = _cmp_heads(item[1], best[0][1])
        if verdict == "incomparable":
            raise DriverError("incomparable Hilbert-Samuel maxima")
        if verdict == "ge":
            best = [item]
        elif verdict == "equal":
            best.append(item)
    return best


def _face_of(chart: DriverChart, centre_slots) -> frozenset:
    positions = [chart.x_pos[s] for s in centre_slots]
    return frozenset(chart.rays[p] for p in positions)


def _cofacial(charts, rays_a, rays_b) -> bool:
    union = rays_a | rays_b
    return any(union <= set(c.rays) for c in charts)


def _invariant_lt(a: Invariant, b: Invariant) -> bool:
    """Strict comparison of full invariants (head, tail, multiplicity)."""
    if a.head is not None and b.head is not None:
        verdict = hs_compare(a.head, b.head)
        if verdict == "le":
            return True
        if verdict in ("ge", "incomparable"):
            return False
    ka = a.decrease_key()
    kb = b.decrease_key()
    return ka < kb


def _execute_blowup(charts, groups, ray_vectors, divisor_of_ray, names,
                    erecord, step_index, budget):
    """Star-subdivide at every face in ``groups`` (disjoint ray sets); all
    the new rays of one step share one divisor id."""
    new_div = ("exc", step_index)
    erecord = erecord.with_new(new_div)
    faces = sorted(groups, key=sorted)
    for gi, face_rays in enumerate(faces):
        rid = ("exc", step_index, gi)
        vec = barycentre([ray_vectors[r] for r in face_rays])
        ray_vectors[rid] = vec
        divisor_of_ray[rid] = new_div
        next_charts = []
        for c in charts:
            if not set(face_rays) <= set(c.rays):
                next_charts.append(c)
                continue
            positions = [p for p, r in enumerate(c.rays) if r in face_rays]
            new_rays = {p: rid for p in positions}
            next_charts.extend(_blow_driver_chart(c, positions, new_rays,
                                                  names, budget))
        charts = next_charts
    return charts, erecord


def _fan_of(charts, ray_vectors, rank) -> Fan:
    cones = []
    for c in charts:
        cones.append(Cone.make([ray_vectors[r] for r in c.rays], rank))
    return Fan.make(cones, rank, check=False)


def resolve_embedded(problem: ResolutionProblem,
                     collect_assertions: bool = True) -> ResolutionResult:
    """Resolution loop: maximal Samuel stratum first, separation second.

    Every global step strictly decreases the selected (invariant,
    multiplicity, divisor-set) value; a failure of that decrease, of
    per-chart semicontinuity, or of centre consistency raises immediately.
    """
    budget = problem.default_budget()
    names = problem.names or tuple(f"x{i}" for i in range(problem.rank))
    charts, ray_vectors, divisor_of_ray = _initial_charts(problem, budget)
    erecord = _initial_erecord(problem)
    steps: list[GlobalStep] = []
    prev_key = None

    while True:
        singular = [c for c in charts if not c.cp.is_smooth()]
        if not singular:
            break
        if len(steps) >= budget:
            raise BudgetError("global step budget exceeded in the Samuel phase")
        scored = [(c, c.cp.hilbert_samuel()) for c in singular]
        top = _pick_maximal_heads(scored)
        ranked = []
        for c, head in top:
            env = c.env(divisor_of_ray)
            canonical = problem.mode != "toric"
            inv, centre = chart_invariant(c.cp, env, erecord, canonical)
            ranked.append((c, inv, centre))
        best_key = max((inv.tail, erecord.j_key(inv.j_set))
                       for _, inv, _ in ranked)
        winners = [(c, inv, centre) for c, inv, centre in ranked
                   if (inv.tail, erecord.j_key(inv.j_set)) == best_key]
        inv0 = winners[0][1]
        key_now = (inv0.tail, inv0.mu if inv0.mu is not None else Fraction(0))
        groups = {}
        centre_vars = {}
        for c, _, centre in winners:
            face = _face_of(c, sorted(centre))
            groups.setdefault(face, []).append(c.name)
            centre_vars[c.name] = tuple(names[c.x_pos[s]]
                                        for s in sorted(centre))
        faces = sorted(groups, key=sorted)
        for i, a in enumerate(faces):
            for b in faces[i + 1:]:
                if _cofacial(charts, a, b):
                    raise DriverError("winning charts prescribe inconsistent "
                                      "centres")
        max_order = max(max(f.order() for f in c.cp.basis.elements)
                        for c, _ in scored)
        old_names = {c.name for c, _, _ in winners}
        old_invs = {c.name: inv for c, inv, _ in winners}
        charts, erecord = _execute_blowup(charts, faces, ray_vectors,
                                          divisor_of_ray, names, erecord,
                                          len(steps), budget)
        steps.append(GlobalStep(len(steps), "samuel", tuple(
            frozenset(ray_vectors[r] for r in f) for f in faces),
            centre_vars, inv0.tail, inv0.mu,
            tuple(sorted(map(str, inv0.j_set))), max_order))
        if collect_assertions:
            _assert_children_dropped(charts, old_names, old_invs,
                                     divisor_of_ray, erecord,
                                     problem.mode != "toric")
        if prev_key is not None and not key_now < prev_key:
            raise AssertionError(
                f"global invariant failed to decrease: {key_now} vs {prev_key}")
        prev_key = key_now

    theta = [d for d in erecord.order if d[0] == "exc"]
    charts, erecord, steps = _separation_pass(problem, charts, erecord,
                                              theta, ray_vectors,
                                              divisor_of_ray, names, steps,
                                              budget)
    fan = _fan_of(charts, ray_vectors, problem.rank)
    clean = _theta_clean(charts, divisor_of_ray, theta_set=set(
        d for d in erecord.order if d[0] == "exc"))
    return ResolutionResult(steps, charts, fan, erecord, clean)


def _assert_children_dropped(charts, parent_names, parent_invs,
                             divisor_of_ray, erecord, canonical):
    """Every chart spawned from a winning chart must carry a strictly
    smaller (invariant, multiplicity)."""
    for c in charts:
        base = c.name.rsplit("/", 1)[0]
        if base not in parent_names:
            continue
        if c.cp.is_smooth():
            continue
        env = c.env(divisor_of_ray)
        inv, _ = chart_invariant(c.cp, env, erecord, canonical)
        if not _invariant_lt(inv, parent_invs[base]):
            raise AssertionError(
                f"invariant did not drop in chart {c.name}")


def _tangent_members(chart: DriverChart, divisor_of_ray, theta_set):
    """Recorded hypersurfaces meeting the chart's transform in something
    other than a coordinate subspace of the minimal embedding: solved
    variables cutting a recorded divisor whose tail has order >= 2."""
    tails = chart.cp.solved_tails()
    out = []
    for slot in chart.cp.solved:
        ray = chart.rays[chart.x_pos[slot]]
        if divisor_of_ray[ray] in theta_set and sum(tails[slot]) >= 2:
            out.append(slot)
    return tuple(out)


def _separation_pass(problem, charts, erecord, theta, ray_vectors,
                     divisor_of_ray, names, steps, budget):
    """Blow up until no recorded divisor is tangent to the transform."""
    theta_set = set(theta)
    canonical = problem.mode != "toric"
    prev_key = None
    while True:
        work = []
        for c in charts:
            members = _tangent_members(c, divisor_of_ray, theta_set)
            if members:
                work.append((c, members))
        if not work:
            return charts, erecord, steps
        if len(steps) >= budget:
            raise BudgetError("global step budget exceeded in the "
                              "separation phase")
        s_max = max(len(m) for _, m in work)
        ranked = []
        for c, members in work:
            if len(members) != s_max:
                continue
            env = c.env(divisor_of_ray)
            h = theta_ideal(c.cp, members)
            inv, centre = marked_invariant(h, env, erecord, canonical)
            ranked.append((c, inv, centre))
        best_key = max((inv.tail, erecord.j_key(inv.j_set))
                       for _, inv, _ in ranked)
        winners = [(c, inv, centre) for c, inv, centre in ranked
                   if (inv.tail, erecord.j_key(inv.j_set)) == best_key]
        inv0 = winners[0][1]
        key_now = (s_max, inv0.tail,
                   inv0.mu if inv0.mu is not None else Fraction(0))
        if prev_key is not None and not key_now < prev_key:
            raise AssertionError(
                f"separation invariant failed to decrease: {key_now} vs "
                f"{prev_key}")
        prev_key = key_now
        groups = {}
        centre_vars = {}
        for c, _, centre in winners:
            face = _face_of(c, sorted(centre))
            groups.setdefault(face, []).append(c.name)
            centre_vars[c.name] = tuple(names[c.x_pos[s]]
                                        for s in sorted(centre))
        faces = sorted(groups, key=sorted)
        for i, a in enumerate(faces):
            for b in faces[i + 1:]:
                if _cofacial(charts, a, b):
                    raise DriverError("inconsistent separation centres")
        charts, erecord = _execute_blowup(charts, faces, ray_vectors,
                                          divisor_of_ray, names, erecord,
                                          len(steps), budget)
        steps.append(GlobalStep(len(steps), "separation", tuple(
            frozenset(ray_vectors[r] for r in f) for f in faces),
            centre_vars, inv0.tail, inv0.mu,
            tuple(sorted(map(str, inv0.j_set))), 1))


def _theta_clean(charts, divisor_of_ray, theta_set) -> bool:
    """Final normal-crossings surrogate: in every chart the transform is
    smooth and every recorded divisor either misses it (invertible or
    absent variable) or cuts it in a coordinate subspace (free variable, or
    solved variable with a tail of order at most one)."""
    for c in charts:
        if not c.cp.is_smooth():
            return False
        tails = c.cp.solved_tails()
        for p, ray in enumerate(c.rays):
            if divisor_of_ray[ray] not in theta_set:
                continue
            kind, slot = c.position_kind(p)
            if kind == "y":
                continue
            if slot in c.cp.free:
                continue
            if slot in c.cp.solved and sum(tails[slot]) <= 1:
                continue
            return False
    return True


def open_restriction_check(problem: ResolutionProblem, subfan: Fan) -> bool:
    """Resolving the restriction to an open invariant piece reproduces the
    full tower filtered to the faces the piece can see."""
    if problem.lam is None:
        raise DriverError("restriction checks run on hypersurface problems")
    full = resolve_embedded(problem)
    sub_problem = ResolutionProblem.from_linear_form(
        problem.lam, subfan, problem.mode, problem.budget)
    sub = resolve_embedded(sub_problem)

    current = subfan
    expected = []
    for step in full.steps:
        kept = []
        for face in step.centre_faces:
            verts = sorted(face)
            if current.has_face(verts):
                kept.append(tuple(verts))
                current = star_subdivision(current, verts)
        if kept:
            expected.append(tuple(sorted(kept)))
    got = []
    for step in sub.steps:
        faces = [tuple(sorted(face)) for face in step.centre_faces]
        got.append(tuple(sorted(faces)))
    return expected == got


def oracle_lattice_ideal(ideal: BinomialIdeal, degree_bound: int):
    """Brute-force diagram vertices and torus lattice of a binomial ideal.

    Enumerates every exponent difference in the bounding box, keeps those
    lying in the row span of the generators' differences, and takes the
    componentwise-minimal initial exponents.  Independent of the division
    and completion machinery.
    """
    if degree_bound > 12:
        raise ValueError("oracle bound too large")
    nx, ny = ideal.num_x, ideal.num_y
    if nx > 3 or ny > 2:
        raise ValueError("oracle instance too large")
    rows = []
    for g in ideal.generators:
        rows.append([a - b for a, b in zip(g.alpha, g.beta)]
                    + [-t for t in g.gamma])
    for t in ideal.torus_basis:
        rows.append([0] * nx + list(t))
    full = hermite_form(rows)
    x_rows = hermite_form([r[:nx] for r in rows])
    torus_rows = tuple(tuple(r[nx:]) for r in full
                       if not any(r[:nx]))

    def box(n, b):
        if n == 0:
            yield ()
            return
        for rest in box(n - 1, b):
            for v in range(-b, b + 1):
                yield (v,) + rest

    candidates = []
    for d in box(nx, degree_bound):
        if not any(d):
            continue
        if not hnf_member(list(d), x_rows):
            continue
        plus = tuple(max(t, 0) for t in d)
        minus = tuple(max(-t, 0) for t in d)
        if sum(plus) > degree_bound or sum(minus) > degree_bound:
            continue
        lead = min(plus, minus, key=lambda v: (sum(v),) + v)
        candidates.append(lead)
    vertices = []
    for e in sorted(set(candidates), key=lambda v: (sum(v),) + v):
        if not any(all(x >= y for x, y in zip(e, v)) for v in vertices):
            vertices.append(e)
    return tuple(vertices), torus_rows


__all__ = [
    "BudgetError", "DriverChart", "DriverError", "GlobalStep",
    "ResolutionProblem", "ResolutionResult", "oracle_lattice_ideal",
    "open_restriction_check", "resolve_embedded",
]
