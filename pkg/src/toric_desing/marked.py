"""Marked monomial ideals and the resolution invariant.

A marked ideal in a chart is (P, H, e): a coordinate subspace P of the
minimal embedding, a monomial ideal generated on variables that do not cut
P, and a positive mark.  Its support is where the order of H on P reaches
the mark.  Resolution proceeds by three moves: factor out the divisorial
part and pass to the companion ideal, descend to the maximal-contact
subspace spanned by the essential variables, or, in the purely divisorial
case, blow up support components directly.  The same recursion computes
the invariant sequence whose strict lexicographic decrease certifies
termination, the rational multiplicity used in the divisorial case, and
the set of recorded divisors through the chosen centre.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from .samuel import ChartPresentation, HilbertSamuel

INF = float("inf")


class MarkedError(ValueError):
    pass


@dataclass(frozen=True)
class MarkedMonomialIdeal:
    """(P, H, e) in one chart; ``gens`` empty encodes the zero ideal."""

    nslots: int
    def_p: frozenset[int]
    gens: tuple[tuple[int, ...], ...]
    e: Fraction

    @staticmethod
    def make(nslots, def_p, gens, e) -> "MarkedMonomialIdeal":
        e = Fraction(e)
        if e <= 0:
            raise MarkedError("the mark must be positive")
        gs = []
        for g in gens:
            g = tuple(int(t) for t in g)
            if len(g) != nslots:
                raise MarkedError("generator has wrong length")
            if any(t < 0 for t in g):
                raise MarkedError("negative exponent in a generator")
            if any(g[i] for i in def_p):
                raise MarkedError("generator meets the defining set of P")
            gs.append(g)
        return MarkedMonomialIdeal(nslots, frozenset(def_p), tuple(gs), e)

    @property
    def zero(self) -> bool:
        return not self.gens

    def order_at_point(self) -> Fraction:
        """Order of H at the distinguished point (all variables zero)."""
        if self.zero:
            return INF
        return Fraction(min(sum(g) for g in self.gens))

    def scaled(self, factor: Fraction) -> tuple[tuple[int, ...], ...]:
        out = []
        for g in self.gens:
            row = []
            for t in g:
                v = t * factor
                if v.denominator != 1:
                    raise MarkedError("scaling produced a fractional exponent")
                row.append(int(v))
            out.append(tuple(row))
        return tuple(out)


@dataclass(frozen=True)
class ChartEnv:
    """Per-chart variable metadata needed by the marked machinery."""

    nslots: int
    divisors: tuple  # divisor id per slot
    solved_tails: dict[int, tuple[int, ...]] = field(default_factory=dict)

    def forced_solved(self, slots) -> frozenset[int]:
        """Solved variables that vanish identically on the subspace cut by
        ``slots``: their tail monomial contains one of those variables."""
        base = set(slots)
        out = set()
        for s, tail in self.solved_tails.items():
            if s in base:
                continue
            if any(tail[j] for j in base):
                out.add(s)
        return frozenset(out)


@dataclass(frozen=True)
class ExceptionalRecord:
    """Recorded divisors in a fixed total order (oldest first)."""

    order: tuple = ()

    def with_new(self, div) -> "ExceptionalRecord":
        return ExceptionalRecord(self.order + (div,))

    def j_key(self, j_set) -> tuple[int, ...]:
        return tuple(1 if d in j_set else 0 for d in self.order)

    def __contains__(self, div) -> bool:
        return div in self.order


@dataclass(frozen=True)
class Invariant:
    """(head, tail) with the rational multiplicity and divisor set."""

    head: HilbertSamuel | None
    tail: tuple
    mu: Fraction | None
    j_set: frozenset

    def tail_key(self):
        return self.tail

    def decrease_key(self):
        return (self.tail, self.mu if self.mu is not None else Fraction(0))


def _minimal_subsets(rows, thresholds, universe):
    universe = sorted(universe)
    out = []
    for k in range(len(universe) + 1):
        for sub in combinations(universe, k):
            if any(sum(row[j] for j in sub) < t
                   for row, t in zip(rows, thresholds)):
                continue
            if any(set(prev) <= set(sub) for prev in out):
                continue
            out.append(tuple(sub))
    return out


def support_components(h: MarkedMonomialIdeal) -> list[tuple[int, ...]]:
    """Minimal variable subsets cutting the components of supp(H, e); each
    includes the defining set of P.  The zero ideal is supported on P."""
    if h.zero:
        return [tuple(sorted(h.def_p))]
    universe = sorted({j for g in h.gens for j in range(h.nslots) if g[j]})
    subs = _minimal_subsets(h.gens, [h.e] * len(h.gens), universe)
    return sorted(tuple(sorted(set(sub) | h.def_p)) for sub in subs)


def transform_marked(h: MarkedMonomialIdeal, delta, chart: int):
    """Transform under the blowup at the subspace on ``delta``, in the
    chart of ``chart``: pull back and strip the mark off the new divisor.

    Returns None when the strict transform of P misses the chart (the
    chart variable cuts P itself)."""
    dset = set(delta)
    if chart not in dset:
        raise MarkedError("chart variable must belong to the centre")
    if chart in h.def_p:
        return None
    if h.zero:
        return h
    if h.e.denominator != 1:
        raise MarkedError("transform needs an integer mark")
    e = int(h.e)
    new = []
    for g in h.gens:
        total = sum(g[j] for j in dset)
        if total < e:
            raise MarkedError("centre not permissible: generator order "
                              f"{total} below the mark {e}")
        row = list(g)
        row[chart] = total - e
        new.append(tuple(row))
    return MarkedMonomialIdeal.make(h.nslots, h.def_p, new, h.e)


def sum_marked(h1: MarkedMonomialIdeal, h2: MarkedMonomialIdeal):
    """Sum with generators scaled by the opposite marks; the support of the
    sum is the intersection of the supports.  A zero summand absorbs."""
    if h1.def_p != h2.def_p or h1.nslots != h2.nslots:
        raise MarkedError("summands live on different subspaces")
    e = h1.e * h2.e
    if h1.zero or h2.zero:
        return MarkedMonomialIdeal.make(h1.nslots, h1.def_p, (), e)
    gens = h1.scaled(h2.e) + h2.scaled(h1.e)
    return MarkedMonomialIdeal.make(h1.nslots, h1.def_p, gens, e)


def _allowed_divisor_slots(h, env: ChartEnv, erecord: ExceptionalRecord,
                           canonical: bool):
    slots = range(h.nslots)
    if canonical:
        return [j for j in slots if env.divisors[j] in erecord]
    return list(slots)


def factor_dq(h: MarkedMonomialIdeal, env: ChartEnv,
              erecord: ExceptionalRecord, canonical: bool):
    """Split H = D * Q with D the divisorial content on the permitted
    divisors; returns (D exponent vector, Q as a marked ideal carrying the
    multiplicity nu, nu)."""
    if h.zero:
        raise MarkedError("zero ideal has no divisorial factorization")
    allowed = set(_allowed_divisor_slots(h, env, erecord, canonical))
    d_vec = [0] * h.nslots
    for j in allowed:
        d_vec[j] = min(g[j] for g in h.gens)
    q_gens = [tuple(t - d_vec[j] for j, t in enumerate(g)) for g in h.gens]
    nu = Fraction(min(sum(g) for g in q_gens))
    q = MarkedMonomialIdeal.make(h.nslots, h.def_p, q_gens,
                                 nu if nu > 0 else Fraction(1))
    return tuple(d_vec), q, nu


def companion(h: MarkedMonomialIdeal, env: ChartEnv,
              erecord: ExceptionalRecord, canonical: bool):
    """Maximal-order companion: Q alone if nu >= e, else Q + D with marks
    nu and e - nu."""
    d_vec, q, nu = factor_dq(h, env, erecord, canonical)
    if nu == 0:
        raise MarkedError("companion of a purely divisorial ideal")
    if nu >= h.e:
        out = MarkedMonomialIdeal.make(h.nslots, h.def_p, q.gens, nu)
    else:
        d_part = MarkedMonomialIdeal.make(h.nslots, h.def_p, (d_vec,),
                                          h.e - nu)
        out = sum_marked(q, d_part)
    if out.order_at_point() > out.e:
        raise MarkedError("companion failed to have maximal order")
    return out


def maximal_contact_descent(h: MarkedMonomialIdeal):
    """Descend to the subspace of the essential variables of the degree-e
    generators; terms whose residual mark is nonpositive impose nothing and
    are dropped, possibly down to the zero ideal."""
    if h.zero:
        raise MarkedError("nothing to descend")
    if h.order_at_point() != h.e:
        raise MarkedError("descent needs a maximal-order ideal with "
                          "nonempty support")
    essential = sorted({j for g in h.gens if Fraction(sum(g)) == h.e
                        for j in range(h.nslots) if g[j]})
    ess = set(essential)
    def_q = frozenset(h.def_p | ess)
    kept = []
    for g in h.gens:
        eta = sum(t for j, t in enumerate(g) if j in ess)
        mark = h.e - eta
        if mark <= 0:
            continue
        zeta = tuple(0 if j in ess else t for j, t in enumerate(g))
        kept.append((zeta, mark))
    if not kept:
        return MarkedMonomialIdeal.make(h.nslots, def_q, (), 1), essential
    e_new = Fraction(1)
    for _, m in kept:
        e_new *= m
    gens = []
    for zeta, m in kept:
        factor = e_new / m
        row = []
        for t in zeta:
            v = t * factor
            if v.denominator != 1:
                raise MarkedError("descent produced a fractional exponent")
            row.append(int(v))
        gens.append(tuple(row))
    return MarkedMonomialIdeal.make(h.nslots, def_q, gens, e_new), essential


def _component_j_set(slots, env: ChartEnv, erecord: ExceptionalRecord):
    return frozenset(env.divisors[s] for s in slots
                     if env.divisors[s] in erecord)


def _centre_of_subspace(slots, env: ChartEnv) -> frozenset[int]:
    """Smallest coordinate subspace of the chart whose trace on the minimal
    embedding is the given subspace: add every solved variable forced to
    vanish there."""
    return frozenset(slots) | env.forced_solved(slots)


def marked_invariant(h: MarkedMonomialIdeal, env: ChartEnv,
                     erecord: ExceptionalRecord, canonical: bool):
    """The recursive invariant tail, multiplicity, divisor set and centre.

    Cases: zero ideal (tail ends with infinity, blow up P itself); purely
    divisorial (tail ends with 0, blow the support component with the
    largest divisor set); maximal order (descend, prepending codim - 1
    ones); otherwise pass to the companion, prepending nu / e.
    """
    if h.zero:
        centre = _centre_of_subspace(h.def_p, env)
        return Invariant(None, (INF,), None, frozenset()), centre
    d_vec, q, nu = factor_dq(h, env, erecord, canonical)
    if nu == 0:
        # purely divisorial: components of the support of (D, e)
        principal = MarkedMonomialIdeal.make(h.nslots, h.def_p, (d_vec,), h.e)
        comps = support_components(principal)
        if not comps:
            raise MarkedError("divisorial case with empty support")
        best = None
        for comp in comps:
            centre = _centre_of_subspace(comp, env)
            j = _component_j_set(centre, env, erecord)
            key = erecord.j_key(j)
            if best is None or key > best[0]:
                best = (key, j, centre)
            elif key == best[0]:
                raise MarkedError("divisor record cannot separate two "
                                  "support components")
        mu = Fraction(sum(d_vec)) / h.e
        return Invariant(None, (Fraction(0),), mu, best[1]), best[2]
    if h.order_at_point() <= h.e:
        if h.order_at_point() < h.e:
            raise MarkedError("support is empty: nothing to resolve")
        c, essential = maximal_contact_descent(h)
        sub, centre = marked_invariant(c, env, erecord, canonical)
        ones = (Fraction(1),) * (len(essential) - 1)
        return Invariant(None, ones + sub.tail, sub.mu, sub.j_set), centre
    g = companion(h, env, erecord, canonical)
    sub, centre = marked_invariant(g, env, erecord, canonical)
    return Invariant(None, (nu / h.e,) + sub.tail, sub.mu, sub.j_set), centre


def build_marked(cp: ChartPresentation) -> MarkedMonomialIdeal:
    """Marked ideal of a chart presentation: P is cut by the essential
    variables inside the minimal embedding; each order >= 2 element
    contributes the non-essential part of its tail with residual mark."""
    sb = cp.basis
    essential = set(cp.essential)
    if not essential:
        raise MarkedError("smooth chart has no marked ideal")
    pieces = []
    for f in sb.elements:
        if f.order() < 2:
            continue
        xi = sum(e for j, e in enumerate(f.beta) if j in essential)
        mark = f.order() - xi
        if mark <= 0:
            # the tail vanishes on P to full order: no condition
            continue
        eta = tuple(0 if j in essential else e for j, e in enumerate(f.beta))
        pieces.append((eta, Fraction(mark)))
    def_p = frozenset(essential)
    if not pieces:
        return MarkedMonomialIdeal.make(sb.num_x, def_p, (), 1)
    e = Fraction(1)
    for _, m in pieces:
        e *= m
    gens = []
    for eta, m in pieces:
        factor = e / m
        gens.append(tuple(int(t * factor) for t in eta))
    return MarkedMonomialIdeal.make(sb.num_x, def_p, gens, e)


def theta_ideal(cp: ChartPresentation, member_slots) -> MarkedMonomialIdeal:
    """Mark-one ideal whose resolution separates a smooth chart from the
    listed coordinate hypersurfaces: a solved member contributes its tail
    monomial, a free member contributes itself."""
    sb = cp.basis
    if not cp.is_smooth():
        raise MarkedError("separation pass needs a smooth chart")
    tails = cp.solved_tail_support()
    gens = []
    for s in member_slots:
        if s in tails:
            f = next(f for f in sb.elements
                     if f.order() == 1 and f.alpha[s])
            gens.append(f.beta)
        else:
            gens.append(tuple(1 if j == s else 0 for j in range(sb.num_x)))
    return MarkedMonomialIdeal.make(sb.num_x, frozenset(), gens, 1)


def chart_invariant(cp: ChartPresentation, env: ChartEnv,
                    erecord: ExceptionalRecord, canonical: bool):
    """Full invariant of a singular chart: the Hilbert-Samuel head, then
    codim(P in N) - 1 ones, then the marked tail."""
    h = build_marked(cp)
    sub, centre = marked_invariant(h, env, erecord, canonical)
    ones = (Fraction(1),) * (len(cp.essential) - 1)
    inv = Invariant(cp.hilbert_samuel(), ones + sub.tail, sub.mu, sub.j_set)
    return inv, centre


@dataclass
class MChart:
    """One chart of the ambient in a marked-ideal resolution tree."""

    rays: tuple[int, ...]
    env: ChartEnv
    marked: MarkedMonomialIdeal
    name: str = "root"
    tcount: int = 0

    def resolved(self) -> bool:
        h = self.marked
        return (not h.zero) and h.order_at_point() < h.e


@dataclass
class MarkedStep:
    centre_rays: frozenset
    centre_slots_by_chart: dict
    mode: str  # "blowup" or "relabel"
    inv_tail: tuple
    mu: Fraction | None
    j_set: frozenset


def _transform_env(env: ChartEnv, delta, chart: int, new_div) -> ChartEnv:
    divisors = list(env.divisors)
    divisors[chart] = new_div
    dset = set(delta)
    tails = {}
    for s, tail in env.solved_tails.items():
        if s == chart:
            continue
        row = list(tail)
        row[chart] += sum(tail[j] for j in dset if j != chart)
        if s in dset:
            total = sum(tail[j] for j in dset)
            if total < 1:
                raise MarkedError("solved variable in the centre has a tail "
                                  "missing the centre")
            row[chart] -= 1
        tails[s] = tuple(row)
    return ChartEnv(env.nslots, tuple(divisors), tails)


def _blow_mini(charts, centre_rays, new_div):
    """Apply one blowup (or relabel, for a single ray) to every chart that
    sees all the centre rays; returns the new chart list."""
    out = []
    rays = set(centre_rays)
    for c in charts:
        if not rays <= set(c.rays):
            out.append(c)
            continue
        slots = [i for i, r in enumerate(c.rays) if r in rays]
        dead = set(c.marked.def_p) | c.env.forced_solved(c.marked.def_p)
        if len(slots) == 1:
            # codimension-one centre: the ambient is untouched; the marked
            # ideal sheds the divisor, or is done if the divisor carries P
            i = slots[0]
            if i in dead:
                continue
            h2 = transform_marked(c.marked, slots, i)
            out.append(MChart(c.rays, c.env, h2, c.name, c.tcount + 1))
            continue
        for i in slots:
            if i in dead:
                continue
            h2 = transform_marked(c.marked, slots, i)
            if h2 is None:
                continue
            env2 = _transform_env(c.env, slots, i, new_div)
            rays2 = tuple(new_div if k == i else r
                          for k, r in enumerate(c.rays))
            out.append(MChart(rays2, env2, h2,
                              f"{c.name}/{i}", c.tcount + 1))
    return out


def resolve_marked(h: MarkedMonomialIdeal, env: ChartEnv,
                   erecord: ExceptionalRecord = ExceptionalRecord(),
                   canonical: bool = True, budget: int = 10000,
                   _bound_check=None):
    """Resolve a marked ideal over the chart tree it spawns.

    Each round evaluates the invariant in every live chart, picks the
    largest (tail, divisor-set) value, and blows up the prescribed centre
    in all charts that see it; distinct centres at the same value must be
    disjoint.  The (tail, multiplicity) pair of the running maximum
    strictly decreases, which is asserted and bounds the loop.
    """
    charts = [MChart(tuple(("base", i) for i in range(h.nslots)), env, h)]
    steps: list[MarkedStep] = []
    prev_key = None
    while True:
        live = [c for c in charts if not c.resolved()]
        if not live:
            return steps
        if len(steps) >= budget:
            raise MarkedError("marked resolution exceeded its step budget")
        scored = []
        for c in live:
            inv, centre = marked_invariant(c.marked, c.env, erecord,
                                           canonical)
            scored.append((c, inv, centre))
        best_key = max((inv.tail, erecord.j_key(inv.j_set))
                       for _, inv, _ in scored)
        winners = [(c, inv, centre) for c, inv, centre in scored
                   if (inv.tail, erecord.j_key(inv.j_set)) == best_key]
        inv0 = winners[0][1]
        key_now = (inv0.tail, inv0.mu if inv0.mu is not None else Fraction(0))
        if prev_key is not None and not key_now < prev_key:
            raise AssertionError(
                f"invariant failed to decrease: {key_now} vs {prev_key}")
        prev_key = key_now
        centre_groups: dict[frozenset, dict] = {}
        for c, _, centre in winners:
            rays = frozenset(c.rays[i] for i in centre)
            centre_groups.setdefault(rays, {})[c.name] = tuple(sorted(centre))
        groups = sorted(centre_groups, key=sorted)
        for i, a in enumerate(groups):
            for b in groups[i + 1:]:
                if any(a | b <= set(c.rays) for c in charts):
                    raise AssertionError(
                        "charts prescribe overlapping, non-identical centres")
        for rays in groups:
            mode = "relabel" if len(rays) == 1 else "blowup"
            new_div = ("exc", len(steps))
            if mode == "blowup":
                erecord = erecord.with_new(new_div)
            steps.append(MarkedStep(rays, centre_groups[rays], mode,
                                    inv0.tail, inv0.mu, inv0.j_set))
            charts = _blow_mini(charts, rays, new_div)
            if _bound_check is not None:
                for c in charts:
                    _bound_check(c)
    return steps


def resolve_monomial_case(h: MarkedMonomialIdeal, env: ChartEnv,
                          erecord: ExceptionalRecord = ExceptionalRecord(),
                          budget: int = 10000):
    """Resolve a purely divisorial marked ideal by blowing up support
    components; every chart sees at most |omega| - e + 1 steps."""
    if len(h.gens) != 1:
        raise MarkedError("the divisorial case takes a principal ideal")
    if h.e.denominator != 1:
        raise MarkedError("integer mark required")
    limit = sum(h.gens[0]) - int(h.e) + 1

    def check(c: MChart):
        if c.tcount > limit:
            raise AssertionError(
                f"chart {c.name} used {c.tcount} steps, above the bound {limit}")

    return resolve_marked(h, env, erecord, canonical=False, budget=budget,
                          _bound_check=check)


def theta_resolve(cp: ChartPresentation, member_slots, env: ChartEnv,
                  erecord: ExceptionalRecord = ExceptionalRecord(),
                  canonical: bool = False, budget: int = 10000):
    """Separate a smooth chart from the listed coordinate hypersurfaces by
    resolving the associated mark-one ideal."""
    member_slots = list(member_slots)
    if not member_slots:
        return []
    h = theta_ideal(cp, member_slots)
    return resolve_marked(h, env, erecord, canonical, budget)


__all__ = [
    "INF", "ChartEnv", "ExceptionalRecord", "Invariant", "MChart",
    "MarkedError", "MarkedMonomialIdeal", "MarkedStep", "build_marked",
    "chart_invariant", "companion", "factor_dq", "marked_invariant",
    "maximal_contact_descent", "resolve_marked", "resolve_monomial_case",
    "sum_marked", "support_components", "theta_ideal", "theta_resolve",
    "transform_marked",
]
