"""Multiplicity data: equimultiple loci, Hilbert-Samuel functions, and the
chart-level blowup of a standard basis.

The Hilbert-Samuel counting function of a monomial staircase is evaluated
exactly by inclusion-exclusion over vertex subsets; comparison of two such
functions combines a pointwise window with an exact analysis of the
polynomial tails, so verdicts never rely on sampling alone.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb

from .binomial import (Binomial, BinomialError, BinomialIdeal, StandardBasis,
                       dominates, exp_key, pth_power_test, standard_basis,
                       vec_add, vec_sub)


@dataclass(frozen=True)
class NotApplicable:
    """Equimultiple locus is not cut out by the vanishing variables: the
    binomial is a d-th power with d a power of the characteristic."""

    char_p: int
    d: int


def _minimal_threshold_subsets(weight_rows, thresholds, universe):
    """Minimal subsets S of ``universe`` with sum_{j in S} row[j] >= t
    simultaneously for every (row, t) pair."""
    universe = sorted(universe)
    out = []
    for k in range(len(universe) + 1):
        for sub in combinations(universe, k):
            if any(sum(row[j] for j in sub) < t
                   for row, t in zip(weight_rows, thresholds)):
                continue
            if any(set(prev) <= set(sub) for prev in out):
                continue
            out.append(sub)
    return out


def equimultiple_locus(alpha, beta, char_p: int = 0, unit_gamma=()):
    """Locus of points where w^gamma u^alpha - v^beta keeps its order.

    ``alpha`` maps the u-variables (all positive exponents), ``beta`` the
    v-variables, ``unit_gamma`` the w-exponents on variables invertible at
    the base point.  Components are returned as index sets (u, then v
    offset by len(alpha)).  In positive characteristic the formula is only
    valid when the binomial is not a d-th power with d a power of p; that
    failure mode is reported explicitly instead of a wrong locus.
    """
    alpha = tuple(int(a) for a in alpha)
    beta = tuple(int(b) for b in beta)
    if any(a <= 0 for a in alpha):
        raise ValueError("all order-side exponents must be positive")
    d = sum(alpha)
    if d < 2:
        raise ValueError("order-1 loci are handled by the solved variables")
    if char_p:
        probe = Binomial(alpha, beta, tuple(unit_gamma))
        if pth_power_test(probe, char_p, d):
            return NotApplicable(char_p, d)
    u_part = tuple(range(len(alpha)))
    comps = _minimal_threshold_subsets([beta], [d], range(len(beta)))
    return [tuple(u_part) + tuple(len(alpha) + j for j in sub)
            for sub in comps]


@dataclass(frozen=True)
class HilbertSamuel:
    """Counting function of a staircase: number of lattice points outside
    it of total degree at most l, in ``ambient`` variables.

    ``order_one`` is how many staircase vertices are unit vectors (each
    removes one free variable); ``vertices`` are the remaining vertices,
    written on their own coordinate block.
    """

    ambient: int
    order_one: int
    vertices: tuple[tuple[int, ...], ...]

    @staticmethod
    def make(ambient, order_one, vertices) -> "HilbertSamuel":
        verts = tuple(sorted((tuple(v) for v in vertices), key=exp_key))
        for v in verts:
            if sum(v) < 2:
                raise ValueError("unit vertices belong in order_one")
        return HilbertSamuel(ambient, order_one, verts)

    @property
    def effective_dim(self) -> int:
        return self.ambient - self.order_one

    def __call__(self, l: int) -> int:
        return hilbert_samuel_eval(self, l)

    def max_join_degree(self) -> int:
        if not self.vertices:
            return 0
        join = [0] * len(self.vertices[0])
        for v in self.vertices:
            join = [max(a, b) for a, b in zip(join, v)]
        return sum(join)


def _count_at_least(m: int, bound: int, n: int) -> int:
    """#{a in N^n : a >= given vector of degree m, |a| <= bound}."""
    if bound - m < 0:
        return 0
    return comb(n + bound - m, n)


def hilbert_samuel_eval(hs: HilbertSamuel, l: int) -> int:
    """Inclusion-exclusion over vertex subsets, with joins cached."""
    if l < 0:
        raise ValueError("negative degree")
    n = hs.effective_dim
    total = comb(n + l, n)
    verts = hs.vertices
    for k in range(1, len(verts) + 1):
        for sub in combinations(verts, k):
            join = [0] * len(verts[0])
            for v in sub:
                join = [max(a, b) for a, b in zip(join, v)]
            total += (-1) ** k * _count_at_least(sum(join), l, n)
    return total


def _tail_polynomial(hs: HilbertSamuel, start: int):
    """Coefficients (Fraction, ascending) of the polynomial equal to the
    counting function for l >= start, in the shifted variable t = l - start."""
    n = hs.effective_dim
    pts = [hilbert_samuel_eval(hs, start + t) for t in range(n + 1)]
    return _interpolate(pts)


def _interpolate(values):
    """Exact coefficients of the polynomial of degree < len(values) taking
    the given values at t = 0, 1, 2, ..."""
    k = len(values)
    coeffs = [Fraction(0)] * k
    # Newton forward differences, then expand the binomial basis
    diffs = [Fraction(v) for v in values]
    newton = []
    for i in range(k):
        newton.append(diffs[0])
        diffs = [diffs[j + 1] - diffs[j] for j in range(len(diffs) - 1)]
    basis = [Fraction(1)]  # C(t, 0)
    fact = 1
    for i in range(k):
        for j, c in enumerate(basis):
            coeffs[j] += newton[i] * c
        # C(t, i+1) = C(t, i) * (t - i) / (i + 1)
        fact *= i + 1
        nxt = [Fraction(0)] * (len(basis) + 1)
        for j, c in enumerate(basis):
            nxt[j + 1] += c
            nxt[j] += c * (-i)
        basis = [c / (i + 1) for c in nxt]
    return coeffs


def _poly_nonneg_on_ray(coeffs) -> bool:
    """True iff the polynomial is >= 0 at every nonnegative integer."""
    while coeffs and coeffs[-1] == 0:
        coeffs = coeffs[:-1]
    if not coeffs:
        return True
    lead = coeffs[-1]
    if lead < 0:
        return False
    # all real roots lie below the Cauchy bound; check integers up to it
    bound = 1 + max(abs(c / lead) for c in coeffs)
    t = 0
    while t <= bound:
        val = sum(c * t ** i for i, c in enumerate(coeffs))
        if val < 0:
            return False
        t += 1
    return True


def hs_compare(h1: HilbertSamuel, h2: HilbertSamuel) -> str:
    """Exact pointwise comparison: 'equal', 'le', 'ge' or 'incomparable'.

    'le' means h1(l) <= h2(l) everywhere with strict inequality somewhere.
    """
    if h1.ambient != h2.ambient:
        raise ValueError("comparing functions of different embedding dimension")
    if h1 == h2:
        return "equal"
    start = max(h1.max_join_degree(), h2.max_join_degree())
    n = h1.ambient
    some_lt = some_gt = False
    for l in range(start + n + 2):
        a, b = hilbert_samuel_eval(h1, l), hilbert_samuel_eval(h2, l)
        if a < b:
            some_lt = True
        elif a > b:
            some_gt = True
    p1 = _tail_polynomial(h1, start)
    p2 = _tail_polynomial(h2, start)
    width = max(len(p1), len(p2))
    p1 += [Fraction(0)] * (width - len(p1))
    p2 += [Fraction(0)] * (width - len(p2))
    diff = [a - b for a, b in zip(p2, p1)]
    if any(diff):
        tail_le = _poly_nonneg_on_ray(list(diff))
        tail_ge = _poly_nonneg_on_ray([-c for c in diff])
        if tail_le and not tail_ge:
            some_lt = True
        if tail_ge and not tail_le:
            some_gt = True
        if not tail_le and not tail_ge:
            return "incomparable"
    if some_lt and some_gt:
        return "incomparable"
    if some_lt:
        return "le"
    if some_gt:
        return "ge"
    return "equal"


def hs_of_basis(sb: StandardBasis) -> HilbertSamuel:
    """Hilbert-Samuel function of the chart at its distinguished point.

    Unit vertices come from the solved variables and from the rank of the
    torus-relation lattice; the higher vertices are the initial exponents
    of the order >= 2 elements, restricted to the essential variables.
    """
    essential = sb.essential_slots()
    pos = {s: i for i, s in enumerate(essential)}
    verts = []
    for f in sb.elements:
        if f.order() >= 2:
            v = [0] * len(essential)
            for s, e in enumerate(f.alpha):
                if e:
                    v[pos[s]] = e
            verts.append(tuple(v))
    order_one = len(sb.solved_slots()) + len(sb.lattice.basis())
    return HilbertSamuel.make(sb.num_x + sb.num_y, order_one, verts)


@dataclass(frozen=True)
class ChartPresentation:
    """A standard basis with its variable roles in one affine chart."""

    basis: StandardBasis

    @property
    def essential(self) -> tuple[int, ...]:
        return self.basis.essential_slots()

    @property
    def solved(self) -> tuple[int, ...]:
        return self.basis.solved_slots()

    @property
    def free(self) -> tuple[int, ...]:
        return self.basis.free_slots()

    def solved_tail_support(self) -> dict[int, tuple[int, ...]]:
        out = {}
        for f in self.basis.elements:
            if f.order() == 1:
                slot = next(i for i, e in enumerate(f.alpha) if e)
                out[slot] = tuple(i for i, e in enumerate(f.beta) if e)
        return out

    def solved_tails(self) -> dict[int, tuple[int, ...]]:
        """Full tail exponent vectors of the solved variables."""
        out = {}
        for f in self.basis.elements:
            if f.order() == 1:
                slot = next(i for i, e in enumerate(f.alpha) if e)
                out[slot] = f.beta
        return out

    def hilbert_samuel(self) -> HilbertSamuel:
        return hs_of_basis(self.basis)

    def is_smooth(self) -> bool:
        return self.basis.is_smooth()


def presentation(ideal: BinomialIdeal, budget: int = 10000) -> ChartPresentation:
    return ChartPresentation(standard_basis(ideal, budget))


def samuel_stratum_components(cp: ChartPresentation) -> list[tuple[int, ...]]:
    """Minimal variable subsets cutting the components of the maximal
    Samuel stratum: all essential variables, plus enough others to absorb
    the order of every tail."""
    sb = cp.basis
    essential = cp.essential
    free = cp.free
    rows, thresholds = [], []
    for f in sb.elements:
        if f.order() < 2:
            continue
        rows.append([f.beta[j] for j in free])
        thresholds.append(f.order() - sum(f.beta[j] for j in essential))
    if not rows:
        return [tuple()]
    subs = _minimal_threshold_subsets(rows, thresholds, range(len(free)))
    return sorted(tuple(sorted(set(essential) | {free[j] for j in sub}))
                  for sub in subs)


def centre_order(binom: Binomial, delta) -> int:
    """Order of the binomial along the subspace cut by the slots ``delta``:
    the smaller of the two terms' degrees in those variables."""
    dset = set(delta)
    d1 = sum(e for i, e in enumerate(binom.alpha) if i in dset)
    d2 = sum(e for i, e in enumerate(binom.beta) if i in dset)
    return min(d1, d2)


def substitute_blowup(binom: Binomial, delta, chart: int) -> Binomial:
    """Strict transform of one binomial under the chart substitution that
    multiplies every other centre variable by the chart variable, then
    divides by the chart variable to the order along the centre."""
    dset = set(delta)
    if chart not in dset:
        raise ValueError("chart variable must belong to the centre")
    ord_c = centre_order(binom, delta)

    def push(term):
        t = list(term)
        t[chart] += sum(e for i, e in enumerate(term) if i in dset and i != chart)
        t[chart] -= ord_c
        return tuple(t)

    a, b = push(binom.alpha), push(binom.beta)
    if min(a[chart], b[chart]) < 0:
        raise BinomialError("negative exponent: centre was not permissible")
    return Binomial(a, b, binom.gamma)


class PermissibilityError(ValueError):
    pass


def check_permissible(cp: ChartPresentation, delta) -> None:
    """The centre must cut a subspace of the maximal Samuel stratum:
    it contains every essential variable, absorbs the order of every tail,
    and any solved variable it contains must already vanish on the rest."""
    dset = set(delta)
    if not set(cp.essential) <= dset:
        raise PermissibilityError(
            f"centre misses essential variables {set(cp.essential) - dset}")
    for f in cp.basis.elements:
        if f.order() < 2:
            continue
        got = sum(f.beta[j] for j in dset)
        if got < f.order():
            raise PermissibilityError(
                f"tail order {got} along the centre is below {f.order()}")
    tails = cp.solved_tail_support()
    core = dset - set(cp.solved)
    for s in dset & set(cp.solved):
        if not set(tails[s]) & core:
            raise PermissibilityError(
                f"solved variable {s} does not vanish on the centre")


def chart_blowup(cp: ChartPresentation, delta, chart: int,
                 require_samuel: bool = True,
                 budget: int = 10000) -> ChartPresentation:
    """Blow up the coordinate subspace on ``delta`` and pass to the chart
    of variable ``chart``; the new presentation is recomputed from the
    transformed basis, which is the source of truth."""
    if require_samuel:
        check_permissible(cp, delta)
    sb = cp.basis
    transformed = [substitute_blowup(f, delta, chart) for f in sb.elements]
    ideal = BinomialIdeal.make(sb.num_x, sb.num_y, transformed,
                               torus_basis=sb.lattice.basis())
    return ChartPresentation(standard_basis(ideal, budget))


def transformed_elements(cp: ChartPresentation, delta, chart: int):
    return tuple(substitute_blowup(f, delta, chart) for f in cp.basis.elements)


def hs_after_blowup_check(cp: ChartPresentation, cp2: ChartPresentation,
                          delta=None, chart=None) -> str:
    """Semicontinuity check across one blowup.

    Returns 'decreased' or 'equal-with-transformed-basis'; an increase is a
    hard internal error.  On equality the recomputed order >= 2 elements
    must coincide with the raw transforms of the old ones.
    """
    h1, h2 = cp.hilbert_samuel(), cp2.hilbert_samuel()
    verdict = hs_compare(h2, h1)
    if verdict in ("ge", "incomparable") :
        if verdict == "ge":
            raise AssertionError("Hilbert-Samuel function increased under blowup")
        raise AssertionError("Hilbert-Samuel functions incomparable under blowup")
    if verdict == "le":
        return "decreased"
    if delta is not None:
        raw = {f for f in transformed_elements(cp, delta, chart)
               if f.order() >= 2}
        new = {f for f in cp2.basis.elements if f.order() >= 2}
        if raw != new:
            raise AssertionError(
                "equal Hilbert-Samuel function but the transformed elements "
                "do not form the new basis")
    return "equal-with-transformed-basis"


__all__ = [
    "ChartPresentation", "HilbertSamuel", "NotApplicable",
    "PermissibilityError", "centre_order", "chart_blowup",
    "check_permissible", "equimultiple_locus", "hilbert_samuel_eval",
    "hs_after_blowup_check", "hs_compare", "hs_of_basis", "presentation",
    "samuel_stratum_components", "substitute_blowup", "transformed_elements",
]
