"""Combinatorial resolution of a toric hypersurface.

A hypersurface in the smooth toric variety of a regular fan is cut out by
an integer linear function on the lattice.  Per cone, the positive and
negative sums of the function over the vertices give the pair (d, Omega);
the resolution loop star-subdivides at minimal faces until the maximum
order d drops to zero.  Each step strictly decreases (d, Omega) of every
replaced cone in the lexicographic order, which certifies termination.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from .fan import Cone, Fan, FanError, Vector, barycentre, star_subdivision


@dataclass(frozen=True)
class LinearForm:
    """Z-linear function on the ambient lattice, by values on the unit basis."""

    values_on_basis: tuple[int, ...]

    @staticmethod
    def make(values) -> "LinearForm":
        return LinearForm(tuple(int(v) for v in values))

    def __call__(self, v: Vector) -> int:
        return sum(a * x for a, x in zip(self.values_on_basis, v))


@dataclass(frozen=True)
class ConeOrderData:
    gamma_plus: int
    gamma_minus: int

    @property
    def d(self) -> int:
        return min(self.gamma_plus, self.gamma_minus)

    @property
    def omega(self) -> int:
        return max(self.gamma_plus, self.gamma_minus)

    @property
    def pair(self) -> tuple[int, int]:
        return (self.d, self.omega)


def cone_order_data(vertices, lam: LinearForm) -> ConeOrderData:
    """Positive/negative sums of the linear form over a vertex set."""
    plus = minus = 0
    for v in vertices:
        val = lam(v)
        if val > 0:
            plus += val
        elif val < 0:
            minus -= val
    return ConeOrderData(plus, minus)


def fan_max_order(fan: Fan, lam: LinearForm) -> int:
    """max over all faces of all cones of d_sigma.

    Faces can only lower both gamma sums, so the maximum is attained on
    maximal cones; all faces are scanned anyway, the fan being desk-sized.
    """
    best = 0
    for c in fan.maximal_cones:
        for face in c.faces():
            best = max(best, cone_order_data(face, lam).d)
    return best


def _oriented_minimal_subsets(values: list[int]) -> list[tuple[int, ...]]:
    """Minimal index subsets, for values oriented so the negative part binds.

    A subset must contain every index with a negative value, have a
    nonnegative total, and be minimal with these properties: dropping any
    positive member must make the total negative.  Zero values never occur
    in a minimal subset.
    """
    neg = [i for i, v in enumerate(values) if v < 0]
    pos = [i for i, v in enumerate(values) if v > 0]
    if not neg:
        return []
    base = sum(values[i] for i in neg)
    out = []
    for k in range(len(pos) + 1):
        for extra in combinations(pos, k):
            total = base + sum(values[i] for i in extra)
            if total < 0:
                continue
            if all(total - values[i] < 0 for i in extra):
                out.append(tuple(sorted(neg + list(extra))))
    return out


def _minimal_subsets_for_chart(values: list[int]) -> list[tuple[int, ...]]:
    """Minimal subsets whose (d, Omega) data realizes the chart order d.

    The binding side is the one with the smaller total; with a tie both
    orientations contribute (they yield the same subsets after dedup).
    """
    plus = sum(v for v in values if v > 0)
    minus = -sum(v for v in values if v < 0)
    if min(plus, minus) == 0:
        return []
    found = set()
    if minus <= plus:
        found.update(_oriented_minimal_subsets(values))
    if plus <= minus:
        found.update(_oriented_minimal_subsets([-v for v in values]))
    return sorted(found)


def equimultiple_components(gamma) -> list[tuple[int, ...]]:
    """Components of the maximum-order locus of x^{gamma+} - x^{gamma-}.

    Returns minimal index subsets; empty when the point is smooth
    (one side of the exponent vector is empty, order zero).
    """
    return _minimal_subsets_for_chart([int(g) for g in gamma])


def minimal_cones(fan: Fan, lam: LinearForm) -> list[tuple[Vector, ...]]:
    """All minimal admissible faces: d on the face equals the fan maximum
    and every proper subface is strictly smaller."""
    d = fan_max_order(fan, lam)
    if d == 0:
        raise FanError("fan already resolved: nothing to do")
    found = set()
    for c in fan.maximal_cones:
        values = [lam(v) for v in c.vertices]
        if cone_order_data(c.vertices, lam).d != d:
            continue
        for idxs in _minimal_subsets_for_chart(values):
            data = cone_order_data([c.vertices[i] for i in idxs], lam)
            if data.d == d:
                found.add(tuple(sorted(c.vertices[i] for i in idxs)))
    return sorted(found)


def admissible_cones(fan: Fan, lam: LinearForm) -> list[tuple[Vector, ...]]:
    d = fan_max_order(fan, lam)
    if d == 0:
        raise FanError("fan already resolved: nothing to do")
    found = set()
    for c in fan.maximal_cones:
        for face in c.faces():
            if cone_order_data(face, lam).d == d:
                found.add(tuple(sorted(face)))
    return sorted(found)


@dataclass
class ResolutionStep:
    face: tuple[Vector, ...]
    d_before: int
    d_after: int
    num_maximal_cones: int


@dataclass
class ResolutionTrace:
    steps: list[ResolutionStep] = field(default_factory=list)
    final_fan: Fan = None

    def to_jsonl(self) -> str:
        import json

        lines = []
        for i, s in enumerate(self.steps):
            lines.append(json.dumps({
                "step": i,
                "delta_vertices": [list(v) for v in s.face],
                "d_before": s.d_before,
                "d_after": s.d_after,
                "num_maximal_cones": s.num_maximal_cones,
            }, sort_keys=True, separators=(",", ":")))
        return "\n".join(lines)


def _tie_break_key(face, lam: LinearForm, policy: str):
    data = cone_order_data(face, lam)
    if policy == "omega":
        return (data.omega, face)
    if policy == "lex":
        return (face,)
    raise ValueError(f"unknown tie-break policy {policy!r}")


def resolve_hypersurface(fan: Fan, lam: LinearForm, tie_break: str = "omega",
                         step_budget: int = 10000) -> ResolutionTrace:
    """Iterate minimal star subdivisions until the maximum order is zero.

    The omega-first tie break is a heuristic, not an optimality claim; the
    lex policy is available for reproducible experiments.
    """
    trace = ResolutionTrace()
    current = fan
    while True:
        d = fan_max_order(current, lam)
        if d == 0:
            break
        if len(trace.steps) >= step_budget:
            raise RuntimeError("resolution step budget exceeded")
        choices = minimal_cones(current, lam)
        face = min(choices, key=lambda f: _tie_break_key(f, lam, tie_break))
        centre = barycentre(face)
        # lexicographic decrease on every replacement cone, per parent
        for parent in current.maximal_cones:
            if not parent.has_face(face):
                continue
            parent_pair = cone_order_data(parent.vertices, lam).pair
            for drop in face:
                child = [v for v in parent.vertices if v != drop] + [centre]
                child_pair = cone_order_data(child, lam).pair
                if not child_pair < parent_pair:
                    raise AssertionError(
                        f"(d, Omega) did not drop: {child_pair} vs {parent_pair}")
        new_fan = star_subdivision(current, face)
        d_after = fan_max_order(new_fan, lam)
        trace.steps.append(ResolutionStep(face, d, d_after,
                                          len(new_fan.maximal_cones)))
        current = new_fan
    trace.final_fan = current
    return trace


__all__ = [
    "LinearForm", "ConeOrderData", "ResolutionTrace", "ResolutionStep",
    "cone_order_data", "fan_max_order", "minimal_cones", "admissible_cones",
    "equimultiple_components", "resolve_hypersurface",
]
