"""Binomial ideals in split variables and their standard bases.

Variables come in two blocks: x-variables (each vanishes somewhere on the
variety) and invertible y-variables.  Every element is a difference of two
monomials x^alpha - x^beta y^gamma with gamma a Laurent exponent vector.
The local order on x-exponents is degree first, then lexicographic.

The standard basis is computed by a completion loop: overlap binomials of
pairs are reduced by monomial division; nonzero remainders are adjoined;
relations involving only y-variables accumulate in an integer lattice.
Division of a monomial rewrites its initial term through basis elements
and terminates because the rewritten exponent strictly increases.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .lattice import hermite_form, hnf_member, hnf_reduce


class BinomialError(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    """Division or completion ran past its step budget."""


def exponent_cmp(a, b) -> int:
    """Total order on exponent vectors: degree first, then lex."""
    if len(a) != len(b):
        raise BinomialError("exponent vectors of different length")
    ka = (sum(a),) + tuple(a)
    kb = (sum(b),) + tuple(b)
    return -1 if ka < kb else (1 if ka > kb else 0)


def exp_key(a):
    return (sum(a),) + tuple(a)


def vec_sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def vec_add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def vec_min(a, b):
    return tuple(min(x, y) for x, y in zip(a, b))


def dominates(a, b) -> bool:
    """b <= a componentwise."""
    return all(x >= y for x, y in zip(a, b))


@dataclass(frozen=True)
class Binomial:
    """x^alpha - x^beta y^gamma with alpha <= beta in the local order."""

    alpha: tuple[int, ...]
    beta: tuple[int, ...]
    gamma: tuple[int, ...]

    def order(self) -> int:
        return sum(self.alpha)

    def pretty(self, x_names=None, y_names=None) -> str:
        x_names = x_names or [f"x{i}" for i in range(len(self.alpha))]
        y_names = y_names or [f"y{i}" for i in range(len(self.gamma))]

        def mono(xs, ys):
            parts = [f"{n}^{e}" if e != 1 else n
                     for n, e in zip(x_names, xs) if e]
            parts += [f"{n}^{e}" if e != 1 else n
                      for n, e in zip(y_names, ys) if e]
            return "*".join(parts) if parts else "1"

        zero_y = tuple(0 for _ in self.gamma)
        return f"{mono(self.alpha, zero_y)} - {mono(self.beta, self.gamma)}"


@dataclass(frozen=True)
class PureTorus:
    gamma: tuple[int, ...]


@dataclass(frozen=True)
class Reclassify:
    """The x-variables in ``slots`` are units on the variety."""

    slots: tuple[int, ...]


ZERO = None  # normalize() returns None for the zero binomial


class TorusLattice:
    """Integer lattice of exponent vectors gamma with 1 - y^gamma a relation."""

    def __init__(self, rank: int, basis=()):
        self.rank = rank
        self.hnf = hermite_form([list(v) for v in basis])

    def member(self, gamma) -> bool:
        if not self.hnf:
            return not any(gamma)
        return hnf_member(list(gamma), self.hnf)

    def reduce(self, gamma):
        if not self.hnf:
            return tuple(gamma)
        return tuple(hnf_reduce(list(gamma), self.hnf))

    def add(self, gamma) -> "TorusLattice":
        return TorusLattice(self.rank, self.basis() + (tuple(gamma),))

    def basis(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(r) for r in self.hnf)

    def __eq__(self, other):
        return isinstance(other, TorusLattice) and self.basis() == other.basis()

    def __repr__(self):
        return f"TorusLattice({self.rank}, {self.basis()})"


def normalize(alpha, beta, gamma, lattice: TorusLattice):
    """Cancel the common x-factor and orient the two terms.

    Returns a Binomial, a PureTorus relation, a Reclassify signal (one term
    became the constant 1, so the other term's variables are units), or
    None for zero.  Cancelling the common factor is legitimate because the
    ideal class is closed under dividing by coordinates.
    """
    common = vec_min(alpha, beta)
    a = vec_sub(alpha, common)
    b = vec_sub(beta, common)
    g = tuple(gamma)
    if not any(a) and not any(b):
        if lattice.member(g):
            return None
        return PureTorus(g)
    if not any(a):
        return Reclassify(tuple(i for i, e in enumerate(b) if e))
    if not any(b):
        return Reclassify(tuple(i for i, e in enumerate(a) if e))
    c = exponent_cmp(a, b)
    if c == 0:
        # identical x-parts with disjoint support cannot happen
        raise BinomialError("unreachable: equal oriented terms")
    if c > 0:
        a, b, g = b, a, tuple(-t for t in g)
    return Binomial(a, b, g)


@dataclass(frozen=True)
class BinomialIdeal:
    num_x: int
    num_y: int
    generators: tuple[Binomial, ...]
    characteristic: int = 0
    torus_basis: tuple[tuple[int, ...], ...] = ()
    x_names: tuple[str, ...] | None = None
    y_names: tuple[str, ...] | None = None

    @staticmethod
    def make(num_x, num_y, generators, characteristic=0, torus_basis=(),
             x_names=None, y_names=None) -> "BinomialIdeal":
        gens = []
        for g in generators:
            if isinstance(g, Binomial):
                gens.append(g)
            else:
                a, b, c = g
                gens.append(Binomial(tuple(a), tuple(b), tuple(c)))
        return BinomialIdeal(num_x, num_y, tuple(gens), characteristic,
                             tuple(tuple(v) for v in torus_basis),
                             tuple(x_names) if x_names else None,
                             tuple(y_names) if y_names else None)

    def to_json(self) -> str:
        import json

        payload = {
            "num_x": self.num_x,
            "num_y": self.num_y,
            "char": self.characteristic,
            "generators": [
                {"alpha": list(g.alpha), "beta": list(g.beta),
                 "gamma": list(g.gamma)} for g in self.generators
            ],
        }
        if self.torus_basis:
            payload["torus"] = [list(v) for v in self.torus_basis]
        if self.x_names:
            payload["x_names"] = list(self.x_names)
        if self.y_names:
            payload["y_names"] = list(self.y_names)
        return json.dumps(payload, sort_keys=True, separators=(",", ":"))

    @staticmethod
    def from_json(text: str) -> "BinomialIdeal":
        import json

        payload = json.loads(text)
        return BinomialIdeal.make(
            payload["num_x"], payload["num_y"],
            [(g["alpha"], g["beta"], g.get("gamma", []))
             for g in payload["generators"]],
            payload.get("char", 0),
            payload.get("torus", ()),
            payload.get("x_names"), payload.get("y_names"))


@dataclass(frozen=True)
class Diagram:
    """The minimal generators (vertices) of a staircase in N^q."""

    vertices: tuple[tuple[int, ...], ...]

    @staticmethod
    def from_exponents(exps) -> "Diagram":
        verts = []
        for e in sorted(set(tuple(v) for v in exps), key=exp_key):
            if not any(dominates(e, v) for v in verts):
                verts.append(e)
        return Diagram(tuple(verts))

    def contains(self, e) -> bool:
        return any(dominates(e, v) for v in self.vertices)


@dataclass(frozen=True)
class StandardBasis:
    """Reduced basis: one element per diagram vertex, tails off the staircase.

    ``demoted`` lists x-slots of the input ideal that turned out to be units
    on the variety; they were appended, in order, to the y-block.
    """

    num_x: int
    num_y: int
    elements: tuple[Binomial, ...]
    lattice: TorusLattice
    demoted: tuple[int, ...] = ()

    @property
    def diagram(self) -> Diagram:
        return Diagram.from_exponents([f.alpha for f in self.elements])

    def solved_slots(self) -> tuple[int, ...]:
        out = []
        for f in self.elements:
            if f.order() == 1:
                out.append(next(i for i, e in enumerate(f.alpha) if e))
        return tuple(sorted(out))

    def essential_slots(self) -> tuple[int, ...]:
        out = set()
        for f in self.elements:
            if f.order() >= 2:
                out.update(i for i, e in enumerate(f.alpha) if e)
        return tuple(sorted(out))

    def free_slots(self) -> tuple[int, ...]:
        used = set(self.solved_slots()) | set(self.essential_slots())
        return tuple(i for i in range(self.num_x) if i not in used)

    def is_smooth(self) -> bool:
        return all(f.order() == 1 for f in self.elements)


def _partition_index(delta, ordered_vertices):
    """Index of the first vertex whose cone contains delta, or None."""
    for i, v in enumerate(ordered_vertices):
        if dominates(delta, v):
            return i
    return None


def divide(delta, y_part, basis_elements, budget: int = 10000):
    """Divide the monomial x^delta y^{y_part} by the basis elements.

    Returns (quotients, remainder) with remainder a single monomial
    (r_delta, r_gamma) lying off the staircase; quotients maps the element
    index to a list of (x_exponent, y_exponent) monomials.  Each step
    strictly raises the working exponent, so failure to finish within the
    budget means the input did not present a legitimate ideal.
    """
    ordered = sorted(range(len(basis_elements)),
                     key=lambda i: exp_key(basis_elements[i].alpha))
    verts = [basis_elements[i].alpha for i in ordered]
    quotients: dict[int, list] = {}
    cur_d, cur_g = tuple(delta), tuple(y_part)
    for _ in range(budget):
        k = _partition_index(cur_d, verts)
        if k is None:
            return quotients, (cur_d, cur_g)
        elt = basis_elements[ordered[k]]
        shift = vec_sub(cur_d, elt.alpha)
        quotients.setdefault(ordered[k], []).append((shift, cur_g))
        nxt_d = vec_add(elt.beta, shift)
        nxt_g = vec_add(elt.gamma, cur_g)
        if not exp_key(nxt_d) > exp_key(cur_d):
            raise BinomialError("division step failed to increase the exponent")
        cur_d, cur_g = nxt_d, nxt_g
    raise BudgetExceeded(
        "division budget exceeded: binomial-ideal axioms violated or budget too small")


def reduce_binomial(b: Binomial, basis_elements, lattice: TorusLattice,
                    budget: int = 10000):
    """Normal form of a binomial: divide both terms, compare mod the lattice.

    Returns None when the element reduces to zero, else the normalized
    difference of the two remainders (Binomial / PureTorus / Reclassify).
    """
    _, (d1, g1) = divide(b.alpha, tuple(0 for _ in b.gamma), basis_elements,
                         budget)
    _, (d2, g2) = divide(b.beta, b.gamma, basis_elements, budget)
    if d1 == d2 and lattice.member(vec_sub(g1, g2)):
        return None
    return normalize(d1, d2, vec_sub(g2, g1), lattice)


def membership(b: Binomial, sb: StandardBasis, budget: int = 10000) -> bool:
    """True iff the binomial lies in the ideal presented by the basis."""
    return reduce_binomial(b, sb.elements, sb.lattice, budget) is None


class _Restart(Exception):
    def __init__(self, slots):
        self.slots = slots


def _demote_slots(num_x, num_y, gens, torus_rows, slots):
    """Move the x-slots in ``slots`` to the end of the y-block."""
    slots = sorted(set(slots))
    keep = [i for i in range(num_x) if i not in slots]
    new_gens = []
    for (a, b, g) in gens:
        ya = [a[i] for i in slots]
        yb = [b[i] for i in slots]
        na = tuple(a[i] for i in keep)
        nb = tuple(b[i] for i in keep)
        # x^a -> x^na * y_new^ya; shift the relation by the unit y_new^-ya
        ng = tuple(list(g) + [eb - ea for ea, eb in zip(ya, yb)])
        new_gens.append((na, nb, ng))
    new_torus = [tuple(list(r) + [0] * len(slots)) for r in torus_rows]
    return len(keep), num_y + len(slots), new_gens, new_torus, keep


def standard_basis(ideal: BinomialIdeal, budget: int = 10000) -> StandardBasis:
    """Completion of the generators into the reduced standard basis.

    Overlap binomials are formed at the componentwise max of two initial
    exponents and reduced to normal form; nonzero remainders join the
    basis, torus relations join the lattice, and unit relations demote the
    offending x-variables to the y-block and restart.  Termination of the
    adjoining loop is Dickson's lemma; the budget guards malformed input.
    """
    num_x, num_y = ideal.num_x, ideal.num_y
    gens = [(g.alpha, g.beta, g.gamma) for g in ideal.generators]
    torus_rows = list(ideal.torus_basis)
    demoted: list[int] = []
    slot_map = list(range(ideal.num_x))

    for _restart in range(ideal.num_x + 1):
        try:
            lattice = TorusLattice(num_y, torus_rows)
            basis: list[Binomial] = []
            pairs = deque()
            work = deque(gens)
            steps = 0

            def adjoin(item):
                nonlocal lattice
                if item is None:
                    return
                if isinstance(item, PureTorus):
                    if not lattice.member(item.gamma):
                        lattice = lattice.add(item.gamma)
                        # a larger lattice can newly kill queued pairs only
                        return
                    return
                if isinstance(item, Reclassify):
                    raise _Restart(item.slots)
                red = reduce_binomial(item, basis, lattice, budget)
                if red is None:
                    return
                if not isinstance(red, Binomial):
                    adjoin(red)
                    return
                for other in basis:
                    pairs.append((red, other))
                basis.append(red)

            while work or pairs:
                steps += 1
                if steps > budget:
                    raise BudgetExceeded("completion budget exceeded")
                if work:
                    a, b, g = work.popleft()
                    adjoin(normalize(a, b, g, lattice))
                    continue
                f1, f2 = pairs.popleft()
                delta = tuple(max(x, y) for x, y in zip(f1.alpha, f2.alpha))
                t1 = vec_add(f1.beta, vec_sub(delta, f1.alpha))
                t2 = vec_add(f2.beta, vec_sub(delta, f2.alpha))
                adjoin(normalize(t1, t2, vec_sub(f2.gamma, f1.gamma), lattice))

            # keep one element per diagram vertex, drop dominated ones
            diagram = Diagram.from_exponents([f.alpha for f in basis])
            kept: dict[tuple, Binomial] = {}
            for f in basis:
                if f.alpha in diagram.vertices and f.alpha not in kept:
                    kept[f.alpha] = f
            for f in basis:
                if kept.get(f.alpha) is not f:
                    leftover = reduce_binomial(f, list(kept.values()), lattice,
                                               budget)
                    if leftover is not None:
                        raise BinomialError(
                            "completion fixpoint failed to absorb an element")
            # reduce tails off the staircase and canonicalize gamma
            elements = []
            for v in sorted(kept, key=exp_key):
                f = kept[v]
                _, (rd, rg) = divide(f.beta, f.gamma, list(kept.values()),
                                     budget)
                if exponent_cmp(f.alpha, rd) >= 0:
                    raise BinomialError("tail reduced below its vertex")
                elements.append(Binomial(f.alpha, rd, lattice.reduce(rg)))
            return StandardBasis(num_x, num_y, tuple(elements), lattice,
                                 tuple(demoted))
        except _Restart as r:
            torus_rows = [list(row) for row in lattice.basis()]
            demoted.extend(slot_map[i] for i in r.slots)
            num_x, num_y, gens, torus_rows, keep = _demote_slots(
                num_x, num_y, gens, torus_rows, r.slots)
            slot_map = [slot_map[i] for i in keep]
    raise BinomialError("reclassification failed to stabilize")


def pth_power_test(b: Binomial, char_p: int, d: int) -> bool:
    """True iff d is a power of char_p and the binomial is a d-th power.

    In characteristic p a coefficient-one binomial is a d-th power exactly
    when every exponent in both terms is divisible by d.
    """
    if char_p < 2:
        return False
    if d < 2:
        return False
    n = d
    while n % char_p == 0:
        n //= char_p
    if n != 1:
        return False
    exps = list(b.alpha) + list(b.beta) + list(b.gamma)
    return all(e % d == 0 for e in exps)


__all__ = [
    "Binomial", "BinomialIdeal", "BinomialError", "BudgetExceeded",
    "Diagram", "PureTorus", "Reclassify", "StandardBasis", "TorusLattice",
    "divide", "exponent_cmp", "exp_key", "membership", "normalize",
    "pth_power_test", "reduce_binomial", "standard_basis",
    "vec_add", "vec_sub", "dominates",
]
