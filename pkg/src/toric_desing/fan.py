"""Regular cones and fans with exact lattice arithmetic.

A cone is stored by its primitive vertex generators (rows of an integer
matrix); a fan is the explicit list of its maximal cones.  Star subdivision
inserts the barycentre of a face, which is the combinatorial counterpart of
blowing up the smooth invariant subvariety attached to that face.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from functools import reduce
import json

from .lattice import det, smith_divisors, solve_integer, inverse_unimodular, mat_mul


Vector = tuple[int, ...]


def vec_add(a: Vector, b: Vector) -> Vector:
    return tuple(x + y for x, y in zip(a, b))


def is_primitive(v: Vector) -> bool:
    g = reduce(gcd, (abs(x) for x in v), 0)
    return g == 1


class FanError(ValueError):
    pass


@dataclass(frozen=True)
class Cone:
    """A simplicial rational cone given by its primitive vertices.

    ``vertices`` is kept sorted lexicographically so that equal cones are
    structurally equal; use plain tuples when the generation order matters
    (chart bookkeeping keeps its own ordered copy).
    """

    vertices: tuple[Vector, ...]
    ambient_rank: int

    @staticmethod
    def make(vertices, ambient_rank: int) -> "Cone":
        vs = tuple(sorted(tuple(int(x) for x in v) for v in vertices))
        if not vs:
            raise FanError("empty cone")
        for v in vs:
            if len(v) != ambient_rank:
                raise FanError(f"vertex {v} has wrong length")
            if not is_primitive(v):
                raise FanError(f"vertex {v} is not primitive")
        if len(set(vs)) != len(vs):
            raise FanError("repeated vertex")
        rank = len(hermite_rank(vs))
        if rank != len(vs):
            raise FanError("vertices are linearly dependent")
        return Cone(vs, ambient_rank)

    @property
    def dim(self) -> int:
        return len(self.vertices)

    def faces(self):
        """All nonempty subsets of the vertex set, as sorted tuples."""
        vs = self.vertices
        n = len(vs)
        for mask in range(1, 1 << n):
            yield tuple(vs[i] for i in range(n) if mask >> i & 1)

    def has_face(self, verts) -> bool:
        return set(verts) <= set(self.vertices)


def hermite_rank(rows):
    from .lattice import hermite_form

    return hermite_form([list(r) for r in rows])


def is_regular(c: Cone) -> bool:
    """True iff the vertices extend to a basis of the ambient lattice."""
    divs = smith_divisors([list(v) for v in c.vertices])
    if len(divs) != len(c.vertices):
        raise FanError("dependent vertices: cannot test regularity")
    return all(d == 1 for d in divs)


def barycentre(vertices) -> Vector:
    """Componentwise sum of the vertices of a face."""
    vs = [tuple(v) for v in vertices]
    if not vs:
        raise FanError("barycentre of an empty face")
    out = vs[0]
    for v in vs[1:]:
        out = vec_add(out, v)
    return out


@dataclass(frozen=True)
class Fan:
    maximal_cones: tuple[Cone, ...]
    ambient_rank: int

    @staticmethod
    def make(cones, ambient_rank: int, check: bool = True) -> "Fan":
        cs = tuple(sorted((c if isinstance(c, Cone) else Cone.make(c, ambient_rank)
                           for c in cones), key=lambda c: c.vertices))
        f = Fan(cs, ambient_rank)
        if check:
            f.validate()
        return f

    def validate(self) -> None:
        for c in self.maximal_cones:
            if not is_regular(c):
                raise FanError(f"cone {c.vertices} is not regular")
        for i, a in enumerate(self.maximal_cones):
            for b in self.maximal_cones[i + 1:]:
                common = set(a.vertices) & set(b.vertices)
                if set(a.vertices) <= set(b.vertices):
                    raise FanError("maximal cone contained in another")
                if common and not cones_intersect_in_face(a, b, common):
                    raise FanError("cones do not meet in a common face")

    def rays(self) -> tuple[Vector, ...]:
        out = set()
        for c in self.maximal_cones:
            out.update(c.vertices)
        return tuple(sorted(out))

    def has_face(self, verts) -> bool:
        vs = set(tuple(v) for v in verts)
        return any(vs <= set(c.vertices) for c in self.maximal_cones)

    def to_json(self) -> str:
        payload = {
            "rank": self.ambient_rank,
            "maximal_cones": [[list(v) for v in c.vertices]
                              for c in self.maximal_cones],
        }
        return json.dumps(payload, sort_keys=True, separators=(",", ":"))

    @staticmethod
    def from_json(text: str) -> "Fan":
        payload = json.loads(text)
        return Fan.make(payload["maximal_cones"], payload["rank"])


def cones_intersect_in_face(a: Cone, b: Cone, common) -> bool:
    """Cheap face-compatibility test for simplicial regular cones.

    For the fans produced here (iterated star subdivisions of an orthant)
    two cones meet exactly along their common vertices; we verify that the
    common vertices are linearly independent, which is automatic for
    subsets of a regular cone.
    """
    return len(hermite_rank(list(common))) == len(common)


def star_subdivision(fan: Fan, face_vertices) -> Fan:
    """Smallest refinement of ``fan`` having the barycentre of the face
    as a vertex.

    Every maximal cone containing the face is replaced by the cones that
    swap one face vertex for the barycentre; the rest are untouched.
    """
    face = tuple(sorted(tuple(int(x) for x in v) for v in face_vertices))
    if not fan.has_face(face):
        raise FanError(f"face {face} does not belong to the fan")
    if len(face) == 1:
        return fan
    centre = barycentre(face)
    new_cones = []
    for c in fan.maximal_cones:
        if not c.has_face(face):
            new_cones.append(c)
            continue
        for drop in face:
            verts = [v for v in c.vertices if v != drop] + [centre]
            new_cones.append(Cone.make(verts, fan.ambient_rank))
    out = Fan.make(new_cones, fan.ambient_rank, check=False)
    for c in out.maximal_cones:
        if not is_regular(c):
            raise FanError("star subdivision produced a non-regular cone")
    return out


def chart_transition(basis_sigma, basis_tau):
    """Integer matrix A with basis_sigma[i] = sum_j A[i][j] basis_tau[j].

    Both bases must be Z-bases of the ambient lattice; the result is
    unimodular and transforms exponent vectors between the two charts
    (gamma = A @ delta).
    """
    n = len(basis_sigma)
    if abs(det([list(v) for v in basis_sigma])) != 1:
        raise FanError("first basis is not unimodular")
    if abs(det([list(v) for v in basis_tau])) != 1:
        raise FanError("second basis is not unimodular")
    rows = []
    for e in basis_sigma:
        coeff = solve_integer([list(f) for f in basis_tau], list(e))
        if coeff is None:
            raise FanError("bases do not span the same lattice")
        rows.append(coeff)
    if abs(det(rows)) != 1:
        raise FanError("transition matrix is not unimodular")
    return rows


def transition_apply(matrix, delta):
    """gamma_i = sum_j matrix[i][j] * delta_j."""
    return tuple(sum(matrix[i][j] * delta[j] for j in range(len(delta)))
                 for i in range(len(matrix)))


def transition_invert(matrix):
    return inverse_unimodular(matrix)


def orthant(n: int) -> Fan:
    """The fan of affine n-space: one cone on the standard basis."""
    basis = [tuple(1 if j == i else 0 for j in range(n)) for i in range(n)]
    return Fan.make([Cone.make(basis, n)], n)


__all__ = [
    "Cone", "Fan", "FanError", "Vector",
    "is_regular", "barycentre", "star_subdivision",
    "chart_transition", "transition_apply", "transition_invert",
    "orthant", "mat_mul",
]
