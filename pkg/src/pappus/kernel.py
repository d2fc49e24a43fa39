"""Exact projective geometry over the rationals and the symmetric space of SL3.

Points and lines are homogeneous triples of ``Fraction`` kept in canonical
form (first nonzero coordinate equal to 1).  Projective maps are 3x3
rational matrices; they act on points by multiplication and on lines by the
inverse transpose.  The symmetric space is modelled by unit-determinant
positive definite symmetric matrices, with ``T(M) = T^{-T} M T^{-1}``.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import NotElliptic, NotPositiveDefinite, SingularMatrix, ZeroVector

Scalar = Fraction


def scalar(x) -> Fraction:
    """Coerce ints, Fractions and strings like ``"-3/7"`` to a Scalar."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("floats are not exact scalars; pass a string or Fraction")
    return Fraction(x)


def scalar_str(x) -> str:
    return str(Fraction(x))


def rational_cube_root(x) -> Fraction | None:
    """Exact rational cube root, or None when there is none."""
    x = Fraction(x)
    if x == 0:
        return Fraction(0)
    sign = -1 if x < 0 else 1
    num, den = abs(x.numerator), x.denominator
    rn, rd = _icbrt(num), _icbrt(den)
    if rn is None or rd is None:
        return None
    return sign * Fraction(rn, rd)


def _icbrt(n: int) -> int | None:
    lo, hi = 0, 1 << (n.bit_length() // 3 + 2)
    while lo < hi:
        mid = (lo + hi) // 2
        if mid**3 < n:
            lo = mid + 1
        else:
            hi = mid
    return lo if lo**3 == n else None


def _cross(u, v):
    return (u[1] * v[2] - u[2] * v[1],
            u[2] * v[0] - u[0] * v[2],
            u[0] * v[1] - u[1] * v[0])


def dot(u, v):
    return u[0] * v[0] + u[1] * v[1] + u[2] * v[2]


class Hom:
    """Homogeneous triple up to nonzero scale."""

    __slots__ = ("coords",)

    def __init__(self, *coords):
        if len(coords) == 1 and not isinstance(coords[0], (int, Fraction, str)):
            coords = tuple(coords[0])
        if len(coords) != 3:
            raise ValueError("homogeneous coordinates need three entries")
        xs = [scalar(x) for x in coords]
        lead = next((x for x in xs if x != 0), None)
        if lead is None:
            raise ZeroVector("all coordinates are zero")
        self.coords = tuple(x / lead for x in xs)

    def __iter__(self):
        return iter(self.coords)

    def __getitem__(self, i):
        return self.coords[i]

    def __eq__(self, other):
        return type(self) is type(other) and self.coords == other.coords

    def __hash__(self):
        return hash((type(self).__name__, self.coords))

    def __repr__(self):
        return f"{type(self).__name__}({':'.join(str(x) for x in self.coords)})"

    def integer_lift(self) -> tuple[int, int, int]:
        """Primitive integer representative with the canonical sign."""
        den = math.lcm(*(x.denominator for x in self.coords))
        ints = [int(x * den) for x in self.coords]
        g = math.gcd(*ints)
        return tuple(i // g for i in ints)

    def affine(self) -> tuple[Fraction, Fraction]:
        """Coordinates in the chart z = 1."""
        x, y, z = self.coords
        if z == 0:
            raise ZeroDivisionError("point at infinity")
        return x / z, y / z

    def to_json(self):
        return [scalar_str(x) for x in self.coords]

    @classmethod
    def from_json(cls, data):
        return cls(*[Fraction(x) for x in data])


class HomPoint(Hom):
    __slots__ = ()


class HomLine(Hom):
    __slots__ = ()


def _dual_type(h):
    return HomLine if isinstance(h, HomPoint) else HomPoint


def cross(u: Hom, v: Hom) -> Hom:
    """Join of two points or meet of two lines (same formula, dual result)."""
    if type(u) is not type(v):
        raise TypeError("cross needs two points or two lines")
    w = _cross(u.coords, v.coords)
    if not any(w):
        raise ZeroVector("the two elements coincide")
    return _dual_type(u)(*w)


def join(p: HomPoint, q: HomPoint) -> HomLine:
    if not (isinstance(p, HomPoint) and isinstance(q, HomPoint)):
        raise TypeError("join needs points")
    return cross(p, q)


def meet(l: HomLine, m: HomLine) -> HomPoint:
    if not (isinstance(l, HomLine) and isinstance(m, HomLine)):
        raise TypeError("meet needs lines")
    return cross(l, m)


def incident(p: Hom, l: Hom) -> bool:
    return dot(p.coords, l.coords) == 0


def collinear(a: Hom, b: Hom, c: Hom) -> bool:
    return dot(_cross(a.coords, b.coords), c.coords) == 0


# ---------------------------------------------------------------------------
# 3x3 matrices

def _det3(m):
    return (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))


def _adj3(m):
    """Adjugate (transpose of the cofactor matrix)."""
    c = [[0] * 3 for _ in range(3)]
    for i in range(3):
        for j in range(3):
            r = [k for k in range(3) if k != i]
            s = [k for k in range(3) if k != j]
            minor = m[r[0]][s[0]] * m[r[1]][s[1]] - m[r[0]][s[1]] * m[r[1]][s[0]]
            c[j][i] = minor if (i + j) % 2 == 0 else -minor
    return c


def _matmul(a, b):
    return [[sum(a[i][k] * b[k][j] for k in range(3)) for j in range(3)] for i in range(3)]


class ProjMap:
    """Invertible 3x3 matrix of Scalars."""

    __slots__ = ("m",)

    def __init__(self, rows: Sequence[Sequence]):
        m = tuple(tuple(scalar(x) for x in row) for row in rows)
        if len(m) != 3 or any(len(r) != 3 for r in m):
            raise ValueError("ProjMap needs a 3x3 matrix")
        if _det3(m) == 0:
            raise SingularMatrix("determinant is zero")
        self.m = m

    @classmethod
    def identity(cls):
        return cls([[1, 0, 0], [0, 1, 0], [0, 0, 1]])

    @classmethod
    def diag(cls, *xs):
        return cls([[xs[0], 0, 0], [0, xs[1], 0], [0, 0, xs[2]]])

    @classmethod
    def from_columns(cls, cols):
        return cls([[cols[j][i] for j in range(3)] for i in range(3)])

    @classmethod
    def frame(cls, p1: Hom, p2: Hom, p3: Hom, p4: Hom) -> "ProjMap":
        """Map sending the standard frame e1,e2,e3,e1+e2+e3 to p1..p4."""
        try:
            a = cls.from_columns([p1.coords, p2.coords, p3.coords])
        except SingularMatrix:
            raise SingularMatrix("first three frame points are collinear") from None
        lam = a.inverse().apply_vec(p4.coords)
        if any(x == 0 for x in lam):
            raise SingularMatrix("frame points are not in general position")
        return cls.from_columns([[x * l for x in p.coords] for p, l in zip((p1, p2, p3), lam)])

    @classmethod
    def four_point(cls, src: Sequence[Hom], dst: Sequence[Hom]) -> "ProjMap":
        """Unique projective map taking src[i] to dst[i], i = 0..3."""
        return cls.frame(*dst) @ cls.frame(*src).inverse()

    def __matmul__(self, other: "ProjMap") -> "ProjMap":
        return ProjMap(_matmul(self.m, other.m))

    def __pow__(self, n: int) -> "ProjMap":
        if n < 0:
            return self.inverse() ** (-n)
        out = ProjMap.identity()
        for _ in range(n):
            out = out @ self
        return out

    def __eq__(self, other):
        return isinstance(other, ProjMap) and self.m == other.m

    def __hash__(self):
        return hash(self.m)

    def __repr__(self):
        return "ProjMap(" + str([[str(x) for x in r] for r in self.m]) + ")"

    def det(self) -> Fraction:
        return _det3(self.m)

    def trace(self) -> Fraction:
        return self.m[0][0] + self.m[1][1] + self.m[2][2]

    def transpose(self) -> "ProjMap":
        return ProjMap([[self.m[j][i] for j in range(3)] for i in range(3)])

    def inverse(self) -> "ProjMap":
        d = self.det()
        return ProjMap([[x / d for x in row] for row in _adj3(self.m)])

    def scale(self, s) -> "ProjMap":
        s = scalar(s)
        return ProjMap([[x * s for x in row] for row in self.m])

    def proportional(self, other: "ProjMap") -> bool:
        """Equality up to a nonzero scalar."""
        flat_a = [x for r in self.m for x in r]
        flat_b = [x for r in other.m for x in r]
        i = next(k for k, x in enumerate(flat_a) if x != 0)
        if flat_b[i] == 0:
            return False
        s = flat_b[i] / flat_a[i]
        return all(y == s * x for x, y in zip(flat_a, flat_b))

    def is_scalar(self) -> bool:
        return self.proportional(ProjMap.identity())

    def is_symmetric(self) -> bool:
        return all(self.m[i][j] == self.m[j][i] for i in range(3) for j in range(3))

    def apply_vec(self, v):
        return tuple(sum(self.m[i][k] * v[k] for k in range(3)) for i in range(3))

    def apply(self, h: Hom) -> Hom:
        """Image of a point (or of a line, by the inverse transpose)."""
        if isinstance(h, HomLine):
            return HomLine(*self.inverse().transpose().apply_vec(h.coords))
        return type(h)(*self.apply_vec(h.coords))

    __call__ = apply

    def to_json(self):
        return [[scalar_str(x) for x in row] for row in self.m]

    @classmethod
    def from_json(cls, rows):
        return cls([[Fraction(x) for x in row] for row in rows])


def tau(m: ProjMap) -> Fraction:
    """tr(m)^3 / det(m): invariant under scaling and conjugation."""
    d = m.det()
    if d == 0:
        raise SingularMatrix("determinant is zero")
    return m.trace() ** 3 / d


def polarity_apply(p: Hom) -> Hom:
    """Standard elliptic polarity: the point [x:y:z] goes to the line xX+yY+zZ=0."""
    if not any(p.coords):
        raise ZeroVector("zero vector")
    return _dual_type(p)(*p.coords)


class Duality:
    """The composition Delta o M of a projective map with the standard polarity."""

    __slots__ = ("matrix",)

    def __init__(self, matrix: ProjMap):
        if not isinstance(matrix, ProjMap):
            matrix = ProjMap(matrix)
        self.matrix = matrix

    def apply(self, h: Hom) -> Hom:
        if isinstance(h, HomPoint):
            return HomLine(*self.matrix.apply_vec(h.coords))
        return HomPoint(*self.matrix.inverse().transpose().apply_vec(h.coords))

    __call__ = apply

    def act(self, spd: "SpdPoint") -> "SpdPoint":
        """Action on the symmetric space: P -> A P^{-1} A^T after unit scaling."""
        return spd_act(self.matrix, spd).inverse()

    def is_polarity(self) -> bool:
        return self.matrix.is_symmetric()


# ---------------------------------------------------------------------------
# symmetric space

class SpdPoint:
    """Unit-determinant positive definite symmetric matrix (exact or float)."""

    __slots__ = ("m", "exact")

    def __init__(self, rows, *, tol: float = 1e-10):
        exact = all(isinstance(x, (int, Fraction)) for r in rows for x in r)
        if exact:
            m = tuple(tuple(Fraction(x) for x in r) for r in rows)
        else:
            m = tuple(tuple(float(x) for x in r) for r in rows)
        if any(abs(m[i][j] - m[j][i]) > (0 if exact else tol) for i in range(3) for j in range(3)):
            raise NotPositiveDefinite("matrix is not symmetric")
        minors = _leading_minors(m)
        if any(x <= 0 for x in minors):
            raise NotPositiveDefinite("matrix is not positive definite")
        if abs(minors[2] - 1) > (0 if exact else tol):
            raise NotPositiveDefinite(f"determinant is {minors[2]}, not 1")
        self.m = m
        self.exact = exact

    @classmethod
    def origin(cls):
        return cls([[1, 0, 0], [0, 1, 0], [0, 0, 1]])

    def as_array(self):
        return np.array([[float(x) for x in r] for r in self.m])

    def inverse(self) -> "SpdPoint":
        if self.exact:
            return SpdPoint(_adj3(self.m))
        return SpdPoint(np.linalg.inv(self.as_array()).tolist())

    def close_to(self, other: "SpdPoint", tol: float = 1e-10) -> bool:
        return bool(np.max(np.abs(self.as_array() - other.as_array())) <= tol)

    def __eq__(self, other):
        return isinstance(other, SpdPoint) and self.m == other.m

    def __hash__(self):
        return hash(self.m)

    def __repr__(self):
        return f"SpdPoint({[[str(x) for x in r] for r in self.m]})"


def _leading_minors(m):
    return (m[0][0], m[0][0] * m[1][1] - m[0][1] * m[1][0], _det3(m))


def unit_scale(t: ProjMap):
    """Return t scaled to determinant 1, exactly when possible, else as floats."""
    d = t.det()
    root = rational_cube_root(d)
    if root is not None:
        return [[x / root for x in row] for row in t.m], True
    s = math.copysign(abs(float(d)) ** (1 / 3), float(d))
    return [[float(x) / s for x in row] for row in t.m], False


def spd_act(t: ProjMap, point: SpdPoint) -> SpdPoint:
    """Isometric action T(M) = T^{-T} M T^{-1}, with T rescaled to det 1."""
    rows, exact = unit_scale(t)
    if exact and point.exact:
        tin = _adj3(rows)  # det 1, so the adjugate is the inverse
        tint = [[tin[j][i] for j in range(3)] for i in range(3)]
        return SpdPoint(_matmul(_matmul(tint, point.m), tin))
    a = np.array(rows, dtype=float)
    ainv = np.linalg.inv(a)
    out = ainv.T @ point.as_array() @ ainv
    return SpdPoint(((out + out.T) / 2).tolist())


def polarity_fixed_point(dual: Duality, tol: float = 1e-10) -> SpdPoint:
    """Unique fixed point in the symmetric space of an elliptic polarity."""
    a = dual.matrix
    if not a.is_symmetric():
        raise NotElliptic("matrix is not symmetric")
    minors = _leading_minors(a.m)
    if all(x > 0 for x in minors):
        sign = 1
    elif minors[0] < 0 and minors[1] > 0 and minors[2] < 0:
        sign = -1
    else:
        raise NotElliptic("matrix is indefinite")
    rows, _ = unit_scale(a.scale(sign))
    p = SpdPoint(rows, tol=tol)
    image = dual.act(p)
    if not image.close_to(p, tol):
        raise NotElliptic("fixed point check failed")
    return p


def distance_to_origin(point: SpdPoint) -> float:
    """sqrt(sum log^2 lambda_i) over the eigenvalues of the matrix."""
    eig = np.linalg.eigvalsh(point.as_array())
    if np.any(eig <= 0):
        raise NotPositiveDefinite("nonpositive eigenvalue")
    return float(math.sqrt(sum(math.log(x) ** 2 for x in eig)))


def matrix_from_json(rows) -> ProjMap:
    return ProjMap.from_json(rows)


def points_from(seq: Iterable) -> list[HomPoint]:
    return [p if isinstance(p, HomPoint) else HomPoint(*p) for p in seq]
