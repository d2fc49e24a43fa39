"""Pappus marked boxes: the operations i, t, b, the doppelganger, and the
generators r1, r2 of the Pappus group attached to the initial box M_{c,d}.

A box stores its six elements explicitly: top vertices p, q, bottom
vertices r, s (cyclic order p, q, r, s), top point t on edge pq and bottom
point b on edge rs.  The same class holds boxes of the dual plane, whose
elements are lines.  Two boxes are equal when their six-tuples agree or
agree after the left-right relabelling (p,q,r,s) -> (q,p,s,r).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

from .errors import DegenerateBox, InternalError, ParamOutOfRange, ZeroVector
from .kernel import Hom, HomLine, HomPoint, ProjMap, cross, tau
from .poly import MultiPoly, pmat, pmat_det, pmat_mul, pmat_trace, variables

# ---------------------------------------------------------------------------
# integer vector helpers for exact region tests


def _icross(u, v):
    return (u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0])


def _idot(u, v):
    return u[0] * v[0] + u[1] * v[1] + u[2] * v[2]


def _idet(u, v, w):
    return _idot(_icross(u, v), w)


def _sign(x):
    return (x > 0) - (x < 0)


def _neg(u):
    return (-u[0], -u[1], -u[2])


def _signed_lifts(vertices):
    """Integer lifts v1..v4 whose positive cone is the box region.

    Writing v4 = x1 v1 + x2 v2 + x3 v3, a convex quadrilateral with cyclic
    order v1 v2 v3 v4 has diagonals v1v3 and v2v4 crossing, which forces
    the sign pattern (+, -, +) once the lifts are chosen consistently.
    """
    v = [h.integer_lift() for h in vertices]
    d = _idet(v[0], v[1], v[2])
    nums = (_idet(v[3], v[1], v[2]), _idet(v[0], v[3], v[2]), _idet(v[0], v[1], v[3]))
    if d == 0 or any(n == 0 for n in nums):
        raise DegenerateBox("vertices are not in general position")
    sd = _sign(d)
    s = (_sign(nums[0]) * sd, -_sign(nums[1]) * sd, _sign(nums[2]) * sd)
    lifts = [tuple(si * x for x in vi) for si, vi in zip(s, v[:3])] + [v[3]]
    return tuple(lifts)


def _between(x: Hom, u, v) -> bool:
    """True when x lies on the open segment between lifted vectors u and v."""
    xl = x.integer_lift()
    if _idot(_icross(u, v), xl) != 0:
        return False
    # x = alpha u + beta v; compare via 2x2 minors
    n = _icross(u, v)
    k = max(range(3), key=lambda i: abs(n[i]))
    idx = [i for i in range(3) if i != k]
    det = u[idx[0]] * v[idx[1]] - u[idx[1]] * v[idx[0]]
    alpha = xl[idx[0]] * v[idx[1]] - xl[idx[1]] * v[idx[0]]
    beta = u[idx[0]] * xl[idx[1]] - u[idx[1]] * xl[idx[0]]
    sa, sb = _sign(alpha) * _sign(det), _sign(beta) * _sign(det)
    return sa != 0 and sa == sb


@dataclass(frozen=True, eq=False)
class MarkedBox:
    p: Hom
    q: Hom
    r: Hom
    s: Hom
    t: Hom
    b: Hom

    def __post_init__(self):
        kinds = {type(x) for x in self.six}
        if len(kinds) != 1 or not issubclass(kinds.pop(), (HomPoint, HomLine)):
            raise TypeError("a marked box needs six points or six lines")
        lifts = self.lifts
        if not _between(self.t, lifts[0], lifts[1]):
            raise DegenerateBox("top point is not interior to the top edge")
        if not _between(self.b, lifts[2], lifts[3]):
            raise DegenerateBox("bottom point is not interior to the bottom edge")

    @classmethod
    def of(cls, *coords) -> "MarkedBox":
        """Build from six coordinate triples (points)."""
        return cls(*[c if isinstance(c, Hom) else HomPoint(*c) for c in coords])

    @property
    def six(self):
        return (self.p, self.q, self.r, self.s, self.t, self.b)

    @property
    def vertices(self):
        return (self.p, self.q, self.r, self.s)

    @property
    def is_dual(self) -> bool:
        return isinstance(self.p, HomLine)

    def mirror(self) -> "MarkedBox":
        return MarkedBox(self.q, self.p, self.s, self.r, self.t, self.b)

    def __eq__(self, other):
        if not isinstance(other, MarkedBox):
            return NotImplemented
        return self.six == other.six or self.six == other.mirror().six

    def __hash__(self):
        return hash((frozenset((self.p, self.q)), frozenset((self.r, self.s)), self.t, self.b))

    def __repr__(self):
        return "MarkedBox(" + ", ".join(f"{n}={h!r}" for n, h in zip("pqrstb", self.six)) + ")"

    def apply(self, g: ProjMap) -> "MarkedBox":
        return MarkedBox(*[g.apply(h) for h in self.six])

    def to_json(self):
        return {"kind": "lines" if self.is_dual else "points",
                "six": [h.to_json() for h in self.six]}

    @classmethod
    def from_json(cls, data):
        kind = HomLine if data.get("kind") == "lines" else HomPoint
        return cls(*[kind.from_json(x) for x in data["six"]])

    # region geometry -----------------------------------------------------
    @cached_property
    def lifts(self):
        return _signed_lifts(self.vertices)

    @cached_property
    def edge_normals(self):
        """Normals of the four edge planes, positive on the interior."""
        v = self.lifts
        out = []
        for k in range(4):
            n = _icross(v[k], v[(k + 1) % 4])
            if _idot(n, v[(k + 2) % 4]) < 0:
                n = _neg(n)
            out.append(n)
        return tuple(out)

    def contains_point(self, h: Hom, strict: bool = True) -> bool:
        """Membership of a point in the open (or closed) region."""
        x = h.integer_lift()
        vals = [_idot(n, x) for n in self.edge_normals]
        if strict:
            return all(v > 0 for v in vals) or all(v < 0 for v in vals)
        return all(v >= 0 for v in vals) or all(v <= 0 for v in vals)


def box_inside(inner: MarkedBox, outer: MarkedBox, strict: bool = True) -> bool:
    """inner contained in the interior (strict) or the closure of outer."""
    side = 0
    for v in inner.lifts:
        for n in outer.edge_normals:
            val = _idot(n, v)
            if val == 0:
                if strict:
                    return False
                continue
            s = _sign(val)
            if side == 0:
                side = s
            elif s != side:
                return False
    return True


def _separable(gens, strict):
    """Is there n with n.g > 0 (or >= 0, n != 0) for every generator g?"""
    cands = []
    for i in range(len(gens)):
        for j in range(i + 1, len(gens)):
            n = _icross(gens[i], gens[j])
            if not any(n):
                continue
            vals = [_idot(n, g) for g in gens]
            if all(x >= 0 for x in vals):
                pass
            elif all(x <= 0 for x in vals):
                n = _neg(n)
                vals = [-x for x in vals]
            else:
                continue
            if not strict or all(x > 0 for x in vals):
                return True
            cands.append(n)
    if not cands:
        return False
    total = tuple(sum(n[k] for n in cands) for k in range(3))
    return all(_idot(total, g) > 0 for g in gens)


def boxes_disjoint(a: MarkedBox, b: MarkedBox, strict: bool = True) -> bool:
    """Disjoint closures (strict) or disjoint interiors in the projective plane."""
    va, vb = list(a.lifts), list(b.lifts)
    return (_separable(va + [_neg(w) for w in vb], strict)
            and _separable(va + vb, strict))


def nested_or_disjoint(a: MarkedBox, b: MarkedBox, strict: bool = True) -> str | None:
    """'inside', 'contains', 'disjoint' or None when the boxes overlap."""
    if box_inside(a, b, strict):
        return "inside"
    if box_inside(b, a, strict):
        return "contains"
    if boxes_disjoint(a, b, strict):
        return "disjoint"
    return None


# ---------------------------------------------------------------------------
# operations


def _x(u, v):
    try:
        return cross(u, v)
    except ZeroVector:
        raise DegenerateBox("undefined intersection in Pappus construction") from None


def op_i(m: MarkedBox) -> MarkedBox:
    """Swap the roles of the top and bottom flags."""
    return MarkedBox(m.r, m.s, m.q, m.p, m.b, m.t)


def pappus_points(m: MarkedBox):
    """The three collinear Pappus points: (qb.tr, pb.ts, pr.qs)."""
    p, q, r, s, t, b = m.six
    return (_x(_x(q, b), _x(t, r)), _x(_x(p, b), _x(t, s)), _x(_x(p, r), _x(q, s)))


def op_t(m: MarkedBox) -> MarkedBox:
    """Keep the top flag; the new bottom edge lies on the Pappus line."""
    x, y, z = pappus_points(m)
    return MarkedBox(m.p, m.q, x, y, m.t, z)


def op_b(m: MarkedBox) -> MarkedBox:
    """Keep the bottom flag; the new top edge lies on the Pappus line."""
    x, y, z = pappus_points(m)
    return MarkedBox(y, x, m.r, m.s, z, m.b)


OPS = {"i": op_i, "t": op_t, "b": op_b}


def apply_word(word: str, m: MarkedBox, ops=None) -> MarkedBox:
    """Apply a word read as a composition: 'ti' means t(i(m))."""
    ops = ops or OPS
    for letter in reversed(word):
        m = ops[letter](m)
    return m


def doppelganger(m: MarkedBox) -> MarkedBox:
    """The marked box M* of the dual plane attached to M.

    Its top vertices are the lines st and rt through the top point, its
    bottom vertices the lines pb and qb through the bottom point, and its
    marked elements are the lines of the top and bottom edges.
    """
    p, q, r, s, t, b = m.six
    return MarkedBox(_x(s, t), _x(r, t), _x(p, b), _x(q, b), _x(p, q), _x(r, s))


# ---------------------------------------------------------------------------
# the initial box and its generators


@dataclass(frozen=True)
class PappusParams:
    c: Fraction
    d: Fraction

    def __post_init__(self):
        c, d = Fraction(self.c), Fraction(self.d)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "d", d)
        if not (-1 < c < 1 and -1 < d < 1):
            raise ParamOutOfRange(f"(c,d)=({c},{d}) outside (-1,1)^2")


def _params(params) -> PappusParams:
    if isinstance(params, PappusParams):
        return params
    return PappusParams(*params)


NORMAL_VERTICES = (HomPoint(-1, 1, 0), HomPoint(1, 1, 0), HomPoint(1, 0, 1), HomPoint(-1, 0, 1))


def initial_box(params) -> MarkedBox:
    """M_{c,d}: vertices at the normal positions, top point [c:1:0], bottom [d:0:1]."""
    pp = _params(params)
    return MarkedBox(*NORMAL_VERTICES, HomPoint(pp.c, 1, 0), HomPoint(pp.d, 0, 1))


def generator_polys():
    """Numerator matrices (R1, R2) and the denominator D with r1 = R1/D, r2 = R2."""
    c, d = variables("c d")
    r1 = pmat([[c * d - 1, c * (1 - c * d), d - c],
               [d - c, 1 - c * d, c * d - 1],
               [0, 1 - c**2, 0]])
    r2 = pmat([[-1 - c * d, c + d, d * (1 + c * d)],
               [0, 0, d**2 - 1],
               [-c - d, 1 + c * d, 1 + c * d]])
    return r1, r2, (1 - c**2) * (1 - d**2)


def generators(params) -> tuple[ProjMap, ProjMap]:
    pp = _params(params)
    r1n, r2n, den = generator_polys()
    point = {"c": pp.c, "d": pp.d}
    dv = den.evaluate(point)
    r1 = ProjMap([[x.evaluate(point) / dv for x in row] for row in r1n])
    r2 = ProjMap([[x.evaluate(point) for x in row] for row in r2n])
    return r1, r2


def op_action_check(params) -> bool:
    """r1: i(M) -> t(M) -> b(M) and r2: M -> ti(M) -> bi(M)."""
    m = initial_box(params)
    r1, r2 = generators(params)
    im, tm, bm = op_i(m), op_t(m), op_b(m)
    tim, bim = op_t(im), op_b(im)
    return (im.apply(r1) == tm and tm.apply(r1) == bm
            and m.apply(r2) == tim and tim.apply(r2) == bim)


def commutator(x: ProjMap, y: ProjMap) -> ProjMap:
    """[x, y] = x y x^2 y^2."""
    return x @ y @ x @ x @ y @ y


def closed_forms(params):
    pp = _params(params)
    c, d = pp.c, pp.d
    return {
        "tau_r1_r2sq": 64 / ((1 - c**2) * (1 - d**2) ** 2),
        "tau_r1sq_r2": 64 / ((1 - c**2) ** 2 * (1 - d**2)),
        "comm_diff": 16 * c * d / ((1 - c**2) * (1 - d**2)),
        "tr_r1_r2": Fraction(-1),
    }


def trace_identities(params) -> dict:
    """Trace invariants of the generators, checked against their closed forms."""
    r1, r2 = generators(params)
    values = {
        "tau_r1_r2sq": tau(r1 @ r2 @ r2),
        "tau_r1sq_r2": tau(r1 @ r1 @ r2),
        "comm_diff": commutator(r2, r1).trace() - commutator(r1, r2).trace(),
        "tr_r1_r2": (r1 @ r2).trace(),
    }
    expected = closed_forms(params)
    bad = [k for k in values if values[k] != expected[k]]
    if bad:
        raise InternalError(f"trace identities fail: {bad}")
    return values


def trace_identities_symbolic() -> dict[str, bool]:
    """The same identities as polynomial identities in indeterminate c, d."""
    c, d = variables("c d")
    r1, r2, den = generator_polys()
    e1, e2 = 1 - c**2, 1 - d**2
    r1r2 = pmat_mul(r1, r2)
    m12 = pmat_mul(r1r2, r2)
    m11 = pmat_mul(pmat_mul(r1, r1), r2)
    out = {}
    # tau is scale invariant, so use the numerator matrices directly
    out["tau_r1_r2sq"] = pmat_trace(m12) ** 3 * e1 * e2**2 == 64 * pmat_det(m12)
    out["tau_r1sq_r2"] = pmat_trace(m11) ** 3 * e1**2 * e2 == 64 * pmat_det(m11)
    # traces of the true commutators carry den^3 from three copies of r1
    c12 = pmat_mul(pmat_mul(pmat_mul(r1, r2), pmat_mul(r1, r1)), pmat_mul(r2, r2))
    c21 = pmat_mul(pmat_mul(pmat_mul(r2, r1), pmat_mul(r2, r2)), pmat_mul(r1, r1))
    out["comm_diff"] = pmat_trace(c21) - pmat_trace(c12) == 16 * c * d * den**2
    out["tr_r1_r2"] = pmat_trace(r1r2) == -den
    out["det_r1_r2"] = pmat_det(r1r2) == den**3
    out["tr_r1"] = pmat_trace(r1).is_zero()
    out["tr_r2"] = pmat_trace(r2).is_zero()
    out["r1_cubed_scalar"] = _is_scalar_pmat(pmat_mul(r1, pmat_mul(r1, r1)))
    out["r2_cubed_scalar"] = _is_scalar_pmat(pmat_mul(r2, pmat_mul(r2, r2)))
    out["parabolic_discriminant"] = char_discriminant(r1r2).is_zero()
    return out


def _is_scalar_pmat(m) -> bool:
    return (all(m[i][j].is_zero() for i in range(3) for j in range(3) if i != j)
            and m[0][0] == m[1][1] == m[2][2])


def char_discriminant(m) -> MultiPoly:
    """Discriminant of the characteristic polynomial x^3 - e1 x^2 + e2 x - e3."""
    e1 = pmat_trace(m)
    e2 = (m[0][0] * m[1][1] - m[0][1] * m[1][0] + m[0][0] * m[2][2] - m[0][2] * m[2][0]
          + m[1][1] * m[2][2] - m[1][2] * m[2][1])
    e3 = pmat_det(m)
    b, c, d = -e1, e2, -e3
    return 18 * b * c * d - 4 * b**3 * d + b**2 * c**2 - 4 * c**3 - 27 * d**2


def theta4_orbit(params) -> list[PappusParams]:
    pp = _params(params)
    out = [pp]
    for _ in range(3):
        last = out[-1]
        out.append(PappusParams(-last.d, last.c))
    return out


def theta4_canonical(params) -> PappusParams:
    """Orbit representative with c > 0 and d >= 0 under (c,d) -> (-d,c)."""
    pp = _params(params)
    if pp.c == 0 and pp.d == 0:
        return pp
    for q in theta4_orbit(pp):
        if q.c > 0 and q.d >= 0:
            return q
    raise InternalError("no canonical representative found")
