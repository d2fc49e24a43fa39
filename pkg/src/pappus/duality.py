"""The duality polynomial psi, the duality curves, and the polarity solver.

psi(a,b,c,d) vanishes exactly where the morphed representation with
generators r1 and Sigma^{-1} r2 Sigma admits a polarity conjugating r1 to
the morphed r2.  For fixed (b,c,d) it has one root in the Theta segment S_b,
and these roots trace the duality curve of (c,d).
"""

from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import (CertificationFailed, InternalError, NoPolarity, NotElliptic,
                     ParamOutOfRange, SingularMatrix)
from .kernel import ProjMap
from .morph import morphed_generator_polys, morphed_generators, segment_bounds
from .poly import (Certificate, DomainBox, Interval, MultiPoly, parse, pmat_det, pmat_identity,
                   pmat_mul, pmat_scale, pmat_sub, pmat_trace, positivity_check,
                   special_poly, sturm_count, uevaluate, variables)

PSI_TEXT = ("(a^2-1)*(b^2+1)*(a^2*b^2+a^2+a*b^2-a+b^2+1)*(c^2+d^2-2*c^2*d^2)"
            " + a*(b^2-1)*(a^2*b^2+a^2+2*a*b^2-4*a*b-2*a+b^2+1)*c*d*(c^2-d^2)")
PSI = parse(PSI_TEXT)
DEFAULT_TOL = Fraction(1, 2**40)


@dataclass(frozen=True)
class PsiBuild:
    method: int
    numerator: MultiPoly
    cofactor: MultiPoly


def build_psi(method: int = 3) -> PsiBuild:
    """Derive psi from the morphed generators.

    Method 3 clears the denominator of tr(r1 r2m) - tr(r1^2 r2m^2); method 1
    takes the numerator of det(r1 r2m - I) and divides out psi, reporting
    the cofactor.
    """
    r1, r2m, d1, d2 = morphed_generator_polys()
    den = d1 * d2
    prod = pmat_mul(r1, r2m)
    if method == 3:
        x = pmat_trace(prod)
        y = pmat_trace(pmat_mul(pmat_mul(r1, r1), pmat_mul(r2m, r2m)))
        num = x - y.divexact(den)
        return PsiBuild(3, num, MultiPoly.const(1))
    if method == 1:
        num = pmat_det(pmat_sub(prod, pmat_scale(pmat_identity(), den)))
        try:
            cof = num.divexact(PSI)
        except ValueError:
            raise InternalError("method 1 numerator is not divisible by psi") from None
        return PsiBuild(1, num, cof)
    if method == 2:
        raise ValueError("method 2 needs external coordinates and is not implemented")
    raise ValueError(f"unknown method {method}")


def psi_value(a, b, c, d) -> Fraction:
    return PSI.evaluate({"a": a, "b": b, "c": c, "d": d})


def psi_in_a(b, c, d) -> list[Fraction]:
    """Coefficients of psi(., b, c, d) in a, low to high."""
    return PSI.subs({"b": Fraction(b), "c": Fraction(c), "d": Fraction(d)}).univariate("a")


def segment_Sb(b):
    """S_b as (lo, hi) with hi None for the unbounded case."""
    seg = segment_bounds(b)
    if seg is None:
        raise ParamOutOfRange(f"S_b needs b > 1, got {b}")
    return seg


def _sign(x):
    return (x > 0) - (x < 0)


def _check_cd(c, d):
    c, d = Fraction(c), Fraction(d)
    if not (-1 < c < 1 and -1 < d < 1):
        raise ParamOutOfRange(f"(c,d)=({c},{d}) outside (-1,1)^2")
    return c, d


def wall_signs(b, c, d) -> tuple[int, int]:
    """Signs of psi at the left and right ends of S_b (limit at infinity)."""
    b = Fraction(b)
    c, d = _check_cd(c, d)
    if c == 0 and d == 0:
        raise ParamOutOfRange("wall signs need (c,d) != (0,0)")
    lo, hi = segment_Sb(b)
    coeffs = psi_in_a(b, c, d)
    left = _sign(uevaluate(coeffs, lo))
    right = _sign(uevaluate(coeffs, hi)) if hi is not None else _sign(coeffs[-1])
    return left, right


def normalize_cd(c, d):
    """Map (c,d) to 0 <= c' <= d' by rotation and, if needed, the c<->d swap.

    Returns (c', d', swapped): psi(., b, c, d) has the same roots as
    psi(., b, c', d') when not swapped and their inverses when swapped.
    """
    from .boxes import theta4_canonical

    c, d = _check_cd(c, d)
    if c == 0 and d == 0:
        return c, d, False
    can = theta4_canonical((c, d))
    c, d = can.c, can.d
    if c > d:
        return d, c, True
    return c, d, False


@dataclass(frozen=True)
class RootBracket:
    lo: Fraction
    hi: Fraction
    sign_lo: int
    sign_hi: int
    unique: bool
    sturm_count: int | None = None

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def contains(self, a) -> bool:
        return self.lo <= Fraction(a) <= self.hi


def solve_duality_a(b, c, d, tol=DEFAULT_TOL) -> RootBracket:
    """Bracket the unique root in S_b of psi(., b, c, d) by exact bisection."""
    b, tol = Fraction(b), Fraction(tol)
    c, d = _check_cd(c, d)
    if b < 1:
        raise ParamOutOfRange("b must be at least 1")
    if (c == 0 and d == 0) or b == 1:
        # the vertical ray convention, and the Pappus endpoint a = 1 at b = 1
        return RootBracket(Fraction(1), Fraction(1), 0, 0, True, None)
    coeffs = psi_in_a(b, c, d)
    lo, hi = segment_Sb(b)
    if uevaluate(coeffs, 1) == 0:
        # a = 1 lies in every S_b; on c = d it is the exact root
        count = sturm_count(coeffs, lo, hi)
        if count != 1:
            raise InternalError(f"psi has {count} roots in S_b at b={b}, (c,d)=({c},{d})")
        return RootBracket(Fraction(1), Fraction(1), 0, 0, True, count)
    count = sturm_count(coeffs, lo, hi)
    if count != 1:
        raise InternalError(f"psi has {count} roots in S_b at b={b}, (c,d)=({c},{d})")
    s_lo, s_hi = wall_signs(b, c, d)
    if hi is None:
        hi = max(Fraction(2), 2 * lo)
        while _sign(uevaluate(coeffs, hi)) != s_hi:
            hi *= 2
    left, right = lo, hi
    while right - left > tol:
        mid = (left + right) / 2
        s = _sign(uevaluate(coeffs, mid))
        if s == 0:
            return RootBracket(mid, mid, 0, 0, True, count)
        if s == s_lo:
            left = mid
        else:
            right = mid
    return RootBracket(left, right, s_lo, s_hi, True, count)


def solve_curve_point(b, c, d, tol=DEFAULT_TOL) -> RootBracket:
    """Root bracket computed in the normalized quadrant and mapped back."""
    c2, d2, swapped = normalize_cd(c, d)
    br = solve_duality_a(b, c2, d2, tol)
    if not swapped or br.lo == br.hi == 1:
        return br
    # a -> 1/a reverses the bracket; widths shrink since the root is below 1
    return RootBracket(1 / br.hi, 1 / br.lo, -br.sign_hi, -br.sign_lo, br.unique, br.sturm_count)


def trace_curve(c, d, b_grid, tol=DEFAULT_TOL):
    """Points (b, a_lo, a_hi) along the duality curve, starting at (1, 1)."""
    rows = [(Fraction(1), Fraction(1), Fraction(1))]
    for b in b_grid:
        b = Fraction(b)
        if b == 1:
            continue
        br = solve_curve_point(b, c, d, tol)
        rows.append((b, br.lo, br.hi))
    return rows


def curve_csv(rows) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["b", "a_lo", "a_hi"])
    for b, lo, hi in rows:
        w.writerow([str(b), str(lo), str(hi)])
    return out.getvalue()


def curve_svg(rows, b_max, size: int = 600, margin: int = 40, a_max: float = 6.0) -> str:
    """Curve in the (a, b) plane over the Theta boundary curves."""
    b_max = float(b_max)
    span = size - 2 * margin

    def xy(a, b):
        return (margin + a / a_max * span, size - margin - (b - 1) / (b_max - 1) * span)

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}">',
             f'<rect width="{size}" height="{size}" fill="white"/>']
    root2 = 1 + math.sqrt(2)
    left, right = [], []
    steps = 400
    for k in range(1, steps + 1):
        b = 1 + (b_max - 1) * k / steps
        k2 = 1 + 2 * b - b * b
        if k2 > 0:
            left.append(xy(k2 / (b * b + 1), b))
            if (b * b + 1) / k2 <= a_max:
                right.append(xy((b * b + 1) / k2, b))
        elif b > root2:
            left.append(xy(0, b))
    for pts, colour in ((left, "grey"), (right, "grey")):
        if len(pts) > 1:
            path = " ".join(f"{x:.2f},{y:.2f}" for x, y in pts)
            parts.append(f'<polyline points="{path}" fill="none" stroke="{colour}"/>')
    curve = [xy(float(lo + hi) / 2, float(b)) for b, lo, hi in rows]
    path = " ".join(f"{x:.2f},{y:.2f}" for x, y in curve)
    parts.append(f'<polyline points="{path}" fill="none" stroke="crimson" stroke-width="2"/>')
    parts.append("</svg>")
    return "\n".join(parts)


# ---------------------------------------------------------------------------
# local analysis at the Pappus point


def _phi_components():
    """tr(r1 r2m) and tr(r1^2 r2m^2) as (numerator, denominator) pairs."""
    r1, r2m, d1, d2 = morphed_generator_polys()
    x = pmat_trace(pmat_mul(r1, r2m))
    y = pmat_trace(pmat_mul(pmat_mul(r1, r1), pmat_mul(r2m, r2m)))
    den = d1 * d2
    return (x, den), (y, den * den)


def _partial_at_11(num, den, var):
    """d(num/den)/d var at a = b = 1, as a (numerator, denominator) pair."""
    at = {"a": 1, "b": 1}
    n = num.diff(var) * den - num * den.diff(var)
    return n.subs(at), (den * den).subs(at)


def jacobian_at_pappus():
    """det d(Phi)/d(a,b) at (1,1) as a reduced pair (numerator, denominator)."""
    (x, dx), (y, dy) = _phi_components()
    xa = _partial_at_11(x, dx, "a")
    xb = _partial_at_11(x, dx, "b")
    ya = _partial_at_11(y, dy, "a")
    yb = _partial_at_11(y, dy, "b")
    num = xa[0] * yb[0] * xb[1] * ya[1] - xb[0] * ya[0] * xa[1] * yb[1]
    den = xa[1] * yb[1] * xb[1] * ya[1]
    return num, den


JACOBIAN_TEXT = "8*(c^2+d^2-2*c^2*d^2)*(c^2+d^2-2)"
JACOBIAN_DEN_TEXT = "(1-c^2)^2*(1-d^2)^2"


def jacobian_value(c, d) -> Fraction:
    num, den = jacobian_at_pappus()
    pt = {"c": c, "d": d}
    return num.evaluate(pt) / den.evaluate(pt)


def jacobian_check() -> Certificate:
    num, den = jacobian_at_pappus()
    closed_num, closed_den = parse(JACOBIAN_TEXT), parse(JACOBIAN_DEN_TEXT)
    identity = num * closed_den == closed_num * den
    steps = [Certificate("det dPhi at (1,1) equals the closed form", "exact", identity)]
    if not identity:
        raise CertificationFailed("Jacobian closed form does not match")
    square = DomainBox({"c": (-1, 1), "d": (-1, 1)}, punctured=("c", "d"))
    steps.append(positivity_check(special_poly(0), square))
    c, d = variables("c d")
    steps.append(positivity_check(2 - c**2 - d**2, square,
                                  decomposition=[(1, [1 - c, 1 + c]), (1, [1 - d, 1 + d])]))
    return Certificate("Jacobian nonzero at the Pappus point for (c,d) != 0", "composite",
                       True, {"closed_form": f"{JACOBIAN_TEXT} / ({JACOBIAN_DEN_TEXT})"}, steps)


def reverse_in(p: MultiPoly, var: str, k: int) -> MultiPoly:
    """var^k p(1/var), for k at least the degree of p in var."""
    cs = p.coeffs(var)
    if len(cs) - 1 > k:
        raise ValueError("k below the degree")
    x = MultiPoly.var(var)
    return sum((cj * x ** (k - j) for j, cj in enumerate(cs) if cj), MultiPoly.const(0))


def inverse_symmetry_check() -> Certificate:
    """a^k psi(1/a, b, d, c) = -psi(a, b, c, d) and psi o theta4 = psi."""
    c, d = variables("c d")
    k = PSI.degree("a")
    swapped = PSI.subs({"c": d, "d": c})
    inv_ok = reverse_in(swapped, "a", k) == -PSI
    rot_ok = PSI.subs({"c": -d, "d": c}) == PSI
    fixed_ok = PSI.subs({"a": 1, "d": c}).is_zero()
    steps = [
        Certificate(f"a^{k} psi(1/a,b,d,c) = -psi(a,b,c,d)", "exact", inv_ok, {"power": k}),
        Certificate("psi(a,b,-d,c) = psi(a,b,c,d)", "exact", rot_ok),
        Certificate("psi(1,b,c,c) = 0", "exact", fixed_ok),
    ]
    passed = inv_ok and rot_ok and fixed_ok
    if not passed:
        raise CertificationFailed("psi symmetry identities fail")
    return Certificate("inverse symmetry and rotation symmetry of psi", "composite", True,
                       {"power_of_a": k}, steps)


# ---------------------------------------------------------------------------
# polarity


def _sym_unknowns():
    return [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)]


def _polarity_system(r1: ProjMap, r2m: ProjMap):
    """Rows of the linear map g -> G r1^{-T} - r2m G on symmetric G."""
    a = r1.inverse().transpose().m
    bm = r2m.m
    cols = []
    for (i, j) in _sym_unknowns():
        e = [[Fraction(0)] * 3 for _ in range(3)]
        e[i][j] = e[j][i] = Fraction(1)
        out = [[sum(e[r][k] * a[k][s] for k in range(3)) - sum(bm[r][k] * e[k][s] for k in range(3))
                for s in range(3)] for r in range(3)]
        cols.append([x for row in out for x in row])
    return [[cols[j][i] for j in range(6)] for i in range(9)]


def _nullspace(rows):
    """Exact nullspace basis of a rational matrix."""
    m = [list(r) for r in rows]
    ncols = len(m[0])
    pivots = []
    r = 0
    for col in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][col] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        p = m[r][col]
        m[r] = [x / p for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][col] != 0:
                f = m[i][col]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(col)
        r += 1
        if r == len(m):
            break
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fcol in free:
        v = [Fraction(0)] * ncols
        v[fcol] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -m[i][fcol]
        basis.append(v)
    return basis


def _solve_square(m, rhs):
    n = len(m)
    aug = [list(row) + [y] for row, y in zip(m, rhs)]
    for col in range(n):
        piv = next((i for i in range(col, n) if aug[i][col] != 0), None)
        if piv is None:
            return None
        aug[col], aug[piv] = aug[piv], aug[col]
        p = aug[col][col]
        aug[col] = [x / p for x in aug[col]]
        for i in range(n):
            if i != col and aug[i][col] != 0:
                f = aug[i][col]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[col])]
    return [aug[i][n] for i in range(n)]


def _sym_matrix(g):
    idx = _sym_unknowns()
    m = [[Fraction(0)] * 3 for _ in range(3)]
    for (i, j), x in zip(idx, g):
        m[i][j] = m[j][i] = x
    return m


def _scale_max_one(g):
    top = max(g, key=abs)
    return [x / abs(top) for x in g]


def polarity_residual(g: ProjMap, r1: ProjMap, r2m: ProjMap) -> float:
    """max |G r1^{-T} - r2m G| with G scaled to largest entry 1."""
    flat = [x for row in g.m for x in row]
    s = max(abs(x) for x in flat)
    lhs = (g @ r1.inverse().transpose()).m
    rhs = (r2m @ g).m
    return float(max(abs(lhs[i][j] - rhs[i][j]) for i in range(3) for j in range(3)) / s)


def _least_squares(rows):
    """Best g with one coordinate pinned to 1, judged by the normalized residual."""
    best = None
    for pin in range(6):
        a = [[r[j] for j in range(6) if j != pin] for r in rows]
        y = [-r[pin] for r in rows]
        ata = [[sum(a[k][i] * a[k][j] for k in range(len(a))) for j in range(5)] for i in range(5)]
        aty = [sum(a[k][i] * y[k] for k in range(len(a))) for i in range(5)]
        sol = _solve_square(ata, aty)
        if sol is None:
            continue
        g = sol[:pin] + [Fraction(1)] + sol[pin:]
        g = _scale_max_one(g)
        res = max(abs(sum(r[j] * g[j] for j in range(6))) for r in rows)
        if best is None or res < best[0]:
            best = (res, g)
    return best


@dataclass(frozen=True)
class Polarity:
    matrix: ProjMap
    residual: float
    exact: bool


def solve_polarity(r1: ProjMap, r2m: ProjMap, tol: float | None = 1e-10) -> Polarity:
    """Symmetric G with G r1^{-T} G^{-1} = r2m, if one exists and is definite.

    An exact solution is preferred.  Otherwise, when ``tol`` is given, the
    exact least-squares solution is accepted if its residual is within tol.
    """
    rows = _polarity_system(r1, r2m)
    basis = _nullspace(rows)
    if basis:
        candidates, exact = _span_samples(basis), True
    else:
        best = _least_squares(rows) if tol is not None else None
        if best is None or float(best[0]) > tol:
            res = None if best is None else float(best[0])
            raise NoPolarity(f"no polarity conjugates r1 to r2m (residual {res})")
        candidates, exact = [best[1]], False
    for g in candidates:
        gm = _definite(_sym_matrix(g))
        if gm is not None:
            return Polarity(gm, polarity_residual(gm, r1, r2m), exact)
    raise NotElliptic("no conjugating polarity is definite")


def _span_samples(basis):
    """Basis vectors first, then small integer combinations."""
    if len(basis) == 1:
        return [_scale_max_one(basis[0])]
    out = [_scale_max_one(v) for v in basis]
    for coeffs in itertools.product(range(-2, 3), repeat=len(basis)):
        if sum(1 for x in coeffs if x) < 2:
            continue
        v = [sum(k * vec[i] for k, vec in zip(coeffs, basis)) for i in range(6)]
        if any(v):
            out.append(_scale_max_one(v))
    return out


def _definite(m):
    """The matrix as a positive-definite ProjMap (sign fixed), or None."""
    minors = (m[0][0], m[0][0] * m[1][1] - m[0][1] ** 2)
    try:
        gm = ProjMap(m)
    except SingularMatrix:
        return None
    det = gm.det()
    if minors[0] > 0 and minors[1] > 0 and det > 0:
        return gm
    if minors[0] < 0 and minors[1] > 0 and det < 0:
        return gm.scale(-1)
    return None


def det_r1r2m_minus_identity(a, b, c, d) -> Fraction:
    r1, r2m = morphed_generators(a, b, c, d)
    return _det_minus_identity((r1 @ r2m).m)


def _det_minus_identity(m):
    n = [[m[i][j] - (1 if i == j else 0) for j in range(3)] for i in range(3)]
    return (n[0][0] * (n[1][1] * n[2][2] - n[1][2] * n[2][1])
            - n[0][1] * (n[1][0] * n[2][2] - n[1][2] * n[2][0])
            + n[0][2] * (n[1][0] * n[2][1] - n[1][1] * n[2][0]))


def polarity_at(a, b, c, d, tol: float | None = 1e-10) -> Polarity:
    r1, r2m = morphed_generators(a, b, c, d)
    return solve_polarity(r1, r2m, tol)


def convergence_profile(direction, exponents, b_grid, tol=DEFAULT_TOL):
    """max |a_root - 1| over the b grid for (c,d) = 10^-k * direction."""
    out = []
    for k in exponents:
        eps = Fraction(1, 10**k)
        c, d = eps * Fraction(direction[0]), eps * Fraction(direction[1])
        worst = Fraction(0)
        for b in b_grid:
            br = solve_curve_point(b, c, d, tol)
            worst = max(worst, abs(br.mid - 1))
        out.append((k, worst))
    return out


def theta_segment_interval(b) -> Interval:
    lo, hi = segment_Sb(b)
    return Interval(lo, hi)
