"""Certifier registry: each entry re-derives one piece of the algebra and
records every sub-obligation as an exact identity, a positivity
certificate, or sampled evidence.
"""

from __future__ import annotations

import itertools
import json
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction

from .boxes import trace_identities_symbolic
from .duality import (PSI, build_psi, inverse_symmetry_check, jacobian_check, reverse_in,
                      solve_duality_a, wall_signs)
from .errors import CertificationFailed, DepthLimit, InternalError, PappusError
from .morph import morphed_generator_polys, theta_contains, theta_closed_form
from .poly import (Certificate, DomainBox, Interval, MultiPoly, parse, pmat_det, pmat_mul,
                   pmat_trace, positivity_check, resultant, special_poly, specialp_proof,
                   taylor_at_one, taylor_certify, taylor_list, variables)

a, b, c, d, t, e = variables("a b c d t e")

IDENTITY = "identity"
POSITIVITY = "positivity"
SAMPLED = "sampled"


@dataclass
class Obligation:
    kind: str
    claim: str
    passed: bool
    details: dict = field(default_factory=dict)
    certificate: Certificate | None = None

    def to_json(self):
        out = {"kind": self.kind, "claim": self.claim, "passed": self.passed,
               "details": {k: _jsonable(v) for k, v in self.details.items()}}
        if self.certificate is not None:
            out["certificate"] = self.certificate.to_json()
        return out


@dataclass
class LemmaCertificate:
    lemma: str
    obligations: list = field(default_factory=list)
    discrepancies: list = field(default_factory=list)
    witnesses: list = field(default_factory=list)
    seconds: float = 0.0
    error: str | None = None

    @property
    def passed(self) -> bool:
        return self.error is None and bool(self.obligations) and all(o.passed for o in self.obligations)

    def failures(self):
        return [o for o in self.obligations if not o.passed]

    def to_json(self):
        return {
            "lemma": self.lemma,
            "passed": self.passed,
            "seconds": round(self.seconds, 3),
            "error": self.error,
            "obligations": [o.to_json() for o in self.obligations],
            "discrepancies": [{k: _jsonable(v) for k, v in x.items()} for x in self.discrepancies],
            "witnesses": [_jsonable(w) for w in self.witnesses],
        }


def _jsonable(v):
    if isinstance(v, (Fraction, MultiPoly)):
        return str(v)
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


class _Recorder:
    """Collects obligations for one lemma."""

    def __init__(self, lemma: str):
        self.cert = LemmaCertificate(lemma)

    def identity(self, claim, lhs, rhs):
        ok = lhs == rhs
        details = {} if ok else {"computed": lhs, "expected": rhs}
        self.cert.obligations.append(Obligation(IDENTITY, claim, ok, details))
        return ok

    def fact(self, claim, ok, kind=IDENTITY, **details):
        self.cert.obligations.append(Obligation(kind, claim, bool(ok), details))
        return ok

    def positive(self, claim, p, domain, strict=True, decomposition=None):
        try:
            cert = positivity_check(p, domain, strict, decomposition=decomposition)
        except (CertificationFailed, DepthLimit) as exc:
            witness = getattr(exc, "witness", None)
            if witness is not None:
                self.cert.witnesses.append(witness)
            self.cert.obligations.append(Obligation(POSITIVITY, claim, False,
                                                    {"reason": str(exc), "witness": witness}))
            return False
        self.cert.obligations.append(Obligation(POSITIVITY, claim, True,
                                                {"method": cert.method}, cert))
        return True

    def taylor(self, claim, h, var, lam, domain):
        try:
            cert = taylor_certify(h, var, lam, domain)
        except (CertificationFailed, DepthLimit) as exc:
            self.cert.obligations.append(Obligation(POSITIVITY, claim, False,
                                                    {"reason": str(exc),
                                                     "index": getattr(exc, "index", None)}))
            return False
        self.cert.obligations.append(Obligation(POSITIVITY, claim, True, {"method": "taylor"}, cert))
        return True

    def certificate(self, claim, fn):
        try:
            cert = fn()
        except PappusError as exc:
            self.cert.obligations.append(Obligation(POSITIVITY, claim, False, {"reason": str(exc)}))
            return False
        kind = IDENTITY if cert.method == "exact" else POSITIVITY
        self.cert.obligations.append(Obligation(kind, claim, cert.passed, {"method": cert.method}, cert))
        return cert.passed

    def taylor_table(self, name, h, var, printed):
        """Compare H^(k) at var = 1 with a printed list; higher ones must vanish."""
        ok = True
        for k, expected in printed.items():
            ok &= self.identity(f"{name}^({k}) matches the listed value",
                                taylor_at_one(h, var, k), expected)
        top = max(printed)
        deg = h.degree(var)
        higher = all(taylor_at_one(h, var, k).is_zero() for k in range(top + 1, max(deg, top) + 2))
        ok &= self.fact(f"{name}^(k) = 0 for k > {top}", higher, degree=deg)
        return ok

    def discrepancy(self, name, computed, printed, note=""):
        self.cert.discrepancies.append({"name": name, "computed": computed,
                                        "printed": printed, "note": note})


def _timed(lemma, body):
    rec = _Recorder(lemma)
    start = time.perf_counter()
    try:
        body(rec)
    except PappusError as exc:
        rec.cert.error = f"{type(exc).__name__}: {exc}"
    rec.cert.seconds = time.perf_counter() - start
    return rec.cert


PUNCTURED_SQUARE = DomainBox({"c": (-1, 1), "d": (-1, 1)}, punctured=("c", "d"))


# ---------------------------------------------------------------------------
# specialp


def _grid_oracle(lam, n=100):
    """Minimum of f_lam on the n x n grid of odd-numerator points (never the origin)."""
    f = special_poly(lam)
    best = None
    pts = [Fraction(2 * i - (n - 1), n) for i in range(n)]
    for x, y in itertools.product(pts, repeat=2):
        v = f.evaluate({"c": x, "d": y})
        if best is None or v < best[1]:
            best = ({"c": x, "d": y}, v)
    return best


def certify_specialp(lam=0) -> LemmaCertificate:
    lam = Fraction(lam)

    def body(rec):
        f = special_poly(lam)
        u = MultiPoly.var("u")
        rec.identity("f(u,1) = (1-u^2)(1-lam u)", f.subs({"c": u, "d": 1}),
                     (1 - u**2) * (1 - lam * u))
        rec.identity("f(1,v) = (1-v^2)(1+lam v)", f.subs({"c": 1, "d": u}),
                     (1 - u**2) * (1 + lam * u))
        rec.identity("f(c,d) = f(-d,c)", f.subs({"c": -d, "d": c}), f)
        pt, low = _grid_oracle(lam)
        grid_ok = rec.fact("f > 0 on a 100 x 100 rational grid", low > 0, SAMPLED,
                           points=10_000, minimum=low, argmin=pt)
        if not grid_ok:
            rec.cert.witnesses.append(pt)
        try:
            proof = specialp_proof(lam)
        except CertificationFailed as exc:
            if exc.witness is not None:
                rec.cert.witnesses.append(exc.witness)
            rec.fact("scaling argument with A = (u^2+v^2) - f", False, POSITIVITY,
                     reason=str(exc), witness=exc.witness)
            return
        rec.cert.obligations.append(Obligation(POSITIVITY, "f > 0 on (-1,1)^2 minus the origin",
                                               True, {"method": "specialp"}, proof))

    return _timed("specialp", body)


# ---------------------------------------------------------------------------
# WALL


MU_TABLE = {
    0: "8*c^2+8*d^2-16*c^2*d^2",
    1: "12*c^2+12*d^2-24*c^2*d^2-4*c^3*d+4*c*d^3",
    2: "12*c^2+12*d^2-24*c^2*d^2-4*c^3*d+4*c*d^3",
    3: "12*c^2+12*d^2-24*c^2*d^2+12*c^3*d-12*c*d^3",
    4: "24*c^2+24*d^2-48*c^2*d^2+24*c^3*d-24*c*d^3",
}

LEFT_NUM = 1 + 2 * b - b**2
LEFT_DEN = 1 + b**2


def substitute_ratio(p: MultiPoly, var: str, num: MultiPoly, den: MultiPoly, k: int | None = None):
    """den^k p(num/den) for k >= deg_var p (default: the degree)."""
    cs = p.coeffs(var)
    k = len(cs) - 1 if k is None else k
    return sum((cj * num**j * den ** (k - j) for j, cj in enumerate(cs) if cj), MultiPoly.const(0))


def mu_poly(psi=PSI) -> MultiPoly:
    """mu with psi(left end of S_b) = -(4b(b^2-1)/(1+b^2)^2) mu."""
    num = substitute_ratio(psi, "a", LEFT_NUM, LEFT_DEN, 4)
    return -num.divexact(4 * b * (b**2 - 1) * LEFT_DEN**2)


def certify_wall(psi=PSI) -> LemmaCertificate:
    def body(rec):
        rec.identity("psi(0,b,c,d) = (1+b^2)^2 (2c^2d^2-c^2-d^2)", psi.subs({"a": 0}),
                     (1 + b**2) ** 2 * (2 * c**2 * d**2 - c**2 - d**2))
        try:
            mu = mu_poly(psi)
        except ValueError:
            rec.fact("psi at the left end of S_b is divisible by 4b(b^2-1)(1+b^2)^2", False)
            return
        rec.fact("psi at the left end of S_b is divisible by 4b(b^2-1)(1+b^2)^2", True, mu=mu)
        rec.taylor_table("mu", mu, "b", {k: parse(v) for k, v in MU_TABLE.items()})
        for k in range(5):
            rec.positive(f"mu^({k}) > 0 on (-1,1)^2 minus the origin",
                         taylor_at_one(mu, "b", k), PUNCTURED_SQUARE)
        dom = DomainBox({"c": (-1, 1), "d": (-1, 1)}, punctured=("c", "d"))
        rec.taylor("mu > 0 for b >= 1 by the Taylor method", mu, "b", 0, dom)
        rng = random.Random(11)
        signs = []
        for _ in range(10):
            bb = Fraction(rng.randint(101, 500), 100)
            cc = Fraction(rng.randint(0, 98), 100)
            dd = Fraction(rng.randint(int(cc * 100) + 1, 99), 100)
            signs.append(wall_signs(bb, cc, dd))
        rec.fact("wall signs are (-,+) at 10 samples with 0 <= c <= d", all(s == (-1, 1) for s in signs),
                 SAMPLED, signs=signs)

    return _timed("wall", body)


# ---------------------------------------------------------------------------
# ZERO


R_TEXT = ("(a^6+1)*(b^2+1)^2 + (a^5+a)*(4*b^4-8*b^3-8*b-4)"
          " + (a^4+a^2)*(5*b^4-4*b^3+2*b^2+4*b+5) + a^3*(4*b^4-4)")
R_POLY = parse(R_TEXT)
P_COEFFS = (32, 48, 24, 56, 92, 52, 10, 2, 1)
P_POLY = sum((k * (b - 1) ** j for j, k in enumerate(P_COEFFS)), MultiPoly.const(0))
R_TABLE = {
    1: "(8-16*a+16*a^2)+16*a^3+8*a^4*(2-2*a+a^2)",
    2: "16*(1+a^6)+40*(a^2+a^4)+48*a^3",
    3: "24*(1+a^6)+48*(a+a^5)+96*(a^2+a^4)+96*a^3",
    4: "24*(1+a^6)+96*(a+a^5)+120*(a^2+a^4)+96*a^3",
}
RESULTANT_FACTOR = 4 * (b**4 - 1) ** 3 * (d**2 - 1) ** 2 * d**9


def certify_zero(psi=PSI) -> LemmaCertificate:
    def body(rec):
        res = resultant(psi, psi.diff("a"), "c")
        rec.identity("res_c(psi, dpsi/da) = 4(b^4-1)^3(d^2-1)^2 d^9 r^3", res,
                     RESULTANT_FACTOR * R_POLY**3)
        on_alpha = substitute_ratio(R_POLY, "a", LEFT_NUM, LEFT_DEN, 6)
        rec.identity("(1+b^2)^6 r(alpha) = 8b(b^2-1)(1+b^2)^2 P", on_alpha,
                     8 * b * (b**2 - 1) * LEFT_DEN**2 * P_POLY)
        on_beta = substitute_ratio(R_POLY, "a", LEFT_DEN, LEFT_NUM, 6)
        printed = 8 * b * (b**2 - 1) * P_POLY
        corrected = 8 * b * (b**2 - 1) * LEFT_DEN**2 * P_POLY
        rec.identity("(b^2-2b-1)^6 r(beta) = 8b(b^2-1)(1+b^2)^2 P", on_beta, corrected)
        if on_beta != printed:
            rec.discrepancy("r on beta", "8b(b^2-1)(1+b^2)^2 P(b)/(b^2-2b-1)^6",
                            "8b(b^2-1)P(b)/(b^2-2b-1)^6",
                            "the listed form drops the factor (1+b^2)^2")
        ray = DomainBox({"b": Interval(1, None, closed_lo=True)})
        rec.positive("P(b) - 32 >= 0 for b >= 1", P_POLY - 32, ray, strict=False)
        rec.taylor_table("r", R_POLY, "b", {k: parse(v) for k, v in R_TABLE.items()})
        half_line = DomainBox({"a": (0, None)})
        for k in range(1, 5):
            rec.positive(f"r^({k}) > 0 for a > 0", taylor_at_one(R_POLY, "b", k), half_line)
        rec.taylor("dr/db > 0 on (0,inf) x (1,inf) by the Taylor method", R_POLY.diff("b"), "b", 0,
                   half_line)
        boundary = R_POLY.evaluate({"a": 1, "b": 1})
        rec.fact("boundary value r(1,1) recorded", True, value=boundary)

    return _timed("zero", body)


# ---------------------------------------------------------------------------
# BOUND1


PSI2_PRINTED = parse("16*b^2*(b-1)*c*d*(d^2-c^2)"
                     " + (9*c^2+9*d^2-18*c^2*d^2+(2*c*d^3-2*c^3*d))"
                     " + (30*c^2+30*d^2-60*c^2*d^2+(16*c*d^3-16*c^3*d))*b^2"
                     " + (21*c^2+21*d^2-42*c^2*d^2-(18*c*d^3+18*c^3*d))*b^4")
G_CD = c * d * (d**2 - c**2)


def psi2_decomposition():
    """psi(2,b,c,d) as a sum of special polynomials and a b(b^2-1) g term."""
    return (9 * special_poly(Fraction(-2, 9)) + 30 * b**2 * special_poly(Fraction(-8, 15))
            + 21 * b**4 * special_poly(Fraction(6, 7)) + 16 * b * (b**2 - 1) * G_CD)


def certify_bound1(psi=PSI) -> LemmaCertificate:
    def body(rec):
        at1 = psi.subs({"a": 1})
        rec.identity("psi(1,b,c,d) = 4b(b-1)^2(b+1)cd(c^2-d^2)", at1,
                     4 * b * (b - 1) ** 2 * (b + 1) * c * d * (c**2 - d**2))
        at2 = psi.subs({"a": 2})
        rec.identity("psi(2,b,0-th b coefficient) = 9c^2+9d^2-18c^2d^2+2cd^3-2c^3d",
                     at2.coeff("b", 0), parse("9*c^2+9*d^2-18*c^2*d^2+2*c*d^3-2*c^3*d"))
        rec.identity("psi(2,b,c,d) = 9 f(-2/9) + 30 b^2 f(-8/15) + 21 b^4 f(6/7) + 16 b(b^2-1) g",
                     at2, psi2_decomposition())
        if at2 != PSI2_PRINTED:
            rec.discrepancy("psi(2,b,c,d)", at2, PSI2_PRINTED,
                            "odd part is 16b(b^2-1)cd(d^2-c^2) and the b^4 term carries +18c^3d")
        # 0 <= c <= d is parametrized as d = c + e with c, e in [0,1)
        wedge = DomainBox({"b": Interval(1, None, closed_lo=True),
                           "c": Interval(0, 1, closed_lo=True),
                           "e": Interval(0, 1, closed_lo=True)})
        rec.positive("-psi(1,b,c,c+e) >= 0", -at1.subs({"d": c + e}), wedge, strict=False)
        for lam, name in ((Fraction(-2, 9), "b^0"), (Fraction(-8, 15), "b^2"), (Fraction(6, 7), "b^4")):
            rec.positive(f"{name} part f({lam}) > 0", special_poly(lam), PUNCTURED_SQUARE)
        rec.positive("b(b^2-1) cd(d^2-c^2) >= 0 with d = c + e",
                     (b * (b**2 - 1) * G_CD).subs({"d": c + e}), wedge, strict=False)
        val = psi.evaluate({"a": 2, "b": 2, "c": Fraction(1, 4), "d": Fraction(1, 2)})
        rec.fact("psi(2,2,1/4,1/2) > 0", val > 0, SAMPLED, value=val)
        rng = random.Random(5)
        ok, worst = True, None
        for _ in range(30):
            cc = Fraction(rng.randint(0, 97), 100)
            dd = Fraction(rng.randint(int(cc * 100) + 1, 99), 100)
            bb = Fraction(rng.randint(101, 500), 100)
            br = solve_duality_a(bb, cc, dd, Fraction(1, 2**20))
            ok &= 1 <= br.lo and br.hi <= 2
            worst = br if worst is None or br.hi > worst.hi else worst
        rec.fact("roots lie in [1,2] at 30 samples with 0 <= c <= d", ok, SAMPLED,
                 largest_root=worst.hi)

    return _timed("bound1", body)


# ---------------------------------------------------------------------------
# properness


U_POLY = a**2 * (1 - c**2) + (1 + a) * (1 - c * d)
V_POLY = (1 + a) * (1 + c * d) + a**2 * (1 - d**2)
Z_TABLE = {
    0: "4*(1+2*a^2+a^4)+4*c*(a-1)+4*a^3*c*(a-1)",
    1: "8*(1-c)+8*a+24*a^2+8*a^3+8*a^4+4*a*c+4*a^3*c*(2*a-1)",
    2: "16+24*a+8*a^2*(8-c^2)+24*a^3+16*a^4+16*c*(a^4-1)",
    3: "24+48*a+24*a^2*(4-c^2)+48*a^3+24*a^4+24*c*(a^4-1)+12*a*c*(a^2-1)",
    4: "24+48*a+24*a^2*(3-c^2)+48*a^3+24*a^4+24*c*(a^4-1)+24*a*c*(a^2-1)",
}
WP_TABLE = {
    0: "32*a^2-16*a^3+16*a^4",
    1: "16*a+64*a^2+32*a^4",
    2: "48*a+128*a^2+48*a^3+64*a^4",
    3: "96*a+192*a^2+144*a^3+96*a^4",
    4: "96*a+192*a^2+192*a^3+96*a^4",
}
WM_TABLE = {
    0: "16*a+16*a^4",
    1: "32*a+32*a^2+16*a^3+32*a^4",
    2: "48*a+96*a^2+48*a^3+64*a^4",
    3: "48*a+96*a^2+96*a^3+96*a^4",
    4: "96*a^3+96*a^4",
}


def y_poly():
    """Y with tr(R1 R2m^2) = -4a^2b^2(1-d^2) Y for the generator numerators."""
    r1, r2m, _, _ = morphed_generator_polys()
    n = pmat_mul(r1, pmat_mul(r2m, r2m))
    return (-pmat_trace(n)).divexact(4 * a**2 * b**2 * (1 - d**2)), n


def certify_properness() -> LemmaCertificate:
    def body(rec):
        r1, r2m, _, _ = morphed_generator_polys()
        num = pmat_trace(pmat_mul(r1, r2m))
        rec.identity("b^4 coefficient of the tr(r1 r2m) numerator is -UV", num.coeff("b", 4),
                     -U_POLY * V_POLY)
        w = num + U_POLY * V_POLY * b**4
        rec.fact("remainder W has b-degree at most 3", w.degree("b") <= 3, degree=w.degree("b"))
        sector = DomainBox({"a": Interval(1, 2, True, True), "c": Interval(0, 1, closed_lo=True),
                            "d": Interval(0, 1, closed_lo=True)})
        rec.positive("U - a^2(1-c^2) >= 0", U_POLY - a**2 * (1 - c**2), sector, strict=False,
                     decomposition=[(1, [1 + a, 1 - c]), (1, [1 + a, c, 1 - d])])
        rec.positive("a^2(1-c^2) > 0", a**2 * (1 - c**2), sector,
                     decomposition=[(1, [a**2, 1 - c, 1 + c])])
        rec.positive("V - 2 - a^2(1-d^2) >= 0", V_POLY - 2 - a**2 * (1 - d**2), sector, strict=False)
        rec.positive("a^2(1-d^2) > 0", a**2 * (1 - d**2), sector,
                     decomposition=[(1, [a**2, 1 - d, 1 + d])])

        try:
            y, n = y_poly()
        except ValueError:
            rec.fact("tr(R1 R2m^2) is divisible by 4a^2b^2(1-d^2)", False)
            return
        rec.fact("tr(R1 R2m^2) is divisible by 4a^2b^2(1-d^2)", True)
        # tr(N) = -4a^2b^2(1-d^2) Y, so this determinant gives the tau formula
        rec.identity("det(R1 R2m^2) = -4096 a^12 b^12 (1-c^2)^4 (1-d^2)^5", pmat_det(n),
                     -4096 * a**12 * b**12 * (1 - c**2) ** 4 * (1 - d**2) ** 5)
        y1 = y.subs({"d": 1})
        try:
            z = y1.divexact(1 - c**2)
        except ValueError:
            rec.fact("Y(a,b,c,1) is divisible by 1-c^2", False)
            return
        rec.fact("Y(a,b,c,1) = (1-c^2) Z", True)
        rec.taylor_table("Z", z, "b", {k: parse(v) for k, v in Z_TABLE.items()})
        ac = DomainBox({"a": Interval(1, 2, True, True), "c": Interval(0, 1, closed_lo=True)})
        rec.taylor("Z >= 16 on [1,2] x [0,1) x [1,inf)", z, "b", 16, ac)

        rec.identity("Y(a,b,1,1) = 0", y.subs({"c": 1, "d": 1}), MultiPoly.const(0))
        u3 = -y.diff("c").subs({"c": 1, "d": 1})
        v3 = -y.diff("d").subs({"c": 1, "d": 1})
        rec.taylor_table("W+", u3 + v3, "b", {k: parse(v) for k, v in WP_TABLE.items()})
        rec.taylor_table("W-", u3 - v3, "b", {k: parse(v) for k, v in WM_TABLE.items()})
        a_only = DomainBox({"a": Interval(1, 2, True, True)})
        rec.taylor("W+ >= 32 on [1,2] x [1,inf)", u3 + v3, "b", 32, a_only)
        rec.taylor("W- >= 32 on [1,2] x [1,inf)", u3 - v3, "b", 32, a_only)

    return _timed("properness", body)


# ---------------------------------------------------------------------------
# small (c,d)


def certify_small_cd(psi=PSI) -> LemmaCertificate:
    def body(rec):
        shifted = psi.subs({"a": 1 + t})
        coeffs = shifted.coeffs("t")
        const = coeffs[0]
        rec.identity("t^0 coefficient = 4b(b+1)(b-1)^2 cd(c^2-d^2)", const,
                     4 * b * (b + 1) * (b - 1) ** 2 * c * d * (c**2 - d**2))
        rec.identity("t^0 coefficient vanishes on c = d", const.subs({"d": c}), MultiPoly.const(0))
        lin = coeffs[1] if len(coeffs) > 1 else MultiPoly.const(0)
        quad = lin.homogeneous_part(("c", "d"), 2)
        rest = lin - quad
        q = quad.coeff("c", 2).coeff("d", 0)
        rec.identity("degree-2 part of the t coefficient is a multiple of c^2+d^2", quad,
                     q * (c**2 + d**2))
        rec.positive("its multiplier is positive for b >= 1", q,
                     DomainBox({"b": Interval(1, None, closed_lo=True)}))
        if q != 2:
            rec.discrepancy("t coefficient, (c,d)-degree 2 part", quad, 2 * (c**2 + d**2),
                            "the multiplier depends on b")
        rec.fact("t coefficient has no (c,d)-terms of degree 3 or below other than that part",
                 rest.is_zero() or rest.low_degree(("c", "d")) >= 4,
                 low_degree=None if rest.is_zero() else rest.low_degree(("c", "d")))
        higher = [co for co in coeffs[2:] if not co.is_zero()]
        rec.fact("every t^k coefficient, k >= 2, has (c,d)-degree at least 2",
                 all(co.low_degree(("c", "d")) >= 2 for co in higher),
                 low_degrees=[co.low_degree(("c", "d")) for co in higher])

    return _timed("small_cd", body)


# ---------------------------------------------------------------------------
# duality-module invariants


def certify_psi(psi=PSI) -> LemmaCertificate:
    def body(rec):
        m3 = build_psi(3).numerator
        rec.identity("method 3 numerator equals psi", m3, psi)
        num1 = build_psi(1).numerator
        try:
            cof = num1.divexact(psi)
        except ValueError:
            rec.fact("method 1 numerator is divisible by psi", False)
            return
        rec.fact("method 1 numerator is divisible by psi", True, cofactor=cof)
        rec.identity("cofactor = 16 a^4 b^4 (1-c^2)^2 (1-d^2)^2", cof,
                     16 * a**4 * b**4 * (1 - c**2) ** 2 * (1 - d**2) ** 2)
        dom = DomainBox({"a": (0, None), "b": Interval(1, None, closed_lo=True),
                         "c": (-1, 1), "d": (-1, 1)})
        rec.positive("cofactor > 0 on (0,inf) x [1,inf) x (-1,1)^2", cof, dom,
                     decomposition=[(16, [a**4, b**4, 1 - c, 1 - c, 1 + c, 1 + c,
                                          1 - d, 1 - d, 1 + d, 1 + d])])
        rec.identity("psi(a,1,c,d) = 4(a^4-1)(c^2+d^2-2c^2d^2)", psi.subs({"b": 1}),
                     4 * (a**4 - 1) * special_poly(0))
        rec.identity("psi(1,1,c,d) = 0", psi.subs({"a": 1, "b": 1}), MultiPoly.const(0))

    return _timed("psi", body)


def certify_jacobian() -> LemmaCertificate:
    def body(rec):
        rec.certificate("Jacobian closed form and nonvanishing", jacobian_check)

    return _timed("jacobian", body)


def certify_symmetry(psi=PSI) -> LemmaCertificate:
    def body(rec):
        k = psi.degree("a")
        swapped = psi.subs({"c": d, "d": c})
        rec.identity(f"a^{k} psi(1/a,b,d,c) = -psi(a,b,c,d)", reverse_in(swapped, "a", k), -psi)
        if k != 6:
            rec.discrepancy("inverse symmetry power of a", f"a^{k}", "a^6",
                            "psi has degree 4 in a")
        rec.identity("psi(a,b,-d,c) = psi(a,b,c,d)", psi.subs({"c": -d, "d": c}), psi)
        rec.identity("psi(1,b,c,c) = 0", psi.subs({"a": 1, "d": c}), MultiPoly.const(0))
        if psi is PSI:
            rec.certificate("library symmetry check", inverse_symmetry_check)

    return _timed("symmetry", body)


def certify_traces() -> LemmaCertificate:
    def body(rec):
        for name, ok in trace_identities_symbolic().items():
            rec.fact(name, ok)

    return _timed("traces", body)


def certify_good(n: int = 40) -> LemmaCertificate:
    def body(rec):
        disagree = []
        inside = 0
        for i, j in itertools.product(range(1, n + 1), repeat=2):
            lam = (Fraction(6 * i, n), 1 + Fraction(5 * j, n))
            try:
                inside += theta_contains(lam)
            except InternalError:
                disagree.append(lam)
        rec.fact(f"closed-form and geometric Theta tests agree on {n * n} grid points",
                 not disagree, SAMPLED, inside=inside, disagreements=disagree[:5])
        rec.fact("(1,1) is not in Theta", not theta_closed_form((1, 1)))

    return _timed("good", body)


# ---------------------------------------------------------------------------
# registry


def default_registry():
    return {
        "psi": certify_psi,
        "specialp": certify_specialp,
        "wall": certify_wall,
        "zero": certify_zero,
        "bound1": certify_bound1,
        "properness": certify_properness,
        "small_cd": certify_small_cd,
        "jacobian": certify_jacobian,
        "symmetry": certify_symmetry,
        "traces": certify_traces,
        "good": certify_good,
    }


PSI_DEPENDENT = ("psi", "wall", "zero", "bound1", "small_cd", "symmetry")


def run_all(registry=None, psi: MultiPoly | None = None, only=None) -> list[LemmaCertificate]:
    """Run the certifiers; ``psi`` replaces the duality polynomial where used."""
    reg = default_registry() if registry is None else registry
    out = []
    for name, fn in reg.items():
        if only is not None and name not in only:
            continue
        if psi is not None and name in PSI_DEPENDENT:
            out.append(fn(psi=psi))
        else:
            out.append(fn())
    return out


def corrupt(p: MultiPoly, delta=1) -> MultiPoly:
    """p with the coefficient of its leading term shifted by delta."""
    exps, _ = next(p.terms())
    mono = MultiPoly.const(1)
    for name, k in exps.items():
        mono = mono * MultiPoly.var(name) ** k
    return p + Fraction(delta) * mono


def bundle_json(certs) -> str:
    return json.dumps({"passed": all(x.passed for x in certs),
                       "certificates": [x.to_json() for x in certs]}, indent=1)


def summary_table(certs) -> str:
    rows = [f"{'lemma':<12} {'result':<6} {'obligations':>11} {'seconds':>8}  discrepancies"]
    for x in certs:
        rows.append(f"{x.lemma:<12} {'pass' if x.passed else 'FAIL':<6} "
                    f"{len(x.obligations):>11} {x.seconds:>8.2f}  {len(x.discrepancies)}")
    return "\n".join(rows)
