import random
from fractions import Fraction as F
from math import factorial

import pytest
import sympy as sp
from hypothesis import given, strategies as st

from pappus.errors import CertificationFailed, DepthLimit, ZeroPolynomial
from pappus.poly import (DomainBox, Interval, MultiPoly, bareiss_det, parse, positivity_check,
                         resultant, special_poly, sturm_count, taylor_at_one, taylor_certify,
                         taylor_list, variables)

a, b, c, d, x = variables("a b c d x")
coeffs = st.fractions(min_value=-6, max_value=6, max_denominator=5)


@st.composite
def polys(draw, names=("a", "b"), max_terms=5, max_deg=3):
    n = draw(st.integers(min_value=0, max_value=max_terms))
    terms = {}
    for _ in range(n):
        exps = tuple(draw(st.integers(0, max_deg)) for _ in names)
        terms[exps] = draw(coeffs)
    return MultiPoly(terms, names)


def to_sympy(p: MultiPoly):
    return sp.sympify(str(p).replace("^", "**")) if not p.is_zero() else sp.Integer(0)


def test_arithmetic_examples():
    assert (a + b) * (a - b) == a**2 - b**2
    assert (a**3 * b).diff("a") == 3 * a**2 * b
    q = parse("a^2 + 3*a*b - 7")
    assert ((b**2 - 1) * q).subs({"b": 1}).is_zero()


def test_parse_and_str_round_trip():
    p = parse("(a^2-1)*(b+1/2) - 3*c*d^3")
    assert parse(str(p).replace("**", "^")) == p
    assert p == (a**2 - 1) * (b + F(1, 2)) - 3 * c * d**3


@given(polys(), polys())
def test_leibniz(p, q):
    assert (p * q).diff("a") == p * q.diff("a") + q * p.diff("a")


@given(polys(), polys(), st.fractions(-3, 3, max_denominator=4), st.fractions(-3, 3, max_denominator=4))
def test_evaluate_is_a_ring_map(p, q, u, v):
    pt = {"a": u, "b": v}
    assert (p * q + p).evaluate(pt) == p.evaluate(pt) * q.evaluate(pt) + p.evaluate(pt)


@given(polys(names=("a", "b"), max_deg=8))
def test_taylor_reconstruction(h):
    ks = taylor_list(h, "b")
    rebuilt = sum((k * (b - 1) ** j / factorial(j) for j, k in enumerate(ks)), MultiPoly.const(0))
    assert rebuilt == h


def test_taylor_examples():
    assert taylor_at_one(b**3, "b", 2) == 6
    assert taylor_at_one(a * b**2, "b", 0) == a


def test_taylor_table_against_sympy():
    from pappus.lemmas import R_POLY, R_TABLE
    bs = sp.Symbol("b")
    for k, text in R_TABLE.items():
        ref = sp.diff(to_sympy(R_POLY), bs, k).subs(bs, 1)
        assert sp.expand(ref - to_sympy(parse(text))) == 0


def test_divexact():
    p = (a + 2 * b) * (a**2 - b + 3)
    assert p.divexact(a + 2 * b) == a**2 - b + 3
    with pytest.raises(ValueError):
        (a**2 + 1).divexact(a + 1)


def test_resultant_examples():
    assert resultant(x**2 - 1, x - 1, "x").is_zero()
    assert resultant(x - 1, x - 2, "x") == -1
    with pytest.raises(ZeroPolynomial):
        resultant(MultiPoly.const(0), x - 1, "x")


def test_resultant_against_sympy():
    rng = random.Random(3)
    for _ in range(10):
        p = sum((rng.randint(-4, 4) * a**i * x**j for i in range(3) for j in range(4)), MultiPoly.const(0))
        q = sum((rng.randint(-4, 4) * a**i * x**j for i in range(2) for j in range(3)), MultiPoly.const(0))
        if p.degree("x") < 1 or q.degree("x") < 1:
            continue
        ours = to_sympy(resultant(p, q, "x"))
        ref = sp.resultant(to_sympy(p), to_sympy(q), sp.Symbol("x"))
        assert sp.expand(ours - ref) == 0


def _random_univariate(rng, deg):
    return sum((F(rng.randint(-9, 9), rng.randint(1, 4)) * x**k for k in range(deg + 1)),
               MultiPoly.const(0)) + x ** (deg + 1)


def test_resultant_detects_common_roots():
    rng = random.Random(7)
    for _ in range(50):
        root = F(rng.randint(-9, 9), rng.randint(1, 5))
        p = (x - root) * _random_univariate(rng, rng.randint(0, 3))
        q = (x - root) * _random_univariate(rng, rng.randint(0, 3))
        assert resultant(p, q, "x").is_zero()
    found = 0
    for _ in range(50):
        p = _random_univariate(rng, rng.randint(0, 3))
        q = _random_univariate(rng, rng.randint(0, 3))
        ref = sp.gcd(sp.Poly(to_sympy(p), sp.Symbol("x")), sp.Poly(to_sympy(q), sp.Symbol("x")))
        if ref.degree() > 0:
            continue
        found += 1
        assert not resultant(p, q, "x").is_zero()
    assert found > 40


def test_bareiss_matches_cofactor_expansion():
    rows = [[MultiPoly.const(v) for v in r] for r in ([2, 1, 3], [0, -1, 4], [5, 2, 1])]
    assert bareiss_det(rows) == 2 * (-1 - 8) - 1 * (0 - 20) + 3 * (0 + 5)


def test_sturm_count():
    p = ((x - 1) * (x - 2) * (x + 3)).univariate("x")
    assert sturm_count(p) == 3
    assert sturm_count(p, 0, 5) == 2
    assert sturm_count(p, 1, 2) == 1
    assert sturm_count((x**2 + 1).univariate("x")) == 0


RAY = DomainBox({"b": Interval(1, None, closed_lo=True)})
SQUARE = DomainBox({"c": (-1, 1), "d": (-1, 1)}, punctured=("c", "d"))


def test_positivity_shift_method():
    from pappus.lemmas import P_POLY
    cert = positivity_check(P_POLY, RAY)
    assert cert.method == "shifted-coefficients"


def test_positivity_specialp():
    cert = positivity_check(c**2 + d**2 - 2 * c**2 * d**2, SQUARE)
    assert cert.method == "specialp"
    assert cert.details["lambda"] == 0


def test_positivity_rejects_negative_constant():
    with pytest.raises(CertificationFailed):
        positivity_check(MultiPoly.const(-1), RAY)


def test_positivity_subdivision_finds_witness():
    with pytest.raises(CertificationFailed) as exc:
        positivity_check(special_poly(2), DomainBox({"c": (-1, 1), "d": (-1, 1)}))
    w = exc.value.witness
    assert w is not None and special_poly(2).evaluate(w) <= 0


def test_positivity_subdivision_unbounded():
    p = 1 - 2 * a + 2 * a**2
    cert = positivity_check(p, DomainBox({"a": (0, None)}))
    assert cert.method == "interval-subdivision"


def test_positivity_depth_limit():
    # touches zero at an interior point, so strict positivity cannot be certified by cells
    with pytest.raises((CertificationFailed, DepthLimit)):
        positivity_check((a - F(1, 3)) ** 2, DomainBox({"a": (0, 1)}), max_depth=6)


def test_positivity_decomposition():
    cert = positivity_check(2 - c**2 - d**2, DomainBox({"c": (-1, 1), "d": (-1, 1)}),
                            decomposition=[(1, [1 - c, 1 + c]), (1, [1 - d, 1 + d])])
    assert cert.method == "decomposition"
    with pytest.raises(CertificationFailed):
        positivity_check(2 - c**2 - d**2, DomainBox({"c": (-1, 1), "d": (-1, 1)}),
                         decomposition=[(1, [1 - c, 1 + c])])


CASES = [
    (parse("8-16*a+16*a^2+16*a^3+16*a^4-16*a^5+8*a^6"), DomainBox({"a": (0, None)})),
    (parse("c^2+d^2-2*c^2*d^2+(1/2)*(c^3*d-c*d^3)"), SQUARE),
    (parse("1+b^3-b+b^2"), RAY),
]


@pytest.mark.parametrize("p,domain", CASES)
def test_certified_positivity_is_sound(p, domain):
    positivity_check(p, domain)
    rng = random.Random(11)
    for pt in domain.sample(rng, 1000):
        assert p.evaluate(pt) > 0


def test_taylor_certify_examples():
    from pappus.lemmas import R_POLY, WP_TABLE
    from pappus.lemmas import y_poly
    cert = taylor_certify(R_POLY.diff("b"), "b", 0, DomainBox({"a": (0, None)}))
    assert cert.passed
    y, _ = y_poly()
    u = -y.diff("c").subs({"c": 1, "d": 1})
    v = -y.diff("d").subs({"c": 1, "d": 1})
    assert taylor_certify(u + v, "b", 32, DomainBox({"a": Interval(1, 2, True, True)})).passed
    assert taylor_at_one(u + v, "b", 0) == parse(WP_TABLE[0])
    with pytest.raises(CertificationFailed):
        taylor_certify(-(b**2), "b", 0, DomainBox({"a": (0, 1)}))


def test_domain_sampling_respects_puncture():
    rng = random.Random(1)
    pts = SQUARE.sample(rng, 200)
    assert all(SQUARE.contains(p) for p in pts)
