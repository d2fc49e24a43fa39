import json
import random
from fractions import Fraction as F

import pytest
import sympy as sp

from pappus.boxes import generator_polys
from pappus.duality import PSI, PSI_TEXT
from pappus.lemmas import (MU_TABLE, P_POLY, PSI_DEPENDENT, R_POLY, R_TABLE, WM_TABLE, WP_TABLE,
                           Z_TABLE, bundle_json, certify_bound1, certify_properness,
                           certify_specialp, certify_wall, certify_zero, corrupt,
                           default_registry, mu_poly, run_all, summary_table, y_poly)
from pappus.morph import sigma_polys
from pappus.poly import DomainBox, Interval, match_special, parse, taylor_at_one

SA, SB, SC, SD = sp.symbols("a b c d")


def sym(p):
    return sp.sympify(str(p).replace("^", "**"))


def taylor_sym(expr, k):
    return sp.expand(sp.diff(expr, SB, k).subs(SB, 1))


@pytest.fixture(scope="module")
def certificates():
    return {x.lemma: x for x in run_all()}


def test_every_certifier_passes(certificates):
    assert set(certificates) == set(default_registry())
    for name, cert in certificates.items():
        assert cert.passed, (name, [o.claim for o in cert.failures()], cert.error)
        assert cert.obligations


def test_bundle_and_summary(certificates):
    data = json.loads(bundle_json(list(certificates.values())))
    assert data["passed"] is True and len(data["certificates"]) == len(certificates)
    table = summary_table(list(certificates.values()))
    assert all(name in table for name in certificates)


def test_discrepancies_are_recorded_not_fatal(certificates):
    names = {d["name"] for c in certificates.values() for d in c.discrepancies}
    assert "psi(2,b,c,d)" in names
    assert "inverse symmetry power of a" in names


def test_positivity_obligations_carry_certificates(certificates):
    for cert in certificates.values():
        for ob in cert.obligations:
            if ob.kind == "positivity":
                assert ob.certificate is not None, (cert.lemma, ob.claim)


def test_specialp_instances():
    assert certify_specialp(0).passed
    assert certify_specialp(1).passed
    assert certify_specialp(-1).passed
    bad = certify_specialp(2)
    assert not bad.passed and bad.witnesses
    from pappus.poly import special_poly
    assert all(special_poly(2).evaluate(w) <= 0 for w in bad.witnesses)


def test_specialp_listed_witness_is_not_negative():
    from pappus.poly import special_poly
    assert special_poly(2).evaluate({"c": F(9, 10), "d": F(-9, 10)}) > 0
    assert special_poly(2).evaluate({"c": F(-99, 100), "d": F(3, 4)}) < 0


def test_mu_table_against_sympy():
    alpha = (1 + 2 * SB - SB**2) / (1 + SB**2)
    psi = sp.sympify(PSI_TEXT.replace("^", "**"))
    mu = sp.cancel(-psi.subs(SA, alpha) * (1 + SB**2) ** 2 / (4 * SB * (SB**2 - 1)))
    assert sp.expand(mu - sym(mu_poly())) == 0
    for k, text in MU_TABLE.items():
        assert sp.expand(taylor_sym(mu, k) - sym(parse(text))) == 0
    assert taylor_sym(mu, 5) == 0


def test_mu_one_is_scaled_specialp():
    assert match_special(parse(MU_TABLE[1])) == (12, F(-1, 3))


def test_r_restrictions_against_sympy():
    r = sym(R_POLY)
    alpha = (1 + 2 * SB - SB**2) / (1 + SB**2)
    p = sym(P_POLY)
    assert sp.cancel(r.subs(SA, alpha) - 8 * SB * (SB**2 - 1) * p / (1 + SB**2) ** 4) == 0
    beta = 1 / alpha
    corrected = 8 * SB * (SB**2 - 1) * (1 + SB**2) ** 2 * p / (SB**2 - 2 * SB - 1) ** 6
    assert sp.cancel(r.subs(SA, beta) - corrected) == 0
    for k, text in R_TABLE.items():
        assert sp.expand(taylor_sym(r, k) - sym(parse(text))) == 0
    assert taylor_sym(r, 5) == 0
    assert r.subs({SA: 1, SB: 1}) == 0


def test_resultant_against_sympy():
    psi = sp.sympify(PSI_TEXT.replace("^", "**"))
    res = sp.resultant(psi, sp.diff(psi, SA), SC)
    expected = 4 * (SB**4 - 1) ** 3 * (SD**2 - 1) ** 2 * SD**9 * sym(R_POLY) ** 3
    assert sp.expand(res - expected) == 0


def test_psi2_examples():
    at2 = PSI.subs({"a": 2})
    assert at2.coeff("b", 0) == parse("9*c^2+9*d^2-18*c^2*d^2+2*c*d^3-2*c^3*d")
    assert PSI.evaluate({"a": 2, "b": 2, "c": F(1, 4), "d": F(1, 2)}) > 0


def _sympy_y():
    r1n, r2n, _ = generator_polys()
    s, s_inv = sigma_polys()
    r1 = sp.Matrix([[sym(x) for x in row] for row in r1n])
    r2 = sp.Matrix([[sym(x) for x in row] for row in r2n])
    r2m = sp.Matrix([[sym(x) for x in row] for row in s_inv]) * r2 \
        * sp.Matrix([[sym(x) for x in row] for row in s])
    n = r1 * r2m * r2m
    tr = sp.expand(n.trace())
    return sp.cancel(-tr / (4 * SA**2 * SB**2 * (1 - SD**2))), n


def test_properness_tables_against_sympy():
    y, n = _sympy_y()
    assert sp.expand(y - sym(y_poly()[0])) == 0
    z = sp.cancel(y.subs(SD, 1) / (1 - SC**2))
    for k, text in Z_TABLE.items():
        assert sp.expand(taylor_sym(z, k) - sym(parse(text))) == 0
    u = -sp.diff(y, SC).subs({SC: 1, SD: 1})
    v = -sp.diff(y, SD).subs({SC: 1, SD: 1})
    for table, expr in ((WP_TABLE, u + v), (WM_TABLE, u - v)):
        for k, text in table.items():
            assert sp.expand(taylor_sym(expr, k) - sym(parse(text))) == 0
        assert taylor_sym(expr, 5) == 0
    assert sp.expand(y.subs({SC: 1, SD: 1})) == 0


def test_properness_examples():
    assert parse(WM_TABLE[4]) == parse("96*a^3+96*a^4")
    assert parse(Z_TABLE[2]) == parse("16+24*a+8*a^2*(8-c^2)+24*a^3+16*a^4+16*c*(a^4-1)")
    cert = certify_properness()
    claims = {o.claim for o in cert.obligations if o.passed}
    assert "U - a^2(1-c^2) >= 0" in claims and "a^2(1-c^2) > 0" in claims


CERTIFIED = [
    (P_POLY - 32, DomainBox({"b": Interval(1, None, closed_lo=True)})),
    (parse(MU_TABLE[1]), DomainBox({"c": (-1, 1), "d": (-1, 1)}, punctured=("c", "d"))),
    (parse(R_TABLE[1]), DomainBox({"a": (0, None)})),
    (parse(WP_TABLE[0]) - 32, DomainBox({"a": Interval(1, 2, True, True)})),
    (parse(Z_TABLE[0]) - 16, DomainBox({"a": Interval(1, 2, True, True),
                                        "c": Interval(0, 1, closed_lo=True)})),
]


@pytest.mark.parametrize("p,domain", CERTIFIED)
def test_brute_force_cross_check(p, domain):
    rng = random.Random(99)
    for pt in domain.sample(rng, 1000):
        assert p.evaluate(pt) >= 0


def test_taylor_higher_derivatives_vanish():
    assert taylor_at_one(mu_poly(), "b", 5).is_zero()
    assert taylor_at_one(R_POLY, "b", 5).is_zero()


def test_corrupted_psi_fails_dependents():
    bad = corrupt(PSI)
    assert bad != PSI
    certs = run_all(psi=bad, only=list(PSI_DEPENDENT))
    assert len(certs) == len(PSI_DEPENDENT)
    assert all(not c.passed for c in certs)


@pytest.mark.parametrize("fn", [certify_wall, certify_zero, certify_bound1])
def test_individual_corruptions(fn):
    assert not fn(psi=corrupt(PSI, 3)).passed


def test_empty_registry_and_filter():
    assert run_all(registry={}) == []
    only = run_all(only=["specialp"])
    assert [c.lemma for c in only] == ["specialp"]
