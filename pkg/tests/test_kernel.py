import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import nonzero_fractions
from pappus.boxes import generators
from pappus.errors import NotElliptic, NotPositiveDefinite, SingularMatrix, ZeroVector
from pappus.kernel import (Duality, HomLine, HomPoint, ProjMap, SpdPoint, collinear, cross,
                           distance_to_origin, incident, join, meet, polarity_apply,
                           polarity_fixed_point, rational_cube_root, scalar, spd_act, tau)

entries = st.fractions(min_value=-5, max_value=5, max_denominator=7)
matrices = st.lists(st.lists(entries, min_size=3, max_size=3), min_size=3, max_size=3).filter(
    lambda rows: _det(rows) != 0).map(ProjMap)
points = st.tuples(entries, entries, entries).filter(any).map(lambda v: HomPoint(*v))


def _det(m):
    return (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))


def test_scalar_lowest_terms():
    x = scalar("-6/4")
    assert (x.numerator, x.denominator) == (-3, 2)
    with pytest.raises(TypeError):
        scalar(0.5)


def test_homogeneous_canonical_form():
    assert HomPoint(2, 4, 6) == HomPoint(1, 2, 3)
    assert HomPoint(0, -3, 6).coords == (0, 1, -2)
    assert HomPoint(1, 2, 3) != HomLine(1, 2, 3)
    with pytest.raises(ZeroVector):
        HomPoint(0, 0, 0)


def test_join_meet_incidence():
    p, q = HomPoint(0, 0, 1), HomPoint(1, 1, 1)
    line = join(p, q)
    assert incident(p, line) and incident(q, line)
    assert meet(line, HomLine(1, 0, -2)) == HomPoint(2, 2, 1)
    assert collinear(p, q, HomPoint(3, 3, 1))
    with pytest.raises(ZeroVector):
        cross(p, p)


def test_matrix_basics():
    eye = ProjMap.identity()
    assert eye @ eye == eye
    assert ProjMap.diag(1, 2, 3).det() == 6
    r1, _ = generators((F(1, 2), F(1, 3)))
    assert r1 @ r1.inverse() == eye
    with pytest.raises(SingularMatrix):
        ProjMap([[1, 2, 3], [2, 4, 6], [0, 0, 1]]).inverse()


def test_lines_map_by_inverse_transpose():
    g = ProjMap([[1, 2, 0], [0, 1, 3], [1, 0, 1]])
    p, q = HomPoint(1, 0, 1), HomPoint(2, -1, 5)
    assert g.apply(join(p, q)) == join(g.apply(p), g.apply(q))


def test_four_point_map():
    src = [HomPoint(1, 0, 0), HomPoint(0, 1, 0), HomPoint(0, 0, 1), HomPoint(1, 1, 1)]
    dst = [HomPoint(-1, 1, 0), HomPoint(1, 1, 0), HomPoint(1, 0, 1), HomPoint(-1, 0, 1)]
    g = ProjMap.four_point(src, dst)
    assert [g.apply(x) for x in src] == dst


def test_tau_examples():
    assert tau(ProjMap.identity()) == 27
    assert tau(ProjMap.diag(1, 2, 3)) == 36
    r1, r2 = generators((F(1, 2), 0))
    assert tau(r1 @ r2 @ r2) == F(256, 3)
    # singular matrices are rejected before tau can see them
    with pytest.raises(SingularMatrix):
        tau(ProjMap([[1, 0, 0], [0, 1, 0], [1, 1, 0]]))


@given(matrices, nonzero_fractions())
def test_tau_scale_invariant(m, s):
    assert tau(m.scale(s)) == tau(m)


@given(matrices, matrices)
def test_tau_conjugation_invariant(m, g):
    assert tau(g @ m @ g.inverse()) == tau(m)


@given(points)
def test_polarity_involution(p):
    line = polarity_apply(p)
    assert isinstance(line, HomLine)
    assert polarity_apply(line) == p


def test_polarity_examples():
    assert polarity_apply(HomPoint(1, 0, 0)) == HomLine(1, 0, 0)
    assert polarity_apply(HomPoint(0, 0, 1)) == HomLine(0, 0, 1)
    p = HomPoint(2, 3, 5)
    assert polarity_apply(polarity_apply(p)) == p


def test_spd_action_examples():
    origin = SpdPoint.origin()
    assert spd_act(ProjMap.identity(), origin) == origin
    assert spd_act(ProjMap.diag(2, 1, F(1, 2)), origin) == SpdPoint([[F(1, 4), 0, 0], [0, 1, 0], [0, 0, 4]])
    assert Duality(ProjMap.identity()).act(origin) == origin


def test_spd_action_rescales_to_unit_determinant():
    # det 8 has an exact cube root, det 2 does not
    exact = spd_act(ProjMap.diag(2, 2, 2), SpdPoint.origin())
    assert exact.exact and exact == SpdPoint.origin()
    approx = spd_act(ProjMap.diag(2, 1, 1), SpdPoint.origin())
    assert not approx.exact
    assert abs(np.linalg.det(approx.as_array()) - 1) < 1e-12


unit_det = st.sampled_from([
    ProjMap([[1, 2, 0], [0, 1, 0], [0, 0, 1]]),
    ProjMap([[1, 0, 0], [F(1, 3), 1, 0], [2, -1, 1]]),
    ProjMap.diag(2, F(1, 2), 1),
    ProjMap([[0, 1, 0], [0, 0, 1], [1, 0, 0]]),
    ProjMap([[2, 1, 0], [1, 1, 0], [0, 0, 1]]),
])


@given(unit_det, unit_det)
def test_spd_action_is_group_action(t1, t2):
    p = SpdPoint([[2, 1, 0], [1, 1, 0], [0, 0, 1]])
    assert spd_act(t1 @ t2, p) == spd_act(t1, spd_act(t2, p))


def test_spd_point_validation():
    with pytest.raises(NotPositiveDefinite):
        SpdPoint([[1, 2, 0], [0, 1, 0], [0, 0, 1]])
    with pytest.raises(NotPositiveDefinite):
        SpdPoint([[-1, 0, 0], [0, -1, 0], [0, 0, 1]])
    with pytest.raises(NotPositiveDefinite):
        SpdPoint([[2, 0, 0], [0, 1, 0], [0, 0, 1]])


def test_polarity_fixed_point():
    assert polarity_fixed_point(Duality(ProjMap.identity())) == SpdPoint.origin()
    diag = ProjMap.diag(4, 1, F(1, 4))
    p = polarity_fixed_point(Duality(diag))
    assert p.close_to(SpdPoint([[4, 0, 0], [0, 1, 0], [0, 0, F(1, 4)]]))
    assert Duality(diag).act(p).close_to(p)
    with pytest.raises(NotElliptic):
        polarity_fixed_point(Duality(ProjMap([[1, 1, 0], [0, 1, 0], [0, 0, 1]])))
    with pytest.raises(NotElliptic):
        polarity_fixed_point(Duality(ProjMap.diag(1, -1, 1)))


def test_polarity_fixed_point_non_cube_determinant():
    g = ProjMap([[2, 1, 0], [1, 3, 0], [0, 0, 1]])
    p = polarity_fixed_point(Duality(g))
    assert abs(np.linalg.det(p.as_array()) - 1) < 1e-10
    assert Duality(g).act(p).close_to(p)


def test_distance_to_origin():
    assert distance_to_origin(SpdPoint.origin()) == 0
    d = distance_to_origin(SpdPoint([[2, 0, 0], [0, 1, 0], [0, 0, F(1, 2)]]))
    assert d == pytest.approx(math.sqrt(2) * math.log(2), abs=1e-12)
    assert d == pytest.approx(0.98026, abs=1e-5)
    d4 = distance_to_origin(SpdPoint([[4, 0, 0], [0, 1, 0], [0, 0, F(1, 4)]]))
    assert d4 == pytest.approx(2 * math.sqrt(2) * math.log(2), abs=1e-12)


def test_rational_cube_root():
    assert rational_cube_root(F(-27, 8)) == F(-3, 2)
    assert rational_cube_root(2) is None
    assert rational_cube_root(10**30) == 10**10


def test_json_round_trip():
    g = ProjMap([[1, F(2, 3), 0], [0, 1, 0], [F(-1, 5), 0, 1]])
    assert ProjMap.from_json(g.to_json()) == g
    p = HomPoint(3, F(1, 2), -1)
    assert HomPoint.from_json(p.to_json()) == p
