import json
from fractions import Fraction as F

import pytest
from hypothesis import given

from conftest import unit_open
from pappus.boxes import (MarkedBox, PappusParams, apply_word, box_inside, boxes_disjoint,
                          doppelganger, generators, initial_box, nested_or_disjoint, op_action_check,
                          op_b, op_i, op_t, theta4_canonical, theta4_orbit, trace_identities,
                          trace_identities_symbolic)
from pappus.errors import DegenerateBox, ParamOutOfRange
from pappus.kernel import HomLine, HomPoint, ProjMap

RELATIONS = {"ii": "", "tit": "b", "bib": "t", "tibi": "", "biti": ""}
GRID = [F(k, 5) for k in range(-4, 5)]


@pytest.mark.parametrize("word,target", RELATIONS.items())
def test_relations_on_random_boxes(boxes, word, target):
    for m in boxes:
        assert apply_word(word, m) == apply_word(target, m)


def test_children_nest_inside_parent(boxes):
    for m in boxes:
        tm, bm = op_t(m), op_b(m)
        # children share an edge with the parent and with each other
        assert box_inside(tm, m, strict=False) and box_inside(bm, m, strict=False)
        assert not box_inside(tm, m)
        assert boxes_disjoint(tm, bm, strict=False)
        assert not box_inside(m, tm, strict=False)


def test_doppelganger_involution(boxes):
    for m in boxes[:30]:
        star = doppelganger(m)
        assert star.is_dual
        assert all(isinstance(h, HomLine) for h in star.six)
        assert doppelganger(star) == m


@pytest.mark.parametrize("op", [op_i, op_t, op_b])
def test_doppelganger_commutes_with_operations(boxes, op):
    for m in boxes[:30]:
        assert doppelganger(op(m)) == op(doppelganger(m))


def test_degenerate_box_rejected():
    with pytest.raises(DegenerateBox):
        MarkedBox.of((-1, 1, 1), (1, 1, 1), (1, -1, 1), (-1, -1, 1), (3, 1, 1), (0, -1, 1))
    with pytest.raises(TypeError):
        MarkedBox(HomPoint(-1, 1, 1), HomLine(1, 1, 1), HomPoint(1, -1, 1), HomPoint(-1, -1, 1),
                  HomPoint(0, 1, 1), HomPoint(0, -1, 1))


def test_initial_box():
    m = initial_box((0, 0))
    assert m.apply(ProjMap.diag(-1, 1, 1)) == m
    with pytest.raises(ParamOutOfRange):
        initial_box((1, 0))


@pytest.mark.parametrize("cd", [(0, 0), (F(1, 2), F(1, 3)), (F(-2, 3), F(1, 7))])
def test_op_action_examples(cd):
    assert op_action_check(cd)


def test_op_action_grid():
    assert all(op_action_check((c, d)) for c in GRID for d in GRID)


def test_nested_or_disjoint_labels(boxes):
    m = boxes[0]
    assert nested_or_disjoint(op_t(m), m, strict=False) == "inside"
    assert nested_or_disjoint(m, op_b(m), strict=False) == "contains"
    assert nested_or_disjoint(op_t(m), op_b(m), strict=False) == "disjoint"
    assert nested_or_disjoint(op_t(op_t(m)), op_b(m)) == "disjoint"
    shifted = m.apply(ProjMap([[1, 0, F(1, 2)], [0, 1, 0], [0, 0, 1]]))
    assert nested_or_disjoint(m, shifted, strict=False) is None


def test_generator_examples():
    r1, r2 = generators((F(1, 2), F(1, 3)))
    assert (r1 @ r2).trace() == -1
    r1, _ = generators((F(1, 3), F(1, 5)))
    assert (r1 @ r1 @ r1).is_scalar()


@given(unit_open(), unit_open())
def test_generator_invariants(c, d):
    r1, r2 = generators((c, d))
    assert r1.trace() == 0 and r2.trace() == 0
    assert (r1 @ r2).det() == 1
    assert (r1 @ r1 @ r1).is_scalar() and (r2 @ r2 @ r2).is_scalar()


def test_trace_identity_examples():
    v = trace_identities((0, 0))
    assert (v["tau_r1_r2sq"], v["tau_r1sq_r2"], v["comm_diff"]) == (64, 64, 0)
    assert trace_identities((F(1, 2), F(1, 2)))["comm_diff"] == F(64, 9)
    assert trace_identities((F(1, 2), 0))["tau_r1_r2sq"] == F(256, 3)


@given(unit_open(), unit_open())
def test_trace_identities_random(c, d):
    trace_identities((c, d))


def test_trace_identities_symbolic():
    out = trace_identities_symbolic()
    assert out and all(out.values()), [k for k, v in out.items() if not v]


def test_theta4_examples():
    assert theta4_canonical((0, 0)) == PappusParams(0, 0)
    assert theta4_canonical((F(-1, 2), F(1, 3))) == PappusParams(F(1, 3), F(1, 2))
    assert theta4_canonical((0, F(-1, 4))) == PappusParams(F(1, 4), 0)


@given(unit_open(), unit_open())
def test_theta4_idempotent_and_orbit_constant(c, d):
    rep = theta4_canonical((c, d))
    assert theta4_canonical(rep) == rep
    assert all(theta4_canonical(q) == rep for q in theta4_orbit((c, d)))


def test_json_round_trip(boxes):
    m = boxes[0]
    assert MarkedBox.from_json(json.loads(json.dumps(m.to_json()))) == m
