import json
from fractions import Fraction as Fr

import pytest

from tidyscale import coset_tree as ct
from tidyscale.errors import BudgetExceeded, ValidationError
from tidyscale.finite_groups import group_by_name, named_subgroup
from tidyscale.matrix import MatrixFamily, diag_element
from tidyscale.shift import ShiftFamily


def matrix_adapter(values, p, level=1):
    fam = MatrixFamily(diag_element(values, p))
    return ct.MatrixCosets(fam, fam.level(level))


def shift_adapter(F="S3", O="A3"):
    G = group_by_name(F)
    return ct.ShiftCosets(ShiftFamily(G, named_subgroup(G, O)))


def test_shift_ball_is_a_line():
    ball = ct.build_ball(shift_adapter(), 0, 6, depth=6)
    assert len(ball.vertices) == 7
    rep = ct.verify_local_structure(ball)
    assert rep.ok, rep.violations
    degs = ct.degree_summary(ball)
    assert ball.s_inv == 1
    assert all(len(v) <= 1 for v in ball.out_edges().values())
    assert degs is not None
    assert ct.check_translation(ball)


def test_matrix_ball_diag_2():
    ball = ct.build_ball(matrix_adapter([2, Fr(1, 2)], 2), depth=2)
    assert ball.s_inv == 4
    assert len(ball.vertices) == 1 + 4 + 16
    rep = ct.verify_local_structure(ball)
    assert rep.ok, rep.violations
    out = ball.out_edges()
    for vid in ball.expanded:
        assert len(out[vid]) == 4
    inc = ball.in_edges()
    assert all(len(v) <= 1 for v in inc.values())
    assert rep.interior == 4


def test_matrix_ball_diag_5():
    ball = ct.build_ball(matrix_adapter([5, Fr(1, 5)], 5), depth=1)
    base = ball.path[0]
    assert len(ball.out_edges()[base]) == 25
    assert ct.verify_local_structure(ball).ok
    # an interior vertex sees 25 children and one parent
    ball2 = ct.build_ball(matrix_adapter([5, Fr(1, 5)], 5), m0=-1, m1=1, depth=2, budget=10**4)
    mid = ball2.path[1]
    assert len(ball2.out_edges()[mid]) + len(ball2.in_edges()[mid]) == 26


def test_corrupted_ball_is_reported():
    ball = ct.build_ball(matrix_adapter([2, Fr(1, 2)], 2), depth=2)
    bad = ball.with_edges(set(ball.edges) | {(ball.path[0], ball.path[2])})
    rep = ct.verify_local_structure(bad)
    assert not rep.ok
    kinds = {v["kind"] for v in rep.violations}
    assert "edge-level" in kinds
    dropped = ball.with_edges(set(ball.edges) - {(ball.path[0], ball.path[1])})
    assert not ct.verify_local_structure(dropped).ok


def test_action_and_stabilizer():
    ball = ct.build_ball(matrix_adapter([2, Fr(1, 2)], 2), depth=2)
    assert ct.check_action(ball, samples=100) == []
    assert ct.check_stabilizer(ball, samples=50) == []
    assert ct.check_translation(ball)
    ident = ball.adapter.identity()
    assert all(ct.act(ball, ident, v).vertex == v for v in ball.vertices)
    assert ct.act(ball, ct.AlphaPower(1), ball.path[0]).vertex == ball.path[1]


def test_action_outside_ball_is_flagged():
    ball = ct.build_ball(matrix_adapter([2, Fr(1, 2)], 2), depth=1)
    res = ct.act(ball, ct.AlphaPower(5), ball.path[0])
    assert not res.in_ball
    assert res.vertex[0] == 5


def test_end_images_distinct():
    for values, p, depth in [([2, Fr(1, 2)], 2, 2), ([3, Fr(1, 3)], 3, 1), ([4, 2, 1], 2, 1)]:
        res = ct.end_images_distinct(matrix_adapter(values, p), depth)
        assert res["ok"], res


def test_inert_factor_acts_trivially():
    base = matrix_adapter([2, Fr(1, 2)], 2)
    ball = ct.build_ball(ct.InertProduct(group_by_name("C2"), base), depth=1)
    assert ct.verify_local_structure(ball).ok
    assert ct.kernel_acts_trivially(ball)
    with pytest.raises(ValidationError):
        ct.kernel_acts_trivially(ct.build_ball(base, depth=1))


def test_non_tidy_subgroup_rejected():
    G = group_by_name("S3")
    fam = ShiftFamily(G, named_subgroup(G, "A3"))
    with pytest.raises(ValidationError):
        ct.ShiftCosets(fam, fam.subgroup({0: G.trivial()}))


def test_budget():
    ad = matrix_adapter([2, Fr(1, 2)], 2)
    with pytest.raises(BudgetExceeded):
        ct.build_ball(ad, depth=10, budget=1000)


def test_budget_env(monkeypatch):
    monkeypatch.setenv(ct.BUDGET_ENV, "10")
    assert ct.vertex_budget() == 10
    with pytest.raises(BudgetExceeded):
        ct.build_ball(matrix_adapter([2, Fr(1, 2)], 2), depth=2)
    monkeypatch.setenv(ct.BUDGET_ENV, "lots")
    with pytest.raises(ValidationError):
        ct.vertex_budget()


def test_export_empty_ball():
    ball = ct.build_ball(shift_adapter(), 2, 1)
    assert ct.export(ball, "dot") == "digraph coset_tree {\n}\n"


def test_export_shift_line_dot():
    ball = ct.build_ball(shift_adapter(), 0, 6, depth=6)
    dot = ct.export(ball, "dot")
    assert dot.startswith("digraph coset_tree {")
    assert dot.count('label="V^(') == 7
    assert dot.count("->") == 6


def test_export_json_counts():
    ball = ct.build_ball(matrix_adapter([2, Fr(1, 2)], 2), depth=2)
    obj = json.loads(ct.export(ball, "json"))
    assert obj["schema"] == ct.SCHEMA
    assert obj["counts"] == {"vertices": 21, "edges": 20, "path": 3}
    assert ct.export(ball, "json") == ct.export(ct.build_ball(matrix_adapter([2, Fr(1, 2)], 2), depth=2), "json")
    with pytest.raises(ValidationError):
        ct.export(ball, "svg")
