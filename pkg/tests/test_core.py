import json
import random
from fractions import Fraction as Fr

import pytest

from tidyscale import core, suite, tree
from tidyscale.core import Method, Target, Verdict
from tidyscale.errors import Step1CapExceeded, ValidationError
from tidyscale.finite_groups import group_by_name, named_subgroup
from tidyscale.matrix import MatrixFamily, diag_element
from tidyscale.shift import ShiftFamily


def families():
    S3 = group_by_name("S3")
    yield "shift", ShiftFamily(S3, named_subgroup(S3, "A3"))
    yield "matrix", MatrixFamily(diag_element([5, Fr(1, 5)], 5))
    yield "matrix3", MatrixFamily(diag_element([4, 1, Fr(1, 2)], 2))
    yield "tree", tree.TreeFamily(tree.translation(2, 1))


def sampled_subgroups(fam, rng, count=8):
    if isinstance(fam, ShiftFamily):
        return [suite.random_product_subgroup(fam, rng) for _ in range(count)]
    if isinstance(fam, MatrixFamily):
        return [suite.random_shape(fam, rng) for _ in range(count)] + [fam.level(k) for k in (1, 2)]
    return [fam.segment(lo, lo + w) for lo, w in [(0, 1), (-1, 2), (2, 3)]]


def test_target_parse():
    assert Target.parse("u0") is Target.U0
    with pytest.raises(ValidationError):
        Target.parse("Q")


@pytest.mark.parametrize("name,fam", list(families()))
def test_tidy_report_invariants(name, fam):
    rng = random.Random(name)
    for V in sampled_subgroups(fam, rng):
        rep = core.tidy(fam, V)
        out = rep.output
        assert rep.tidy
        assert rep.scale == fam.index(fam.image(rep.v_plus, 1), rep.v_plus)
        assert rep.scale_inverse == fam.index(fam.image(rep.v_minus, -1), rep.v_minus)
        assert fam.same(rep.v_zero, fam.intersect(rep.v_plus, rep.v_minus))
        assert fam.same(fam.image(rep.v_zero, 1), rep.v_zero)
        # tidy for alpha is tidy for alpha^-1
        assert core.is_tidy(fam.inverse(), out).ok
        # the scale is the minimal displacement
        assert core.displacement_index(fam, out) == rep.scale
        assert core.displacement_index(fam, V) >= rep.scale


@pytest.mark.parametrize("name,fam", list(families()))
def test_scale_methods_agree(name, fam):
    res = core.scale(fam)
    assert res.cross_checks
    assert all(v == res.value for _, v in res.cross_checks)
    assert core.scale_inverse(fam).value == core.scale(fam.inverse()).value


@pytest.mark.parametrize("name,fam", list(families()))
def test_step1_examples(name, fam):
    for V in sampled_subgroups(fam, random.Random(name), 4):
        assert core.iterate_intersection(fam, V, 0) == V
        W, k = core.tidying_step1(fam, V)
        # iterating the intersection leaves V_+ alone and moves V_- by alpha^k
        assert fam.same(fam.plus(W), fam.plus(V))
        assert fam.same(fam.minus(W), fam.image(fam.minus(V), k))


def test_step1_cap_exceeded():
    S3 = group_by_name("S3")
    fam = ShiftFamily(S3, named_subgroup(S3, "A3"))
    V = fam.subgroup({i: S3.whole() for i in range(3)})
    assert core.tidying_step1(fam, V)[1] == 3
    with pytest.raises(Step1CapExceeded) as err:
        core.tidy(fam, V, cap=1)
    assert "step-1 did not stabilize within cap=1" in str(err.value)
    assert err.value.code == "step1-cap-exceeded"


def test_identity_automorphism():
    fam = MatrixFamily(diag_element([3, 3], 3))
    V = fam.level(1)
    assert core.displacement_index(fam, V) == 1
    assert core.tidy(fam, V).scale == 1
    assert core.modular_value(fam, V) == 1


def test_membership_identity_all_targets():
    for _, fam in families():
        for t in Target:
            assert core.membership(fam, fam.identity(), t).verdict is Verdict.YES


def test_report_serialization_is_stable():
    fam = MatrixFamily(diag_element([5, Fr(1, 5)], 5))
    rep = core.tidy(fam, fam.level(1)).to_json(fam)
    text = json.dumps(rep, sort_keys=True)
    assert rep["schema"] == "tidyscale.tidy-report/1"
    assert rep["scale"] == "25" and rep["scale_inverse"] == "25"
    assert text == json.dumps(core.tidy(fam, fam.level(1)).to_json(fam), sort_keys=True)
    res = core.scale(fam).to_json()
    assert res["value"] == "25" and res["method"] == Method.CLOSED_FORM.value
