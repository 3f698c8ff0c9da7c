"""Acceptance criteria.

Each test prints one ``PASS``/``FAIL`` line with its wall time.  Run with
``pytest tests/test_acceptance.py -v`` or directly as a script.
"""

import random
import time
from contextlib import contextmanager
from fractions import Fraction as Fr

import pytest

from tidyscale import core, coset_tree, suite, tree
from tidyscale.errors import Step1CapExceeded, ValidationError
from tidyscale.finite_groups import group_by_name, named_subgroup
from tidyscale.matrix import (
    MatrixFamily,
    diag_element,
    make_element,
    scale_via_index_oracle,
    scale_via_lattice,
    scale_via_newton,
)
from tidyscale.shift import ShiftFamily

SHIFT_CONFIGS = [("S3", "A3"), ("C4", "C2"), ("D4", "center")]


def _emit(line):
    print(line, flush=True)


@contextmanager
def criterion(number, title, budget=None, capsys=None):
    start = time.perf_counter()
    status, detail = "FAIL", ""
    try:
        yield
        elapsed = time.perf_counter() - start
        if budget is not None and elapsed >= budget:
            detail = f" over the {budget:g} s budget"
            raise AssertionError(f"criterion {number} took {elapsed:.2f} s, budget {budget:g} s")
        status = "PASS"
    finally:
        elapsed = time.perf_counter() - start
        line = f"{status} criterion {number}: {title} ({elapsed:.2f} s){detail}"
        if capsys is not None:
            with capsys.disabled():
                _emit("\n" + line)
        else:
            _emit(line)


# ---- 1. scale agreement in the matrix family


def _three_methods(g):
    return (
        scale_via_newton(g.entries, g.p).value,
        scale_via_index_oracle(g).value,
        scale_via_lattice(g),
    )


CRITERION1 = [
    ("diag(5,1/5)", lambda: diag_element([5, Fr(1, 5)], 5), 25),
    ("diag(25,5,5^-3)", lambda: diag_element([25, 5, Fr(1, 125)], 5), 5**10),
    ("unipotent", lambda: make_element([[1, 1], [0, 1]], 5), 1),
    ("unipotent 3x3", lambda: make_element([[1, 2, 3], [0, 1, 4], [0, 0, 1]], 5), 1),
    ("identity", lambda: diag_element([1, 1], 5), 1),
]


@pytest.mark.parametrize("label,build,want", CRITERION1, ids=[c[0] for c in CRITERION1])
def test_criterion_1_matrix_scale_agreement(label, build, want, capsys):
    with criterion(1, f"matrix scale agreement, {label} -> {want}", 1.0, capsys):
        got = _three_methods(build())
        assert got == (want, want, want), got


# ---- 2. shift family: the only tidy subgroup


def test_criterion_2_shift_uniqueness(capsys):
    with criterion(2, "shift family tidy() returns all-O with scale 1 for sigma and sigma^-1", 5.0, capsys):
        for F, O in SHIFT_CONFIGS:
            G = group_by_name(F)
            fam = ShiftFamily(G, named_subgroup(G, O))
            inv = fam.inverse()
            rng = random.Random(f"acceptance-2:{F}/{O}")
            for _ in range(100):
                V = suite.random_product_subgroup(fam, rng)
                for a in (fam, inv):
                    rep = core.tidy(a, V)
                    assert a.same(rep.output, fam.all_O()), (F, O, fam.describe(V))
                    assert rep.scale == 1 and rep.scale_inverse == 1


# ---- 3. tree formula


def test_criterion_3_tree_formula(capsys):
    with criterion(3, "tree scale q^l and brute-force fixator index", 30.0, capsys):
        for q in (2, 3):
            for l in (1, 2, 3):
                g = tree.translation(q, l)
                data = tree.TreeAutomorphismData.of(g)
                assert tree.classify(data, l + 1) == (tree.Kind.HYPERBOLIC, l)
                assert tree.tree_scale(data).value == q**l
        for l in (1, 2):
            assert tree.fixator_index_bruteforce(tree.translation(2, l), 0, 1, 3) == 2**l


# ---- 4. coset tree structure


def test_criterion_4_coset_tree_structure(capsys):
    with criterion(4, "coset tree balls pass local structure; alpha translates P by 1", 10.0, capsys):
        S3 = group_by_name("S3")
        line = coset_tree.build_ball(coset_tree.ShiftCosets(ShiftFamily(S3, named_subgroup(S3, "A3"))), 0, 6, 6)
        rep = coset_tree.verify_local_structure(line)
        assert rep.ok and not rep.violations, rep.violations
        inc, out = line.in_edges(), line.out_edges()
        for v in line.path[1:-1]:
            assert len(inc[v]) + len(out[v]) == 2
        assert coset_tree.check_translation(line)

        fam = MatrixFamily(diag_element([2, Fr(1, 2)], 2))
        ball = coset_tree.build_ball(coset_tree.MatrixCosets(fam, fam.level(1)), 0, 2, 2)
        rep = coset_tree.verify_local_structure(ball)
        assert rep.ok and not rep.violations, rep.violations
        inc, out = ball.in_edges(), ball.out_edges()
        interior = [v for v in ball.expanded if inc[v]]
        assert interior
        for v in interior:
            assert (len(out[v]), len(inc[v])) == (4, 1)
            assert len(out[v]) + len(inc[v]) == 5
        assert coset_tree.check_translation(ball)
        for a, b in zip(ball.path, ball.path[1:]):
            assert coset_tree.act(ball, coset_tree.AlphaPower(1), a).vertex == b
            assert b[0] - a[0] == 1


# ---- 5. property suite


def test_criterion_5_property_suite(capsys):
    with criterion(5, "property suite C1-C12, 50 seeded cases each", 120.0, capsys):
        report = suite.run_suite(seed=0, cases=50)
        failed = [r.to_json() for r in report.results if not r.passed]
        assert not failed, failed
        assert all(len(r.cases) >= 50 for r in report.results)
        assert report.exploratory["cases"] > 0


# ---- 6. small tidy subgroups dichotomy


def test_criterion_6_dichotomy(capsys):
    with criterion(6, "matrix congruence levels 1-5 tidy; shift has no proper tidy subgroup of all-O", None, capsys):
        for values, p in [([5, Fr(1, 5)], 5), ([25, 5, Fr(1, 125)], 5), ([2, Fr(1, 2)], 2), ([9, 1, 3], 3)]:
            fam = MatrixFamily(diag_element(values, p))
            s = core.scale(fam).value
            for k in range(1, 6):
                V = fam.level(k)
                assert core.is_tidy(fam, V).ok, (values, k)
                assert core.displacement_index(fam, V) == s
        for F, O in SHIFT_CONFIGS:
            G = group_by_name(F)
            fam = ShiftFamily(G, named_subgroup(G, O))
            assert len(fam.O) > 1
            assert core.is_tidy(fam, fam.all_O()).ok
            rng = random.Random(f"acceptance-6:{F}/{O}")
            for _ in range(100):
                V = suite.random_product_subgroup(fam, rng, pool=G.subgroups_of(fam.O), proper=True)
                assert fam.contains(fam.all_O(), V) and not fam.same(V, fam.all_O())
                assert not core.is_tidy(fam, V).ok, fam.describe(V)


# ---- 7. negative controls


def test_criterion_7_negative_controls(capsys):
    with criterion(7, "corrupted ball, non-subgroup constraint and step-1 cap are all rejected", None, capsys):
        fam = MatrixFamily(diag_element([2, Fr(1, 2)], 2))
        ball = coset_tree.build_ball(coset_tree.MatrixCosets(fam, fam.level(1)), 0, 2, 2)
        corrupted = ball.with_edges(set(ball.edges) | {(ball.path[0], ball.path[2])})
        rep = coset_tree.verify_local_structure(corrupted)
        assert not rep.ok and rep.violations

        S3 = group_by_name("S3")
        shift_fam = ShiftFamily(S3, named_subgroup(S3, "A3"))
        with pytest.raises(ValidationError):
            shift_fam.subgroup({0: {S3.index_of("(12)"), S3.index_of("(13)")}})
        with pytest.raises(ValidationError):
            named_subgroup(S3, "{e,(12),(13)}")

        V = shift_fam.subgroup({i: S3.whole() for i in range(3)})
        assert core.tidying_step1(shift_fam, V)[1] == 3
        with pytest.raises(Step1CapExceeded) as err:
            core.tidy(shift_fam, V, cap=1)
        assert str(err.value) == "step-1 did not stabilize within cap=1"
        with pytest.raises(Step1CapExceeded):
            core.tidying_step1(shift_fam, V, cap=2)


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q"]))
