import random
from fractions import Fraction as Fr

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tidyscale import arith, core, matrix
from tidyscale.core import Method
from tidyscale.errors import BudgetExceeded, SingularMatrixError, UnsupportedError, ValidationError
from tidyscale.matrix import MatrixFamily, diag_element, make_element, matrix_scale

PRIMES = [2, 3, 5]


def fam_of(values, p):
    return MatrixFamily(diag_element(values, p))


def diag_from(p, vals, units):
    return [Fr(p) ** v * u for v, u in zip(vals, units)]


unit_choices = st.sampled_from([1, -1, 7, Fr(1, 7), Fr(-11, 13)])


@st.composite
def diagonal_families(draw, max_n=3):
    p = draw(st.sampled_from(PRIMES))
    n = draw(st.integers(1, max_n))
    vals = draw(st.lists(st.integers(-2, 2), min_size=n, max_size=n))
    units = [u if arith.valuation(u, p) == 0 else 1 for u in draw(st.lists(unit_choices, min_size=n, max_size=n))]
    return p, diag_from(p, vals, units), vals


def closed_scale(vals, p):
    return p ** sum(vals[j] - vals[i] for i in range(len(vals)) for j in range(len(vals)) if vals[i] < vals[j])


# ---- elements


def test_make_element_validation():
    with pytest.raises(SingularMatrixError):
        make_element([[1, 2], [2, 4]], 5)
    with pytest.raises(ValidationError):
        make_element([[1, 1], [0, 1]], 6)
    with pytest.raises(ValidationError):
        make_element([[1, 2, 3]], 5)
    with pytest.raises(ValidationError):
        diag_element([5, 1], 5, special=True)
    g = make_element([[2, 1], [0, 3]], 5, conjugator=[[1, 1], [0, 1]])
    assert g.valuations == (0, 0)
    with pytest.raises(ValidationError):
        make_element([[2, 1], [0, 3]], 5, conjugator=[[1, 0], [0, 1]])
    with pytest.raises(ValidationError):
        make_element([[2, 1], [0, 3]], 5, conjugator=[[5, 5], [0, 1]])


def test_unipotent_has_no_diagonal_form():
    g = make_element([[1, 1], [0, 1]], 5)
    assert not g.has_diagonal_form
    with pytest.raises(UnsupportedError):
        MatrixFamily(g)


# ---- adjoint and scales


def test_adjoint_examples():
    assert matrix.adjoint_matrix(arith.identity(2)) == arith.identity(4)
    A = matrix.adjoint_matrix(arith.diagonal([5, Fr(1, 5)]))
    assert sorted(A[i][i] for i in range(4)) == [Fr(1, 25), 1, 1, 25]
    assert matrix.is_diagonal(A)


def test_scale_examples():
    assert matrix.scale_via_newton(arith.diagonal([5, Fr(1, 5)]), 5).value == 25
    assert matrix.scale_via_newton(arith.diagonal([25, 5, Fr(1, 125)]), 5).value == 5**10
    assert matrix.scale_via_newton([[1, 1], [0, 1]], 5).value == 1
    assert matrix.scale_via_index_oracle(diag_element([5, Fr(1, 5)], 5)).value == 25
    assert matrix.scale_via_index_oracle(diag_element([1, 1], 5)).value == 1
    g = diag_element([25, 5, Fr(1, 125)], 5)
    assert {matrix.scale_via_index_oracle(g, k).value for k in range(1, 5)} == {5**10}


def test_matrix_scale_reports_all_methods():
    res = matrix_scale(diag_element([5, Fr(1, 5)], 5))
    assert res.value == 25
    assert dict(res.cross_checks) == {Method.INDEX_AT_TIDY: 25, Method.LATTICE_COINDEX: 25}
    uni = matrix_scale(make_element([[1, 1], [0, 1]], 5))
    assert uni.value == 1 and dict(uni.cross_checks)[Method.LATTICE_COINDEX] == 1


def test_generic_engine_agrees():
    res = core.scale(fam_of([5, Fr(1, 5)], 5))
    assert res.value == 25
    assert {m for m, _ in res.cross_checks} == {Method.INDEX_AT_TIDY, Method.MINIMIZED_OVER_FILTRATION}


@settings(max_examples=40, deadline=None)
@given(diagonal_families())
def test_three_way_agreement(data):
    p, diag, vals = data
    g = diag_element(diag, p)
    want = closed_scale(vals, p)
    assert matrix.scale_via_newton(g.entries, p).value == want
    assert matrix.scale_via_index_oracle(g).value == want
    assert matrix.scale_via_lattice(g) == want


@settings(max_examples=25, deadline=None)
@given(diagonal_families(max_n=2), st.lists(st.integers(-3, 3), min_size=4, max_size=4))
def test_scale_conjugation_invariant(data, c):
    p, diag, _ = data
    if len(diag) != 2:
        return
    C = arith.as_matrix([c[:2], c[2:]])
    d = arith.determinant(C)
    if d == 0 or arith.valuation(d, p) != 0:
        return
    g = diag_element(diag, p)
    conj = arith.matmul(arith.matmul(C, g.entries), arith.inverse(C))
    h = make_element(conj, p, conjugator=C)
    assert matrix.scale_via_newton(conj, p).value == matrix_scale(g).value
    assert matrix_scale(h).value == matrix_scale(g).value


@settings(max_examples=20, deadline=None)
@given(diagonal_families())
def test_scale_of_powers(data):
    p, diag, _ = data
    g = diag_element(diag, p)
    s = matrix_scale(g).value
    for n in (1, 2, 3):
        assert matrix_scale(g.power(n)).value == s**n


@settings(max_examples=25, deadline=None)
@given(diagonal_families())
def test_inverse_scale_one_iff_u_trivial(data):
    p, diag, vals = data
    fam = MatrixFamily(diag_element(diag, p))
    # U is nontrivial exactly when some entry has v_i > v_j
    u_trivial = not any(vals[i] > vals[j] for i in range(len(vals)) for j in range(len(vals)))
    assert (core.scale_inverse(fam).value == 1) == u_trivial


# ---- shapes and tidiness


def test_shape_validation():
    fam = fam_of([5, Fr(1, 5)], 5)
    with pytest.raises(ValidationError):
        fam.shape([[0, 1], [1, 1]])
    with pytest.raises(ValidationError):
        fam.shape([[1, 1], [-1, 1]])
    with pytest.raises(ValidationError):
        matrix.ValuationShape.congruence(2, 0)


def test_displacement_and_iteration_examples():
    fam = fam_of([5, Fr(1, 5)], 5)
    V = fam.level(1)
    assert core.displacement_index(fam, V) == 25
    W = core.iterate_intersection(fam, V, 1)
    assert W.S == tuple(tuple(max(1, 1 + fam.d[i][j]) for j in range(2)) for i in range(2))
    assert core.tidying_step1(fam, V)[1] == 0


def test_tidy_example():
    fam = fam_of([5, Fr(1, 5)], 5)
    rep = core.tidy(fam, fam.level(1))
    assert rep.tidy and rep.scale == 25 and rep.scale_inverse == 25
    assert fam.same(fam.image(rep.v_zero, 1), rep.v_zero)


def test_tidy_identity():
    fam = fam_of([1, 1, 1], 3)
    rep = core.tidy(fam, fam.level(2))
    assert rep.scale == rep.scale_inverse == 1


@pytest.mark.parametrize("k", range(1, 6))
def test_congruence_levels_tidy(k):
    fam = fam_of([25, 5, Fr(1, 125)], 5)
    V = fam.level(k)
    assert core.is_tidy(fam, V).ok
    assert core.is_tidy(fam.inverse(), V).ok
    assert core.displacement_index(fam, V) == 5**10


def test_restricted_index_on_parabolic():
    fam = fam_of([25, 5, Fr(1, 125)], 5)
    # restrict V to the P-shape: entries with v_i < v_j forced to vanish
    V = fam.level(1)
    inf = arith.INF
    P = fam.shape([[V.S[i][j] if fam.v[i] >= fam.v[j] else inf for j in range(3)] for i in range(3)])
    aP = fam.image(P, -1)
    assert fam.index(aP, fam.intersect(aP, P)) == core.scale_inverse(fam).value


def test_modular_value_on_contraction_closure():
    fam = fam_of([5, Fr(1, 5)], 5)
    inv = fam.inverse()
    W = fam.intersect(fam.level(1), fam.minus(fam.level(1)))
    assert core.modular_value(inv, W) == 25 == core.scale_inverse(fam).value
    assert core.modular_value(fam_of([1, 1], 5), fam_of([1, 1], 5).level(1)) == 1


# ---- membership


def test_membership_examples():
    fam = fam_of([5, Fr(1, 5)], 5)
    up, low = arith.as_matrix([[1, 1], [0, 1]]), arith.as_matrix([[1, 0], [1, 1]])
    assert core.membership(fam, up, "U").yes
    assert core.membership(fam, low, "U").no
    assert core.membership(fam, low, "P").no
    assert core.membership(fam, arith.as_matrix([[2, 0], [0, 3]]), "M").yes
    for t in ("U", "P", "M", "U0"):
        assert core.membership(fam, arith.identity(2), t).yes
    assert core.membership(fam, up, "U0").no


def test_membership_without_diagonal_form_is_unknown():
    g = make_element([[1, 1], [0, 1]], 5)
    v = matrix.membership_general(g, [[1, 0], [1, 1]], "U", horizon=4)
    assert v.verdict is core.Verdict.UNKNOWN and v.horizon == 4
    assert matrix.membership_general(g, arith.identity(2), "U").yes


@settings(max_examples=40, deadline=None)
@given(diagonal_families(), st.integers(0, 10_000))
def test_membership_implications(data, seed):
    p, diag, _ = data
    fam = MatrixFamily(diag_element(diag, p))
    rng = random.Random(seed)
    n = fam.n
    x = arith.as_matrix([[rng.choice([0, 0, 1, p, Fr(1, p)]) + int(i == j) for j in range(n)] for i in range(n)])
    if arith.determinant(x) == 0:
        return
    u, pp, m = (core.membership(fam, x, t) for t in ("U", "P", "M"))
    if u.yes:
        assert pp.yes
    assert m.yes == (pp.yes and core.membership(fam.inverse(), x, "P").yes)


# ---- Levi factors and coset representatives


def test_levi_examples():
    fam = fam_of([5, Fr(1, 5)], 5)
    a, b, d = Fr(2), Fr(3), Fr(5)
    m, u = matrix.levi_factorization(fam, [[a, b], [0, d]])
    assert m == arith.diagonal([a, d])
    assert u == arith.as_matrix([[1, b / a], [0, 1]])
    x = arith.diagonal([7, 11])
    assert matrix.levi_factorization(fam, x) == (x, arith.identity(2))
    y = arith.as_matrix([[1, 4], [0, 1]])
    assert matrix.levi_factorization(fam, y) == (arith.identity(2), y)
    with pytest.raises(ValidationError):
        matrix.levi_factorization(fam, [[1, 0], [1, 1]])


def test_coset_reps_examples():
    fam = fam_of([5, Fr(1, 5)], 5)
    reps = matrix.coset_reps_vminus(fam, fam.level(1), 1)
    assert len(reps) == 25
    assert all(r[1][0] == 0 and r[0][0] == r[1][1] == 1 for r in reps)
    assert sorted(r[0][1] for r in reps) == [5 * c for c in range(25)]
    assert len(matrix.coset_reps_vminus(fam_of([1, 1], 5), fam_of([1, 1], 5).level(1), 1)) == 1
    assert len(matrix.coset_reps_vminus(fam_of([5, 1], 5), fam_of([5, 1], 5).level(1), 1)) == 5
    with pytest.raises(BudgetExceeded):
        matrix.coset_reps_vminus(fam, fam.level(1), 4, limit=1000)


def test_coset_reps_are_distinct_cosets():
    fam = fam_of([4, Fr(1, 2)], 2)
    V = fam.level(1)
    reps = matrix.coset_reps_vminus(fam, V, 2)
    keys = {matrix.coset_key(fam, V, r, 2) for r in reps}
    assert len(keys) == len(reps) == core.scale_inverse(fam).value ** 2
