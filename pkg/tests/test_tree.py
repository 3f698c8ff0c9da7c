import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tidyscale import core, tree
from tidyscale.errors import ConsistencyError, ValidationError
from tidyscale.tree import Kind, TreeAutomorphismData, TreeElement, TreeFamily


@st.composite
def tree_elements(draw, hyperbolic=None):
    q = draw(st.sampled_from([2, 3]))
    if hyperbolic is None:
        hyperbolic = draw(st.booleans())
    s = draw(st.sampled_from([-2, -1, 1, 2])) if hyperbolic else 0
    deco = {}
    for _ in range(draw(st.integers(0, 3))):
        t = draw(st.integers(-2, 2))
        word = tuple(draw(st.lists(st.integers(0, q - 1), max_size=2)))
        if word and word[0] == 0:
            word = (1,) + word[1:]
        perm = draw(st.permutations(list(range(q))))
        if not word and hyperbolic and perm[0] != 0:
            continue
        deco[(t, word)] = tuple(perm)
    return TreeElement.make(q, s, deco)


def test_ball_sizes():
    for q in (2, 3):
        for R in range(4):
            assert len(tree.ball(tree.ROOT, R, q)) == tree.ball_size(q, R) == 1 + (q + 1) * (q**R - 1) // (q - 1)


def test_word_coding_roundtrip():
    for u in tree.ball(tree.ROOT, 3, 3):
        assert tree.word_to_vertex(tree.vertex_to_word(u, 3), 3) == u
        assert tree.distance(tree.ROOT, u) == len(tree.vertex_to_word(u, 3))


def test_classify_examples():
    ident = TreeAutomorphismData.of(TreeElement(2))
    assert tree.classify(ident, 2) == (Kind.ELLIPTIC, ())
    g = tree.translation(2, 1)
    assert tree.classify(TreeAutomorphismData.of(g), 3) == (Kind.HYPERBOLIC, 1)
    assert tree.classify(TreeAutomorphismData.of(tree.power(g, 2)), 3) == (Kind.HYPERBOLIC, 2)
    with pytest.raises(ValidationError):
        tree.classify(TreeAutomorphismData.of(tree.power(g, 2)), 1)


def test_classify_detects_wrong_declaration():
    g = tree.translation(2, 1)
    bad = TreeAutomorphismData(g, Kind.HYPERBOLIC, 2)
    with pytest.raises(ConsistencyError):
        tree.classify(bad, 3)


def test_tree_scale_examples():
    assert tree.tree_scale(TreeAutomorphismData.of(tree.translation(2, 1))).value == 2
    assert tree.tree_scale(TreeAutomorphismData.of(tree.translation(3, 2))).value == 9
    assert tree.tree_scale(TreeAutomorphismData.of(tree.contraction_witness(2))).value == 1


@pytest.mark.parametrize("q", [2, 3])
@pytest.mark.parametrize("l", [1, 2, 3])
def test_tree_scale_formula_engine(q, l):
    fam = TreeFamily(tree.translation(q, l))
    res = core.scale(fam)
    assert res.value == q**l
    assert all(v == q**l for _, v in res.cross_checks)


@settings(max_examples=30, deadline=None)
@given(tree_elements(hyperbolic=True))
def test_scale_of_powers(g):
    s = tree.tree_scale(TreeAutomorphismData.of(g)).value
    for n in (1, 2, 3):
        d = TreeAutomorphismData.of(tree.power(g, n))
        assert tree.classify(d, d.l + 1)[1] == n * abs(g.s)
        assert tree.tree_scale(d).value == s**n


def test_hyperbolic_must_fix_axis():
    with pytest.raises(ValidationError):
        TreeAutomorphismData.of(TreeElement.make(2, 1, {(0, ()): (1, 0)}))


def test_bad_decoration_rejected():
    with pytest.raises(ValidationError):
        TreeElement.make(2, 0, {(0, ()): (0, 0)})
    with pytest.raises(ValidationError):
        TreeElement.make(1, 0)


@settings(max_examples=40, deadline=None)
@given(tree_elements(), tree_elements())
def test_compose_and_invert_pointwise(x, y):
    if x.q != y.q:
        return
    xy, xi = tree.compose(x, y), tree.invert(x)
    for u in tree.ball(tree.ROOT, 3, x.q):
        assert xy(u) == x(y(u))
        assert xi(x(u)) == u


@settings(max_examples=30, deadline=None)
@given(tree_elements())
def test_portraits_validate(x):
    port = tree.portrait(x, 2)
    tree.validate_portrait(port, x.q, 2)
    again = tree.portrait_from_json(tree.portrait_to_json(port), x.q, 2)
    assert again == port


def test_invalid_portrait_rejected():
    port = tree.portrait(TreeElement(2), 1)
    port[(0,)], port[(1,)] = port[(1,)], port[(0,)]
    port[(0,)] = (0, 0)
    with pytest.raises(ValidationError):
        tree.validate_portrait(port, 2, 1)


def test_fixator_index_examples():
    assert tree.fixator_index_bruteforce(tree.translation(2, 1), 0, 1, 3) == 2
    assert tree.fixator_index_bruteforce(tree.translation(2, 2), 0, 1, 3) == 4
    assert tree.fixator_index_bruteforce(tree.contraction_witness(2), 0, 1, 3) == 1
    with pytest.raises(ValidationError):
        tree.fixator_index_bruteforce(tree.translation(4, 1), 0, 1, 3)


def test_segment_indices_match_formula():
    for q in (2, 3):
        fam = TreeFamily(tree.translation(q, 1))
        for lo, hi in [(0, 1), (-1, 2), (0, 3)]:
            V = fam.segment(lo, hi)
            assert core.displacement_index(fam, V) == q
            assert core.is_tidy(fam, V).ok


def test_elliptic_stabilizer_is_tidy():
    x = tree.contraction_witness(2)
    fam = TreeFamily(x)
    V = fam.level(1)
    assert core.displacement_index(fam, V) == 1
    assert core.is_tidy(fam, V).ok
    rep = core.tidy(fam, V)
    assert rep.scale == rep.scale_inverse == 1


def test_tidy_for_inverse():
    fam = TreeFamily(tree.translation(3, 2))
    V = fam.segment(0, 2)
    assert core.is_tidy(fam, V).ok and core.is_tidy(fam.inverse(), V).ok


def test_contraction_certificate_examples():
    g = tree.translation(2, 1)
    assert tree.contraction_certificate(TreeElement(2), g, 1, 3).yes
    assert tree.contraction_certificate(g, g, 1, 3).no
    assert tree.contraction_certificate(tree.contraction_witness(2), g, 1, 3).yes
    with pytest.raises(ValidationError):
        tree.contraction_certificate(g, g, 3, 3)


@pytest.mark.parametrize("q", [2, 3])
@pytest.mark.parametrize("l", [1, 2, 3])
def test_levi_meets_contraction(q, l):
    fam = TreeFamily(tree.translation(q, l))
    w = tree.contraction_witness(q)
    assert not w.is_identity()
    assert tree.fixes_both_ends(w)
    assert tree.contraction_certificate(w, fam.g, 1, 3).yes
    assert core.membership(fam, w, "U").yes and core.membership(fam, w, "M").yes


@settings(max_examples=40, deadline=None)
@given(tree_elements(), tree_elements(hyperbolic=True))
def test_membership_implications(x, g):
    if x.q != g.q:
        return
    fam = TreeFamily(g)
    u, p, m = (core.membership(fam, x, t) for t in ("U", "P", "M"))
    if u.yes:
        assert p.yes
    assert m.yes == (p.yes and core.membership(fam.inverse(), x, "P").yes)
