import pytest

from dgforge import corpus
from dgforge.dgcore import (
    DgAlgebra, DgError, ModuleMap, cone, cone_les_exact, direct_sum,
    free_module, homology, indecomposable_summands, is_quasi_iso,
    null_homotopy, projective_module, quotient, quotient_by_indices, shift,
    shift_map, submodule, submodule_on_indices, validate_algebra, zero_module,
)
from dgforge.scalars import FieldSpec

Q = FieldSpec.rationals()


def simple_over(a):
    """A/A^{>=1} built by hand as a quotient of the free module."""
    free = free_module(a)
    killed = [i for i in range(free.dim) if free.degrees[i] > 0]
    s, _ = quotient_by_indices(free, killed, label="S")
    return s


# -- validation -----------------------------------------------------------------


def test_validate_lambda_class_p():
    a = corpus.algebra_lambda()
    rep = validate_algebra(a)
    assert rep.is_valid and rep.class_p


def test_validate_dual_numbers_not_class_p():
    a = corpus.algebra_dual_numbers()
    rep = validate_algebra(a)
    assert rep.is_valid
    assert not rep.class_p
    assert any("degree-0" in r for r in rep.class_p_reasons)


def test_validate_kk_class_p():
    rep = validate_algebra(corpus.algebra_kk())
    assert rep.is_valid and rep.class_p


def test_validate_all_corpus():
    for a in corpus.all_class_p():
        rep = validate_algebra(a)
        assert rep.is_valid and rep.class_p, (a.label, rep.violations)


def test_validate_catches_bad_grading():
    # d(x) = e breaks grading
    a = DgAlgebra(Q, ["e", "x"], [0, 1], [0, 0], [0, 0], [0],
                  mult={(1, 1): []}, diff={1: [(0, 1)]})
    rep = validate_algebra(a)
    assert not rep.is_valid
    assert any("grading" in v for v in rep.violations)


def test_validate_catches_bad_leibniz():
    # x·x = y, y·x = x·y = z keeps associativity; d(y) = z with d(x) = 0 then
    # breaks Leibniz on (x, x): d(x·x) = z while d(x)·x − x·d(x) = 0.
    a = DgAlgebra(Q, ["e", "x", "y", "z"], [0, 1, 2, 3], [0] * 4, [0] * 4, [0],
                  mult={(1, 1): [(2, 1)], (2, 1): [(3, 1)], (1, 2): [(3, 1)]},
                  diff={2: [(3, 1)]})
    rep = validate_algebra(a)
    assert not rep.is_valid
    assert any("Leibniz" in v for v in rep.violations)


def test_zero_algebra_rejected():
    a = DgAlgebra(Q, [], [], [], [], [], mult={}, diff={})
    rep = validate_algebra(a)
    assert not rep.is_valid


def test_module_validation_corpus_frees_and_shifts():
    for a in corpus.all_algebras():
        m = free_module(a)
        assert m.validate().is_valid, (a.label, m.validate().violations)
        for p in (-2, -1, 1, 2):
            assert shift(m, p).validate().is_valid, (a.label, p)


# -- homology --------------------------------------------------------------------


def test_homology_lambda():
    h = homology(free_module(corpus.algebra_lambda()))
    assert h.dim(0, 0) == 1 and h.dim(1, 0) == 1 and h.total() == 2


def test_homology_a2():
    h = homology(free_module(corpus.algebra_a2()))
    assert h.dim(0, 0) == 1
    assert h.dim(1, 0) == 1
    assert h.dim(2, 0) == 0
    assert h.total() == 2


def test_homology_zero_module():
    h = homology(zero_module(corpus.algebra_lambda()))
    assert h.is_zero()


def test_homology_projectives_positive():
    # classP: homology of e_i A vanishes below 0 and H^0 is 1-dim at block i
    for a in corpus.all_class_p():
        for i in range(a.r):
            h = homology(projective_module(a, i))
            assert h.min_degree() == 0
            assert h.degree_dims(0) == tuple(1 if j == i else 0 for j in range(a.r))


# -- shift -----------------------------------------------------------------------


def test_shift_zero_is_identity_on_data():
    m = free_module(corpus.algebra_lambda())
    s = shift(m, 0)
    assert s.degrees == m.degrees and s.diff == m.diff


def test_shift_moves_homology():
    m = free_module(corpus.algebra_a2())
    h = homology(m)
    h1 = homology(shift(m, 1))
    assert h1 == h.shifted(1)
    assert homology(shift(m, -3)) == h.shifted(-3)


def test_shift_lambda_degrees():
    s = shift(free_module(corpus.algebra_lambda()), 1)
    assert sorted(s.degrees) == [-1, 0]


def test_shift_map_chain_property():
    a = corpus.algebra_a2()
    m = free_module(a)
    f = ModuleMap.identity(m)
    for p in (1, -1, 2):
        sf = shift_map(f, p)
        assert sf.is_chain_map()
        assert sf.is_a_linear()


# -- cone ------------------------------------------------------------------------


def test_cone_of_identity_is_acyclic():
    for a in corpus.all_algebras():
        m = free_module(a)
        c, incl, proj = cone(ModuleMap.identity(m))
        assert c.validate().is_valid
        assert homology(c).is_zero()
        assert incl.is_chain_map() and proj.is_chain_map()


def test_cone_of_zero_splits():
    a = corpus.algebra_lambda()
    m = free_module(a)
    s = simple_over(a)
    z = ModuleMap.zero(m, s, 0)
    c, _, _ = cone(z)
    assert homology(c) == homology(s).add(homology(shift(m, 1)))


def test_cone_eps_over_dual_numbers():
    a = corpus.algebra_dual_numbers()
    m = free_module(a)
    f = a.field
    # left multiplication by eps is the A-linear chain map e -> eps, eps -> 0
    eps = ModuleMap.from_images(m, m, 0, [{1: f.one}, {}])
    assert eps.is_chain_map()
    c, _, _ = cone(eps)
    h = homology(c)
    assert h.dim(0, 0) == 1 and h.dim(-1, 0) == 1 and h.total() == 2


def test_cone_les_exact_on_samples():
    a = corpus.algebra_a2()
    m = free_module(a)
    assert cone_les_exact(ModuleMap.identity(m))
    s = simple_over(a)
    assert cone_les_exact(ModuleMap.zero(m, s, 0))
    lam = corpus.algebra_lambda()
    mfree = free_module(lam)
    ssimple = simple_over(lam)
    killed = [i for i in range(mfree.dim) if mfree.degrees[i] > 0]
    _, proj = quotient_by_indices(mfree, killed)
    assert proj.target.dim == ssimple.dim
    assert cone_les_exact(proj)


# -- sums, submodules, quotients ---------------------------------------------------


def test_direct_sum_homology_adds():
    a = corpus.algebra_lambda()
    m = free_module(a)
    s = simple_over(a)
    total, incls, projs = direct_sum([m, s, shift(s, -2)])
    assert total.validate().is_valid
    expected = homology(m).add(homology(s)).add(homology(shift(s, -2)))
    assert homology(total) == expected
    for incl, proj in zip(incls, projs):
        assert incl.is_chain_map() and proj.is_chain_map()
        assert proj.compose(incl).sub(ModuleMap.identity(incl.source)).is_zero_map()


def test_quotient_lambda_by_x_is_simple():
    a = corpus.algebra_lambda()
    m = free_module(a)
    q, proj = quotient_by_indices(m, [1])
    assert q.validate().is_valid
    assert proj.is_chain_map() and proj.is_a_linear()
    h = homology(q)
    assert h.total() == 1 and h.dim(0, 0) == 1


def test_submodule_span_x():
    a = corpus.algebra_lambda()
    m = free_module(a)
    sub, incl = submodule_on_indices(m, [1])
    assert sub.validate().is_valid
    assert incl.is_chain_map()
    h = homology(sub)
    assert h.total() == 1 and h.dim(1, 0) == 1


def test_submodule_not_closed_raises():
    a = corpus.algebra_lambda()
    m = free_module(a)
    with pytest.raises(DgError):
        submodule_on_indices(m, [0])  # e·x = x escapes


def test_general_submodule_and_quotient_agree_with_index_forms():
    a = corpus.algebra_a2()
    m = free_module(a)
    f = a.field
    span = [m.dense({1: f.one}), m.dense({3: f.one})]  # span(u, w), a dg submodule
    sub, incl = submodule(m, span)
    sub2, _ = submodule_on_indices(m, [1, 3])
    assert homology(sub) == homology(sub2)
    quo, proj = quotient(m, span)
    quo2, _ = quotient_by_indices(m, [1, 3])
    assert homology(quo) == homology(quo2)
    assert proj.is_chain_map() and incl.is_chain_map()


# -- homotopies -------------------------------------------------------------------


def test_null_homotopy_zero_map():
    a = corpus.algebra_lambda()
    m = free_module(a)
    h = null_homotopy(ModuleMap.zero(m, m, 0))
    assert h is not None and h.is_zero_map()


def test_null_homotopy_identity_of_contractible():
    for a in (corpus.algebra_lambda(), corpus.algebra_a2()):
        m = free_module(a)
        c, _, _ = cone(ModuleMap.identity(m))
        h = null_homotopy(ModuleMap.identity(c))
        assert h is not None
        assert h.is_a_linear()


def test_null_homotopy_identity_of_simple_fails():
    a = corpus.algebra_lambda()
    s = simple_over(a)
    assert null_homotopy(ModuleMap.identity(s)) is None


# -- quasi-isomorphisms --------------------------------------------------------------


def test_identity_is_quasi_iso():
    m = free_module(corpus.algebra_a2())
    assert is_quasi_iso(ModuleMap.identity(m))


def test_projection_to_simple_is_not_quasi_iso():
    a = corpus.algebra_lambda()
    m = free_module(a)
    _, proj = quotient_by_indices(m, [1])
    assert proj.is_chain_map()
    assert not is_quasi_iso(proj)  # H^1 is lost


# -- summands ----------------------------------------------------------------------


def test_indecomposable_summands():
    assert len(indecomposable_summands(corpus.algebra_kk())) == 2
    assert len(indecomposable_summands(corpus.algebra_lambda())) == 1
    assert len(indecomposable_summands(corpus.algebra_a2())) == 1


def test_indecomposable_summands_requires_class_p():
    from dgforge.dgcore import NotClassP
    with pytest.raises(NotClassP):
        indecomposable_summands(corpus.algebra_dual_numbers())
