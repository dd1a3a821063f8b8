"""The shipped example algebras and a few standard modules over them.

Every entry is constructed over an arbitrary FieldSpec; `all_class_p(field)`
is what the test suites iterate over.
"""

from .dgcore import DgAlgebra, free_module, projective_module
from .scalars import FieldSpec


def algebra_lambda(field=None, label="lambda"):
    """k[x]/(x^2) with deg x = 1 and zero differential.  Normalized positive."""
    f = field or FieldSpec.rationals()
    return DgAlgebra(
        f, ["e", "x"], [0, 1], [0, 0], [0, 0], [0],
        mult={(1, 1): []},
        diff={},
        label=label,
    )


def algebra_a2(field=None, label="a2"):
    """Basis e; u, v in degree 1; w in degree 2, with du = w.

    All products of positive-degree elements vanish; Leibniz then forces
    nothing further.  H has dimensions (1, 1, 0) in degrees (0, 1, 2).
    """
    f = field or FieldSpec.rationals()
    return DgAlgebra(
        f, ["e", "u", "v", "w"], [0, 1, 1, 2], [0] * 4, [0] * 4, [0],
        mult={},
        diff={1: [(3, 1)]},
        label=label,
    )


def algebra_kk(field=None, r=2, label="kk"):
    """k^r: r orthogonal idempotents and nothing else (semisimple)."""
    f = field or FieldSpec.rationals()
    names = ["e%d" % i for i in range(r)]
    return DgAlgebra(f, names, [0] * r, list(range(r)), list(range(r)),
                     list(range(r)), mult={}, diff={}, label=label)


def algebra_dual_numbers(field=None, label="dual"):
    """k[eps]/(eps^2) with deg eps = 0.  A valid dg algebra, NOT normalized
    positive: the degree-0 part is 2-dimensional."""
    f = field or FieldSpec.rationals()
    return DgAlgebra(
        f, ["e", "eps"], [0, 0], [0, 0], [0, 0], [0],
        mult={(1, 1): []},
        diff={},
        label=label,
    )


def algebra_quiver2(field=None, label="quiv2"):
    """Two idempotents with degree-1 arrows a: 1 → 2 and b: 2 → 1; all paths
    of length two vanish."""
    f = field or FieldSpec.rationals()
    #        e1  e2  a           b
    # src/tgt use idempotent slots; arrow a has src 0, tgt 1 (e2·a·e1 = a)
    return DgAlgebra(
        f, ["e1", "e2", "a", "b"], [0, 0, 1, 1],
        [0, 1, 0, 1], [0, 1, 1, 0], [0, 1],
        mult={(2, 3): [], (3, 2): []},
        diff={},
        label=label,
    )


def algebra_poly2(field=None, label="poly2"):
    """k[t]/(t^2) with deg t = 2 and zero differential.

    Normalized positive with homology in degrees 0 and 2; the derived
    endomorphisms of its simple module live in all degrees ≤ 0, which makes
    it the stress case for verified-range reporting.
    """
    f = field or FieldSpec.rationals()
    return DgAlgebra(
        f, ["e", "t"], [0, 2], [0, 0], [0, 0], [0],
        mult={(1, 1): []},
        diff={},
        label=label,
    )


def all_class_p(field=None):
    """The shipped normalized-positive algebras."""
    return [
        algebra_lambda(field),
        algebra_a2(field),
        algebra_kk(field),
        algebra_quiver2(field),
        algebra_poly2(field),
    ]


def all_algebras(field=None):
    return all_class_p(field) + [algebra_dual_numbers(field)]


def by_name(name, field=None):
    table = {
        "lambda": algebra_lambda,
        "a2": algebra_a2,
        "kk": algebra_kk,
        "dual": algebra_dual_numbers,
        "quiv2": algebra_quiver2,
        "poly2": algebra_poly2,
    }
    if name not in table:
        raise KeyError("unknown corpus algebra %r" % name)
    return table[name](field)


def module_free(a):
    return free_module(a)


def module_projective(a, i):
    return projective_module(a, i)
