import random

import pytest

from dgforge.scalars import (
    FieldSpec, FieldError, Matrix, rref, rank, solve, kernel_basis,
    intersect_and_complement, column_span_contains,
)

Q = FieldSpec.rationals()
F2 = FieldSpec.prime_field(2)
F7 = FieldSpec.prime_field(7)


def test_fieldspec_prime_validation():
    FieldSpec.prime_field(2)
    FieldSpec.prime_field(10007)
    with pytest.raises(FieldError):
        FieldSpec.prime_field(4)
    with pytest.raises(FieldError):
        FieldSpec.prime_field(1)
    with pytest.raises(FieldError):
        FieldSpec.prime_field(2 ** 31 + 11)


def test_field_arithmetic():
    a = Q.parse("3/4")
    b = Q.parse("-1/4")
    assert Q.fmt(Q.add(a, b)) == "1/2"
    assert Q.mul(Q.inv(a), a) == Q.one
    x = F7.coerce(5)
    assert F7.mul(F7.inv(x), x) == F7.one
    assert F7.add(F7.coerce(6), F7.coerce(3)) == 2


def test_rref_empty_and_identity():
    m = Matrix.zeros(Q, 0, 0)
    red, pivots, rk = rref(m)
    assert rk == 0 and pivots == []
    ident = Matrix.identity(Q, 3)
    red, pivots, rk = rref(ident)
    assert red == ident and rk == 3 and pivots == [0, 1, 2]


def test_rref_rank_one():
    # hand elimination: [[1,2],[2,4]] -> [[1,2],[0,0]], pivot column 0
    m = Matrix.from_rows(Q, [[1, 2], [2, 4]])
    red, pivots, rk = rref(m)
    assert rk == 1
    assert pivots == [0]
    assert red == Matrix.from_rows(Q, [[1, 2], [0, 0]])


def test_rref_idempotent_randomized():
    rng = random.Random(7)
    for field in (Q, F7):
        for _ in range(25):
            rows = rng.randrange(0, 5)
            cols = rng.randrange(0, 5)
            m = Matrix.from_rows(
                field, [[rng.randrange(-4, 5) for _ in range(cols)] for _ in range(rows)]
            ) if rows else Matrix.zeros(field, 0, cols)
            red, _, rk = rref(m)
            red2, _, rk2 = rref(red)
            assert red2 == red and rk2 == rk


def test_solve_identity_and_inconsistent():
    ident = Matrix.identity(Q, 2)
    b = Matrix.from_rows(Q, [[3], [5]])
    assert solve(ident, b) == b
    a = Matrix.from_rows(Q, [[0]])
    assert solve(a, Matrix.from_rows(Q, [[1]])) is None


def test_solve_f2_enumeration_oracle():
    # enumerate all 4 candidates over F2: solutions of x0 + x1 = 1
    a = Matrix.from_rows(F2, [[1, 1]])
    b = Matrix.from_rows(F2, [[1]])
    sols = []
    for x0 in (0, 1):
        for x1 in (0, 1):
            if (x0 + x1) % 2 == 1:
                sols.append([x0, x1])
    x = solve(a, b)
    assert x is not None
    assert [x.data[0][0], x.data[1][0]] in sols
    assert a.mul(x) == b


def test_solve_exactness_randomized():
    rng = random.Random(11)
    for field in (Q, F2, F7):
        for _ in range(30):
            rows, cols = rng.randrange(1, 5), rng.randrange(1, 5)
            a = Matrix.from_rows(
                field, [[rng.randrange(-3, 4) for _ in range(cols)] for _ in range(rows)])
            xs = Matrix.from_rows(field, [[rng.randrange(-3, 4)] for _ in range(cols)])
            b = a.mul(xs)
            x = solve(a, b)
            assert x is not None
            assert a.mul(x) == b


def test_kernel_identity_zero_and_rank_one():
    assert kernel_basis(Matrix.identity(Q, 3)).cols == 0
    z = Matrix.zeros(Q, 1, 2)
    k = kernel_basis(z)
    assert k.cols == 2
    m = Matrix.from_rows(Q, [[1, 2], [2, 4]])
    k = kernel_basis(m)
    assert k.cols == 1
    # spans the same line as (2, -1)
    assert column_span_contains(k, [2, -1])
    assert m.mul(k).is_zero()


def test_rank_nullity_randomized():
    rng = random.Random(3)
    for field in (Q, F7):
        for _ in range(30):
            rows, cols = rng.randrange(0, 5), rng.randrange(0, 5)
            m = Matrix.from_rows(
                field, [[rng.randrange(-3, 4) for _ in range(cols)] for _ in range(rows)]
            ) if rows else Matrix.zeros(field, 0, cols)
            assert rank(m) + kernel_basis(m).cols == cols


def test_complement():
    # complement of a line in Q^2
    sub = Matrix.from_columns(Q, [[1, 1]])
    comp = intersect_and_complement(sub, 2)
    assert comp.cols == 1
    full = sub.hstack(comp)
    assert rank(full) == 2
    # complement of 0 is everything
    comp = intersect_and_complement(Matrix.zeros(Q, 2, 0), 2)
    assert comp.cols == 2
    # complement of everything is 0
    comp = intersect_and_complement(Matrix.identity(Q, 2), 2)
    assert comp.cols == 0


def test_complement_randomized_direct_sum():
    rng = random.Random(5)
    for _ in range(25):
        n = rng.randrange(1, 6)
        k = rng.randrange(0, n + 1)
        vecs = [[rng.randrange(-3, 4) for _ in range(n)] for _ in range(k)]
        sub = Matrix.from_columns(Q, vecs, rows=n)
        comp = intersect_and_complement(sub, n)
        assert rank(sub) + comp.cols == n
        assert rank(sub.hstack(comp)) == n
