"""Exact scalars (Q or F_p) and the dense linear algebra everything else uses.

All arithmetic is exact: rationals are gmpy2.mpq, prime-field elements are
ints reduced mod p.  No floating point anywhere.
"""

from gmpy2 import mpq


class FieldError(ValueError):
    pass


def _is_prime(p):
    if p < 2:
        return False
    if p < 4:
        return True
    if p % 2 == 0:
        return False
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


class FieldSpec:
    """The ground field: rationals (p is None) or F_p for a prime p < 2**31."""

    __slots__ = ("p",)

    def __init__(self, p=None):
        if p is not None:
            p = int(p)
            if p >= 2 ** 31 or not _is_prime(p):
                raise FieldError("p must be a prime below 2**31, got %r" % (p,))
        object.__setattr__(self, "p", p)

    def __setattr__(self, *a):
        raise AttributeError("FieldSpec is immutable")

    @staticmethod
    def rationals():
        return FieldSpec(None)

    @staticmethod
    def prime_field(p):
        return FieldSpec(p)

    @property
    def is_rational(self):
        return self.p is None

    def __eq__(self, other):
        return isinstance(other, FieldSpec) and self.p == other.p

    def __hash__(self):
        return hash(("FieldSpec", self.p))

    def __repr__(self):
        return "Q" if self.p is None else "F%d" % self.p

    # -- element arithmetic ------------------------------------------------

    @property
    def zero(self):
        return mpq(0) if self.p is None else 0

    @property
    def one(self):
        return mpq(1) if self.p is None else 1

    def coerce(self, v):
        if self.p is None:
            return mpq(v)
        return int(v) % self.p

    def add(self, a, b):
        return a + b if self.p is None else (a + b) % self.p

    def sub(self, a, b):
        return a - b if self.p is None else (a - b) % self.p

    def mul(self, a, b):
        return a * b if self.p is None else (a * b) % self.p

    def neg(self, a):
        return -a if self.p is None else (-a) % self.p

    def inv(self, a):
        if self.is_zero(a):
            raise ZeroDivisionError("inverse of zero")
        return 1 / mpq(a) if self.p is None else pow(a, self.p - 2, self.p)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def is_zero(self, a):
        return a == 0

    def is_square(self, a):
        """Whether a is a square in the field (used for local-ring tests)."""
        if self.p is None:
            q = mpq(a)
            if q < 0:
                return False
            num, den = int(q.numerator), int(q.denominator)
            return _isqrt_exact(num) is not None and _isqrt_exact(den) is not None
        a = a % self.p
        if a == 0 or self.p == 2:
            return True
        return pow(a, (self.p - 1) // 2, self.p) == 1

    # -- text form (used by serialization; canonical and parseable) --------

    def fmt(self, a):
        return str(a)

    def parse(self, s):
        if self.p is None:
            return mpq(s)
        if "/" in s:
            num, den = s.split("/")
            return self.div(self.coerce(int(num)), self.coerce(int(den)))
        return self.coerce(int(s))


def _isqrt_exact(n):
    from math import isqrt

    r = isqrt(n)
    return r if r * r == n else None


class Matrix:
    """Dense matrix over a FieldSpec.  Treated as immutable after construction."""

    __slots__ = ("field", "rows", "cols", "data")

    def __init__(self, field, rows, cols, data):
        self.field = field
        self.rows = rows
        self.cols = cols
        self.data = data  # list of row lists
        if len(data) != rows or any(len(r) != cols for r in data):
            raise FieldError("inconsistent matrix shape")

    @staticmethod
    def zeros(field, rows, cols):
        z = field.zero
        return Matrix(field, rows, cols, [[z] * cols for _ in range(rows)])

    @staticmethod
    def identity(field, n):
        m = Matrix.zeros(field, n, n)
        for i in range(n):
            m.data[i][i] = field.one
        return m

    @staticmethod
    def from_rows(field, rows_list):
        rows = len(rows_list)
        cols = len(rows_list[0]) if rows else 0
        data = [[field.coerce(v) for v in r] for r in rows_list]
        return Matrix(field, rows, cols, data)

    @staticmethod
    def column(field, vec):
        return Matrix(field, len(vec), 1, [[field.coerce(v)] for v in vec])

    @staticmethod
    def from_columns(field, cols_list, rows=None):
        if not cols_list:
            return Matrix.zeros(field, rows or 0, 0)
        rows = len(cols_list[0])
        data = [[field.coerce(cols_list[j][i]) for j in range(len(cols_list))]
                for i in range(rows)]
        return Matrix(field, rows, len(cols_list), data)

    def copy(self):
        return Matrix(self.field, self.rows, self.cols, [r[:] for r in self.data])

    def __getitem__(self, ij):
        return self.data[ij[0]][ij[1]]

    def __eq__(self, other):
        return (isinstance(other, Matrix) and self.rows == other.rows
                and self.cols == other.cols and self.data == other.data)

    def __repr__(self):
        return "Matrix(%dx%d over %r)" % (self.rows, self.cols, self.field)

    def is_zero(self):
        f = self.field
        return all(f.is_zero(v) for r in self.data for v in r)

    def col(self, j):
        return [self.data[i][j] for i in range(self.rows)]

    def columns(self):
        return [self.col(j) for j in range(self.cols)]

    def transpose(self):
        return Matrix(self.field, self.cols, self.rows,
                      [[self.data[i][j] for i in range(self.rows)]
                       for j in range(self.cols)])

    def hstack(self, other):
        if self.rows != other.rows:
            raise FieldError("hstack: row mismatch")
        return Matrix(self.field, self.rows, self.cols + other.cols,
                      [self.data[i] + other.data[i] for i in range(self.rows)])

    def mul(self, other):
        if self.cols != other.rows:
            raise FieldError("mul: %dx%d by %dx%d" %
                             (self.rows, self.cols, other.rows, other.cols))
        f = self.field
        out = Matrix.zeros(f, self.rows, other.cols)
        for i in range(self.rows):
            row = self.data[i]
            orow = out.data[i]
            for k in range(self.cols):
                a = row[k]
                if f.is_zero(a):
                    continue
                brow = other.data[k]
                for j in range(other.cols):
                    b = brow[j]
                    if not f.is_zero(b):
                        orow[j] = f.add(orow[j], f.mul(a, b))
        return out

    def add(self, other):
        f = self.field
        return Matrix(f, self.rows, self.cols,
                      [[f.add(self.data[i][j], other.data[i][j])
                        for j in range(self.cols)] for i in range(self.rows)])

    def sub(self, other):
        f = self.field
        return Matrix(f, self.rows, self.cols,
                      [[f.sub(self.data[i][j], other.data[i][j])
                        for j in range(self.cols)] for i in range(self.rows)])

    def scale(self, c):
        f = self.field
        return Matrix(f, self.rows, self.cols,
                      [[f.mul(c, v) for v in r] for r in self.data])

    def apply(self, vec):
        """Matrix times a plain coefficient list."""
        f = self.field
        out = [f.zero] * self.rows
        for i in range(self.rows):
            row = self.data[i]
            acc = f.zero
            for j, v in enumerate(vec):
                if not f.is_zero(v) and not f.is_zero(row[j]):
                    acc = f.add(acc, f.mul(row[j], v))
            out[i] = acc
        return out


def rref(m):
    """Reduced row echelon form.  Returns (Matrix, pivot columns, rank)."""
    f = m.field
    a = [row[:] for row in m.data]
    rows, cols = m.rows, m.cols
    pivots = []
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        piv = None
        for i in range(r, rows):
            if not f.is_zero(a[i][c]):
                piv = i
                break
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = f.inv(a[r][c])
        a[r] = [f.mul(inv, v) for v in a[r]]
        for i in range(rows):
            if i != r and not f.is_zero(a[i][c]):
                coef = a[i][c]
                a[i] = [f.sub(a[i][j], f.mul(coef, a[r][j])) for j in range(cols)]
        pivots.append(c)
        r += 1
    return Matrix(f, rows, cols, a), pivots, len(pivots)


def rank(m):
    return rref(m)[2]


def solve(a, b):
    """A particular solution x of a·x = b (columns of b solved independently).

    Returns None when the system is inconsistent.
    """
    if a.rows != b.rows:
        raise FieldError("solve: dimension mismatch")
    f = a.field
    aug = a.hstack(b)
    red, pivots, _ = rref(aug)
    # any pivot in the b-part of a row means inconsistency
    for c in pivots:
        if c >= a.cols:
            return None
    x = Matrix.zeros(f, a.cols, b.cols)
    for r, c in enumerate(pivots):
        for j in range(b.cols):
            x.data[c][j] = red.data[r][a.cols + j]
    return x


def kernel_basis(a):
    """Matrix whose columns span ker(a)."""
    f = a.field
    red, pivots, rk = rref(a)
    free = [c for c in range(a.cols) if c not in pivots]
    cols = []
    for fc in free:
        v = [f.zero] * a.cols
        v[fc] = f.one
        for r, pc in enumerate(pivots):
            v[pc] = f.neg(red.data[r][fc])
        cols.append(v)
    return Matrix.from_columns(f, cols, rows=a.cols)


def intersect_and_complement(subspace, ambient_dim):
    """A complement basis (as columns) of the column span of `subspace` in k^n.

    RREF-based and deterministic: the complement consists of the standard
    basis vectors at the non-pivot coordinates.
    """
    f = subspace.field
    if subspace.rows not in (0, ambient_dim):
        raise FieldError("subspace rows do not match ambient dimension")
    if subspace.cols == 0 or subspace.rows == 0:
        pivots = []
    else:
        _, pivots, _ = rref(subspace.transpose())
    cols = []
    for i in range(ambient_dim):
        if i not in pivots:
            v = [f.zero] * ambient_dim
            v[i] = f.one
            cols.append(v)
    return Matrix.from_columns(f, cols, rows=ambient_dim)


def column_span_contains(span, vec):
    """Whether vec lies in the column span of `span`."""
    return solve(span, Matrix.column(span.field, vec)) is not None
