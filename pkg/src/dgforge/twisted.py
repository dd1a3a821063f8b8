"""One-sided twisted complexes over the summands e_iA.

A twisted complex is a formal sum of cells Σ^n e_iA with a degree-1 matrix δ
of algebra elements.  Validity is the operator Maurer–Cartan identity: the
realization differential D = (internal, with cell-parity sign) + (left
multiplication by δ) squares to zero, equivalently entrywise

    (−1)^{n_t} d(δ_ts) + (δ·δ)_ts = 0.

Strict Hom complexes of twisted complexes compute derived Homs on the nose
because realizations are cofibrant.  Composition of Hom elements is plain
matrix multiplication over the algebra, with no signs anywhere; all Koszul
signs live in the differentials.
"""

from .dgcore import (
    DgError, DgModule, ModuleMap, NotClassP, cone, homology,
    homology_class_reps, _sp_add, _sp_scale,
)
from .scalars import Matrix, kernel_basis, rank, rref, solve


class TwError(DgError):
    pass


# ---------------------------------------------------------------------------
# the object
# ---------------------------------------------------------------------------

class TwistedComplex:
    """cells: tuple of (idempotent slot, shift); delta[(t, s)]: the component
    from cell s into cell t, an element of e_{i_t} A e_{i_s} of degree
    1 − n_s + n_t."""

    def __init__(self, algebra, cells, delta, label="X", check=True):
        self.algebra = algebra
        self.field = algebra.field
        self.cells = tuple((int(i), int(n)) for (i, n) in cells)
        self.delta = {}
        for (t, s), elem in delta.items():
            e = dict(elem)
            if e:
                self.delta[(int(t), int(s))] = e
        self.label = label
        self._realized = None
        if check:
            self.validate()

    @property
    def ncells(self):
        return len(self.cells)

    def validate(self):
        a = self.algebra
        a.require_valid()
        for (i, _n) in self.cells:
            if not (0 <= i < a.r):
                raise TwError("cell idempotent out of range")
        for (t, s), elem in self.delta.items():
            if not (0 <= t < self.ncells and 0 <= s < self.ncells):
                raise TwError("delta index out of range")
            it, nt = self.cells[t]
            isrc, ns = self.cells[s]
            want = 1 - ns + nt
            for b in elem:
                if a.degrees[b] != want or a.tgt[b] != it or a.src[b] != isrc:
                    raise TwError("delta entry (%d,%d) has a bad component %s"
                                  % (t, s, a.names[b]))
        defect = self.mc_defect()
        if defect:
            raise TwError("Maurer-Cartan fails at %r" % (sorted(defect)[:3],))
        if not self.scalar_part_nilpotent():
            raise TwError("scalar part of delta is not nilpotent")
        return self

    def entry(self, t, s):
        return dict(self.delta.get((t, s), {}))

    def mc_defect(self):
        """Nonzero entries of (−1)^{n_t} d(δ) + δ·δ."""
        a = self.algebra
        f = self.field
        out = {}
        sgn = {}
        for t in range(self.ncells):
            nt = self.cells[t][1]
            sgn[t] = f.one if nt % 2 == 0 else f.neg(f.one)
        acc = {}
        for (t, s), elem in self.delta.items():
            acc[(t, s)] = _sp_scale(f, sgn[t], a.d(elem))
        for (t, u), eu in self.delta.items():
            for (u2, s), es in self.delta.items():
                if u2 != u:
                    continue
                prod = a.mul(eu, es)
                if prod:
                    acc[(t, s)] = _sp_add(f, acc.get((t, s), {}), prod)
        for k, v in acc.items():
            if v:
                out[k] = v
        return out

    def scalar_matrix(self):
        """Coefficients of the idempotents in the degree-0 entries of δ."""
        f = self.field
        a = self.algebra
        m = Matrix.zeros(f, self.ncells, self.ncells)
        for (t, s), elem in self.delta.items():
            it, _ = self.cells[t]
            for b, c in elem.items():
                if a.is_idem(b) and a.idempotents.index(b) == it:
                    m.data[t][s] = f.add(m.data[t][s], c)
        return m

    def scalar_part_nilpotent(self):
        m = self.scalar_matrix()
        for _ in range(self.ncells):
            if m.is_zero():
                return True
            m = m.mul(m)
        return m.is_zero()

    # -- realization -----------------------------------------------------------

    def realize(self, label=None):
        """The underlying dg module: basis = cells × basis(e_iA)."""
        if self._realized is not None:
            return self._realized
        a = self.algebra
        f = self.field
        names, degrees, idems = [], [], []
        pos = {}
        for c, (i, n) in enumerate(self.cells):
            for b in range(a.dim):
                if a.tgt[b] == i:
                    pos[(c, b)] = len(names)
                    names.append("c%d.%s" % (c, a.names[b]))
                    degrees.append(a.degrees[b] - n)
                    idems.append(a.src[b])
        diff = {}
        action = {}
        for (c, b), k in pos.items():
            i, n = self.cells[c]
            sgn = f.one if n % 2 == 0 else f.neg(f.one)
            terms = {}
            for b2, coef in a.d({b: f.one}).items():
                terms[pos[(c, b2)]] = f.mul(sgn, coef)
            for (t, s), elem in self.delta.items():
                if s != c:
                    continue
                for b2, coef in a.mul(elem, {b: f.one}).items():
                    key = pos[(t, b2)]
                    terms[key] = f.add(terms.get(key, f.zero), coef)
            terms = {k2: v for k2, v in terms.items() if not f.is_zero(v)}
            if terms:
                diff[k] = tuple(terms.items())
            for ai in range(a.dim):
                if a.is_idem(ai):
                    continue
                w = a.mul_basis(b, ai)
                if w:
                    action[(k, ai)] = tuple((pos[(c, b2)], coef) for b2, coef in w.items())
        mod = DgModule(a, names, degrees, idems, diff, action,
                       label=label or ("|%s|" % self.label))
        self._realized = mod
        return mod

    def realization_positions(self):
        """dict (cell, algebra basis) -> realization basis index."""
        a = self.algebra
        pos = {}
        k = 0
        for c, (i, _n) in enumerate(self.cells):
            for b in range(a.dim):
                if a.tgt[b] == i:
                    pos[(c, b)] = k
                    k += 1
        return pos

    def homology(self):
        return homology(self.realize())

    def shifts(self):
        return sorted({n for (_i, n) in self.cells})

    def __repr__(self):
        return "TwistedComplex(%s: %r)" % (self.label, list(self.cells))


def single_cell(a, i, n=0, label=None):
    return TwistedComplex(a, [(i, n)], {}, label=label or ("e%d[%d]" % (i, n)))


def free_tc(a, label=None):
    """All summands e_iA at shift 0, no twist: the free module as an object."""
    return TwistedComplex(a, [(i, 0) for i in range(a.r)], {},
                          label=label or a.label)


def shift_tc(x, p, label=None):
    f = x.field
    sgn = f.one if p % 2 == 0 else f.neg(f.one)
    delta = {k: _sp_scale(f, sgn, v) for k, v in x.delta.items()}
    return TwistedComplex(x.algebra, [(i, n + p) for (i, n) in x.cells], delta,
                          label=label or ("S%+d(%s)" % (p, x.label)), check=False)


def direct_sum_tc(xs, label=None):
    if not xs:
        raise TwError("empty twisted direct sum")
    a = xs[0].algebra
    cells = []
    delta = {}
    off = 0
    for x in xs:
        if x.algebra is not a:
            raise TwError("sum across algebras")
        for (t, s), v in x.delta.items():
            delta[(off + t, off + s)] = dict(v)
        cells.extend(x.cells)
        off += x.ncells
    return TwistedComplex(a, cells, delta,
                          label=label or "(+)".join(x.label for x in xs), check=False)


# ---------------------------------------------------------------------------
# Hom complexes
# ---------------------------------------------------------------------------

class TwHomComplex:
    """The strict Hom complex between two twisted complexes.

    Degree-p component basis: triples (t, s, b) with b an algebra basis
    element of e_{i_t} A e_{i_s} in degree p − n_s + n_t.  Its homology
    computes Hom in the derived category: H^p = Hom(x, Σ^p y).
    """

    def __init__(self, x, y):
        if x.algebra is not y.algebra:
            raise TwError("Hom across algebras")
        self.x = x
        self.y = y
        self.algebra = x.algebra
        self.field = x.field
        self._basis = {}
        self._dmat = {}
        a = self.algebra
        degs = set()
        for s, (isrc, ns) in enumerate(x.cells):
            for t, (it, nt) in enumerate(y.cells):
                for b in range(a.dim):
                    if a.src[b] == isrc and a.tgt[b] == it:
                        degs.add(a.degrees[b] + ns - nt)
        self.support = sorted(degs)

    def basis(self, p):
        if p not in self._basis:
            a = self.algebra
            out = []
            for s, (isrc, ns) in enumerate(self.x.cells):
                for t, (it, nt) in enumerate(self.y.cells):
                    want = p - ns + nt
                    for b in range(a.dim):
                        if (a.src[b] == isrc and a.tgt[b] == it
                                and a.degrees[b] == want):
                            out.append((t, s, b))
            self._basis[p] = out
        return self._basis[p]

    def dim(self, p):
        return len(self.basis(p))

    def element_to_vec(self, elem, p):
        f = self.field
        basis = self.basis(p)
        pos = {k: i for i, k in enumerate(basis)}
        vec = [f.zero] * len(basis)
        for (t, s), e in elem.items():
            for b, c in e.items():
                key = (t, s, b)
                if key not in pos:
                    if not f.is_zero(c):
                        raise TwError("element has a component outside degree %d" % p)
                    continue
                vec[pos[key]] = f.add(vec[pos[key]], c)
        return vec

    def vec_to_element(self, vec, p):
        f = self.field
        out = {}
        for coef, (t, s, b) in zip(vec, self.basis(p)):
            if f.is_zero(coef):
                continue
            out.setdefault((t, s), {})
            cur = out[(t, s)].get(b, f.zero)
            out[(t, s)][b] = f.add(cur, coef)
        return {k: v for k, v in out.items() if v}

    def differential_of(self, elem, p):
        """D(F) = (−1)^{n_t}d(F) + δ_y·F − (−1)^p F·δ_x, entrywise over A."""
        a = self.algebra
        f = self.field
        out = {}

        def bump(key, term):
            if term:
                out[key] = _sp_add(f, out.get(key, {}), term)

        psgn = f.one if p % 2 == 0 else f.neg(f.one)
        for (t, s), e in elem.items():
            nt = self.y.cells[t][1]
            sgn = f.one if nt % 2 == 0 else f.neg(f.one)
            bump((t, s), _sp_scale(f, sgn, a.d(e)))
            for (t2, u), dely in self.y.delta.items():
                if u == t:
                    bump((t2, s), a.mul(dely, e))
            for (u, s2), delx in self.x.delta.items():
                if u == s:
                    bump((t, s2), _sp_scale(f, f.neg(psgn), a.mul(e, delx)))
        return {k: v for k, v in out.items() if v}

    def d_matrix(self, p):
        if p not in self._dmat:
            f = self.field
            src = self.basis(p)
            tgt = self.basis(p + 1)
            pos = {k: i for i, k in enumerate(tgt)}
            m = Matrix.zeros(f, len(tgt), len(src))
            for j, (t, s, b) in enumerate(src):
                img = self.differential_of({(t, s): {b: f.one}}, p)
                for (t2, s2), e in img.items():
                    for b2, c in e.items():
                        m.data[pos[(t2, s2, b2)]][j] = c
            self._dmat[p] = m
        return self._dmat[p]

    def is_cycle(self, elem, p):
        return not self.differential_of(elem, p)

    def homology_dim(self, p):
        z = kernel_basis(self.d_matrix(p))
        b = self.d_matrix(p - 1)
        return z.cols - rank(b)

    def homology_table(self):
        out = {}
        for p in range(min(self.support, default=0) - 1,
                       max(self.support, default=0) + 2):
            h = self.homology_dim(p)
            if h:
                out[p] = h
        return out

    def class_representatives(self, p):
        """Elements representing a basis of H^p."""
        f = self.field
        z = kernel_basis(self.d_matrix(p))
        b = self.d_matrix(p - 1)
        # choose kernel columns completing the boundary span
        combined = b.hstack(z)
        _, pivots, _ = rref(combined)
        reps = []
        for c in pivots:
            if c >= b.cols:
                reps.append(self.vec_to_element(z.col(c - b.cols), p))
        return reps

    def identity(self):
        if self.x is not self.y and self.x.cells != self.y.cells:
            raise TwError("identity needs equal cell data")
        f = self.field
        a = self.algebra
        elem = {}
        for c, (i, _n) in enumerate(self.x.cells):
            elem[(c, c)] = {a.idempotents[i]: f.one}
        return elem

    def reduce_to_h0_coords(self, elem):
        """Coordinates of a degree-0 cycle's class in the H^0 representative basis."""
        f = self.field
        vec = self.element_to_vec(elem, 0)
        b = self.d_matrix(-1)
        reps = self.class_representatives(0)
        rep_cols = [self.element_to_vec(r, 0) for r in reps]
        full = b.hstack(Matrix.from_columns(f, rep_cols, rows=self.dim(0)))
        sol = solve(full, Matrix.column(f, vec))
        if sol is None:
            raise TwError("not a cycle class")
        return [sol.data[b.cols + k][0] for k in range(len(reps))], reps


def tw_hom(x, y):
    return TwHomComplex(x, y)


def hom_compose(f_elem, g_elem, algebra):
    """f ∘ g: matrix product over the algebra (g maps first)."""
    fld = algebra.field
    out = {}
    for (t, u), ef in f_elem.items():
        for (u2, s), eg in g_elem.items():
            if u2 != u:
                continue
            prod = algebra.mul(ef, eg)
            if prod:
                out[(t, s)] = _sp_add(fld, out.get((t, s), {}), prod)
    return {k: v for k, v in out.items() if v}


def hom_add(a_elem, b_elem, algebra):
    f = algebra.field
    out = dict(a_elem)
    for k, v in b_elem.items():
        out[k] = _sp_add(f, out.get(k, {}), v)
    return {k: v for k, v in out.items() if v}


def hom_scale(c, elem, algebra):
    f = algebra.field
    out = {k: _sp_scale(f, c, v) for k, v in elem.items()}
    return {k: v for k, v in out.items() if v}


def realize_hom_element(x, y, elem, p):
    """The strict module map realize(x) → realize(y) of a Hom element."""
    f = x.field
    a = x.algebra
    xp = x.realization_positions()
    yp = y.realization_positions()
    rx = x.realize()
    images = [dict() for _ in range(rx.dim)]
    for (c, b), k in xp.items():
        img = {}
        for (t, s), e in elem.items():
            if s != c:
                continue
            for b2, coef in a.mul(e, {b: f.one}).items():
                key = yp[(t, b2)]
                img[key] = f.add(img.get(key, f.zero), coef)
        images[k] = {kk: v for kk, v in img.items() if not f.is_zero(v)}
    return ModuleMap.from_images(rx, y.realize(), p, images, check=False)


def tw_element_from_map(x, y, mmap):
    """Recover the Hom element of a strict A-linear map realize(x) → realize(y).

    Underlying graded modules are free on the cell generators, so generator
    images determine the element.
    """
    a = x.algebra
    f = x.field
    xp = x.realization_positions()
    yp = y.realization_positions()
    ry_names = {v: k for k, v in yp.items()}
    elem = {}
    for c, (i, _n) in enumerate(x.cells):
        gen = xp[(c, a.idempotents[i])]
        img = mmap.image_of_basis(gen)
        for k, coef in img.items():
            (t, b) = ry_names[k]
            elem.setdefault((t, c), {})
            cur = elem[(t, c)].get(b, f.zero)
            elem[(t, c)][b] = f.add(cur, coef)
    elem = {k: {b: c for b, c in v.items() if not f.is_zero(c)} for k, v in elem.items()}
    return {k: v for k, v in elem.items() if v}


# ---------------------------------------------------------------------------
# cones
# ---------------------------------------------------------------------------

def tw_cone(x, y, f_elem, label=None):
    """Cone of a degree-0 cycle f ∈ Hom(x, y): cells = (x shifted by +1) ⊕ y,
    with δ = [[−δ_x, 0], [f, δ_y]]."""
    hom = TwHomComplex(x, y)
    if not hom.is_cycle(f_elem, 0):
        raise TwError("tw_cone needs a degree-0 cycle")
    fld = x.field
    cells = [(i, n + 1) for (i, n) in x.cells] + list(y.cells)
    delta = {}
    nx = x.ncells
    for (t, s), v in x.delta.items():
        delta[(t, s)] = _sp_scale(fld, fld.neg(fld.one), v)
    for (t, s), v in y.delta.items():
        delta[(nx + t, nx + s)] = dict(v)
    for (t, s), v in f_elem.items():
        delta[(nx + t, s)] = dict(v)
    return TwistedComplex(x.algebra, cells, delta,
                          label=label or ("cone(%s->%s)" % (x.label, y.label)))


# ---------------------------------------------------------------------------
# minimalization (Gaussian elimination)
# ---------------------------------------------------------------------------

class Minimalization:
    """Result of Gaussian elimination on a twisted complex.

    p: Hom^0 cycle original → minimal; i: Hom^0 cycle minimal → original;
    h: Hom^{-1} element on the original with  i∘p − 1 = −D(h)  exactly.
    """

    def __init__(self, original, minimal, p_elem, i_elem, h_elem):
        self.original = original
        self.minimal = minimal
        self.p = p_elem
        self.i = i_elem
        self.h = h_elem

    def verify(self):
        a = self.original.algebra
        f = a.field
        hom_oo = TwHomComplex(self.original, self.original)
        hom_mm = TwHomComplex(self.minimal, self.minimal)
        hom_om = TwHomComplex(self.original, self.minimal)
        hom_mo = TwHomComplex(self.minimal, self.original)
        if not hom_om.is_cycle(self.p, 0) or not hom_mo.is_cycle(self.i, 0):
            return False
        pi = hom_compose(self.p, self.i, a)
        if hom_add(pi, hom_scale(f.neg(f.one), hom_mm.identity(), a), a):
            return False  # p∘i must be the identity on the nose
        ip = hom_compose(self.i, self.p, a)
        lhs = hom_add(ip, hom_scale(f.neg(f.one), hom_oo.identity(), a), a)
        dh = hom_oo.differential_of(self.h, -1)
        return not hom_add(lhs, dh, a)


def _invert_entry(a, elem, i_s, i_t):
    """b with b·a = e_{i_s} and a·b = e_{i_t}, or None.

    b ranges over degree-0 elements of e_{i_s} A e_{i_t}.
    """
    f = a.field
    cand = [k for k in range(a.dim)
            if a.degrees[k] == 0 and a.src[k] == i_t and a.tgt[k] == i_s]
    if not cand:
        return None
    e_s = {a.idempotents[i_s]: f.one}
    e_t = {a.idempotents[i_t]: f.one}
    rows = []
    rhs = []
    keys = sorted({k for k in range(a.dim)})
    for target, left in ((e_s, True), (e_t, False)):
        coeffs = {}
        for ci, c in enumerate(cand):
            prod = a.mul({c: f.one}, elem) if left else a.mul(elem, {c: f.one})
            for b, v in prod.items():
                coeffs.setdefault(b, [f.zero] * len(cand))
                coeffs[b][ci] = f.add(coeffs[b][ci], v)
        support = set(coeffs) | set(target)
        for b in sorted(support):
            rows.append(coeffs.get(b, [f.zero] * len(cand)))
            rhs.append(target.get(b, f.zero))
    _ = keys
    m = Matrix(f, len(rows), len(cand), rows)
    sol = solve(m, Matrix.column(f, rhs))
    if sol is None:
        return None
    b_elem = {cand[k]: sol.data[k][0] for k in range(len(cand))
              if not f.is_zero(sol.data[k][0])}
    # both-sided check (solve stacked both, so this is a sanity assert)
    if a.mul(b_elem, elem) != e_s or a.mul(elem, b_elem) != e_t:
        return None
    return b_elem


def _find_pivot(tc, order):
    """First eliminable entry: degree-0 component with a two-sided inverse."""
    pairs = sorted(tc.delta, key=(lambda k: (k[1], k[0])))
    if order == "revlex":
        pairs = list(reversed(pairs))
    for (t, s) in pairs:
        if t == s:
            continue
        it, nt = tc.cells[t]
        isrc, ns = tc.cells[s]
        if 1 - ns + nt != 0:
            continue
        b = _invert_entry(tc.algebra, tc.delta[(t, s)], isrc, it)
        if b is not None:
            return (t, s, b)
    return None


def _eliminate_once(tc, t0, s0, binv):
    """One Gaussian elimination step; returns (new tc, p, i, h) for the step."""
    a = tc.algebra
    f = a.field
    survivors = [c for c in range(tc.ncells) if c not in (t0, s0)]
    newpos = {c: k for k, c in enumerate(survivors)}
    cells = [tc.cells[c] for c in survivors]
    delta = {}
    for (t, s), v in tc.delta.items():
        if t in (t0, s0) or s in (t0, s0):
            continue
        delta[(newpos[t], newpos[s])] = dict(v)
    for t in survivors:
        left = tc.delta.get((t, s0))
        for s in survivors:
            right = tc.delta.get((t0, s))
            if left and right:
                corr = a.mul(a.mul(left, binv), right)
                if corr:
                    key = (newpos[t], newpos[s])
                    cur = delta.get(key, {})
                    delta[key] = _sp_add(f, cur, _sp_scale(f, f.neg(f.one), corr))
    delta = {k: v for k, v in delta.items() if v}
    small = TwistedComplex(a, cells, delta, label=tc.label + "'", check=False)
    # projection p: survivors identically, eliminated t0-cell routed via −δ(·,s0)·b
    p_elem = {}
    i_elem = {}
    for c in survivors:
        ic = tc.cells[c][0]
        ident = {a.idempotents[ic]: f.one}
        p_elem[(newpos[c], c)] = dict(ident)
        i_elem[(c, newpos[c])] = dict(ident)
    for c in survivors:
        left = tc.delta.get((c, s0))
        if left:
            v = _sp_scale(f, f.neg(f.one), a.mul(left, binv))
            if v:
                p_elem[(newpos[c], t0)] = v
        right = tc.delta.get((t0, c))
        if right:
            v = _sp_scale(f, f.neg(f.one), a.mul(binv, right))
            if v:
                i_elem[(s0, newpos[c])] = v
    h_elem = {(s0, t0): dict(binv)}
    return small, p_elem, i_elem, h_elem


def minimalize(tc, order="lex"):
    """Eliminate invertible degree-0 entries until none remain.

    Returns a Minimalization whose certificates are verified: p∘i = 1 exactly
    and i∘p − 1 = −D(h) exactly.
    """
    a = tc.algebra
    f = a.field
    current = tc
    p_total = TwHomComplex(tc, tc).identity()
    i_total = TwHomComplex(tc, tc).identity()
    h_total = {}
    while True:
        piv = _find_pivot(current, order)
        if piv is None:
            break
        t0, s0, binv = piv
        small, p_step, i_step, h_step = _eliminate_once(current, t0, s0, binv)
        # h_total += i_total ∘ h_step ∘ p_total ; p_total = p_step∘p_total etc.
        conj = hom_compose(i_total, hom_compose(h_step, p_total, a), a)
        h_total = hom_add(h_total, conj, a)
        p_total = hom_compose(p_step, p_total, a)
        i_total = hom_compose(i_total, i_step, a)
        current = small
    current.validate()
    result = Minimalization(tc, current, p_total, i_total, h_total)
    if not result.verify():
        raise TwError("internal error: minimalization certificates failed")
    return result


def is_minimal(tc):
    return _find_pivot(tc, "lex") is None


# ---------------------------------------------------------------------------
# Hom into a module
# ---------------------------------------------------------------------------

class ModHomComplex:
    """Strict Hom complex from a twisted complex into a module.

    Degree-p component basis: pairs (cell s, module basis j) with
    deg_m(j) = p − n_s and idem(j) = i_s; the differential is
    D(v)_s = d(v_s) − (−1)^p Σ_u v_u·δ_{us}.  H^p = Hom(x, Σ^p m).
    """

    def __init__(self, x, m):
        if x.algebra is not m.algebra:
            raise TwError("Hom across algebras")
        self.x = x
        self.m = m
        self.field = x.field
        self._basis = {}
        self._dmat = {}
        degs = set()
        for s, (i, n) in enumerate(x.cells):
            for j in range(m.dim):
                if m.idems[j] == i:
                    degs.add(m.degrees[j] + n)
        self.support = sorted(degs)

    def basis(self, p):
        if p not in self._basis:
            out = []
            for s, (i, n) in enumerate(self.x.cells):
                for j in range(self.m.dim):
                    if self.m.idems[j] == i and self.m.degrees[j] == p - n:
                        out.append((s, j))
            self._basis[p] = out
        return self._basis[p]

    def dim(self, p):
        return len(self.basis(p))

    def differential_of(self, vecs, p):
        """vecs: dict s -> sparse module element of degree p − n_s."""
        f = self.field
        m = self.m
        a = self.x.algebra
        out = {}
        psgn = f.one if p % 2 == 0 else f.neg(f.one)
        for s, v in vecs.items():
            dv = m.d(v)
            if dv:
                out[s] = _sp_add(f, out.get(s, {}), dv)
        for (u, s), delx in self.x.delta.items():
            vu = vecs.get(u)
            if not vu:
                continue
            term = m.act(vu, delx)
            if term:
                out[s] = _sp_add(f, out.get(s, {}),
                                 _sp_scale(f, f.neg(psgn), term))
        _ = a
        return {k: v for k, v in out.items() if v}

    def d_matrix(self, p):
        if p not in self._dmat:
            f = self.field
            src = self.basis(p)
            tgt = self.basis(p + 1)
            pos = {k: i for i, k in enumerate(tgt)}
            mat = Matrix.zeros(f, len(tgt), len(src))
            for col, (s, j) in enumerate(src):
                img = self.differential_of({s: {j: f.one}}, p)
                for s2, e in img.items():
                    for j2, c in e.items():
                        mat.data[pos[(s2, j2)]][col] = c
            self._dmat[p] = mat
        return self._dmat[p]

    def homology_dim(self, p):
        z = kernel_basis(self.d_matrix(p))
        return z.cols - rank(self.d_matrix(p - 1))

    def homology_table(self):
        out = {}
        lo = min(self.support, default=0) - 1
        hi = max(self.support, default=0) + 1
        for p in range(lo, hi + 1):
            h = self.homology_dim(p)
            if h:
                out[p] = h
        return out

    def homology_dim_at_idem(self, p, i):
        """Split H^p by the cell idempotent (the k^r-grading of the value)."""
        f = self.field
        src = [k for k, (s, _j) in enumerate(self.basis(p))
               if self.x.cells[s][0] == i]
        # D preserves the cell-idempotent grading (entries of δ stay in blocks)
        full_src = self.basis(p)
        dm = self.d_matrix(p)
        bm = self.d_matrix(p - 1)
        tgt = [k for k, (s, _j) in enumerate(self.basis(p + 1))
               if self.x.cells[s][0] == i]
        prev = [k for k, (s, _j) in enumerate(self.basis(p - 1))
               if self.x.cells[s][0] == i]
        sub_d = Matrix(f, len(tgt), len(src),
                       [[dm.data[r][c] for c in src] for r in tgt])
        sub_b = Matrix(f, len(src), len(prev),
                       [[bm.data[r][c] for c in prev] for r in src])
        _ = full_src
        return kernel_basis(sub_d).cols - rank(sub_b)

    def is_cycle(self, vecs, p):
        return not self.differential_of(vecs, p)

    def realize_element(self, vecs, p):
        """The strict module map realize(x) → m of a Hom element."""
        f = self.field
        rx = self.x.realize()
        xp = self.x.realization_positions()
        a = self.x.algebra
        images = [dict() for _ in range(rx.dim)]
        for (c, b), k in xp.items():
            v = vecs.get(c)
            if not v:
                continue
            images[k] = self.m.act(v, {b: f.one})
        return ModuleMap.from_images(rx, self.m, p, images, check=False)

    def class_representatives(self, p):
        f = self.field
        z = kernel_basis(self.d_matrix(p))
        b = self.d_matrix(p - 1)
        combined = b.hstack(z)
        _, pivots, _ = rref(combined)
        reps = []
        basis = self.basis(p)
        for cpos in pivots:
            if cpos < b.cols:
                continue
            col = z.col(cpos - b.cols)
            vecs = {}
            for coef, (s, j) in zip(col, basis):
                if f.is_zero(coef):
                    continue
                vecs.setdefault(s, {})
                cur = vecs[s].get(j, f.zero)
                vecs[s][j] = f.add(cur, coef)
            reps.append(vecs)
        return reps


def hom_module(x, m):
    return ModHomComplex(x, m)


# ---------------------------------------------------------------------------
# resolution of modules by twisted complexes
# ---------------------------------------------------------------------------

class ResolveReport:
    def __init__(self, acyclic, budget_exhausted, cone_window, hiso_below):
        self.acyclic = acyclic
        self.budget_exhausted = budget_exhausted
        self.cone_window = cone_window          # (lo, hi) of surviving cone homology
        self.hiso_below = hiso_below            # map is an H-iso in degrees < this

    @property
    def fiber_window(self):
        if self.cone_window is None:
            return None
        lo, hi = self.cone_window
        return (lo + 1, hi + 1)

    def to_json(self):
        return {"acyclic": self.acyclic, "budget_exhausted": self.budget_exhausted,
                "cone_window": self.cone_window, "fiber_window": self.fiber_window,
                "hiso_below": self.hiso_below}


class Resolution:
    def __init__(self, tc, pi_vecs, report):
        self.tc = tc
        self.pi_vecs = pi_vecs  # dict cell -> sparse element of the module
        self.report = report

    def pi_map(self, m):
        return ModHomComplex(self.tc, m).realize_element(self.pi_vecs, 0)


def resolve(m, cell_budget):
    """Approximate m by a twisted complex, cell by cell from the bottom.

    Each stage covers the minimal-degree surviving homology of the mapping
    cone; stops when the cone is acyclic (m certified perfect, the map is a
    quasi-isomorphism) or when the next cover would exceed the budget.
    """
    if cell_budget < 1:
        raise TwError("cell budget must be >= 1")
    a = m.algebra
    a.require_class_p()
    f = a.field
    tc = TwistedComplex(a, [], {}, label="P(%s)" % m.label)
    pi = {}
    while True:
        pim = ModHomComplex(tc, m).realize_element(pi, 0) if tc.ncells else \
            ModuleMap.zero(tc.realize(), m, 0)
        C, _, _ = cone(pim)
        hC = homology(C)
        if hC.is_zero():
            report = ResolveReport(True, False, None, None)
            return Resolution(tc, pi, report)
        q = hC.min_degree()
        # class representatives of H^q(C) per idempotent
        new_cells = []
        attach = []
        for i in range(a.r):
            for rep in _homology_class_reps(C, q, i):
                new_cells.append((i, -q))
                attach.append(rep)
        if tc.ncells + len(new_cells) > cell_budget:
            hi = hC.max_degree()
            report = ResolveReport(False, True, (q, hi), q)
            return Resolution(tc, pi, report)
        # split each representative (p-part, mu-part) along C = ΣP ⊕ m
        rp = tc.realize()
        nx = rp.dim
        old_n = tc.ncells
        cells = list(tc.cells) + new_cells
        delta = {k: dict(v) for k, v in tc.delta.items()}
        xp = tc.realization_positions()
        back = {v: k for k, v in xp.items()}
        new_pi = dict(pi)
        for knew, rep in enumerate(attach):
            cnew = old_n + knew
            # p-part: coordinates 0..nx−1 of the cone are Σ(realize tc)
            by_cell = {}
            for k in range(nx):
                coef = rep[k]
                if f.is_zero(coef):
                    continue
                (c, b) = back[k]
                by_cell.setdefault(c, {})
                cur = by_cell[c].get(b, f.zero)
                by_cell[c][b] = f.add(cur, coef)
            for c, elem in by_cell.items():
                elem = {b: v for b, v in elem.items() if not f.is_zero(v)}
                if elem:
                    delta[(c, cnew)] = elem
            mu = {j - nx: rep[nx + (j - nx)] for j in range(nx, len(rep))
                  if not f.is_zero(rep[j])}
            if mu:
                new_pi[cnew] = _sp_scale(f, f.neg(f.one), mu)
        tc = TwistedComplex(a, cells, delta, label=tc.label)
        pi = new_pi
        hom = ModHomComplex(tc, m)
        if not hom.is_cycle(pi, 0):
            raise TwError("internal error: corrected map is not a cycle")
