"""The canonical weight structure on finite-dimensional modules.

Membership is read off homology support.  Truncation is the refined brutal
truncation: σ_{>p}x is spanned by everything above degree p together with an
idempotent-homogeneous complement C of the degree-p cocycles; this is a
strict dg submodule because the algebra is normalized positive, and the
resulting triangle carries the full homology-isomorphism certificates on
both sides.  Complements are RREF-chosen, so truncations of direct sums and
shifts agree blockwise on the nose.
"""

from .dgcore import (
    DgError, DgModule, ModuleMap, NotClassP, direct_sum, homology,
    induced_iso_degrees, is_quasi_iso, quotient_by_indices, shift,
    submodule_on_indices,
)
from .scalars import Matrix, intersect_and_complement, kernel_basis
from .twisted import hom_module, resolve

W_LE = "w_le_p"
W_GT = "w_gt_p"
NEITHER = "neither"


def simple_module(a, label=None):
    """S_A = A / A^{>=1}: one basis vector per idempotent, zero differential."""
    a.require_class_p()
    names = ["s%d" % i for i in range(a.r)]
    return DgModule(a, names, [0] * a.r, list(range(a.r)), {}, {},
                    label=label or ("S_" + a.label))


def simple_summand(a, i, label=None):
    """e_i S_A: the simple lift attached to the i-th idempotent."""
    a.require_class_p()
    return DgModule(a, ["s%d" % i], [0], [i], {}, {},
                    label=label or ("S%d_%s" % (i, a.label)))


def w_membership(x, p):
    """Classify by homology support; the zero module counts as w_le_p."""
    x.algebra.require_class_p()
    h = homology(x)
    if h.is_zero():
        return W_LE
    if h.max_degree() <= p:
        return W_LE
    if h.min_degree() > p:
        return W_GT
    return NEITHER


def complement_indices(x, p):
    """Basis indices forming a complement of ker d^p in x^p, block by block."""
    out = []
    for i in range(x.algebra.r):
        idx = x.block_indices().get((p, i), [])
        if not idx:
            continue
        k = kernel_basis(x.d_block(p, i))
        comp = intersect_and_complement(k, len(idx))
        f = x.field
        for j in range(comp.cols):
            col = comp.col(j)
            local = next(t for t, c in enumerate(col) if not f.is_zero(c))
            out.append(idx[local])
    return sorted(out)


class TruncationResult:
    """The truncation triangle σ_{>p}x → x → σ_{≤p}x with its certificates."""

    def __init__(self, x, level, sigma_gt, sigma_le, inclusion, projection):
        self.x = x
        self.level = level
        self.sigma_gt = sigma_gt
        self.sigma_le = sigma_le
        self.inclusion = inclusion
        self.projection = projection
        self.h_x = homology(x)
        self.h_gt = homology(sigma_gt)
        self.h_le = homology(sigma_le)
        self.membership_gt = (self.h_gt.is_zero() or self.h_gt.min_degree() > level)
        self.membership_le = (self.h_le.is_zero() or self.h_le.max_degree() <= level)
        self.iso_incl = self._iso_flags(inclusion, above=True)
        self.iso_proj = self._iso_flags(projection, above=False)

    def _iso_flags(self, f0, above):
        iso, _, _ = induced_iso_degrees(f0)
        flags = {}
        for (q, i), ok in iso.items():
            if above and q > self.level:
                flags[(q, i)] = ok
            if not above and q + f0.degree <= self.level:
                # projection: source degree q maps to H^q(sigma_le)
                flags[(q, i)] = ok
        return flags

    @property
    def verified(self):
        return (self.membership_gt and self.membership_le
                and all(self.iso_incl.values()) and all(self.iso_proj.values()))

    def certificates(self):
        return {
            "level": self.level,
            "membership_gt": self.membership_gt,
            "membership_le": self.membership_le,
            "h_x": self.h_x.to_json(),
            "h_gt": self.h_gt.to_json(),
            "h_le": self.h_le.to_json(),
            "iso_above_level": all(self.iso_incl.values()),
            "iso_at_or_below_level": all(self.iso_proj.values()),
        }


def weight_truncate(x, p, check=True):
    """σ_{>p}x = (complement of ker d^p) ⊕ x^{>p}; σ_{≤p}x the quotient."""
    x.algebra.require_class_p()
    gt_idx = [i for i in range(x.dim) if x.degrees[i] > p]
    gt_idx += complement_indices(x, p)
    gt_idx = sorted(gt_idx)
    sigma_gt, incl = submodule_on_indices(x, gt_idx, label="w>%d(%s)" % (p, x.label))
    sigma_le, proj = quotient_by_indices(x, gt_idx, label="w<=%d(%s)" % (p, x.label))
    res = TruncationResult(x, p, sigma_gt, sigma_le, incl, proj)
    if check and not res.verified:
        raise DgError("internal error: truncation certificates failed")
    return res


class WeightFiltration:
    """Nested refined-brutal truncations with one complement choice per degree.

    W_q = σ_{>q}x; the layer W_q/W_{q+1} has homology concentrated in degree
    q+1 with multiplicities m_{i,q+1} = dim H^{q+1}(x)e_i.
    """

    def __init__(self, x, levels, index_sets, layers):
        self.x = x
        self.levels = levels          # descending: W_top = 0 ... W_bot = x
        self.index_sets = index_sets  # q -> sorted indices spanning W_q
        self.layers = layers          # list of (degree q+1, layer module, mults)

    def multiplicities(self):
        return {(deg, i): m for (deg, _mod, mults) in self.layers
                for i, m in mults.items()}

    def total_layer_homology(self):
        out = None
        for (_deg, mod, _mults) in self.layers:
            h = homology(mod)
            out = h if out is None else out.add(h)
        from .dgcore import HomologyTable
        return out if out is not None else HomologyTable(self.x.algebra.r, {})

    def verified(self):
        hx = homology(self.x)
        if self.total_layer_homology() != hx:
            return False
        for (deg, mod, mults) in self.layers:
            h = homology(mod)
            if h.support() not in ([], [deg]):
                return False
            for i in range(self.x.algebra.r):
                if h.dim(deg, i) != mults.get(i, 0) or hx.dim(deg, i) != mults.get(i, 0):
                    return False
        return True


def weight_filtration(x):
    x.algebra.require_class_p()
    degs = x.degree_support()
    if not degs:
        return WeightFiltration(x, [], {}, [])
    lo, hi = min(degs), max(degs)
    comp = {q: complement_indices(x, q) for q in range(lo, hi + 1)}
    index_sets = {}
    levels = list(range(lo - 1, hi + 1))
    for q in levels:
        idx = [i for i in range(x.dim) if x.degrees[i] > q] + [c for c in comp.get(q, [])]
        index_sets[q] = sorted(idx)
    layers = []
    hx = homology(x)
    for q in levels:
        upper = set(index_sets.get(q + 1, []))
        if not (upper <= set(index_sets[q])):
            raise DgError("internal error: filtration not nested")
        sub, _ = submodule_on_indices(x, index_sets[q]) if index_sets[q] else (None, None)
        if sub is None or sub.dim == len(upper):
            # empty layer
            if any(hx.dim(q + 1, i) for i in range(x.algebra.r)):
                raise DgError("internal error: missing filtration layer")
            continue
        local_upper = [k for k, g in enumerate(sorted(index_sets[q])) if g in upper]
        layer, _ = quotient_by_indices(sub, local_upper,
                                       label="gr%d(%s)" % (q + 1, x.label))
        mults = {i: hx.dim(q + 1, i) for i in range(x.algebra.r) if hx.dim(q + 1, i)}
        layers.append((q + 1, layer, mults))
    filt = WeightFiltration(x, levels, index_sets, layers)
    if not filt.verified():
        raise DgError("internal error: filtration certificates failed")
    return filt


class SimpleWitness:
    """Zigzag x → σ_{≤0}x ← ⊕_i (e_iS_A)^{m_i} of certified quasi-isomorphisms."""

    def __init__(self, x, truncation, projection, standard, comparison, mults):
        self.x = x
        self.truncation = truncation
        self.projection = projection    # x → σ_{≤0}x
        self.standard = standard        # ⊕ (e_iS_A)^{m_i}
        self.comparison = comparison    # standard → σ_{≤0}x
        self.multiplicities = mults

    def verified(self):
        return is_quasi_iso(self.projection) and is_quasi_iso(self.comparison)


def simple_witness(x):
    """Constructive uniqueness of simple lifts for H(x) concentrated in degree 0."""
    a = x.algebra
    a.require_class_p()
    h = homology(x)
    if h.support() not in ([], [0]):
        raise DgError("homology of %s is not concentrated in degree 0" % x.label)
    t = weight_truncate(x, 0)
    y = t.sigma_le
    f = a.field
    mults = {i: h.dim(0, i) for i in range(a.r)}
    summands = []
    reps = []
    from .twisted import _homology_class_reps
    for i in range(a.r):
        rs = _homology_class_reps(y, 0, i)
        if len(rs) != mults[i]:
            raise DgError("internal error: representative count mismatch")
        for _m in range(mults[i]):
            summands.append(simple_summand(a, i))
        reps.extend(rs)
    if not summands:
        std = DgModule(a, [], [], [], {}, {}, label="0")
        comparison = ModuleMap.zero(std, y, 0)
    else:
        std, _incls, _ = direct_sum(summands, label="std(%s)" % x.label)
        images = []
        for k in range(std.dim):
            images.append(y.sparse(reps[k]))
        comparison = ModuleMap.from_images(std, y, 0, images, check=True)
    w = SimpleWitness(x, t, t.projection, std, comparison, mults)
    if not w.verified():
        raise DgError("internal error: simple witness failed certification")
    return w


# ---------------------------------------------------------------------------
# windowed derived Homs
# ---------------------------------------------------------------------------

class DhomEntry:
    def __init__(self, n, dim, verified, reason):
        self.n = n
        self.dim = dim
        self.verified = verified
        self.reason = reason

    def to_json(self):
        return {"n": self.n, "dim": self.dim, "verified": self.verified,
                "reason": self.reason}


class DhomReport:
    def __init__(self, entries, resolution, ceiling):
        self.entries = entries
        self.resolution = resolution
        self.ceiling = ceiling

    def entry(self, n):
        for e in self.entries:
            if e.n == n:
                return e
        raise KeyError(n)

    def to_json(self):
        return {"entries": [e.to_json() for e in self.entries],
                "ceiling": self.ceiling,
                "resolution": self.resolution.report.to_json()}


def derived_hom_windowed(m, y, n0, n1, budget):
    """Hom(m, Σ^n y) for n in [n0, n1], with an honest verified range.

    A degree is VERIFIED when either the resolution fiber is acyclic, or the
    orthogonality criterion holds (the surviving cone homology and its shift
    sit strictly above a weight at or above all of Σ^n y's homology), or n
    lies above the a-priori ceiling top H(y) − bottom H(m) (in which case the
    derived Hom vanishes outright).  Dimensions outside the verified range
    are reported as computed at this budget, never as exact.
    """
    if n0 > n1:
        raise DgError("empty range")
    a = m.algebra
    a.require_class_p()
    hm, hy = homology(m), homology(y)
    res = resolve(m, budget)
    hom = hom_module(res.tc, y)
    ceiling = None
    if hm.is_zero() or hy.is_zero():
        ceiling = None  # everything vanishes; handled below
    else:
        ceiling = hy.max_degree() - hm.min_degree()
    entries = []
    for n in range(n0, n1 + 1):
        dim = hom.homology_dim(n)
        verified = False
        reason = None
        if hm.is_zero() or hy.is_zero():
            verified = True
            reason = "zero-object"
            if dim and hm.is_zero():
                raise DgError("internal error: Hom out of an acyclic perfect object")
        elif res.report.acyclic:
            verified = True
            reason = "resolution-exact"
        else:
            qlo = res.report.cone_window[0]
            if n >= hy.max_degree() - qlo + 1:
                verified = True
                reason = "fiber-orthogonality"
            elif n > ceiling:
                verified = True
                reason = "a-priori-ceiling"
                dim = 0
        entries.append(DhomEntry(n, dim, verified, reason))
    return DhomReport(entries, res, ceiling)
