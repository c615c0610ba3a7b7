"""Truncated minimal projective resolutions and chain-map lifting.

Resolutions of the trivial module over rank-s truncated polynomial algebras
are assembled as tensor products of the periodic rank-1 resolution, with
the standard sign d(x(x)y) = dx(x)y + (-1)^{|x|} x(x)dy.  Free terms are laid
out as blocks of algebra coordinates: basis position = copy * dim + monomial,
so generator columns sit at multiples of the algebra dimension.

Lifts are solved degreewise with the deterministic least-pivot solver: the
one free generator image per copy pins the whole map by linearity over the
algebra.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import exactla as la
from .algebra import (
    ElemAbelianAlgebra,
    FlatMap,
    augmentation_row,
    complement_flat,
    element_matrix,
    gen_matrix,
    linear_element,
    monomial_matrix,
    substitution_matrix,
)
from . import rep


@dataclass
class TruncatedResolution:
    algebra: ElemAbelianAlgebra
    N: int
    ranks: list[int]
    boundaries: list  # [0] unused; [i] = matrix of d_i : P_i -> P_{i-1}
    aug: np.ndarray   # target coords x dim(P_0); 1 x dim for the trivial module
    pair: "TensorPair | None" = None
    _emb_cache: dict = field(default_factory=dict, repr=False)

    @property
    def p(self) -> int:
        return self.algebra.p

    def term_dim(self, i: int) -> int:
        return self.ranks[i] * self.algebra.dim

    def gen_cols(self, i: int) -> list[int]:
        d = self.algebra.dim
        return [g * d for g in range(self.ranks[i])]

    def socle_cols(self, i: int) -> list[int]:
        d = self.algebra.dim
        return [g * d + (d - 1) for g in range(self.ranks[i])]

    def term_monomial_action(self, i: int, mono_idx: int) -> np.ndarray:
        m = monomial_matrix(self.p, self.algebra.r, mono_idx)
        return np.kron(la.eye(self.ranks[i]), m).astype(np.int64)

    def term_module(self, i: int) -> rep.FDModule:
        return rep.free_module(self.algebra, self.ranks[i])


@dataclass
class TensorPair:
    left: TruncatedResolution
    right: TruncatedResolution


@dataclass
class ChainMap:
    res: TruncatedResolution
    shift: int
    components: dict  # degree i -> matrix P_i -> P_{i+shift}


def cyclic_resolution(p: int, N: int) -> TruncatedResolution:
    """Minimal resolution of k over k[t]/(t^p): boundaries alternate t, t^{p-1}."""
    alg = ElemAbelianAlgebra(p, 1)
    t = gen_matrix(p, 1, 0)
    t_top = la.matpow(t, p - 1, p)
    boundaries: list = [None]
    for i in range(1, N + 1):
        boundaries.append(t.copy() if i % 2 == 1 else t_top.copy())
    return TruncatedResolution(alg, N, [1] * (N + 1), boundaries,
                               augmentation_row(alg))


def _block_offsets(left: TruncatedResolution, right: TruncatedResolution, n: int):
    """Generator offsets of the (i, n-i) blocks inside degree n."""
    out = []
    off = 0
    for i in range(n + 1):
        j = n - i
        if i <= left.N and j <= right.N:
            out.append((i, j, off))
            off += left.ranks[i] * right.ranks[j]
    return out, off


def _embedding(left, right, n, i, j, goff):
    """Column indices embedding the kron basis of L_i (x) R_j into degree n."""
    dl, dr = left.algebra.dim, right.algebra.dim
    rl, rr = left.ranks[i], right.ranks[j]
    a = np.arange(rl * dl)
    b = np.arange(rr * dr)
    g_l, mu_l = np.divmod(a, dl)
    g_r, mu_r = np.divmod(b, dr)
    gen = (goff + g_l[:, None] * rr + g_r[None, :])
    mono = mu_l[:, None] + dl * mu_r[None, :]
    return (gen * (dl * dr) + mono).reshape(-1)


def tensor_pair(left: TruncatedResolution, right: TruncatedResolution
                ) -> TruncatedResolution:
    if left.p != right.p:
        raise ValueError("factors must share the prime")
    p = left.p
    N = min(left.N, right.N)
    alg = ElemAbelianAlgebra(p, left.algebra.r + right.algebra.r)
    ranks = []
    embeddings = {}
    for n in range(N + 1):
        blocks, total = _block_offsets(left, right, n)
        ranks.append(total)
        for (i, j, goff) in blocks:
            embeddings[(n, i, j)] = _embedding(left, right, n, i, j, goff)
    boundaries: list = [None]
    for n in range(1, N + 1):
        out = la.zeros(ranks[n - 1] * alg.dim, ranks[n] * alg.dim)
        for (i, j, _) in _block_offsets(left, right, n)[0]:
            src = embeddings[(n, i, j)]
            if i >= 1:
                tgt = embeddings[(n - 1, i - 1, j)]
                block = np.kron(left.boundaries[i],
                                la.eye(right.ranks[j] * right.algebra.dim))
                out[np.ix_(tgt, src)] = (out[np.ix_(tgt, src)] + block) % p
            if j >= 1:
                tgt = embeddings[(n - 1, i, j - 1)]
                sign = 1 if i % 2 == 0 else p - 1
                block = sign * np.kron(la.eye(left.ranks[i] * left.algebra.dim),
                                       right.boundaries[j])
                out[np.ix_(tgt, src)] = (out[np.ix_(tgt, src)] + block) % p
        boundaries.append(out)
    aug = la.zeros(1, ranks[0] * alg.dim)
    aug[0, embeddings[(0, 0, 0)]] = np.kron(left.aug, right.aug)[0]
    res = TruncatedResolution(alg, N, ranks, boundaries, aug,
                              pair=TensorPair(left, right))
    res._emb_cache = embeddings
    return res


def tensor_resolution(factors: list[TruncatedResolution]) -> TruncatedResolution:
    """Right-associated fold, so the first factor stays visible as pair.left."""
    if not factors:
        raise ValueError("need at least one factor")
    if len(factors) == 1:
        return factors[0]
    return tensor_pair(factors[0], tensor_resolution(factors[1:]))


def trivial_resolution(p: int, s: int, N: int) -> TruncatedResolution:
    """Minimal resolution of k over the rank-s algebra as an s-fold tensor."""
    if s < 1:
        raise ValueError("rank must be at least 1")
    return tensor_resolution([cyclic_resolution(p, N) for _ in range(s)])


def validate_resolution(res: TruncatedResolution, target: rep.FDModule | None = None
                        ) -> None:
    """Exact structural checks: d.d = 0, aug.d_1 = 0, inner exactness,
    minimality, and boundary vanishing on term socles."""
    p = res.p
    for i in range(2, res.N + 1):
        prod = la.matmul(res.boundaries[i - 1], res.boundaries[i], p)
        assert not prod.any(), f"d.d != 0 at degree {i}"
    if res.N >= 1:
        assert not la.matmul(res.aug, res.boundaries[1], p).any(), "aug.d1 != 0"
    for i in range(1, res.N):
        ker = res.term_dim(i) - la.rank(res.boundaries[i], p)
        assert ker == la.rank(res.boundaries[i + 1], p), f"not exact at {i}"
    if res.N >= 1:
        ker0 = res.term_dim(0) - la.rank(res.aug, p)
        assert ker0 == la.rank(res.boundaries[1], p), "not exact at 0"
    d = res.algebra.dim
    for i in range(1, res.N + 1):
        b = res.boundaries[i]
        for g in range(res.ranks[i - 1]):
            assert not b[g * d].any(), f"boundary {i} not into the radical"
        for c in res.socle_cols(i):
            assert not b[:, c].any(), f"boundary {i} nonzero on a socle column"


def extend_free(res: TruncatedResolution, src_deg: int, tgt_dim: int,
                gen_images: np.ndarray,
                tgt_mono_action=None) -> np.ndarray:
    """Extend generator images of a map out of P_{src_deg} by linearity.

    tgt_mono_action(mono_idx) gives the monomial action on the target;
    defaults to the free-term action when the target is a resolution term.
    """
    d = res.algebra.dim
    out = la.zeros(tgt_dim, res.term_dim(src_deg))
    for idx in range(d):
        act = tgt_mono_action(idx)
        img = la.matmul(act, gen_images, res.p)
        for g in range(res.ranks[src_deg]):
            out[:, g * d + idx] = img[:, g]
    return out


def _extend_to_term(res, src_deg, tgt_deg, gen_images):
    return extend_free(res, src_deg, res.term_dim(tgt_deg), gen_images,
                       tgt_mono_action=lambda idx: res.term_monomial_action(tgt_deg, idx))


def lift_cocycle_down(res: TruncatedResolution, zrow: np.ndarray, d: int,
                      rng=None) -> ChainMap:
    """Chain self-maps hat-z_m : P_{d+m} -> P_m lifting a degree-d cocycle.

    zrow is the 1 x dim(P_d) matrix of a cocycle P_d -> k (zero off the
    generator columns); the bottom square is aug . hat-z_0 = zrow.
    """
    p = res.p
    comps = {}
    rhs0 = zrow[:, res.gen_cols(d)]
    sol = la.solve(res.aug, rhs0, p, rng=rng)
    if sol is None:
        raise ValueError("cocycle lift unsolvable at the augmentation")
    comps[0] = _extend_to_term(res, d, 0, sol)
    for m in range(1, res.N - d + 1):
        rhs = la.matmul(comps[m - 1], res.boundaries[d + m], p)[:, res.gen_cols(d + m)]
        sol = la.solve(res.boundaries[m], rhs, p, rng=rng)
        if sol is None:
            raise ValueError(f"cocycle lift unsolvable at degree {m}")
        comps[m] = _extend_to_term(res, d + m, m, sol)
    return ChainMap(res, -d, comps)


def hom_functor_matrix(res: TruncatedResolution, map_matrix: np.ndarray,
                       src_deg: int, tgt_deg: int, coeffs: "rep.FDModule"
                       ) -> np.ndarray:
    """Matrix of (phi -> phi . map) on generator-value coordinates.

    Maps Hom(P_tgt, L) = L^{ranks[tgt]} to Hom(P_src, L) = L^{ranks[src]}
    for a module map P_src -> P_tgt given by map_matrix.
    """
    d = res.algebra.dim
    n_l = coeffs.dim
    out = la.zeros(res.ranks[src_deg] * n_l, res.ranks[tgt_deg] * n_l)
    for g in range(res.ranks[src_deg]):
        for l in range(res.ranks[tgt_deg]):
            vec = map_matrix[l * d:(l + 1) * d, g * d]
            if vec.any():
                out[g * n_l:(g + 1) * n_l, l * n_l:(l + 1) * n_l] = \
                    rep.act_element(coeffs, vec)
    return out


def _assert_in_term_socle(res: TruncatedResolution, i: int, u: np.ndarray) -> None:
    term = res.term_module(i)
    for a in term.actions:
        assert not la.matmul(a, u.reshape(-1, 1), res.p).any(), \
            "element does not generate a trivial submodule"


def lift_cocycle(res: TruncatedResolution, u: np.ndarray, n: int,
                 rng=None) -> ChainMap:
    """Chain map of shift n lifting the socle element u of P_n.

    Component 0 sends a generator of the trivial quotient of P_0 onto u;
    the rest solve d . theta_i = theta_{i-1} . d over the free terms.
    """
    p = res.p
    assert 0 <= n <= res.N
    assert u.shape == (res.term_dim(n),)
    _assert_in_term_socle(res, n, u)
    comps = {0: la.matmul(u.reshape(-1, 1), res.aug, p)}
    prev = comps[0]
    for i in range(1, res.N - n + 1):
        rhs_full = la.matmul(prev, res.boundaries[i], p)
        gens = res.gen_cols(i)
        rhs = rhs_full[:, gens]
        sol = la.solve(res.boundaries[n + i], rhs, p, rng=rng)
        if sol is None:
            raise ValueError(f"chain lift unsolvable at degree {i}: "
                             "resolution data corrupted")
        comps[i] = _extend_to_term(res, i, n + i, sol)
        prev = comps[i]
    return ChainMap(res, n, comps)


def lift_cocycle_augmented(res: TruncatedResolution, u: np.ndarray, n: int,
                           rng=None) -> ChainMap:
    """Chain map of shift n+1 lifting u through the augmented complex:
    d_{n+1} g_0 = u . aug and d g_m = g_{m-1} d."""
    p = res.p
    assert 0 <= n < res.N
    assert u.shape == (res.term_dim(n),)
    _assert_in_term_socle(res, n, u)
    comps = {}
    rhs0 = la.matmul(u.reshape(-1, 1), res.aug, p)[:, res.gen_cols(0)]
    sol = la.solve(res.boundaries[n + 1], rhs0, p, rng=rng)
    if sol is None:
        raise ValueError("augmented lift unsolvable at degree 0")
    comps[0] = _extend_to_term(res, 0, n + 1, sol)
    prev = comps[0]
    for m in range(1, res.N - n):
        rhs = la.matmul(prev, res.boundaries[m], p)[:, res.gen_cols(m)]
        sol = la.solve(res.boundaries[n + 1 + m], rhs, p, rng=rng)
        if sol is None:
            raise ValueError(f"augmented lift unsolvable at degree {m}")
        comps[m] = _extend_to_term(res, m, n + 1 + m, sol)
        prev = comps[m]
    return ChainMap(res, n + 1, comps)


def verify_chain_map(cm: ChainMap) -> None:
    res, p, t = cm.res, cm.res.p, cm.shift
    for i, comp in cm.components.items():
        if i == 0:
            continue
        lhs = la.matmul(res.boundaries[i + t], comp, p)
        rhs = la.matmul(cm.components[i - 1], res.boundaries[i], p)
        assert np.array_equal(lhs, rhs), f"chain condition fails at {i}"


def gen_block(res: TruncatedResolution, matrix: np.ndarray, src_deg: int,
              tgt_deg: int) -> np.ndarray:
    """Generator coefficients mod radical of a map P_src -> P_tgt."""
    d = res.algebra.dim
    out = la.zeros(res.ranks[tgt_deg], res.ranks[src_deg])
    for g in range(res.ranks[src_deg]):
        for h in range(res.ranks[tgt_deg]):
            out[h, g] = matrix[h * d, g * d]
    return out


# resolutions of arbitrary modules -------------------------------------------

def minimal_resolution(m: rep.FDModule, N: int) -> TruncatedResolution:
    """Iterated projective covers; exact and minimal by construction.

    The kernel of each cover map lives in the coordinates of the previous
    free term, so boundaries compose directly as inclusion . next cover.
    """
    d = m.algebra.dim
    ranks = []
    boundaries: list = [None]
    cover = rep.projective_cover(m)
    ranks.append(cover.source.dim // d)
    aug = cover.matrix
    for i in range(1, N + 1):
        ker = la.kernel_basis(cover.matrix, m.p)
        if ker.shape[1] == 0:
            ranks.append(0)
            boundaries.append(la.zeros(ranks[i - 1] * d, 0))
            cover = rep.ModuleHom(
                rep.free_module(m.algebra, 0),
                rep.FDModule(m.algebra, 0, [la.zeros(0, 0)] * m.r),
                la.zeros(0, 0))
            continue
        omega, incl = rep.submodule(cover.source, ker)
        cover = rep.projective_cover(omega)
        ranks.append(cover.source.dim // d)
        boundaries.append(la.matmul(incl, cover.matrix, m.p))
    return TruncatedResolution(m.algebra, N, ranks, boundaries, aug)


def ext_dims(m: rep.FDModule, n_mod: rep.FDModule, n_max: int) -> list[int]:
    """dim Ext^i(m, n_mod) for 0 <= i <= n_max, from a minimal resolution of m."""
    res = minimal_resolution(m, n_max + 1)
    p, d = m.p, m.algebra.dim
    deltas = []
    for i in range(1, n_max + 2):
        g_src, g_tgt = res.ranks[i - 1], res.ranks[i]
        delta = la.zeros(g_tgt * n_mod.dim, g_src * n_mod.dim)
        b = res.boundaries[i]
        for j in range(g_tgt):
            for l in range(g_src):
                coeffs = b[l * d:(l + 1) * d, j * d]
                block = rep.act_element(n_mod, coeffs)
                delta[j * n_mod.dim:(j + 1) * n_mod.dim,
                      l * n_mod.dim:(l + 1) * n_mod.dim] = block
        deltas.append(delta)
    dims = []
    prev_rank = 0
    for i in range(n_max + 1):
        ker = deltas[i].shape[1] - la.rank(deltas[i], p)
        dims.append(ker - prev_rank)
        prev_rank = la.rank(deltas[i], p)
    return dims


# restriction along flat maps -------------------------------------------------

def restriction_data(amb: ElemAbelianAlgebra, f: FlatMap):
    """Frame substitution data for restricting free kG-terms along f.

    Returns (comp, subst, subst_inv, free_cols) where free_cols indexes the
    kH-free generator monomials (those with zero f-part) inside one copy.
    """
    comp = complement_flat(f)
    stacked = np.vstack([f.matrix, comp.matrix])
    subst = substitution_matrix(amb, stacked)
    subst_inv = la.inverse(subst, amb.p)
    ps = amb.p ** f.s
    free_cols = [ps * beta for beta in range(amb.p ** (amb.r - f.s))]
    return comp, subst, subst_inv, free_cols


def restriction_chain_map(res_g: TruncatedResolution, f: FlatMap,
                          res_h: TruncatedResolution, max_deg: int) -> list[np.ndarray]:
    """kH-chain maps psi_i : P_i(G) -> Q_i(H) lifting the identity of k.

    P_i is kH-free after restriction; each psi_i is solved on the kH-free
    generators and extended kH-linearly.
    """
    amb, p = res_g.algebra, res_g.p
    if res_h.algebra.r != f.s or res_h.p != p:
        raise ValueError("target resolution must live over the flat map source")
    comp, subst, subst_inv, free_cols = restriction_data(amb, f)
    d, ps = amb.dim, p ** f.s
    h_alg = res_h.algebra

    def h_generators(i):
        """kH-free generator vectors of P_i(G) restricted along f."""
        gens = []
        for g in range(res_g.ranks[i]):
            for c in free_cols:
                vec = la.zeros(res_g.term_dim(i), 1)[:, 0]
                vec[g * d: (g + 1) * d] = subst[:, c]
                gens.append(vec)
        return np.array(gens, dtype=np.int64).T

    def extend_h_linear(i, gens, images):
        """Full matrix of the kH-linear map with given generator images."""
        n_gen = gens.shape[1]
        cols_vals = la.zeros(res_h.term_dim(i), n_gen * ps)
        cols_pos = la.zeros(res_g.term_dim(i), n_gen * ps)
        for alpha in range(ps):
            mono_p = _h_monomial_on_g_term(res_g, i, f, alpha)
            mono_q = _h_monomial_on_h_term(res_h, i, alpha)
            cols_pos[:, alpha * n_gen:(alpha + 1) * n_gen] = la.matmul(mono_p, gens, p)
            cols_vals[:, alpha * n_gen:(alpha + 1) * n_gen] = la.matmul(mono_q, images, p)
        coords = la.solve(cols_pos, la.eye(res_g.term_dim(i)), p)
        assert coords is not None, "kH-translates of generators must span"
        return la.matmul(cols_vals, coords, p)

    psis = []
    for i in range(max_deg + 1):
        gens = h_generators(i)
        if i == 0:
            rhs = la.matmul(res_g.aug, gens, p)
            sol = la.solve(res_h.aug, rhs, p)
        else:
            moved = la.matmul(res_g.boundaries[i], gens, p)
            rhs = la.matmul(psis[i - 1], moved, p)
            sol = la.solve(res_h.boundaries[i], rhs, p)
        assert sol is not None, f"restriction comparison unsolvable at {i}"
        psis.append(extend_h_linear(i, gens, sol))
    return psis


def _h_monomial_on_g_term(res_g, i, f: FlatMap, alpha: int):
    """Action of the alpha-th kH-monomial on the restricted term P_i(G)."""
    from .algebra import exponent_table

    table = exponent_table(res_g.p, f.s)
    term = res_g.term_module(i)
    out = la.eye(term.dim)
    for j in range(f.s):
        a = rep.act_linear(term, f.rows[j])
        for _ in range(int(table[alpha, j])):
            out = la.matmul(out, a, res_g.p)
    return out


def _h_monomial_on_h_term(res_h, i, alpha: int):
    return res_h.term_monomial_action(i, alpha)
