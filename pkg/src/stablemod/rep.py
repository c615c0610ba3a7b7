"""Finite-dimensional modules over k[X_1..X_r]/(X_i^p).

A module is its list of commuting p-nilpotent action matrices, one per
generator.  The tensor action comes from the group-like elements 1 + X_i,
so X_i acts on M (x) N as X(x)1 + 1(x)X + X(x)X; the idempotent-model
structure downstream does not depend on this choice of coalgebra.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import exactla as la
from .algebra import (
    ElemAbelianAlgebra,
    FlatMap,
    ProjPoint,
    complement_flat,
    exponent_table,
    flat_map,
    gen_matrix,
    is_flat,
    projective_points,
)


@dataclass
class FDModule:
    algebra: ElemAbelianAlgebra
    dim: int
    actions: list[np.ndarray] = field(repr=False)

    @property
    def p(self) -> int:
        return self.algebra.p

    @property
    def r(self) -> int:
        return self.algebra.r


@dataclass
class ModuleHom:
    source: FDModule
    target: FDModule
    matrix: np.ndarray = field(repr=False)


def validate_module(m: FDModule) -> None:
    """Exact check of the defining invariants: commuting, p-nilpotent."""
    p = m.p
    for a in m.actions:
        assert a.shape == (m.dim, m.dim)
        assert la.matpow(a, p, p).any() == False, "action not p-nilpotent"
    for i in range(m.r):
        for j in range(i + 1, m.r):
            ab = la.matmul(m.actions[i], m.actions[j], p)
            ba = la.matmul(m.actions[j], m.actions[i], p)
            assert np.array_equal(ab, ba), "actions do not commute"


def is_module_hom(h: ModuleHom) -> bool:
    p = h.source.p
    for a_s, a_t in zip(h.source.actions, h.target.actions):
        if not np.array_equal(la.matmul(h.matrix, a_s, p),
                              la.matmul(a_t, h.matrix, p)):
            return False
    return True


def trivial_module(alg: ElemAbelianAlgebra) -> FDModule:
    return FDModule(alg, 1, [la.zeros(1, 1) for _ in range(alg.r)])


def free_module(alg: ElemAbelianAlgebra, rank: int) -> FDModule:
    actions = []
    for i in range(alg.r):
        g = gen_matrix(alg.p, alg.r, i)
        actions.append(np.kron(la.eye(rank), g).astype(np.int64))
    return FDModule(alg, rank * alg.dim, actions)


def direct_sum(m: FDModule, n: FDModule) -> FDModule:
    assert m.algebra == n.algebra
    actions = []
    for a, b in zip(m.actions, n.actions):
        out = la.zeros(m.dim + n.dim, m.dim + n.dim)
        out[: m.dim, : m.dim] = a
        out[m.dim :, m.dim :] = b
        actions.append(out)
    return FDModule(m.algebra, m.dim + n.dim, actions)


def tensor(m: FDModule, n: FDModule) -> FDModule:
    """Hopf tensor product: X acts as X(x)1 + 1(x)X + X(x)X."""
    if m.algebra != n.algebra:
        raise ValueError("algebra mismatch")
    p = m.p
    actions = []
    im, in_ = la.eye(m.dim), la.eye(n.dim)
    for a, b in zip(m.actions, n.actions):
        act = (np.kron(a, in_) + np.kron(im, b) + np.kron(a, b)) % p
        actions.append(act.astype(np.int64))
    return FDModule(m.algebra, m.dim * n.dim, actions)


def act_monomial(m: FDModule, idx: int) -> np.ndarray:
    """Action of the monomial with the given index."""
    table = exponent_table(m.p, m.r)
    out = la.eye(m.dim)
    for i in range(m.r):
        for _ in range(int(table[idx, i])):
            out = la.matmul(out, m.actions[i], m.p)
    return out


def act_element(m: FDModule, coeffs: np.ndarray) -> np.ndarray:
    out = la.zeros(m.dim, m.dim)
    for idx in np.nonzero(la.pmod(coeffs, m.p))[0]:
        out = (out + int(coeffs[idx] % m.p) * act_monomial(m, int(idx))) % m.p
    return out


def act_linear(m: FDModule, row) -> np.ndarray:
    """Action of sum row[i] * X_i."""
    out = la.zeros(m.dim, m.dim)
    for i in range(m.r):
        out = (out + int(row[i]) * m.actions[i]) % m.p
    return out


def restrict(m: FDModule, f: FlatMap) -> FDModule:
    """Restriction along a flat map: t_j acts as sum f.rows[j][i] X_i."""
    if not is_flat(f):
        raise ValueError("restriction needs a flat map")
    if (f.p, f.r) != (m.p, m.r):
        raise ValueError("flat map does not match the module's algebra")
    actions = [act_linear(m, row) for row in f.rows]
    return FDModule(ElemAbelianAlgebra(m.p, f.s), m.dim, actions)


def socle_operator(m: FDModule) -> np.ndarray:
    """Action of the socle monomial prod X_i^{p-1}."""
    out = la.eye(m.dim)
    for a in m.actions:
        out = la.matmul(out, la.matpow(a, m.p - 1, m.p), m.p)
    return out


def free_rank(m: FDModule) -> int:
    """Number of free direct summands = rank of the socle operator."""
    return la.rank(socle_operator(m), m.p)


def is_free(m: FDModule) -> bool:
    return free_rank(m) * m.algebra.dim == m.dim


def is_free_cyclic(m: FDModule) -> bool:
    """Freeness over a rank-1 algebra: all nilpotent blocks have size p."""
    if m.r != 1:
        raise ValueError("is_free_cyclic expects a rank-1 algebra module")
    if m.dim % m.p:
        return False
    return la.rank(la.matpow(m.actions[0], m.p - 1, m.p), m.p) == m.dim // m.p


def rank_variety(m: FDModule) -> set[ProjPoint]:
    """F_p-rational points whose direction fails the freeness test."""
    points = set()
    for v in projective_points(m.p, m.r):
        line = restrict(m, flat_map(m.p, m.r, [v.coords]))
        if not is_free_cyclic(line):
            points.add(v)
    return points


def radical_basis(m: FDModule) -> np.ndarray:
    """Basis of Rad M = sum X_i M (columns)."""
    if m.r == 0:
        return la.zeros(m.dim, 0)
    return la.column_space(np.hstack(m.actions), m.p)


def socle_basis(m: FDModule) -> np.ndarray:
    """Basis of Soc M = joint kernel of the actions (columns)."""
    if m.r == 0:
        return la.eye(m.dim)
    return la.kernel_basis(np.vstack(m.actions), m.p)


def top_representatives(m: FDModule) -> np.ndarray:
    """Vectors projecting to a basis of M / Rad M."""
    return la.quotient_basis(la.eye(m.dim), radical_basis(m), m.p)


def projective_cover(m: FDModule) -> ModuleHom:
    """Cover map kG^g -> M with g = dim(M / Rad M)."""
    reps = top_representatives(m)
    g = reps.shape[1]
    cover = free_module(m.algebra, g)
    d = m.algebra.dim
    mat = la.zeros(m.dim, g * d)
    for idx in range(d):
        mono = act_monomial(m, idx)
        img = la.matmul(mono, reps, m.p)
        for j in range(g):
            mat[:, j * d + idx] = img[:, j]
    hom = ModuleHom(cover, m, mat)
    assert la.rank(mat, m.p) == m.dim, "cover map must be surjective"
    return hom


def submodule(m: FDModule, basis: np.ndarray) -> tuple[FDModule, np.ndarray]:
    """Module structure on an action-invariant column space; returns
    (module, inclusion matrix)."""
    actions = []
    for a in m.actions:
        moved = la.matmul(a, basis, m.p)
        coords = la.solve(basis, moved, m.p)
        if coords is None:
            raise ValueError("basis does not span an invariant subspace")
        actions.append(coords)
    return FDModule(m.algebra, basis.shape[1], actions), basis


def syzygy(m: FDModule) -> FDModule:
    """Kernel of a projective cover; minimal (no free summands)."""
    cover = projective_cover(m)
    ker = la.kernel_basis(cover.matrix, m.p)
    sub, _ = submodule(cover.source, ker)
    return sub


def induce(m: FDModule, f: FlatMap) -> FDModule:
    """Induction along a flat map into the rank-r ambient algebra.

    The underlying space is (complement monomials) x M; the flat image acts
    through M, the complement acts by its regular representation, and the
    ambient generators are recovered from the inverted frame.
    """
    if not is_flat(f):
        raise ValueError("induction needs a flat map")
    if m.r != f.s or m.p != f.p:
        raise ValueError("module must live over the flat map's source algebra")
    p, r, s = f.p, f.r, f.s
    comp = complement_flat(f)
    d_comp = p ** (r - s)
    dim = d_comp * m.dim
    ops = []
    for j in range(s):
        ops.append(np.kron(la.eye(d_comp), m.actions[j]).astype(np.int64))
    for l in range(r - s):
        g = gen_matrix(p, r - s, l)
        ops.append(np.kron(g, la.eye(m.dim)).astype(np.int64))
    stacked = np.vstack([f.matrix, comp.matrix])
    inv = la.inverse(stacked, p)
    actions = []
    for i in range(r):
        act = la.zeros(dim, dim)
        for l in range(r):
            act = (act + int(inv[i, l]) * ops[l]) % p
        actions.append(act)
    return FDModule(ElemAbelianAlgebra(p, r), dim, actions)


def module_to_json(m: FDModule) -> str:
    payload = {
        "p": m.p,
        "r": m.r,
        "dim": m.dim,
        "actions": [a.reshape(-1).tolist() for a in m.actions],
    }
    return json.dumps(payload, sort_keys=True)


def module_from_json(text: str) -> FDModule:
    payload = json.loads(text)
    p, r, dim = payload["p"], payload["r"], payload["dim"]
    actions = [
        np.array(flat, dtype=np.int64).reshape(dim, dim)
        for flat in payload["actions"]
    ]
    if len(actions) != r:
        raise ValueError("action count does not match the rank")
    m = FDModule(ElemAbelianAlgebra(p, r), dim, actions)
    validate_module(m)
    return m
