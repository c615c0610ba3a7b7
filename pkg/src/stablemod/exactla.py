"""Exact dense linear algebra over prime fields F_p.

Matrices are numpy int64 arrays with entries reduced into [0, p).  Every
routine is deterministic: elimination picks the first row with a nonzero
entry in the leftmost unresolved column, so ranks, solutions and kernel
bases are bit-reproducible.  A bit-packed fast path handles p == 2.

All values are treated as immutable; functions never modify their inputs.
"""

from __future__ import annotations

import numpy as np

Matrix = np.ndarray

# float64 matmul is exact while products stay under 2**52
_FLOAT_SAFE = 2**52


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


def pmod(a, p: int) -> Matrix:
    return np.asarray(a, dtype=np.int64) % p


def zeros(rows: int, cols: int) -> Matrix:
    return np.zeros((rows, cols), dtype=np.int64)


def eye(n: int) -> Matrix:
    return np.eye(n, dtype=np.int64)


def matmul(a: Matrix, b: Matrix, p: int) -> Matrix:
    """Exact product mod p, using BLAS when the bound allows."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    inner = a.shape[-1]
    if inner == 0:
        return zeros(a.shape[0], b.shape[1])
    if (p - 1) * (p - 1) * inner < _FLOAT_SAFE:
        prod = np.rint(a.astype(np.float64) @ b.astype(np.float64)).astype(np.int64)
    else:
        assert (p - 1) * (p - 1) * inner < 2**62, "matmul overflow bound exceeded"
        prod = a @ b
    return prod % p


def matpow(a: Matrix, k: int, p: int) -> Matrix:
    out = eye(a.shape[0])
    for _ in range(k):
        out = matmul(out, a, p)
    return out


# GF(2) bit-packed kernel ----------------------------------------------------

def _pack_gf2(a: Matrix) -> np.ndarray:
    rows, cols = a.shape
    words = max(1, (cols + 63) // 64)
    out = np.zeros((rows, words), dtype=np.uint64)
    for j in range(cols):
        col = (a[:, j].astype(np.uint64)) & np.uint64(1)
        out[:, j >> 6] |= col << np.uint64(j & 63)
    return out


def _gf2_col(packed: np.ndarray, j: int) -> np.ndarray:
    return (packed[:, j >> 6] >> np.uint64(j & 63)) & np.uint64(1)


def _rref_gf2(a: Matrix) -> tuple[np.ndarray, list[int]]:
    """Full RREF on a packed copy; returns (packed, pivot columns)."""
    packed = _pack_gf2(a)
    rows, cols = a.shape
    pivots: list[int] = []
    r = 0
    for j in range(cols):
        if r == rows:
            break
        col = _gf2_col(packed, j)
        nz = np.nonzero(col[r:])[0]
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            packed[[r, i]] = packed[[i, r]]
            col = _gf2_col(packed, j)
        col[r] = 0
        hit = np.nonzero(col)[0]
        if hit.size:
            packed[hit] ^= packed[r]
        pivots.append(j)
        r += 1
    return packed, pivots


def _gf2_entries(packed: np.ndarray, row_idx, col_idx) -> Matrix:
    out = zeros(len(row_idx), len(col_idx))
    for jj, j in enumerate(col_idx):
        out[:, jj] = _gf2_col(packed[row_idx], j).astype(np.int64)
    return out


# generic elimination --------------------------------------------------------

def _rref_generic(a: Matrix, p: int) -> tuple[Matrix, list[int]]:
    a = pmod(a, p).copy()
    rows, cols = a.shape
    pivots: list[int] = []
    r = 0
    for j in range(cols):
        if r == rows:
            break
        nz = np.nonzero(a[r:, j])[0]
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            a[[r, i]] = a[[i, r]]
        inv = pow(int(a[r, j]), -1, p)
        if inv != 1:
            a[r] = (a[r] * inv) % p
        hit = np.nonzero(a[:, j])[0]
        hit = hit[hit != r]
        if hit.size:
            a[hit] = (a[hit] - np.outer(a[hit, j], a[r])) % p
        pivots.append(j)
        r += 1
    return a, pivots


def rref(a: Matrix, p: int) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and pivot columns."""
    a = pmod(a, p)
    if a.size == 0:
        return a.copy(), []
    if p == 2:
        packed, pivots = _rref_gf2(a)
        out = zeros(a.shape[0], a.shape[1])
        for i in range(len(pivots)):
            out[i] = _gf2_entries(packed, [i], range(a.shape[1]))[0]
        return out, pivots
    return _rref_generic(a, p)


def rank(a: Matrix, p: int) -> int:
    a = pmod(a, p)
    if a.size == 0:
        return 0
    if p == 2:
        return len(_rref_gf2(a)[1])
    return len(_rref_generic(a, p)[1])


def kernel_basis(a: Matrix, p: int) -> Matrix:
    """Columns spanning the right null space; count = cols - rank."""
    a = pmod(a, p)
    rows, cols = a.shape
    if cols == 0:
        return zeros(0, 0)
    if rows == 0:
        return eye(cols)
    if p == 2:
        packed, pivots = _rref_gf2(a)
        free = [j for j in range(cols) if j not in set(pivots)]
        out = zeros(cols, len(free))
        if free:
            block = _gf2_entries(packed, range(len(pivots)), free)
            for i, j in enumerate(pivots):
                out[j] = block[i]
            for jj, f in enumerate(free):
                out[f, jj] = 1
        return out
    red, pivots = _rref_generic(a, p)
    free = [j for j in range(cols) if j not in set(pivots)]
    out = zeros(cols, len(free))
    for jj, f in enumerate(free):
        out[f, jj] = 1
        for i, j in enumerate(pivots):
            out[j, jj] = (-red[i, f]) % p
    return out


def solve(a: Matrix, b: Matrix, p: int, rng=None) -> Matrix | None:
    """Some x with a @ x = b (mod p), or None when inconsistent.

    b may be a vector or a matrix of right-hand sides; the shape of x
    follows b.  With rng, a random kernel offset is added to the pinned
    least-pivot solution.
    """
    a = pmod(a, p)
    b = pmod(b, p)
    vector = b.ndim == 1
    bm = b.reshape(-1, 1) if vector else b
    if a.shape[0] != bm.shape[0]:
        raise ValueError(f"dimension mismatch: {a.shape} vs {bm.shape}")
    cols = a.shape[1]
    aug = np.hstack([a, bm])
    if p == 2:
        packed, pivots = _rref_gf2(aug)
        if pivots and pivots[-1] >= cols:
            return None
        x = zeros(cols, bm.shape[1])
        if pivots:
            block = _gf2_entries(packed, range(len(pivots)),
                                 range(cols, cols + bm.shape[1]))
            for i, j in enumerate(pivots):
                x[j] = block[i]
    else:
        red, pivots = _rref_generic(aug, p)
        if pivots and pivots[-1] >= cols:
            return None
        x = zeros(cols, bm.shape[1])
        for i, j in enumerate(pivots):
            x[j] = red[i, cols:]
    if rng is not None:
        ker = kernel_basis(a, p)
        if ker.shape[1]:
            coeffs = np.array(
                [[rng.randrange(p) for _ in range(x.shape[1])]
                 for _ in range(ker.shape[1])], dtype=np.int64)
            x = (x + matmul(ker, coeffs, p)) % p
    return x[:, 0] if vector else x


def column_space(a: Matrix, p: int) -> Matrix:
    """Independent columns of a (the pivot columns, in order)."""
    a = pmod(a, p)
    if a.size == 0:
        return a.reshape(a.shape[0], 0).copy()
    if p == 2:
        _, pivots = _rref_gf2(a)
    else:
        _, pivots = _rref_generic(a, p)
    return a[:, pivots].copy()


def in_column_space(m: Matrix, v: Matrix, p: int) -> bool:
    return solve(m, v, p) is not None


def membership_subspace(basis: Matrix, image: Matrix, p: int) -> Matrix:
    """Coordinates c (columns) with basis @ c inside the column space of image."""
    basis = pmod(basis, p)
    image = pmod(image, p)
    w = basis.shape[1]
    ker = kernel_basis(np.hstack([basis, image]), p)
    return column_space(ker[:w], p)


def quotient_basis(space: Matrix, subspace: Matrix, p: int) -> Matrix:
    """Columns of space completing subspace to a basis of col(space).

    Raises ValueError when subspace is not contained in col(space).
    """
    space = pmod(space, p)
    subspace = pmod(subspace, p)
    if subspace.shape[1] and rank(np.hstack([space, subspace]), p) != rank(space, p):
        raise ValueError("subspace not contained in the span of space")
    combined = np.hstack([subspace, space]) if subspace.shape[1] else space
    if p == 2:
        _, pivots = _rref_gf2(combined)
    else:
        _, pivots = _rref_generic(combined, p)
    offset = subspace.shape[1]
    chosen = [j - offset for j in pivots if j >= offset]
    return space[:, chosen].copy()


def inverse(a: Matrix, p: int) -> Matrix:
    n = a.shape[0]
    x = solve(a, eye(n), p)
    if x is None or rank(a, p) != n:
        raise ValueError("matrix not invertible")
    return x


def same_column_space(a: Matrix, b: Matrix, p: int) -> bool:
    ra, rb = rank(a, p), rank(b, p)
    return ra == rb == rank(np.hstack([a, b]), p)
