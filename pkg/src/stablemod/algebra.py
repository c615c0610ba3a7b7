"""The group algebra k[X_1..X_r]/(X_i^p) of an elementary abelian p-group.

Monomials are indexed by exponent tuples e in {0..p-1}^r with index
sum(e[i] * p**i); index 0 is the unit.  Flat maps carry only their linear
parts (rows of coefficients over the generators); everything downstream
depends only on classes modulo the square of the radical, which makes the
row matrix a complete invariant.
"""

from __future__ import annotations

import functools
import re
from dataclasses import dataclass

import numpy as np

from . import exactla as la


@dataclass(frozen=True)
class ElemAbelianAlgebra:
    p: int
    r: int

    def __post_init__(self):
        if not la.is_prime(self.p):
            raise ValueError(f"p = {self.p} is not prime")
        if self.r < 0:
            raise ValueError("rank must be nonnegative")

    @property
    def dim(self) -> int:
        return self.p**self.r


@functools.lru_cache(maxsize=None)
def exponent_table(p: int, r: int) -> np.ndarray:
    """Row i = exponent tuple of monomial index i."""
    dim = p**r
    table = np.zeros((dim, r), dtype=np.int64)
    for i in range(dim):
        n = i
        for j in range(r):
            table[i, j] = n % p
            n //= p
    table.setflags(write=False)
    return table


@functools.lru_cache(maxsize=None)
def gen_matrix(p: int, r: int, i: int) -> np.ndarray:
    """Multiplication by X_i on the monomial basis."""
    table = exponent_table(p, r)
    dim = p**r
    m = la.zeros(dim, dim)
    step = p**i
    for idx in range(dim):
        if table[idx, i] < p - 1:
            m[idx + step, idx] = 1
    m.setflags(write=False)
    return m


@functools.lru_cache(maxsize=None)
def monomial_matrix(p: int, r: int, idx: int) -> np.ndarray:
    table = exponent_table(p, r)
    m = la.eye(p**r)
    for i in range(r):
        for _ in range(int(table[idx, i])):
            m = la.matmul(m, gen_matrix(p, r, i), p)
    m.setflags(write=False)
    return m


def element_matrix(alg: ElemAbelianAlgebra, coeffs: np.ndarray) -> np.ndarray:
    """Multiplication operator of the element with given coefficient vector."""
    coeffs = la.pmod(coeffs, alg.p)
    out = la.zeros(alg.dim, alg.dim)
    for idx in np.nonzero(coeffs)[0]:
        out = (out + int(coeffs[idx]) * monomial_matrix(alg.p, alg.r, int(idx))) % alg.p
    return out


def linear_element(alg: ElemAbelianAlgebra, row: np.ndarray) -> np.ndarray:
    """Coefficient vector of sum row[i] * X_i."""
    coeffs = la.zeros(alg.dim, 1)[:, 0]
    for i in range(alg.r):
        coeffs[alg.p**i] = row[i] % alg.p
    return coeffs


def multiply(alg: ElemAbelianAlgebra, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Truncated product of coefficient vectors; exponents >= p vanish."""
    return la.matmul(element_matrix(alg, a), la.pmod(b, alg.p).reshape(-1, 1), alg.p)[:, 0]


def augmentation_row(alg: ElemAbelianAlgebra) -> np.ndarray:
    row = la.zeros(1, alg.dim)
    row[0, 0] = 1
    return row


def socle_index(alg: ElemAbelianAlgebra) -> int:
    return alg.dim - 1


@dataclass(frozen=True)
class FlatMap:
    """Linear part of a map k[t_1..t_s]/(t_j^p) -> kG, row j = image of t_j."""

    p: int
    r: int
    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        for row in self.rows:
            if len(row) != self.r:
                raise ValueError("row length must equal the ambient rank")

    @property
    def s(self) -> int:
        return len(self.rows)

    @property
    def matrix(self) -> np.ndarray:
        if not self.rows:
            return la.zeros(0, self.r)
        return la.pmod(np.array(self.rows, dtype=np.int64), self.p)

    @property
    def domain(self) -> ElemAbelianAlgebra:
        return ElemAbelianAlgebra(self.p, self.s)

    @property
    def codomain(self) -> ElemAbelianAlgebra:
        return ElemAbelianAlgebra(self.p, self.r)


def flat_map(p: int, r: int, rows) -> FlatMap:
    rows = tuple(tuple(int(x) % p for x in row) for row in rows)
    return FlatMap(p, r, rows)


def is_flat(f: FlatMap) -> bool:
    """Rows linearly independent over F_p."""
    if f.s == 0:
        return True
    return la.rank(f.matrix, f.p) == f.s


def complement_flat(f: FlatMap) -> FlatMap:
    """Deterministic complement g with the stacked (f; g) matrix invertible.

    Completes with the coordinate generators at the non-pivot columns of
    f's reduced row matrix; kG becomes the internal tensor product of the
    two images.
    """
    if not is_flat(f):
        raise ValueError("input map is not flat")
    if f.s == 0:
        pivots: list[int] = []
    else:
        _, pivots = la.rref(f.matrix, f.p)
    chosen = []
    for i in range(f.r):
        if i not in pivots:
            row = [0] * f.r
            row[i] = 1
            chosen.append(tuple(row))
    return FlatMap(f.p, f.r, tuple(chosen))


@dataclass(frozen=True)
class ProjPoint:
    """Point of P^{r-1}(F_p), normalized so the first nonzero coordinate is 1."""

    p: int
    coords: tuple[int, ...]

    def __post_init__(self):
        if all(c % self.p == 0 for c in self.coords):
            raise ValueError("projective point needs a nonzero coordinate")

    @property
    def r(self) -> int:
        return len(self.coords)

    def __str__(self) -> str:
        return "[" + ":".join(str(c) for c in self.coords) + "]"


def proj_point(p: int, coords) -> ProjPoint:
    coords = [int(c) % p for c in coords]
    lead = next((c for c in coords if c), None)
    if lead is None:
        raise ValueError("projective point needs a nonzero coordinate")
    inv = pow(lead, -1, p)
    return ProjPoint(p, tuple((c * inv) % p for c in coords))


def projective_points(p: int, r: int) -> list[ProjPoint]:
    """All (p^r - 1)/(p - 1) normalized points of P^{r-1}(F_p), sorted."""
    points = []
    for lead in range(r):
        tail_count = p ** (r - lead - 1)
        for t in range(tail_count):
            coords = [0] * lead + [1]
            n = t
            for _ in range(r - lead - 1):
                coords.append(n % p)
                n //= p
            points.append(ProjPoint(p, tuple(coords)))
    return sorted(points, key=lambda v: v.coords)


def parse_point(text: str, p: int, r: int) -> ProjPoint:
    m = re.fullmatch(r"\s*\[([^\]]*)\]\s*", text)
    if not m:
        raise ValueError(f"cannot parse point {text!r}; expected like [1:0:1]")
    parts = m.group(1).split(":")
    if len(parts) != r:
        raise ValueError(f"point {text!r} has {len(parts)} coordinates, expected {r}")
    return proj_point(p, [int(x) for x in parts])


_TERM = re.compile(r"\s*([0-9]*)\s*\*?\s*X(\d+)\s*")


def parse_flat_map(text: str, p: int, r: int) -> FlatMap:
    """Rows separated by commas or semicolons, each a sum of c*Xi terms."""
    rows = []
    for chunk in re.split(r"[;,]", text):
        if not chunk.strip():
            continue
        row = [0] * r
        for term in chunk.split("+"):
            m = _TERM.fullmatch(term)
            if not m:
                raise ValueError(f"cannot parse flat map term {term!r}")
            coeff = int(m.group(1)) if m.group(1) else 1
            idx = int(m.group(2)) - 1
            if not 0 <= idx < r:
                raise ValueError(f"generator X{idx + 1} outside rank {r}")
            row[idx] = (row[idx] + coeff) % p
        rows.append(tuple(row))
    f = FlatMap(p, r, tuple(rows))
    if not is_flat(f):
        raise ValueError(f"rows of {text!r} are linearly dependent")
    return f


def format_flat_map(f: FlatMap) -> str:
    chunks = []
    for row in f.rows:
        terms = []
        for i, c in enumerate(row):
            if c == 1:
                terms.append(f"X{i + 1}")
            elif c:
                terms.append(f"{c}*X{i + 1}")
        chunks.append("+".join(terms))
    return ", ".join(chunks)


@dataclass(frozen=True)
class Frame:
    """An invertible change of generators (z; h-rows) adapted to a point."""

    z: FlatMap
    h: FlatMap

    @property
    def p(self) -> int:
        return self.z.p

    @property
    def r(self) -> int:
        return self.z.r

    @property
    def stacked(self) -> np.ndarray:
        return np.vstack([self.z.matrix, self.h.matrix])

    def inverse(self) -> np.ndarray:
        return la.inverse(self.stacked, self.p)


def frame_from_point(v: ProjPoint) -> Frame:
    """z generated by v's direction, h a deterministic complementary maximal
    flat map (so the stacked matrix is invertible)."""
    z = FlatMap(v.p, v.r, (v.coords,))
    return Frame(z=z, h=complement_flat(z))


def frame_through_point(v: ProjPoint, x: ProjPoint) -> Frame:
    """Like frame_from_point but pinning x's direction as the first h-row.

    Requires x and v to be distinct points.
    """
    if v.coords == x.coords:
        raise ValueError("x must differ from the frame's point")
    z = FlatMap(v.p, v.r, (v.coords,))
    current = np.vstack([z.matrix, np.array([x.coords], dtype=np.int64)])
    _, pivots = la.rref(current, v.p)
    rows = [x.coords]
    for i in range(v.r):
        if i not in pivots:
            row = [0] * v.r
            row[i] = 1
            rows.append(tuple(row))
    h = FlatMap(v.p, v.r, tuple(rows))
    return Frame(z=z, h=h)


def substitution_matrix(alg: ElemAbelianAlgebra, rows: np.ndarray) -> np.ndarray:
    """Monomial matrix of t-monomial -> product of (row_j . X) powers in kG.

    Column alpha (index over the source algebra of rank len(rows)) holds the
    kG-coefficient vector of prod_j (sum_i rows[j,i] X_i)^{alpha_j}.
    """
    s = rows.shape[0]
    src = ElemAbelianAlgebra(alg.p, s)
    table = exponent_table(alg.p, s)
    out = la.zeros(alg.dim, src.dim)
    gens = [linear_element(alg, rows[j]) for j in range(s)]
    for idx in range(src.dim):
        vec = la.zeros(alg.dim, 1)[:, 0]
        vec[0] = 1
        for j in range(s):
            for _ in range(int(table[idx, j])):
                vec = multiply(alg, gens[j], vec)
        out[:, idx] = vec
    return out
