"""Degree-truncated models of the idempotent module attached to a finite
point set in P^{r-1}(F_p).

For a single point v, the model is built from a frame (z, h): a resolution
P_* of k over the rank r-1 subalgebra spanned by h, laid out as

    [base k] + P_0^{p-1} + P_1 + P_2^{p-1} + P_3 + ...   (slots 0..N)

with h acting termwise and the z-direction acting as a staircase: it shifts
within the (p-1)-tuples of even slots and applies the boundary (or the
augmentation, at the bottom) out of the last tuple entry and out of odd
slots.  Ambient generators are recovered through the inverted frame; since
linear combinations of commuting p-nilpotents are p-nilpotent, this is a
well-defined module over the full algebra.

Multi-point models glue the single-point ones along their base lines
(iterated amalgamation over the common copy of k).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import exactla as la
from .algebra import (
    ElemAbelianAlgebra,
    FlatMap,
    Frame,
    ProjPoint,
    frame_from_point,
    is_flat,
)
from . import rep
from .resolution import TruncatedResolution, trivial_resolution, validate_resolution


@dataclass(frozen=True)
class PointVariety:
    p: int
    r: int
    points: tuple[ProjPoint, ...]

    def __post_init__(self):
        if not self.points:
            raise ValueError("a point variety needs at least one point")
        if len(set(self.points)) != len(self.points):
            raise ValueError("points must be distinct")
        for v in self.points:
            if v.p != self.p or v.r != self.r:
                raise ValueError("point does not live in the stated space")


def point_variety(p: int, r: int, points) -> PointVariety:
    return PointVariety(p, r, tuple(sorted(points, key=lambda v: v.coords)))


def slot_multiplicity(p: int, n: int) -> int:
    return p - 1 if n % 2 == 0 else 1


@dataclass
class PointBlock:
    """Per-point layout data inside the assembled module."""

    point: ProjPoint
    frame: Frame
    offsets: dict  # (slot n, copy c) -> first basis index
    indices: np.ndarray  # all basis indices of this block (excluding base)
    op_z: np.ndarray = field(repr=False)
    op_y: list = field(repr=False)  # r-1 operators of the h-generators


@dataclass
class TruncatedFV:
    variety: PointVariety
    N: int
    resolution: TruncatedResolution  # of k over the rank r-1 algebra, shared
    module: rep.FDModule
    blocks: list[PointBlock]
    tau: np.ndarray
    slot_of: np.ndarray   # -1 for the base coordinate
    point_of: np.ndarray  # -1 for the base coordinate
    base_index: int = 0

    @property
    def p(self) -> int:
        return self.variety.p

    @property
    def r(self) -> int:
        return self.variety.r

    @property
    def dim(self) -> int:
        return self.module.dim

    def term_dim(self, n: int) -> int:
        return self.resolution.term_dim(n)

    def block_for(self, v: ProjPoint) -> PointBlock:
        for b in self.blocks:
            if b.point == v:
                return b
        raise KeyError(f"{v} is not a point of this model")


def _single_point_dim(p: int, r: int, ranks, N: int) -> int:
    units = sum(slot_multiplicity(p, n) * ranks[n] for n in range(N + 1))
    return 1 + units * p ** (r - 1)


def expected_dim(p: int, r: int, N: int, n_points: int = 1) -> int:
    ranks = trivial_resolution(p, r - 1, N).ranks
    single = _single_point_dim(p, r, ranks, N)
    return n_points * single - (n_points - 1)


def _build_block(point: ProjPoint, res: TruncatedResolution, frame: Frame,
                 start: int, total_dim: int, base_index: int) -> PointBlock:
    """Operators of one point's staircase, as matrices on the whole space."""
    p = frame.p
    offsets = {}
    pos = start
    for n in range(res.N + 1):
        for c in range(slot_multiplicity(p, n)):
            offsets[(n, c)] = pos
            pos += res.term_dim(n)
    indices = np.arange(start, pos)

    op_z = la.zeros(total_dim, total_dim)
    for n in range(res.N + 1):
        tdim = res.term_dim(n)
        mult = slot_multiplicity(p, n)
        if n % 2 == 1:
            src = offsets[(n, 0)]
            tgt = offsets[(n - 1, 0)]
            op_z[tgt:tgt + res.term_dim(n - 1), src:src + tdim] = \
                (-res.boundaries[n]) % p
        else:
            for c in range(mult - 1):
                src, tgt = offsets[(n, c)], offsets[(n, c + 1)]
                op_z[tgt:tgt + tdim, src:src + tdim] = la.eye(tdim)
            src = offsets[(n, mult - 1)]
            if n == 0:
                op_z[base_index, src:src + tdim] = (-res.aug[0]) % p
            else:
                tgt = offsets[(n - 1, 0)]
                op_z[tgt:tgt + res.term_dim(n - 1), src:src + tdim] = \
                    (-res.boundaries[n]) % p

    op_y = []
    for j in range(res.algebra.r):
        act = la.zeros(total_dim, total_dim)
        for (n, c), off in offsets.items():
            block = res.term_module(n).actions[j]
            act[off:off + res.term_dim(n), off:off + res.term_dim(n)] = block
        op_y.append(act)
    return PointBlock(point, frame, offsets, indices, op_z, op_y)


def _assemble(variety: PointVariety, N: int, frames: list[Frame],
              check: bool = True) -> TruncatedFV:
    p, r = variety.p, variety.r
    if r < 2:
        raise ValueError("the model needs ambient rank at least 2")
    if N < 2:
        raise ValueError("truncation degree must be at least 2")
    res = trivial_resolution(p, r - 1, N)
    if check:
        validate_resolution(res)

    single = _single_point_dim(p, r, res.ranks, N) - 1
    dim = 1 + single * len(variety.points)
    blocks = []
    start = 1
    for v, fr in zip(variety.points, frames):
        blocks.append(_build_block(v, res, fr, start, dim, base_index=0))
        start += single

    actions = [la.zeros(dim, dim) for _ in range(r)]
    for blk in blocks:
        inv = blk.frame.inverse()
        ops = [blk.op_z] + blk.op_y
        for i in range(r):
            acc = actions[i]
            for l in range(r):
                if inv[i, l]:
                    acc = (acc + int(inv[i, l]) * ops[l]) % p
            actions[i] = acc
    module = rep.FDModule(ElemAbelianAlgebra(p, r), dim, actions)

    slot_of = np.full(dim, -1, dtype=np.int64)
    point_of = np.full(dim, -1, dtype=np.int64)
    for b_idx, blk in enumerate(blocks):
        for (n, c), off in blk.offsets.items():
            slot_of[off:off + res.term_dim(n)] = n
            point_of[off:off + res.term_dim(n)] = b_idx

    tau = la.zeros(dim, 1)[:, 0]
    tau[0] = 1
    fv = TruncatedFV(variety, N, res, module, blocks, tau, slot_of, point_of)
    if check:
        _check_invariants(fv)
    return fv


def build_fv_point(v: ProjPoint, N: int, frame: Frame | None = None,
                   check: bool = True) -> TruncatedFV:
    """Truncated idempotent model of a single closed point."""
    variety = point_variety(v.p, v.r, [v])
    fr = frame if frame is not None else frame_from_point(v)
    return _assemble(variety, N, [fr], check=check)


def build_fv_multi(variety: PointVariety, N: int, frames=None,
                   check: bool = True) -> TruncatedFV:
    """Amalgamation of the single-point models over their base copies of k."""
    if frames is None:
        frames = [frame_from_point(v) for v in variety.points]
    return _assemble(variety, N, list(frames), check=check)


def _check_invariants(fv: TruncatedFV) -> None:
    p = fv.p
    rep.validate_module(fv.module)
    for blk in fv.blocks:
        assert not la.matpow(blk.op_z, p, p).any(), "z-direction not p-nilpotent"
        assert not la.matmul(blk.op_z, fv.tau.reshape(-1, 1), p).any(), \
            "z-direction must kill the base"
    # slot filtration: every action maps slot j into slots <= j of the same
    # block (plus the base), exactly
    above = fv.slot_of[:, None] > fv.slot_of[None, :]
    cross = ((fv.point_of[:, None] != fv.point_of[None, :])
             & (fv.point_of[:, None] >= 0) & (fv.point_of[None, :] >= 0))
    for a in fv.module.actions:
        assert not a[above].any(), "action raises the slot filtration"
        assert not a[cross].any(), "action crosses point blocks"
    # restriction to each frame's complement subalgebra: trivial + free
    for blk in fv.blocks:
        sub = rep.FDModule(fv.resolution.algebra, fv.dim, blk.op_y)
        own = np.concatenate([[fv.base_index], blk.indices])
        basis = la.zeros(fv.dim, len(own))
        basis[own, np.arange(len(own))] = 1
        inner, _ = rep.submodule(sub, basis)
        m = rep.free_rank(inner)
        assert inner.dim == 1 + m * fv.resolution.algebra.dim, \
            "own block must restrict to k + free over its h-frame"


def socle_slot_indices(fv: TruncatedFV) -> dict:
    """Basis indices of the canonical socle classes, keyed by (point #, slot).

    Per slot these are the last tuple copy's term-socle positions, one per
    free generator; together with the base they span the joint kernel of
    the ambient actions.
    """
    d = fv.resolution.algebra.dim
    out = {}
    for b_idx, blk in enumerate(fv.blocks):
        for n in range(fv.N + 1):
            last = slot_multiplicity(fv.p, n) - 1
            off = blk.offsets[(n, last)]
            out[(b_idx, n)] = [off + g * d + (d - 1)
                               for g in range(fv.resolution.ranks[n])]
    return out


def full_socle_dim(fv: TruncatedFV) -> int:
    return fv.dim - la.rank(np.vstack(fv.module.actions), fv.p)


@dataclass
class RestrictionReport:
    free_rank: int
    complement_dim: int
    stable_socle_dim: int
    trivial_plus_free: bool
    preimage_points: list[str]


def restrict_fv(fv: TruncatedFV, f: FlatMap) -> tuple[rep.FDModule, RestrictionReport]:
    """Restriction along a proper flat map plus its decomposition report.

    The free part is detected by the rank of the subalgebra socle operator;
    the stable socle dimension counts trivial stable summands (it equals 1
    exactly when the restriction is k + free).
    """
    if not is_flat(f) or f.s >= fv.r:
        raise ValueError("restriction needs a proper flat map")
    restricted = rep.restrict(fv.module, f)
    m = rep.free_rank(restricted)
    soc = restricted.dim - la.rank(np.vstack(restricted.actions), fv.p)
    sigma_rank = m  # rank of the socle operator
    report = RestrictionReport(
        free_rank=m,
        complement_dim=restricted.dim - m * f.p ** f.s,
        stable_socle_dim=soc - sigma_rank,
        trivial_plus_free=(restricted.dim - m * f.p ** f.s == 1
                           and soc - sigma_rank == 1),
        preimage_points=[str(w) for w in _preimage_points(fv.variety, f)],
    )
    return restricted, report


def _preimage_points(variety: PointVariety, f: FlatMap) -> list[ProjPoint]:
    from .algebra import proj_point, projective_points

    hits = []
    vset = set(v.coords for v in variety.points)
    for w in projective_points(f.p, f.s):
        image = np.array(w.coords, dtype=np.int64) @ f.matrix % f.p
        if not image.any():
            continue
        if proj_point(f.p, tuple(int(c) for c in image)).coords in vset:
            hits.append(w)
    return hits


def slice_indices(fv: TruncatedFV, n_max: int) -> np.ndarray:
    """Basis indices of the degree <= n_max slice (a submodule)."""
    keep = [fv.base_index]
    for blk in fv.blocks:
        for (n, c), off in sorted(blk.offsets.items(), key=lambda kv: kv[1]):
            if n <= n_max:
                keep.extend(range(off, off + fv.term_dim(n)))
    return np.array(keep, dtype=np.int64)


def summary(fv: TruncatedFV) -> dict:
    """CLI-facing record of the build."""
    socles = socle_slot_indices(fv)
    return {
        "p": fv.p,
        "r": fv.r,
        "points": [str(v) for v in fv.variety.points],
        "N": fv.N,
        "dim": fv.dim,
        "slot_ranks": list(fv.resolution.ranks),
        "slot_multiplicities": [slot_multiplicity(fv.p, n) for n in range(fv.N + 1)],
        "socle_dims_by_slot": {
            str(n): sum(len(socles[(b, n)]) for b in range(len(fv.blocks)))
            for n in range(fv.N + 1)
        },
        "checks": {
            "expected_dim": expected_dim(fv.p, fv.r, fv.N, len(fv.variety.points)),
            "dim_matches": fv.dim == expected_dim(fv.p, fv.r, fv.N,
                                                  len(fv.variety.points)),
        },
    }
