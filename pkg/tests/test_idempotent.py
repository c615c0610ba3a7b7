import numpy as np
import pytest

from stablemod import exactla as la
from stablemod import idempotent as idm
from stablemod import rep
from stablemod.algebra import flat_map, parse_point


def fv_p2(N=2, coords="[1:0:0]"):
    return idm.build_fv_point(parse_point(coords, 2, 3), N)


def test_single_point_dimension_p2_r3_n2():
    fv = fv_p2(N=2)
    # ranks 1,2,3 over the rank-2 subalgebra, every slot a single copy
    assert fv.dim == 1 + (1 + 2 + 3) * 4 == 25


def test_z_kills_tau():
    fv = fv_p2(N=3)
    z = fv.blocks[0].op_z
    assert not la.matmul(z, fv.tau.reshape(-1, 1), 2).any()


def test_z_p_nilpotent_as_matrix():
    fv = fv_p2(N=4)
    assert not la.matpow(fv.blocks[0].op_z, 2, 2).any()


def test_module_invariants_hold():
    fv = fv_p2(N=3)
    rep.validate_module(fv.module)


def test_p3_build_and_z_cube_zero():
    v = parse_point("[1:0:0]", 3, 3)
    fv = idm.build_fv_point(v, 3)
    # slots 0..3 with tuple multiplicities 2,1,2,1 and ranks 1,2,3,4 over dim-9 terms
    assert fv.dim == 1 + (2 * 1 + 1 * 2 + 2 * 3 + 1 * 4) * 9
    assert not la.matpow(fv.blocks[0].op_z, 3, 3).any()


def test_expected_dim_helper():
    assert idm.expected_dim(2, 3, 2) == 25
    assert idm.expected_dim(2, 3, 2, n_points=2) == 49


def test_n_below_two_rejected():
    with pytest.raises(ValueError):
        fv_p2(N=1)


def test_multi_point_dimension_and_tau():
    variety = idm.point_variety(2, 3, [parse_point("[1:0:0]", 2, 3),
                                       parse_point("[0:1:0]", 2, 3)])
    fv = idm.build_fv_multi(variety, 2)
    assert fv.dim == 49
    # both embedded base maps coincide with tau
    for blk in fv.blocks:
        z = blk.op_z
        assert not la.matmul(z, fv.tau.reshape(-1, 1), 2).any()
    rep.validate_module(fv.module)


def test_multi_point_matches_single_on_one_point():
    v = parse_point("[1:1:0]", 2, 3)
    single = idm.build_fv_point(v, 2)
    multi = idm.build_fv_multi(idm.point_variety(2, 3, [v]), 2)
    for a, b in zip(single.module.actions, multi.module.actions):
        assert np.array_equal(a, b)


def test_slot_socle_indices_are_kernel_classes():
    fv = fv_p2(N=4)
    socles = idm.socle_slot_indices(fv)
    stacked = np.vstack(fv.module.actions)
    count = 0
    for (b, n), idxs in socles.items():
        assert len(idxs) == fv.resolution.ranks[n]
        for i in idxs:
            v = la.zeros(fv.dim, 1)[:, 0]
            v[i] = 1
            assert not la.matmul(stacked, v.reshape(-1, 1), 2).any()
            count += 1
    # base + slot socles exhaust the joint kernel
    assert idm.full_socle_dim(fv) == 1 + count


def test_slot_socle_exhausts_kernel_p3():
    v = parse_point("[0:1:1]", 3, 3)
    fv = idm.build_fv_point(v, 3)
    socles = idm.socle_slot_indices(fv)
    count = sum(len(ix) for ix in socles.values())
    assert idm.full_socle_dim(fv) == 1 + count


def test_slice_consistency():
    v = parse_point("[1:0:0]", 2, 3)
    big = idm.build_fv_point(v, 5)
    small = idm.build_fv_point(v, 3)
    keep = idm.slice_indices(big, 3)
    assert len(keep) == small.dim
    for a_big, a_small in zip(big.module.actions, small.module.actions):
        assert np.array_equal(a_big[np.ix_(keep, keep)], a_small)


def test_restrict_fv_missing_plane_is_trivial_plus_free():
    fv = fv_p2(N=3)
    f = flat_map(2, 3, [(0, 1, 0), (0, 0, 1)])  # plane missing [1:0:0]
    _, report = idm.restrict_fv(fv, f)
    assert report.trivial_plus_free
    assert report.preimage_points == []
    assert report.complement_dim == 1
    assert report.stable_socle_dim == 1


def test_restrict_fv_through_point_not_free():
    fv = fv_p2(N=3)
    f = flat_map(2, 3, [(1, 0, 0), (0, 1, 0)])  # plane through [1:0:0]
    restricted, report = idm.restrict_fv(fv, f)
    assert restricted.dim == fv.dim  # dimension preserved
    assert not report.trivial_plus_free
    assert report.stable_socle_dim > 1
    assert report.preimage_points  # the point pulls back


def test_restrict_fv_line_through_point():
    fv = fv_p2(N=3)
    f = flat_map(2, 3, [(1, 0, 0)])
    _, report = idm.restrict_fv(fv, f)
    assert not report.trivial_plus_free


def test_restrict_fv_rejects_full_rank():
    fv = fv_p2(N=2)
    with pytest.raises(ValueError):
        idm.restrict_fv(fv, flat_map(2, 3, [(1, 0, 0), (0, 1, 0), (0, 0, 1)]))


def test_summary_fields():
    fv = fv_p2(N=2)
    s = idm.summary(fv)
    assert s["dim"] == 25
    assert s["checks"]["dim_matches"]
    assert s["slot_ranks"] == [1, 2, 3]
    assert s["points"] == ["[1:0:0]"]
