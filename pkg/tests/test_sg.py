import random

import pytest
from gmpy2 import mpq

from qsg.errors import PaperAssertionFailure, PreconditionError
from qsg.linalg import Subspace
from qsg.sg import (PointSet, dsw_check, ek_delta, fractional_cut,
                    line_groups, neighbor_map, robust_sg_mod_subspace,
                    sg_delta, sg_dimension)


def ps(*pts):
    return PointSet(len(pts[0]), [list(p) for p in pts])


def e(n, i, c=1):
    v = [0] * n
    v[i] = c
    return v


# ------------------------------------------------------------- PointSet

def test_pointset_invariants():
    with pytest.raises(PreconditionError):
        ps((1, 0), (2, 0))  # proportional
    with pytest.raises(PreconditionError):
        ps((1, 0), (0, 0))  # zero vector
    deduped = PointSet(2, [[1, 0], [2, 0], [0, 1]], dedup=True)
    assert deduped.m == 2
    with pytest.raises(PreconditionError):
        PointSet(3, [[1, 0]])  # wrong length


def test_pointset_json_roundtrip():
    p = PointSet(2, [[mpq(1, 2), mpq(0)], [mpq(0), mpq(3)]])
    j = p.to_json()
    assert j == {"dim": 2, "points": [["1/2", "0/1"], ["0/1", "3/1"]]}
    back = PointSet.from_json(j)
    assert back.points == p.points


def test_dimensions():
    p = ps((1, 0, 0), (1, 1, 0), (1, 2, 0))
    assert p.span_dim() == 2
    assert p.affine_dim() == 1  # affine-collinear
    assert sg_dimension(ps((1, 0), (0, 1), (1, 1))) == 2


# ------------------------------------------------------------- sg_delta

def test_sg_delta_examples():
    assert sg_delta(ps((1, 0), (0, 1), (1, 1))) == 1
    assert sg_delta(ps(e(3, 0), e(3, 1), e(3, 2))) == 0
    assert sg_delta(ps((1, 0, 0), (0, 1, 0), (1, 1, 0), (0, 0, 1))) == 0
    with pytest.raises(PreconditionError):
        sg_delta(ps((1, 0), (0, 1)))


def test_sg_delta_affine_mode_differs():
    # span-collinear in the plane, but no three on a common affine line
    p = ps((1, 0), (0, 1), (1, 1))
    assert sg_delta(p, "span") == 1
    assert sg_delta(p, "affine") == 0
    # three points on the affine line x1 = 1, one stray
    p2 = ps((1, 0, 0), (1, 1, 0), (1, 2, 0), (0, 0, 1))
    gamma = neighbor_map(p2.points, "affine")
    assert gamma[0] == {1, 2} and gamma[3] == set()
    assert sg_delta(p2, "affine") == 0


def test_gamma_symmetry_property():
    rng = random.Random(50)
    for mode in ("span", "affine"):
        for _ in range(20):
            pts = {}
            while len(pts) < 7:
                v = tuple(mpq(rng.randint(-2, 2)) for _ in range(3))
                from qsg.linalg import canonical_vector
                k = canonical_vector(v)
                if k is not None and k not in pts:
                    pts[k] = v
            p = PointSet(3, [list(v) for v in pts.values()])
            gamma = neighbor_map(p.points, mode)
            for i in range(p.m):
                for j in gamma[i]:
                    assert i in gamma[j]


def test_line_groups_cover_membership():
    # every point on a line shows up in its group even when discovered
    # through a different pair
    p = ps((1, 0, 0), (0, 1, 0), (1, 1, 0), (1, 2, 0), (0, 0, 1))
    groups = line_groups(p.points, "span")
    big = [g for g in groups.values() if len(g) >= 3]
    assert big == [(0, 1, 2, 3)]


# ------------------------------------------------------------- dsw_check

def test_dsw_examples():
    assert dsw_check(ps((1, 0), (0, 1), (1, 1)), 1) is True
    # planar delta = 1 configuration: dimension at most 13
    plane = ps(*[(1, k, 0) for k in range(5)], (0, 1, 0))
    assert sg_delta(plane) == 1 and sg_dimension(plane) == 2
    assert dsw_check(plane, 1) is True
    # independent points: delta = 0, nothing to check
    assert dsw_check(ps(e(4, 0), e(4, 1), e(4, 2), e(4, 3)), mpq(1, 2)) is False
    with pytest.raises(PreconditionError):
        dsw_check(ps((1, 0), (0, 1), (1, 1)), 0)


def test_dsw_soundness_sweep():
    rng = random.Random(51)
    for _ in range(30):
        pts = {}
        while len(pts) < rng.randint(4, 9):
            v = tuple(mpq(rng.randint(-2, 2)) for _ in range(4))
            from qsg.linalg import canonical_vector
            k = canonical_vector(v)
            if k is not None and k not in pts:
                pts[k] = v
        p = PointSet(4, [list(v) for v in pts.values()])
        d = sg_delta(p)
        if d > 0:
            assert dsw_check(p, d) is True  # must never raise


# ------------------------------------------------------------- ek_delta

def test_ek_delta():
    t1, t2, t3 = ps((1, 0, 0)), ps((0, 1, 0)), ps((1, 1, 0))
    assert ek_delta(t1, t2, t3) == 1
    assert ek_delta(t1, t2, ps((0, 0, 1))) == 0
    with pytest.raises(PreconditionError):
        ek_delta(t1, t2, PointSet(3, []))


# --------------------------------------------- robust_sg_mod_subspace

def test_robust_sg_empty_k():
    W = Subspace(3, [[1, 0, 0]])
    out = robust_sg_mod_subspace(PointSet(3, []), W, ps((1, 0, 0)), mpq(1, 2))
    assert out["W_final"] == W and out["steps"] == 0
    assert out["absorbed"] == [] and out["dim_bound_check"] is True


def test_robust_sg_preconditions():
    W = Subspace(4, [e(4, 3)])
    wp = ps(e(4, 3))
    k = ps(e(4, 0), e(4, 1), (1, 1, 0, 0))
    with pytest.raises(PreconditionError):  # Wpoints outside W
        robust_sg_mod_subspace(k, W, ps(e(4, 2)), mpq(1, 2))
    with pytest.raises(PreconditionError):  # K meets W
        robust_sg_mod_subspace(ps(e(4, 3), e(4, 0)), W, wp, mpq(1, 2))
    with pytest.raises(PreconditionError):  # delta out of range
        robust_sg_mod_subspace(k, W, wp, 0)
    # e1 has only 2 of |T| = 4 neighbors: relaxed EK fails at delta = 3/4
    with pytest.raises(PreconditionError):
        robust_sg_mod_subspace(k, W, wp, mpq(3, 4))


def test_robust_sg_no_absorption():
    # K is a 1-SG triangle in coordinates 1-2, W-point e4 is nobody's neighbor
    W = Subspace(4, [e(4, 3)])
    k = ps(e(4, 0), e(4, 1), (1, 1, 0, 0))
    out = robust_sg_mod_subspace(k, W, ps(e(4, 3)), mpq(1, 2))
    assert out["steps"] == 0 and out["W_final"] == W
    assert out["final_K"] == [0, 1, 2]


def test_robust_sg_star_absorbs_everything():
    # all of K sits in span(e1, e3) alongside the W-point e3: the first
    # absorption enlarges W to that plane and sweeps K entirely
    W = Subspace(3, [e(3, 2)])
    k = ps((1, 0, 0), (1, 0, 1), (1, 0, 2), (1, 0, -1))
    # delta = 4/5: every K-point neighbors all 4 other points of |T| = 5
    out = robust_sg_mod_subspace(k, W, ps(e(3, 2)), mpq(4, 5))
    assert out["steps"] == 1 and out["pivots"] == [0]
    assert out["absorbed"] == [0, 1, 2, 3] and out["final_K"] == []
    assert out["W_final"].dim == 2
    assert out["W_final"].contains_vector([mpq(1), mpq(0), mpq(0)])


def test_robust_sg_random_planted_sweep():
    # two planes sharing the direction e1; W grows from the second plane
    rng = random.Random(52)
    for _ in range(15):
        k1, k2 = rng.randint(3, 5), rng.randint(3, 5)
        pts1 = [(1, mpq(j + 1), 0, 0) for j in range(k1)]
        pts2 = [(1, 0, mpq(j + 1), 0) for j in range(k2)]
        kpts = PointSet(4, [[1, 0, 0, 0]] +
                        [list(p) for p in pts1 + pts2])
        wvec = [mpq(0), mpq(0), mpq(0), mpq(1)]
        W = Subspace(4, [wvec])
        T = kpts.points + [tuple(wvec)]
        gamma = neighbor_map(T, "span")
        dpre = min(mpq(len(gamma[i])) for i in range(kpts.m)) / len(T)
        if dpre == 0:
            continue
        out = robust_sg_mod_subspace(kpts, W, PointSet(4, [wvec]), dpre)
        assert out["dim_bound_check"] is True
        assert out["W_final"].dim <= 1 + 10 / dpre


# ------------------------------------------------------- fractional_cut

def _pencil_points():
    # ten points on the span-line <e1, e2>, two strays forming one extra
    # special line {0, 10, 11} (span of (0,0,1) and (1,0,1) contains (1,0,0))
    pts = [[1, k, 0] for k in range(9)] + [[0, 1, 0], [0, 0, 1], [1, 0, 1]]
    return PointSet(3, pts)


def test_fractional_cut_no_removal():
    # complete span-collinear set in the plane: every cross pair special,
    # largest delta satisfying the cross-pair precondition is 1/4
    p = PointSet(2, [[1, k] for k in range(5)] + [[0, 1]])
    out = fractional_cut(p, [0, 1, 2], mpq(1, 4))
    assert out["removed"] == [] and out["survivors"] == [0, 1, 2]
    assert out["observed_constant"] == mpq(1, 2)
    assert out["dim_check"] is True


def test_fractional_cut_removes_pencil_strays():
    p = _pencil_points()
    out = fractional_cut(p, [0, 1, 2, 3, 4, 10], mpq(3, 16))
    assert out["removed"] == [10, 11]
    assert out["survivors"] == [0, 1, 2, 3, 4]
    assert out["survivors_all"] == list(range(10))
    assert out["observed_constant"] == mpq(5, 12)


def test_fractional_cut_preconditions():
    p = _pencil_points()
    with pytest.raises(PreconditionError):  # too few cross pairs
        fractional_cut(p, [0, 1, 2, 3, 4, 10], mpq(1, 2))
    with pytest.raises(PreconditionError):  # improper subset
        fractional_cut(p, list(range(12)), mpq(1, 8))
    with pytest.raises(PreconditionError):
        fractional_cut(p, [], mpq(1, 8))
    with pytest.raises(PreconditionError):
        fractional_cut(p, [99], mpq(1, 8))


def test_fractional_cut_affine_mode():
    # affine line x1 = 1 with five points, two strays off every special line
    pts = [[1, k, 0] for k in range(5)] + [[0, 1, 1], [0, 2, 3]]
    p = PointSet(3, pts)
    out = fractional_cut(p, [0, 1], mpq(2, 49), mode="affine")
    assert set(out["survivors"]) == {0, 1}
    assert 5 in out["removed"] and 6 in out["removed"]
    assert out["dim_check"] is True


def test_fractional_cut_average_degree_monotone():
    # re-run the pencil instance and recheck the strictly-increasing average
    # by hand at every prefix of the removal order
    from qsg.sg import _cross_degrees
    p = _pencil_points()
    bset = {0, 1, 2, 3, 4, 10}
    lines = [g for g in line_groups(p.points, "span").values() if len(g) >= 3]
    out = fractional_cut(p, sorted(bset), mpq(3, 16))
    alive = set(range(p.m))
    deg = _cross_degrees(lines, alive, bset)
    prev = mpq(sum(deg.values())) / len(alive)
    for v in out["removed"]:
        alive.discard(v)
        deg = _cross_degrees(lines, alive, bset)
        cur = mpq(sum(deg.values())) / len(alive)
        assert cur > prev
        prev = cur
