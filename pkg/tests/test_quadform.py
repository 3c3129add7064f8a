import random

import pytest
from gmpy2 import mpq

from helpers import (e, minor_rank, monos, rand_quad, rand_quad_of_rank,
                     rand_subspace, rand_vec, splitting_oracle)
from qsg.errors import GenericityExhausted, PreconditionError
from qsg.linalg import Subspace, span_sum
from qsg.quadforms import (ProjectionMap, QuadForm, factor_quadratic,
                           genericity_check, lin_mul, lin_square, ms_of_set,
                           sample_projection)


def test_rank_s_examples():
    n = 4
    assert monos(n, {(0, 0): 1}).rank_s() == 1
    assert monos(n, {(0, 1): 1, (2, 3): 1}).rank_s() == 2
    # x1^2 + x2^2 + x3^2: oracle = explicit splitting search
    Q = monos(n, {(0, 0): 1, (1, 1): 1, (2, 2): 1})
    assert Q.rank_s() == 2
    assert splitting_oracle(Q) == 2


def test_irreducibility_iff_rank_ge_3():
    rng = random.Random(10)
    for _ in range(100):
        Q = rand_quad(rng, 4)
        if Q.rank() <= 2:
            c, l1, l2 = factor_quadratic(Q)
            assert lin_mul([c * x for x in l1], l2) == Q
        assert Q.is_irreducible() == (Q.rank() >= 3)


def test_rank_s_matches_splitting_oracle_random():
    rng = random.Random(11)
    for _ in range(200):
        Q = rand_quad(rng, 5)
        assert Q.rank() == minor_rank([list(r) for r in Q.mat])
        assert Q.rank_s() == splitting_oracle(Q)


def test_minimal_space_examples():
    assert monos(3, {(0, 1): 1}).minimal_space() == \
        Subspace(3, [e(3, 0), e(3, 1)])
    sq = lin_square([mpq(1), mpq(1), mpq(0)])
    assert sq.minimal_space() == Subspace(3, [[mpq(1), mpq(1), mpq(0)]])
    assert monos(3, {(0, 1): 1, (2, 2): 1}).minimal_space().dim == 3


def test_minimal_space_dim_vs_rank_s():
    rng = random.Random(12)
    for _ in range(100):
        Q = rand_quad(rng, 5)
        assert Q.minimal_space().dim in (2 * Q.rank_s() - 1, 2 * Q.rank_s())


def test_no_proper_subspace_supports_q():
    # MS is minimal: dropping any basis direction loses Q
    Q = monos(4, {(0, 1): 1, (2, 2): 1})
    ms = Q.minimal_space()
    for k in range(ms.dim):
        sub = Subspace(4, [ms.basis[i] for i in range(ms.dim) if i != k])
        assert not Q.in_ring2(sub)
    assert Q.in_ring2(ms)


def test_restrict_examples():
    Q = monos(4, {(0, 1): 1, (2, 3): 1})
    res = Q.restrict(Subspace(4, [e(4, 0)]))
    assert res.n == 3 and res.rank() == 2  # x3x4 survives
    assert Q.restrict(Q.minimal_space()).is_zero()
    P = monos(4, {(0, 1): 1})
    assert not P.restrict(Subspace(4, [e(4, 2)])).is_zero()
    assert P.restrict(Subspace(4, [e(4, 2)])).rank() == 2


def test_restrict_rank_drop_claim_random():
    rng = random.Random(13)
    for _ in range(300):
        Q = rand_quad(rng, 5)
        V = rand_subspace(rng, 5, rng.randint(1, 3))
        assert Q.restrict(V).rank_s() >= Q.rank_s() - V.dim


def test_additivity_of_fresh_product():
    # P1 on x-vars, P2 = y1y2 fresh: rank_s adds 1 and y1, y2 enter MS
    rng = random.Random(14)
    for _ in range(100):
        n = 6
        P1 = rand_quad(rng, 4)
        M = [[mpq(0)] * n for _ in range(n)]
        for i in range(4):
            for j in range(4):
                M[i][j] = P1.mat[i][j]
        P = QuadForm(n, M) + monos(n, {(4, 5): 1})
        assert P.rank_s() == P1.rank_s() + 1
        assert P.minimal_space().contains_vector(e(n, 4))
        assert P.minimal_space().contains_vector(e(n, 5))


def test_intersection_identity_ab_cd_ef():
    # ab + cd = ef forces span(a,b) and span(c,d) to intersect
    rng = random.Random(15)
    hits = 0
    for _ in range(100):
        n = 5
        a, b, ev = rand_vec(rng, n), rand_vec(rng, n), rand_vec(rng, n)
        c = [ev[i] - a[i] for i in range(n)]
        if all(x == 0 for x in c):
            continue
        d = b
        assert lin_mul(a, b) + lin_mul(c, d) == lin_mul(ev, b)
        A = Subspace(n, [a, b])
        if A.dim < 2:
            continue
        assert A.intersection(Subspace(n, [c, d])).dim >= 1
        hits += 1
    assert hits > 50


def test_rank2_in_v_claim():
    # {0} != MS(ab - cd) <= V  =>  span(a,b) meets V
    rng = random.Random(16)
    for _ in range(200):
        n = 5
        a, b, c, d = (rand_vec(rng, n) for _ in range(4))
        D = lin_mul(a, b) - lin_mul(c, d)
        if D.is_zero():
            continue
        V = D.minimal_space()
        ab = Subspace(n, [a, b])
        assert ab.intersection(V).dim >= 1


def test_in_ideal_in_ring2():
    Q = monos(3, {(0, 1): 1, (1, 2): 1})  # x2(x1+x3)
    assert Q.in_ideal(Subspace(3, [e(3, 1)]))
    Q2 = monos(4, {(0, 1): 1, (2, 3): 1})
    assert not Q2.in_ideal(Subspace(4, [e(4, 0), e(4, 1)]))
    Q3 = monos(2, {(0, 0): 1, (0, 1): 1})
    assert Q3.in_ring2(Subspace(2, [e(2, 0), e(2, 1)]))
    # in_ring2 implies in_ideal
    rng = random.Random(17)
    for _ in range(100):
        Q = rand_quad(rng, 4)
        V = rand_subspace(rng, 4, rng.randint(1, 3))
        if Q.in_ring2(V):
            assert Q.in_ideal(V)


def test_project_examples():
    n = 2
    V = Subspace(n, [e(n, 0)])
    T = ProjectionMap(V, [1])
    img = T.project(monos(n, {(0, 1): 1}))  # x1x2 -> z*u1
    assert img.n == 2
    assert img == QuadForm.from_monomials(2, {(0, 1): mpq(1)})
    img2 = T.project(monos(n, {(0, 0): 1}))  # x1^2 -> z^2
    assert img2 == QuadForm.from_monomials(2, {(1, 1): mpq(1)})
    V2 = Subspace(2, [e(2, 0), e(2, 1)])
    T2 = ProjectionMap(V2, [1, 2])
    img3 = T2.project(monos(2, {(0, 1): 1}))  # x1x2 -> 2 z^2
    assert img3 == QuadForm.from_monomials(1, {(0, 0): mpq(2)})


def test_project_ideal_shape_asserts():
    n = 4
    V = Subspace(n, [e(n, 0)])
    T = ProjectionMap(V, [3])
    Q = monos(n, {(0, 1): 1, (0, 2): 2})  # x1(x2 + 2x3) in <V>
    img = T.project(Q)
    zsp = Subspace(T.n_out, [e(T.n_out, T.n_out - 1)])
    assert img.rank() == 2 and not zsp.contains(img.minimal_space())
    with pytest.raises(GenericityExhausted):
        ProjectionMap(V, [0]).project(Q)  # a = 0 is degenerate


def test_genericity_check_examples():
    n = 4
    rng = random.Random(18)
    F = monos(n, {(0, 1): 1})
    G = monos(n, {(2, 3): 1})
    V = Subspace(n, [e(n, 0)])
    T = sample_projection(V, rng, F, G)
    assert genericity_check(T, F, G)["ok"]
    with pytest.raises(PreconditionError):
        genericity_check(T, F, F.scale(mpq(2)))
    rep = genericity_check(ProjectionMap(V, [0]), F, G)
    assert not rep["ok"]  # a = 0 kills F's image


def test_projection_multiplicative_ufd():
    # T(ab) = T(a)T(b): restriction arithmetic respects factorization
    rng = random.Random(19)
    for _ in range(50):
        n = 5
        V = rand_subspace(rng, n, 2)
        T = sample_projection(V, rng)
        a, b = rand_vec(rng, n), rand_vec(rng, n)
        assert T.project(lin_mul(a, b)) == \
            lin_mul(T.apply_linear(a), T.apply_linear(b))


def test_lift_bound_claim():
    # dim MS(set) <= (sigma + 1) * Delta for Delta independent draws
    rng = random.Random(20)
    for _ in range(30):
        n = 6
        V = rand_subspace(rng, n, 2)
        quads = [rand_quad(rng, n) for _ in range(4)]
        sigma = 0
        for _ in range(V.dim):
            T = sample_projection(V, rng)
            sigma = max(sigma, ms_of_set(
                T.n_out, [T.project(Q) for Q in quads]).dim)
        assert ms_of_set(n, quads).dim <= (sigma + 1) * V.dim


def test_canonical_dedup_and_json():
    Q = monos(3, {(0, 1): 4, (2, 2): 2})
    assert Q.key() == Q.scale(mpq("7/3")).key()
    assert QuadForm.from_json(Q.to_json()) == Q
    sparse = QuadForm.from_json({"n": 4, "x1*x2": "1/1", "x3^2": "-2/1"})
    assert sparse == monos(4, {(0, 1): 1, (2, 2): -2})


def test_express_in_space_roundtrip():
    from qsg.linalg import matmul, transpose
    rng = random.Random(21)
    for _ in range(50):
        Q = rand_quad(rng, 5)
        W = span_sum(5, [Q.minimal_space(), rand_subspace(rng, 5, 1)])
        E = Q.express_in_space(W)
        P = [list(r) for r in W.basis]
        back = matmul(matmul(transpose(P), [list(r) for r in E.mat]), P)
        assert back == [list(r) for r in Q.mat]


def test_evaluate():
    Q = monos(3, {(0, 1): 1, (2, 2): 1})
    assert Q.evaluate([mpq(2), mpq(3), mpq(1)]) == 7
    assert Q.evaluate([mpq(1), mpq(0), mpq(0)]) == 0
