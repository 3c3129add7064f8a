"""Shared helpers and independent oracles used by the test suite only."""

from itertools import combinations

from gmpy2 import mpq

from qsg.linalg import Subspace
from qsg.quadforms import QuadForm, factor_quadratic, lin_mul


def q(x):
    return mpq(x)


def e(n, i):
    v = [mpq(0)] * n
    v[i] = mpq(1)
    return v


def rand_vec(rng, n, lo=-5, hi=5, nonzero=True):
    while True:
        v = [mpq(rng.randint(lo, hi)) for _ in range(n)]
        if not nonzero or any(x != 0 for x in v):
            return v


def rand_quad(rng, n, lo=-4, hi=4, nonzero=True):
    while True:
        m = [[mpq(0)] * n for _ in range(n)]
        for i in range(n):
            for j in range(i, n):
                c = mpq(rng.randint(lo, hi))
                m[i][j] = c
                m[j][i] = c
        Q = QuadForm(n, m)
        if not nonzero or not Q.is_zero():
            return Q


def rand_quad_of_rank(rng, n, r):
    while True:
        Q = QuadForm.zero(n)
        for _ in range((r + 1) // 2):
            Q = Q + lin_mul(rand_vec(rng, n), rand_vec(rng, n))
        if Q.rank() == r:
            return Q


def rand_subspace(rng, n, dim):
    while True:
        S = Subspace(n, [rand_vec(rng, n) for _ in range(dim)])
        if S.dim == dim:
            return S


# ----------------------------------------------------------------- oracles

def det_cofactor(m):
    """Determinant by cofactor expansion (independent of the rref path)."""
    k = len(m)
    if k == 1:
        return m[0][0]
    acc = mpq(0)
    for j in range(k):
        if m[0][j] == 0:
            continue
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        term = m[0][j] * det_cofactor(minor)
        acc = acc + (term if j % 2 == 0 else -term)
    return acc


def minor_rank(mat):
    """Matrix rank via exhaustive minor enumeration (oracle, n <= ~6)."""
    n = len(mat)
    for k in range(n, 0, -1):
        for rows in combinations(range(n), k):
            for cols in combinations(range(n), k):
                sub = [[mat[i][j] for j in cols] for i in rows]
                if det_cofactor(sub) != 0:
                    return k
    return 0


def splitting_oracle(Q):
    """Explicit product representation oracle for rank_s.

    Diagonalizes Q over Q (Lagrange), pairs the squares, and verifies each
    pair splits as one exact product of linear forms in its own quadratic
    extension.  Returns the number of products; the summed matrix identity
    over Q is re-checked exactly.
    """
    n = Q.n
    M = [list(row) for row in Q.mat]
    squares = []  # (c, w) with Q = sum c * (w.x)^2
    guard = 0
    while any(x != 0 for row in M for x in row):
        guard += 1
        assert guard <= n + 1
        u = None
        for i in range(n):
            if M[i][i] != 0:
                u = e(n, i)
                break
        if u is None:
            done = False
            for i in range(n):
                for j in range(i + 1, n):
                    if M[i][j] != 0:
                        u = e(n, i)
                        u[j] = mpq(1)
                        done = True
                        break
                if done:
                    break
        c = sum(u[i] * sum(M[i][j] * u[j] for j in range(n))
                for i in range(n))
        Mu = [sum(M[i][j] * u[j] for j in range(n)) for i in range(n)]
        w = [x / c for x in Mu]
        squares.append((c, w))
        for i in range(n):
            for j in range(n):
                M[i][j] = M[i][j] - c * w[i] * w[j]
    # pair the squares; each pair is one product of linear forms
    products = 0
    recon = QuadForm.zero(n)
    for t in range(0, len(squares), 2):
        chunk = squares[t:t + 2]
        P = QuadForm.zero(n)
        for c, w in chunk:
            P = P + lin_mul([c * x for x in w], w)
        assert P.rank() <= 2 and not P.is_zero()
        c2, l1, l2 = factor_quadratic(P)  # exact split, own extension
        assert lin_mul([c2 * x for x in l1], l2) == P
        products += 1
        recon = recon + P
    assert recon == Q
    return products


def monos(n, d):
    """QuadForm from {(i, j): coeff} with i <= j, 0-indexed, plain ints ok."""
    return QuadForm.from_monomials(n, {k: mpq(v) for k, v in d.items()})
