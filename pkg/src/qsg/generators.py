"""Planted-configuration generators.

Each generator emits a Configuration whose radical-triple structure is
known by construction, then measures it: the stored delta is always the
delta_actual reported by the verifier, never an assumed value.
"""

import random

from .errors import GenericityExhausted, PreconditionError
from .pipeline import Configuration, verify_psg
from .quadforms import QuadForm, lin_mul, lin_square
from .scalars import ONE, ZERO, q

_RETRIES = 200


def _unit(n, i):
    return [ONE if t == i else ZERO for t in range(n)]


def _rand_linear(n, rng, lo=3):
    """Random small-integer linear form supported on coordinates lo..n-1."""
    return [ZERO] * (lo - 1) + [q(rng.randint(-4, 4))
                                for _ in range(n - lo + 1)]


def _rand_quadric(n, rng):
    M = [[ZERO] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            c = q(rng.randint(-3, 3))
            if i == j:
                M[i][i] = c
            else:
                M[i][j] = c / 2
                M[j][i] = c / 2
    return QuadForm(n, M)


def _measured(n, forms, seed):
    config = Configuration(n, forms, seed=seed)
    res = verify_psg(config)
    config.delta = res["delta_actual"]
    return config


def _try_build(build, seed):
    rng = random.Random(seed)
    last = None
    for _ in range(_RETRIES):
        try:
            return build(rng)
        except PreconditionError as exc:
            last = exc
    raise GenericityExhausted(
        f"generator filters failed after {_RETRIES} retries: {last}")


def gen_case_iii_template(k, n, seed=0):
    """k x k grid of shared-plane triples: P_i = v1*l_i + v2^2,
    Q_j = v1*u_j - v2^2, and for each cross pair the witness
    T_ij = v2*(l_i + u_j) + P_i, all built on the plane U = <v1, v2>."""
    if n < k + 4:
        raise PreconditionError(f"gen_case_iii_template needs n >= k+4 "
                                f"(got n={n}, k={k})")

    def build(rng):
        v1 = _unit(n, 0)
        v2 = _unit(n, 1)
        ells = [_rand_linear(n, rng) for _ in range(k)]
        us = [_rand_linear(n, rng) for _ in range(k)]
        for ell in ells + us:
            if all(x == 0 for x in ell):
                raise PreconditionError("zero linear form drawn")
        for ell in ells:
            for u in us:
                if all(a + b == 0 for a, b in zip(ell, u)):
                    raise PreconditionError("l_i + u_j vanished")
        P = [lin_mul(v1, ell) + lin_square(v2) for ell in ells]
        Q = [lin_mul(v1, u) - lin_square(v2) for u in us]
        T = []
        for i in range(k):
            for j in range(k):
                su = [a + b for a, b in zip(ells[i], us[j])]
                T.append(lin_mul(v2, su) + P[i])
        return _measured(n, P + Q + T, seed)

    return _try_build(build, seed)


def gen_case_ii_template(k, n, seed=0):
    """k square-pencil triples around one rank >= 6 anchor:
    {A, A + l_i^2, A + l_i*c_i}."""
    if n < 6:
        raise PreconditionError("gen_case_ii_template needs n >= 6 for a "
                                "rank-6 anchor")

    def build(rng):
        A = _rand_quadric(n, rng)
        if A.rank() < 6:
            raise PreconditionError("anchor rank below 6")
        forms = [A]
        for _ in range(k):
            ell = _rand_linear(n, rng, lo=1)
            c = _rand_linear(n, rng, lo=1)
            if all(x == 0 for x in ell) or all(x == 0 for x in c):
                raise PreconditionError("zero linear form drawn")
            forms.append(A + lin_square(ell))
            forms.append(A + lin_mul(ell, c))
        return _measured(n, forms, seed)

    return _try_build(build, seed)


def gen_case_i_pencil(k, n, seed=0):
    """Arithmetic-progression pencil {A + j*B : j = 0..k-1}; any two members
    span each third."""
    if k < 1:
        raise PreconditionError("k must be positive")

    def build(rng):
        A = _rand_quadric(n, rng)
        B = _rand_quadric(n, rng)
        if A.rank() < 3 or B.rank() < 3:
            raise PreconditionError("pencil endpoints reducible")
        forms = [A + B.scale(q(j)) for j in range(k)]
        return _measured(n, forms, seed)

    return _try_build(build, seed)


def mix(configs, noise, seed=0):
    """Union of configurations plus `noise` fresh independent quadrics; the
    resulting delta_actual is measured, never assumed."""
    if not configs:
        raise PreconditionError("mix needs at least one configuration")
    n = configs[0].n
    for c in configs:
        if c.n != n:
            raise PreconditionError("mix requires a common ambient "
                                    "dimension")

    def build(rng):
        forms = [F for c in configs for F in c.forms]
        for _ in range(noise):
            N = _rand_quadric(n, rng)
            if N.rank() < 3:
                raise PreconditionError("noise quadric reducible")
            forms.append(N)
        return _measured(n, forms, seed)

    return _try_build(build, seed)
