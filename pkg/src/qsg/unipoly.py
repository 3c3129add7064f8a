"""Dense univariate polynomials over Q (ascending coefficient lists) and
binary-form utilities: gcd, resultants, and root extraction inside at most
one quadratic extension."""

from gmpy2 import mpq
import sympy

from .scalars import ZERO, ONE, q, sqrt_scalar


def trim(p):
    while p and p[-1] == 0:
        p.pop()
    return p


def degree(p):
    return len(p) - 1 if p else -1


def padd(p1, p2):
    n = max(len(p1), len(p2))
    out = [ZERO] * n
    for i, c in enumerate(p1):
        out[i] = out[i] + c
    for i, c in enumerate(p2):
        out[i] = out[i] + c
    return trim(out)


def pneg(p):
    return [-c for c in p]


def pscale(p, c):
    return trim([c * x for x in p])


def pmul(p1, p2):
    if not p1 or not p2:
        return []
    out = [ZERO] * (len(p1) + len(p2) - 1)
    for i, a in enumerate(p1):
        if a == 0:
            continue
        for j, b in enumerate(p2):
            if b != 0:
                out[i + j] = out[i + j] + a * b
    return trim(out)


def pdivmod(p, d):
    if not d:
        raise ZeroDivisionError("poly division by zero")
    r = list(p)
    quo = [ZERO] * max(0, len(p) - len(d) + 1)
    dn = d[-1]
    while len(r) >= len(d) and r:
        c = r[-1] / dn
        k = len(r) - len(d)
        quo[k] = c
        for i, dc in enumerate(d):
            r[k + i] = r[k + i] - c * dc
        trim(r)
    return trim(quo), r


def monic(p):
    return pscale(p, 1 / p[-1]) if p else p


def pgcd(p1, p2):
    a, b = trim(list(p1)), trim(list(p2))
    while b:
        a, b = b, pdivmod(a, b)[1]
    return monic(a)


def peval(p, x):
    acc = ZERO
    for c in reversed(p):
        acc = acc * x + c
    return acc


def to_sympy(p, t):
    return sympy.Poly([sympy.Rational(int(c.numerator), int(c.denominator))
                       for c in reversed(p)], t, domain="QQ")


def factor_roots(p):
    """Roots of p over Q or quadratic extensions of Q.

    Returns (roots, overflow): roots from linear/quadratic irreducible
    factors (each its own extension context); overflow=True when an
    irreducible factor of degree > 2 remains (those roots are beyond the
    supported precision).
    """
    p = trim(list(p))
    if degree(p) < 1:
        return [], False
    roots = []
    overflow = False
    t = sympy.Symbol("t")
    for fac, _mult in to_sympy(p, t).factor_list()[1]:
        cs = [mpq(int(c.p), int(c.q)) for c in
              [sympy.Rational(x) for x in reversed(fac.all_coeffs())]]
        d = degree(cs)
        if d == 1:
            roots.append(-cs[0] / cs[1])
        elif d == 2:
            a2, a1, a0 = cs[2], cs[1], cs[0]
            disc = a1 * a1 - 4 * a2 * a0
            root = sqrt_scalar(disc)  # irreducible => disc not a square
            roots.append((-a1 + root) / (2 * a2))
            roots.append((-a1 - root) / (2 * a2))
        else:
            overflow = True
    return roots, overflow


def resultant(p1, p2):
    """Resultant via the Sylvester matrix (small degrees only)."""
    from .linalg import rref
    m, n = degree(p1), degree(p2)
    if m < 0 or n < 0:
        return ZERO
    if m == 0:
        return p1[0] ** n
    if n == 0:
        return p2[0] ** m
    size = m + n
    rows = []
    for i in range(n):
        row = [ZERO] * size
        for j, c in enumerate(reversed(p1)):
            row[i + j] = c
        rows.append(row)
    for i in range(m):
        row = [ZERO] * size
        for j, c in enumerate(reversed(p2)):
            row[i + j] = c
        rows.append(row)
    return _det(rows)


def _det(rows):
    """Fraction-preserving Gaussian determinant."""
    m = [list(r) for r in rows]
    n = len(m)
    det = ONE
    for c in range(n):
        pr = None
        for i in range(c, n):
            if m[i][c] != 0:
                pr = i
                break
        if pr is None:
            return ZERO
        if pr != c:
            m[c], m[pr] = m[pr], m[c]
            det = -det
        det = det * m[c][c]
        inv = 1 / m[c][c]
        for i in range(c + 1, n):
            if m[i][c] != 0:
                f = m[i][c] * inv
                for j in range(c, n):
                    m[i][j] = m[i][j] - f * m[c][j]
    return det


# ----------------------------------------------------------- binary forms
# A binary form of degree D in (alpha, beta) is a list f[0..D], f[i] the
# coefficient of alpha^i beta^(D-i).

def bin_mul(f, g):
    out = [ZERO] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a == 0:
            continue
        for j, b in enumerate(g):
            if b != 0:
                out[i + j] = out[i + j] + a * b
    return out


def bin_is_zero(f):
    return all(c == 0 for c in f)


def bin_gcd(f, g):
    """GCD of two binary forms, returned as a binary form (monic in alpha)."""
    if bin_is_zero(f):
        return _bin_monic(list(g))
    if bin_is_zero(g):
        return _bin_monic(list(f))
    df, mf = _dehom(f)
    dg, mg = _dehom(g)
    h = pgcd(df, dg)
    mb = min(mf, mg)
    return _bin_monic(list(h) + [ZERO] * mb)


def _dehom(f):
    """f -> (poly in t = alpha at beta = 1, multiplicity of the beta factor).

    Index i of a binary form list is the alpha^i coefficient, so the
    dehomogenization is the same list trimmed; the trailing zeros that were
    trimmed are exactly the power of beta dividing the form.
    """
    p = trim(list(f))
    return p, (len(f) - len(p) if p else 0)


def _bin_monic(f):
    for c in reversed(f):
        if c != 0:
            return [x / c for x in f]
    return f


def bin_roots(f):
    """Projective roots (alpha, beta) of a binary form; also (1, 0) when the
    leading alpha coefficient vanishes.  Returns (roots, overflow)."""
    f = list(f)
    if bin_is_zero(f):
        raise ValueError("zero binary form has the whole line as roots")
    roots = []
    if f[-1] == 0:
        roots.append((ONE, ZERO))
    p, _ = _dehom(f)
    finite, overflow = factor_roots(p)
    roots.extend((r, ONE) for r in finite)
    return roots, overflow
