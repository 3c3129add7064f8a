"""Minimal exact Groebner engine over Q: Buchberger's algorithm, normal
forms, ideal membership, ideal properness, and Rabinowitsch-trick radical
membership.  Serves as the brute-force authority for the radical decision
procedures; budgets are first-class and exhaustion is reported, never a
truncated wrong answer."""

from gmpy2 import mpq

from .errors import BudgetExhausted, PreconditionError
from .scalars import ZERO, ONE, ext_tag, is_rational, q


# ------------------------------------------------------------ monomial order

def order_key(order, nvars):
    if order == "grevlex":
        def key(m):
            return (sum(m), tuple(-e for e in reversed(m)))
    elif order == "lex":
        def key(m):
            return m
    else:
        raise PreconditionError(f"unknown monomial order {order!r}")
    return key


def mono_mul(a, b):
    return tuple(x + y for x, y in zip(a, b))


def mono_divides(a, b):
    return all(x <= y for x, y in zip(a, b))


def mono_div(a, b):
    return tuple(x - y for x, y in zip(a, b))


def mono_lcm(a, b):
    return tuple(max(x, y) for x, y in zip(a, b))


class Poly:
    """Multivariate polynomial over Q: {exponent tuple: mpq}, fixed order."""

    __slots__ = ("nvars", "terms", "order", "_key")

    def __init__(self, nvars, terms, order="grevlex"):
        self.nvars = nvars
        self.terms = {m: (c if ext_tag(c) is not None else q(c))
                      for m, c in terms.items() if c != 0}
        self.order = order
        self._key = order_key(order, nvars)

    @classmethod
    def zero(cls, nvars, order="grevlex"):
        return cls(nvars, {}, order)

    @classmethod
    def constant(cls, nvars, c, order="grevlex"):
        return cls(nvars, {(0,) * nvars: q(c)}, order)

    @classmethod
    def variable(cls, nvars, i, order="grevlex"):
        m = [0] * nvars
        m[i] = 1
        return cls(nvars, {tuple(m): ONE}, order)

    def is_zero(self):
        return not self.terms

    def _compat(self, other):
        if self.nvars != other.nvars or self.order != other.order:
            raise PreconditionError("mixed variable sets or monomial orders")

    def __add__(self, other):
        self._compat(other)
        t = dict(self.terms)
        for m, c in other.terms.items():
            t[m] = t.get(m, ZERO) + c
        return Poly(self.nvars, t, self.order)

    def __sub__(self, other):
        self._compat(other)
        t = dict(self.terms)
        for m, c in other.terms.items():
            t[m] = t.get(m, ZERO) - c
        return Poly(self.nvars, t, self.order)

    def __neg__(self):
        return Poly(self.nvars, {m: -c for m, c in self.terms.items()},
                    self.order)

    def __mul__(self, other):
        if not isinstance(other, Poly):
            return self.scale(other)
        self._compat(other)
        t = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = mono_mul(m1, m2)
                t[m] = t.get(m, ZERO) + c1 * c2
        return Poly(self.nvars, t, self.order)

    def scale(self, c):
        return Poly(self.nvars, {m: c * v for m, v in self.terms.items()},
                    self.order)

    def lead(self):
        m = max(self.terms, key=self._key)
        return m, self.terms[m]

    def total_degree(self):
        return max((sum(m) for m in self.terms), default=-1)

    def monic(self):
        if self.is_zero():
            return self
        _, c = self.lead()
        return self.scale(1 / c)

    def with_order(self, order):
        return Poly(self.nvars, self.terms, order)

    def __eq__(self, other):
        return (isinstance(other, Poly) and self.nvars == other.nvars
                and self.terms == other.terms)

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def sort_terms(self):
        return sorted(self.terms.items(), key=lambda t: self._key(t[0]),
                      reverse=True)

    def __repr__(self):
        def mono_str(m):
            parts = [f"x{i + 1}" + (f"^{e}" if e > 1 else "")
                     for i, e in enumerate(m) if e]
            return "*".join(parts) or "1"
        terms = [f"{c}*{mono_str(m)}" for m, c in self.sort_terms()]
        return " + ".join(terms) if terms else "0"

    def evaluate(self, point):
        acc = ZERO
        for m, c in self.terms.items():
            v = c
            for i, ei in enumerate(m):
                for _ in range(ei):
                    v = v * point[i]
            acc = acc + v
        return acc


class _Budget:
    __slots__ = ("left",)

    def __init__(self, steps):
        self.left = steps if steps is not None else float("inf")

    def spend(self, k=1):
        self.left -= k
        if self.left < 0:
            raise BudgetExhausted("groebner budget exhausted")


def normal_form(f, basis, budget=None):
    """Full remainder of f on division by basis (deterministic reducer pick:
    smallest index whose leading monomial divides)."""
    bud = budget if isinstance(budget, _Budget) else _Budget(budget)
    key = f._key
    work = dict(f.terms)
    remainder = {}
    leads = [(g.lead(), g) for g in basis if not g.is_zero()]
    while work:
        bud.spend()
        m = max(work, key=key)
        c = work.pop(m)
        if c == 0:
            continue
        hit = None
        for (lm, lc), g in leads:
            if mono_divides(lm, m):
                hit = (lm, lc, g)
                break
        if hit is None:
            remainder[m] = remainder.get(m, ZERO) + c
            continue
        lm, lc, g = hit
        shift = mono_div(m, lm)
        f2 = c / lc
        for gm, gc in g.terms.items():
            mm = mono_mul(gm, shift)
            if mm == m:
                continue
            if mm in remainder:  # cannot happen: mm < m <= previous remainder
                pass
            work[mm] = work.get(mm, ZERO) - f2 * gc
        work.pop(m, None)
    return Poly(f.nvars, remainder, f.order)


def s_poly(f, g):
    (mf, cf), (mg, cg) = f.lead(), g.lead()
    l = mono_lcm(mf, mg)
    return f.scale(1 / cf) * Poly(f.nvars, {mono_div(l, mf): ONE}, f.order) \
        - g.scale(1 / cg) * Poly(g.nvars, {mono_div(l, mg): ONE}, g.order)


def buchberger(gens, order="grevlex", budget=200000):
    """A reduced Groebner basis of the ideal generated by gens.

    Deterministic: normal pair-selection strategy (lcm degree, then indices).
    Raises BudgetExhausted rather than returning a truncated basis.
    """
    gens = [g.with_order(order) if g.order != order else g for g in gens]
    gens = [g for g in gens if not g.is_zero()]
    for g in gens:
        if any(ext_tag(c) is not None for c in g.terms.values()):
            raise PreconditionError(
                "extension coefficients: pass through clear_extension first")
    if not gens:
        return []
    nvars = gens[0].nvars
    bud = _Budget(budget)
    basis = []
    for g in gens:
        r = normal_form(g, basis, bud)
        if not r.is_zero():
            basis.append(r.monic())
    pairs = {(i, j) for i in range(len(basis)) for j in range(i)}

    def pair_key(p):
        i, j = p
        l = mono_lcm(basis[i].lead()[0], basis[j].lead()[0])
        return (sum(l), i, j)

    while pairs:
        bud.spend()
        i, j = min(pairs, key=pair_key)
        pairs.discard((i, j))
        mi, mj = basis[i].lead()[0], basis[j].lead()[0]
        l = mono_lcm(mi, mj)
        if l == mono_mul(mi, mj):
            continue  # coprime leading terms: S-poly reduces to zero
        if any(k not in (i, j)
               and mono_divides(basis[k].lead()[0], l)
               and (max(i, k), min(i, k)) not in pairs
               and (max(j, k), min(j, k)) not in pairs
               for k in range(len(basis))):
            continue  # chain criterion
        r = normal_form(s_poly(basis[i], basis[j]), basis, bud)
        if r.is_zero():
            continue
        basis.append(r.monic())
        t = len(basis) - 1
        pairs.update((t, k) for k in range(t))
    return _reduce_basis(basis, bud)


def _reduce_basis(basis, bud):
    # minimalize: drop members whose LT is divisible by another LT
    basis = sorted(basis, key=lambda g: g._key(g.lead()[0]))
    keep = []
    for i, g in enumerate(basis):
        lm = g.lead()[0]
        if any(mono_divides(h.lead()[0], lm) for j, h in enumerate(basis)
               if j != i and (j < i or h.lead()[0] != lm)):
            continue
        keep.append(g)
    out = []
    for i, g in enumerate(keep):
        others = keep[:i] + keep[i + 1:]
        out.append(normal_form(g, others, bud).monic())
    return sorted(out, key=lambda g: g._key(g.lead()[0]))


def ideal_membership(f, basis, budget=200000):
    return normal_form(f, basis, _Budget(budget)).is_zero()


def is_proper(basis):
    """True unless the basis contains a nonzero constant (ideal = (1))."""
    zero_m = None
    for g in basis:
        if g.is_zero():
            continue
        m, _ = g.lead()
        if zero_m is None:
            zero_m = (0,) * g.nvars
        if m == zero_m:
            return False
    return True


def rabinowitsch(C, A, B, budget=200000):
    """C in radical(<A, B>), decided via 1 in <A, B, 1 - t*C>."""
    nv = C.nvars
    if A.nvars != nv or B.nvars != nv:
        raise PreconditionError("variable count mismatch")
    lift = []
    for g in (A, B):
        lift.append(Poly(nv + 1, {m + (0,): c for m, c in g.terms.items()}))
    one_minus_tc = Poly(nv + 1, {(0,) * (nv + 1): ONE})
    tC = Poly(nv + 1, {m + (1,): c for m, c in C.terms.items()})
    lift.append(one_minus_tc - tC)
    basis = buchberger(lift, "grevlex", budget)
    return not is_proper(basis)


# ------------------------------------------------- rational pre-clearing

def clear_extension(polys):
    """Rewrite polynomials with one quadratic-extension context over Q by
    adjoining a fresh last variable s and the relation s^2 - d.

    Returns (new_polys, relation_or_None); rational inputs pass through
    unchanged (with the extra variable appended when any input needs it).
    """
    d = None
    for p in polys:
        for c in p.terms.values():
            t = ext_tag(c)
            if t is not None:
                if d is not None and d != t:
                    raise PreconditionError("mixed extension contexts")
                d = t
    if d is None:
        return list(polys), None
    nv = polys[0].nvars
    out = []
    for p in polys:
        t = {}
        for m, c in p.terms.items():
            if is_rational(c):
                t[m + (0,)] = t.get(m + (0,), ZERO) + c
            else:
                t[m + (0,)] = t.get(m + (0,), ZERO) + c.a
                t[m + (1,)] = t.get(m + (1,), ZERO) + c.b
        out.append(Poly(nv + 1, t, p.order))
    rel = Poly(nv + 1, {tuple([0] * nv + [2]): ONE,
                        (0,) * (nv + 1): -q(d)})
    return out, rel


# ------------------------------------------------- quadratic-form bridge

def quadform_to_poly(Q, order="grevlex"):
    t = {}
    n = Q.n
    for i in range(n):
        for j in range(i, n):
            c = Q.mat[i][j] if i == j else 2 * Q.mat[i][j]
            if c != 0:
                m = [0] * n
                m[i] += 1
                m[j] += 1
                t[tuple(m)] = c
    return Poly(n, t, order)


def linear_to_poly(v, order="grevlex"):
    n = len(v)
    t = {}
    for i, c in enumerate(v):
        if c != 0:
            m = [0] * n
            m[i] = 1
            t[tuple(m)] = c
    return Poly(n, t, order)
