"""Exact scalars: rationals (gmpy2.mpq) plus one quadratic extension Q(sqrt(d)).

A "number" anywhere in this package is either a plain mpq or a Scalar with a
nonzero irrational part.  Arithmetic that lands back in Q is normalized to a
plain mpq, so extension objects exist only where genuinely needed and equality
is structural.  Mixing two distinct extension tags d is an error, never a
silent coercion.
"""

from gmpy2 import mpq, mpz, isqrt, is_square
from sympy import factorint

from .errors import ExtensionMixError, WitnessUnavailable

QQ = mpq
ZERO = mpq(0)
ONE = mpq(1)


def q(x):
    """Coerce ints / strings / Fractions to mpq."""
    if isinstance(x, type(ZERO)):
        return x
    if isinstance(x, Scalar):
        raise TypeError("extension scalar where a rational was required")
    return mpq(x)


def is_rational(x):
    return not isinstance(x, Scalar)


def squarefree_decompose(n):
    """n = s^2 * d with d squarefree; returns (s, d) for nonzero int n."""
    n = int(n)
    if n == 0:
        raise ValueError("squarefree_decompose(0)")
    sign = 1 if n > 0 else -1
    s = 1
    d = sign
    for p, e in factorint(abs(n)).items():
        s *= p ** (e // 2)
        if e % 2:
            d *= p
    return s, d


def make_scalar(a, b, d):
    """Canonical constructor: collapses to mpq when the sqrt part vanishes."""
    a = q(a)
    b = q(b)
    if b == 0 or d is None:
        return a
    return Scalar(a, b, d)


class Scalar:
    """a + b*sqrt(d) with b != 0, d a squarefree integer != 0, 1."""

    __slots__ = ("a", "b", "d")

    def __init__(self, a, b, d):
        self.a = q(a)
        self.b = q(b)
        self.d = int(d)
        if self.b == 0:
            raise ValueError("rational value must be a plain mpq, not Scalar")
        if self.d in (0, 1):
            raise ValueError("extension tag d must be squarefree and != 0, 1")

    def _coerce(self, other):
        if isinstance(other, Scalar):
            if other.d != self.d:
                raise ExtensionMixError(
                    f"mixing sqrt({self.d}) with sqrt({other.d})")
            return other.a, other.b
        return q(other), ZERO

    def __add__(self, other):
        oa, ob = self._coerce(other)
        return make_scalar(self.a + oa, self.b + ob, self.d)

    __radd__ = __add__

    def __neg__(self):
        return Scalar(-self.a, -self.b, self.d)

    def __sub__(self, other):
        oa, ob = self._coerce(other)
        return make_scalar(self.a - oa, self.b - ob, self.d)

    def __rsub__(self, other):
        oa, ob = self._coerce(other)
        return make_scalar(oa - self.a, ob - self.b, self.d)

    def __mul__(self, other):
        oa, ob = self._coerce(other)
        return make_scalar(self.a * oa + self.b * ob * self.d,
                           self.a * ob + self.b * oa, self.d)

    __rmul__ = __mul__

    def inverse(self):
        n = self.a * self.a - self.b * self.b * self.d
        # n = 0 would mean sqrt(d) rational, impossible for squarefree d != 1.
        return make_scalar(self.a / n, -self.b / n, self.d)

    def __truediv__(self, other):
        if isinstance(other, Scalar):
            return self * other.inverse()
        return make_scalar(self.a / q(other), self.b / q(other), self.d)

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __eq__(self, other):
        if isinstance(other, Scalar):
            return (self.d == other.d and self.a == other.a
                    and self.b == other.b)
        return False  # b != 0, so never equal to a rational

    def __ne__(self, other):
        return not self.__eq__(other)

    def __hash__(self):
        return hash((self.a, self.b, self.d))

    def __bool__(self):
        return True

    def conjugate(self):
        return Scalar(self.a, -self.b, self.d)

    def __repr__(self):
        return f"({self.a} + {self.b}*sqrt({self.d}))"


def conj(x):
    return x.conjugate() if isinstance(x, Scalar) else x


def ext_tag(x):
    return x.d if isinstance(x, Scalar) else None


def join_context(d1, d2):
    if d1 is None:
        return d2
    if d2 is None or d1 == d2:
        return d1
    raise ExtensionMixError(f"mixing sqrt({d1}) with sqrt({d2})")


def context_of(values):
    d = None
    for v in values:
        d = join_context(d, ext_tag(v))
    return d


def sort_key(x):
    """Total deterministic order on numbers (rationals first, then by parts)."""
    if isinstance(x, Scalar):
        return (1, x.d, x.a, x.b)
    return (0, 0, x, ZERO)


def sqrt_scalar(c):
    """Exact sqrt of a nonzero rational: rational when possible, else a
    principal a + b*sqrt(d) representative (positive rational b)."""
    c = q(c)
    if c == 0:
        raise ValueError("sqrt_scalar(0)")
    num = mpz(c.numerator)
    den = mpz(c.denominator)
    m = num * den  # sqrt(c) = sqrt(num*den)/den
    s, d = squarefree_decompose(m)
    if d == 1:
        return mpq(s, den)
    return Scalar(0, mpq(s, den), d)


def sqrt_in_context(c, d_allowed=None):
    """Square root of a number staying inside Q or Q(sqrt(d_allowed)).

    Raises WitnessUnavailable when the root needs a different / deeper
    extension than permitted.
    """
    if is_rational(c):
        r = sqrt_scalar(c) if c != 0 else ZERO
        t = ext_tag(r)
        if t is None or d_allowed is None or t == d_allowed:
            return r
        raise WitnessUnavailable(
            f"sqrt needs Q(sqrt({t})) but context is Q(sqrt({d_allowed}))")
    # c = a + b*sqrt(d); solve (x + y*sqrt(d))^2 = c inside Q(sqrt(d)).
    if d_allowed is not None and d_allowed != c.d:
        raise ExtensionMixError("context mismatch in sqrt_in_context")
    a, b, d = c.a, c.b, c.d
    # x^2 + y^2 d = a, 2xy = b  =>  t = x^2 satisfies t^2 - a t + b^2 d/4 = 0.
    disc = a * a - b * b * d
    if disc < 0 or not is_square(mpz(disc.numerator) * mpz(disc.denominator)):
        raise WitnessUnavailable("sqrt leaves the quadratic extension")
    r = sqrt_scalar(disc)  # rational by the check above
    for t in ((a + r) / 2, (a - r) / 2):
        if t > 0 and is_square(mpz(t.numerator) * mpz(t.denominator)):
            x = sqrt_scalar(t)
            y = b / (2 * x)
            return make_scalar(x, y, d)
    raise WitnessUnavailable("sqrt leaves the quadratic extension")


def rational_to_str(x):
    x = q(x)
    return f"{x.numerator}/{x.denominator}"


def rational_from_str(s):
    if isinstance(s, int):
        return mpq(s)
    if not isinstance(s, str) or "." in s or "e" in s or "E" in s:
        raise ValueError(f"exact rational string required, got {s!r}")
    return mpq(s)


def scalar_to_json(x):
    if is_rational(x):
        return rational_to_str(x)
    return {"a": rational_to_str(x.a), "b": rational_to_str(x.b), "d": x.d}


def scalar_from_json(obj):
    if isinstance(obj, dict):
        return make_scalar(rational_from_str(obj["a"]),
                           rational_from_str(obj["b"]), obj["d"])
    return rational_from_str(obj)
