"""Exact dense linear algebra over Q or Q(sqrt(d)).

Vectors are lists/tuples of numbers (mpq or Scalar, see scalars.py); matrices
are lists of row vectors.  Everything is deterministic: leftmost pivot,
first-row tie-break.
"""

from .errors import AmbientMismatch
from .scalars import ZERO, ONE, q


def rref(rows):
    """Reduced row-echelon form.  Returns (R, pivot_columns)."""
    m = [list(r) for r in rows]
    if not m:
        return m, []
    ncols = len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        pr = None
        for i in range(r, len(m)):
            if m[i][c] != 0:
                pr = i
                break
        if pr is None:
            continue
        if pr != r:
            m[r], m[pr] = m[pr], m[r]
        p = m[r][c]
        if p != 1:
            inv = 1 / p
            row = m[r]
            for j in range(c, ncols):
                if row[j] != 0:
                    row[j] = row[j] * inv
        row = m[r]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                other = m[i]
                for j in range(c, ncols):
                    if row[j] != 0:
                        other[j] = other[j] - f * row[j]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def rank(rows):
    return len(rref(rows)[1])


def kernel_basis(rows, ncols):
    """Basis of {x : M x = 0}, deterministic (free columns ascending)."""
    R, pivots = rref(rows)
    pivset = set(pivots)
    basis = []
    for j in range(ncols):
        if j in pivset:
            continue
        v = [ZERO] * ncols
        v[j] = ONE
        for i, p in enumerate(pivots):
            if R[i][j] != 0:
                v[p] = -R[i][j]
        basis.append(v)
    return basis


def solve_linear(rows, b):
    """One solution x of M x = b, or None.  Deterministic (free vars = 0)."""
    if not rows:
        return [] if all(x == 0 for x in b) else None
    ncols = len(rows[0])
    aug = [list(r) + [bv] for r, bv in zip(rows, b)]
    R, pivots = rref(aug)
    if ncols in pivots:
        return None  # inconsistent
    x = [ZERO] * ncols
    for i, p in enumerate(pivots):
        x[p] = R[i][ncols]
    return x


def represent(vectors, target):
    """Coefficients c with sum c_i vectors[i] = target, or None."""
    if not vectors:
        return [] if all(x == 0 for x in target) else None
    cols = [[v[j] for v in vectors] for j in range(len(target))]
    return solve_linear(cols, list(target))


def matvec(rows, x):
    return [sum((r[j] * x[j] for j in range(len(x)) if x[j] != 0), ZERO)
            for r in rows]


def matmul(a, b):
    bt = list(zip(*b))
    return [[sum((ra[k] * cb[k] for k in range(len(ra)) if ra[k] != 0), ZERO)
             for cb in bt] for ra in a]


def transpose(rows):
    return [list(c) for c in zip(*rows)]


def identity(n):
    return [[ONE if i == j else ZERO for j in range(n)] for i in range(n)]


def dot(u, v):
    return sum((u[i] * v[i] for i in range(len(u)) if u[i] != 0 and v[i] != 0),
               ZERO)


def vec_sub(u, v):
    return [u[i] - v[i] for i in range(len(u))]


def vec_scale(u, c):
    return [c * x for x in u]


def canonical_vector(v):
    """Scale so the first nonzero entry is 1; None for the zero vector."""
    for x in v:
        if x != 0:
            inv = 1 / x
            return tuple(inv * y for y in v)
    return None


def invert(rows):
    """Inverse of a square matrix, or None if singular."""
    n = len(rows)
    aug = [list(r) + list(e) for r, e in zip(rows, identity(n))]
    R, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        return None
    return [r[n:] for r in R]


class Subspace:
    """A space of linear forms: reduced row-echelon basis of coefficient rows."""

    __slots__ = ("n", "basis")

    def __init__(self, n, basis_rows=(), _canonical=False):
        self.n = n
        if _canonical:
            self.basis = tuple(tuple(r) for r in basis_rows)
            return
        R, pivots = rref(list(basis_rows))
        self.basis = tuple(tuple(R[i]) for i in range(len(pivots)))

    @classmethod
    def zero(cls, n):
        return cls(n, (), _canonical=True)

    @classmethod
    def full(cls, n):
        return cls(n, identity(n), _canonical=True)

    @property
    def dim(self):
        return len(self.basis)

    def _check(self, other):
        if self.n != other.n:
            raise AmbientMismatch(f"ambient {self.n} vs {other.n}")

    def contains_vector(self, v):
        if len(v) != self.n:
            raise AmbientMismatch("vector length mismatch")
        return represent(self.basis, v) is not None if self.basis \
            else all(x == 0 for x in v)

    def coordinates(self, v):
        return represent(self.basis, v)

    def contains(self, other):
        self._check(other)
        return all(self.contains_vector(r) for r in other.basis)

    def sum(self, other):
        self._check(other)
        return Subspace(self.n, list(self.basis) + list(other.basis))

    def intersection(self, other):
        self._check(other)
        return self.annihilator().sum(other.annihilator()).annihilator()

    def annihilator(self):
        """Forms/points x with v . x = 0 for every basis form v."""
        if not self.basis:
            return Subspace.full(self.n)
        return Subspace(self.n, kernel_basis(list(self.basis), self.n))

    def key(self):
        return (self.n, self.basis)

    def __eq__(self, other):
        return isinstance(other, Subspace) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"Subspace(n={self.n}, dim={self.dim})"

    def to_json(self):
        from .scalars import scalar_to_json
        return {"n": self.n,
                "basis": [[scalar_to_json(x) for x in row]
                          for row in self.basis]}

    @classmethod
    def from_json(cls, obj):
        from .scalars import scalar_from_json
        return cls(obj["n"],
                   [[scalar_from_json(x) for x in row]
                    for row in obj["basis"]])


def span_sum(n, subspaces):
    rows = []
    for s in subspaces:
        rows.extend(s.basis)
    return Subspace(n, rows)
