"""Homogeneous quadratics as symmetric matrices: rank_s, minimal spaces,
restriction, ideal/ring membership, explicit factorization of reducible
forms, and the z-projection maps with genericity verification."""

from .errors import (AmbientMismatch, GenericityExhausted, PreconditionError,
                     PaperAssertionFailure, WitnessUnavailable)
from .linalg import (Subspace, invert, matmul, rank, represent, rref,
                     span_sum, transpose)
from .scalars import (ZERO, ONE, is_rational, q, scalar_from_json,
                      scalar_to_json, sqrt_in_context)


class QuadForm:
    """Q(x) = x^T M x with M symmetric n x n over Q or Q(sqrt(d))."""

    __slots__ = ("n", "mat", "name", "_rank", "_ms")

    def __init__(self, n, mat, name=None):
        self.n = n
        self.mat = tuple(tuple(row) for row in mat)
        self.name = name
        self._rank = None
        self._ms = None
        if len(self.mat) != n or any(len(r) != n for r in self.mat):
            raise ValueError("matrix shape mismatch")
        for i in range(n):
            for j in range(i + 1, n):
                if self.mat[i][j] != self.mat[j][i]:
                    raise ValueError("matrix must be symmetric")

    # ------------------------------------------------------------ builders
    @classmethod
    def zero(cls, n):
        return cls(n, [[ZERO] * n for _ in range(n)])

    @classmethod
    def from_monomials(cls, n, coeffs, name=None):
        """coeffs: {(i, j): c} 0-indexed, i <= j, c = coefficient of x_i x_j."""
        m = [[ZERO] * n for _ in range(n)]
        for (i, j), c in coeffs.items():
            if i == j:
                m[i][i] = m[i][i] + c
            else:
                i, j = min(i, j), max(i, j)
                half = c / 2
                m[i][j] = m[i][j] + half
                m[j][i] = m[j][i] + half
        return cls(n, m, name=name)

    # ----------------------------------------------------------- structure
    def coeff_vector(self):
        """Monomial coefficients (x_i x_j, i <= j) as a flat tuple."""
        out = []
        for i in range(self.n):
            for j in range(i, self.n):
                out.append(self.mat[i][j] if i == j else 2 * self.mat[i][j])
        return tuple(out)

    @classmethod
    def from_coeff_vector(cls, n, vec):
        it = iter(vec)
        coeffs = {}
        for i in range(n):
            for j in range(i, n):
                coeffs[(i, j)] = next(it)
        return cls.from_monomials(n, coeffs)

    def is_zero(self):
        return all(x == 0 for row in self.mat for x in row)

    def canonical(self):
        """Scale so the first nonzero matrix entry (row-major) is 1."""
        for row in self.mat:
            for x in row:
                if x != 0:
                    inv = 1 / x
                    return QuadForm(self.n,
                                    [[inv * y for y in r] for r in self.mat])
        return self

    def key(self):
        return (self.n, self.canonical().mat)

    def rank(self):
        if self._rank is None:
            self._rank = rank(list(self.mat))
        return self._rank

    def rank_s(self):
        return (self.rank() + 1) // 2

    def is_irreducible(self):
        return self.rank() >= 3

    def minimal_space(self):
        """MS(Q): the row space of M."""
        if self._ms is None:
            self._ms = Subspace(self.n, list(self.mat))
        return self._ms

    # ----------------------------------------------------------- arithmetic
    def _check(self, other):
        if self.n != other.n:
            raise AmbientMismatch(f"ambient {self.n} vs {other.n}")

    def __add__(self, other):
        self._check(other)
        return QuadForm(self.n, [[a + b for a, b in zip(r1, r2)]
                                 for r1, r2 in zip(self.mat, other.mat)])

    def __sub__(self, other):
        self._check(other)
        return QuadForm(self.n, [[a - b for a, b in zip(r1, r2)]
                                 for r1, r2 in zip(self.mat, other.mat)])

    def scale(self, c):
        return QuadForm(self.n, [[c * x for x in row] for row in self.mat])

    def __eq__(self, other):
        return (isinstance(other, QuadForm) and self.n == other.n
                and self.mat == other.mat)

    def __hash__(self):
        return hash((self.n, self.mat))

    def evaluate(self, point):
        acc = ZERO
        for i, row in enumerate(self.mat):
            if point[i] == 0:
                continue
            s = sum((row[j] * point[j] for j in range(self.n)
                     if row[j] != 0 and point[j] != 0), ZERO)
            acc = acc + point[i] * s
        return acc

    # ---------------------------------------------------------- restriction
    def substitute(self, cols):
        """Image under the linear substitution x = S y (cols = S as rows of
        S^T, i.e. a list of length-n column vectors)."""
        S = [list(c) for c in zip(*cols)]  # n x k
        M = [list(r) for r in self.mat]
        return QuadForm(len(cols), matmul(matmul(cols, M), S))

    def restrict(self, V):
        """Q|_{V=0} on the fixed annihilator basis of V."""
        if V.n != self.n:
            raise AmbientMismatch("restrict: ambient mismatch")
        B = V.annihilator().basis
        res = self.substitute([list(b) for b in B])
        if res.rank_s() < self.rank_s() - V.dim:
            raise PaperAssertionFailure(
                "rank_s(Q|_{V=0}) >= rank_s(Q) - dim(V)",
                {"rank_s_Q": self.rank_s(), "dim_V": V.dim,
                 "rank_s_res": res.rank_s()})
        return res

    def in_ideal(self, V):
        return self.restrict(V).is_zero()

    def in_ring2(self, V):
        return V.contains(self.minimal_space())

    def express_in_space(self, S):
        """Rewrite Q on the basis of S (requires MS(Q) <= S)."""
        if not S.contains(self.minimal_space()):
            raise PreconditionError("Q is not supported on the given space")
        P = [list(r) for r in S.basis]             # k x n
        Pt = transpose(P)
        G = invert(matmul(P, Pt))                  # (P P^T)^-1, k x k
        C = matmul(matmul(G, matmul(P, [list(r) for r in self.mat])),
                   matmul(Pt, G))
        out = QuadForm(S.dim, C)
        assert matmul(matmul(Pt, [list(r) for r in out.mat]), P) == \
            [list(r) for r in self.mat]
        return out

    # -------------------------------------------------------- serialization
    def to_json(self):
        return {"n": self.n,
                "matrix": [[scalar_to_json(x) for x in row]
                           for row in self.mat]}

    @classmethod
    def from_json(cls, obj):
        n = obj["n"]
        if "matrix" in obj:
            return cls(n, [[scalar_from_json(x) for x in row]
                           for row in obj["matrix"]])
        coeffs = {}
        for key, val in obj.items():
            if key == "n":
                continue
            parts = key.replace("^2", "*" + key.split("^")[0]).split("*")
            if len(parts) == 1:
                parts = parts * 2
            i, j = (int(p.strip().lstrip("x")) - 1 for p in parts)
            if i < 0 or j < 0 or i >= n or j >= n:
                raise ValueError(f"bad monomial {key!r}")
            coeffs[(min(i, j), max(i, j))] = scalar_from_json(val)
        return cls.from_monomials(n, coeffs)

    def __repr__(self):
        terms = []
        for i in range(self.n):
            for j in range(i, self.n):
                c = self.mat[i][j] if i == j else 2 * self.mat[i][j]
                if c != 0:
                    mono = f"x{i+1}^2" if i == j else f"x{i+1}*x{j+1}"
                    terms.append(f"{c}*{mono}")
        return " + ".join(terms) if terms else "0"


def lin_mul(u, v):
    """Product of two linear forms as a QuadForm."""
    n = len(u)
    m = [[(u[i] * v[j] + u[j] * v[i]) / 2 for j in range(n)]
         for i in range(n)]
    return QuadForm(n, m)


def lin_square(u):
    n = len(u)
    return QuadForm(n, [[u[i] * u[j] for j in range(n)] for i in range(n)])


def factor_quadratic(Q, d_allowed=None):
    """Split a rank<=2 form as (c, l1, l2) with Q = c * l1 * l2.

    Factors may live in one quadratic extension; raises WitnessUnavailable
    when a second extension would be required, PreconditionError on
    rank > 2.
    """
    r = Q.rank()
    if r > 2:
        raise PreconditionError("factor_quadratic needs rank <= 2")
    if r == 0:
        raise PreconditionError("factor_quadratic on the zero form")
    ms = Q.minimal_space()
    b = [list(v) for v in ms.basis]
    C = Q.express_in_space(ms).mat
    if r == 1:
        return C[0][0], b[0], b[0]
    p, rr, s = C[0][0], C[0][1], C[1][1]
    if p == 0 and s == 0:
        return 2 * rr, b[0], b[1]
    if p == 0:
        p, s = s, p
        b = [b[1], b[0]]
    disc = rr * rr - p * s
    root = sqrt_in_context(disc, d_allowed) if disc != 0 else ZERO
    tau1 = (-rr + root) / p
    tau2 = (-rr - root) / p
    l1 = [b[0][k] - tau1 * b[1][k] for k in range(Q.n)]
    l2 = [b[0][k] - tau2 * b[1][k] for k in range(Q.n)]
    return p, l1, l2


def divides_linear(ell, Q):
    """Does the linear form ell divide Q (i.e. Q in <ell>)?"""
    return Q.restrict(Subspace(Q.n, [ell])).is_zero()


class ProjectionMap:
    """T_{a,V}: v_i -> a_i * z, u_i -> u_i (u = orthobasis of V^perp).

    Output variables: the n - dim(V) forms u_1.. then z (last).
    """

    __slots__ = ("V", "a", "uperp", "S", "n", "n_out")

    def __init__(self, V, a):
        if V.dim == 0:
            raise PreconditionError("projection needs dim(V) >= 1")
        if len(a) != V.dim:
            raise PreconditionError("need one coefficient per V basis vector")
        self.V = V
        self.a = [q(x) for x in a]
        self.n = V.n
        self.uperp = V.annihilator().basis
        self.n_out = len(self.uperp) + 1
        vb = [list(r) for r in V.basis]
        ub = [list(r) for r in self.uperp]
        full = vb + ub
        S = []
        for k in range(self.n):
            ek = [ONE if t == k else ZERO for t in range(self.n)]
            co = represent(full, ek)
            zc = sum((co[i] * self.a[i] for i in range(V.dim)), ZERO)
            S.append(list(co[V.dim:]) + [zc])
        self.S = S  # n x n_out, row k = image of x_k

    def apply_linear(self, vec):
        out = [ZERO] * self.n_out
        for k in range(self.n):
            if vec[k] != 0:
                for t in range(self.n_out):
                    if self.S[k][t] != 0:
                        out[t] = out[t] + vec[k] * self.S[k][t]
        return out

    def project(self, Q):
        if Q.n != self.n:
            raise AmbientMismatch("project: ambient mismatch")
        img = Q.substitute(transpose(self.S))
        if img.rank_s() < Q.rank_s() - self.V.dim:
            raise PaperAssertionFailure(
                "rank_s(T(Q)) >= rank_s(Q) - dim(V)",
                {"rank_s_Q": Q.rank_s(), "delta": self.V.dim,
                 "rank_s_img": img.rank_s()})
        if Q.in_ideal(self.V):
            z = [ZERO] * self.n_out
            z[-1] = ONE
            zspace = Subspace(self.n_out, [z])
            if Q.in_ring2(self.V):
                if not (img.is_zero() or
                        (img.rank() == 1 and zspace.contains(
                            img.minimal_space()))):
                    raise GenericityExhausted(
                        "image of a C[V]_2 element is not a multiple of z^2")
            else:
                # image must be z * ell with ell independent of z
                if img.is_zero() or img.rank() > 2 or \
                        not divides_linear(z, img) or \
                        zspace.contains(img.minimal_space()):
                    raise GenericityExhausted(
                        "image of an <V>-element is not z*ell with ell != z")
        return img


def common_nonz_factor(F, G, zvec):
    """Is there a common linear factor of F, G outside span(zvec)?

    Complete for F != 0: any common factor of two quadratics is a factor of
    F, and irreducible quadratics have none.
    """
    if F.rank() >= 3 or G.rank() >= 3:
        return False
    c, l1, l2 = factor_quadratic(F)
    zspace = Subspace(F.n, [zvec])
    for ell in (l1, l2):
        if zspace.contains_vector(ell):
            continue
        if divides_linear(ell, G):
            return True
    return False


def genericity_check(T, F, G):
    """Verify the two genericity conclusions for a sampled projection:
    images linearly independent; coprime inputs share only z-factors."""
    if F.canonical() == G.canonical():
        raise PreconditionError("F and G must be linearly independent")
    for Q in (F, G):
        if T.V.contains(Q.minimal_space()):
            raise PreconditionError("MS(F), MS(G) must not lie inside V")
    violations = []
    try:
        Fi, Gi = T.project(F), T.project(G)
    except GenericityExhausted as exc:
        return {"ok": False, "violations": [str(exc)]}
    if represent([Fi.coeff_vector()], list(Gi.coeff_vector())) is not None \
            or Gi.is_zero() or Fi.is_zero():
        violations.append("images linearly dependent")
    zvec = [ZERO] * T.n_out
    zvec[-1] = ONE
    if not _share_factor(F, G) and common_nonz_factor(Fi, Gi, zvec):
        violations.append("images share a non-z factor")
    return {"ok": not violations, "violations": violations}


def _share_factor(F, G):
    """Do F, G themselves share a linear factor (hence are not coprime)?"""
    if F.rank() >= 3 or G.rank() >= 3:
        return False
    try:
        c, l1, l2 = factor_quadratic(F)
    except WitnessUnavailable:
        # factors in a deeper tower; fall back to MS-intersection candidates
        D = F.minimal_space().intersection(G.minimal_space())
        return D.dim > 0 and any(
            divides_linear(list(v), F) and divides_linear(list(v), G)
            for v in D.basis)
    return any(divides_linear(l, G) for l in (l1, l2))


def sample_projection(V, rng, F=None, G=None, retries=5):
    """Draw a ProjectionMap with integer coefficients in [1, 2^16], verifying
    genericity against (F, G) when given; resample <= retries times."""
    last = None
    for _ in range(retries + 1):
        a = [rng.randint(1, 1 << 16) for _ in range(V.dim)]
        T = ProjectionMap(V, a)
        if F is None:
            return T
        rep = genericity_check(T, F, G)
        if rep["ok"]:
            return T
        last = rep
    raise GenericityExhausted(f"no generic draw after {retries} retries: {last}")


def ms_of_set(n, quads):
    return span_sum(n, [Q.minimal_space() for Q in quads])
