"""Decision layer for quadratic triples: exact membership C in radical<A,B>,
the three-case classification of such triples (span / pencil square /
common 2-dim linear-form space), the strengthened case-(iii) decomposition,
and its uniqueness consequences.

Fast paths are accelerators; the Groebner engine is the ground truth and any
disagreement raises InternalAuthorityError."""

import random
from itertools import combinations

from .errors import (BudgetExhausted, InternalAuthorityError,
                     PaperAssertionFailure, PreconditionError,
                     WitnessUnavailable)
from .groebner import (Poly, buchberger, is_proper, quadform_to_poly,
                       rabinowitsch)
from .linalg import (Subspace, invert, kernel_basis, matmul, represent,
                     span_sum, transpose)
from .pencils import low_rank_locus, squares_in_pencil
from .quadforms import (QuadForm, divides_linear, factor_quadratic, lin_mul,
                        lin_square)
from .scalars import ZERO, ONE, ext_tag, q, sqrt_in_context
from .unipoly import factor_roots, padd, pmul, pneg, trim


# ----------------------------------------------------------------- case (i)

def case_i(A, B, C):
    """Coefficients (alpha, beta) with C = alpha*A + beta*B, or None."""
    co = represent([A.coeff_vector(), B.coeff_vector()],
                   list(C.coeff_vector()))
    return None if co is None else (co[0], co[1])


# ---------------------------------------------------- radical via a square

def radical_with_linear(C, A, ell):
    """Exact decision of C in radical<A, ell> for a linear form ell."""
    L = Subspace(C.n, [list(ell)])
    if L.dim == 0:
        raise PreconditionError("zero linear form")
    Abar = A.restrict(L)
    Cbar = C.restrict(L)
    if Cbar.is_zero():
        return True
    if Abar.is_zero():
        return False
    r = Abar.rank()
    if r >= 2:
        # radical(Abar) in degree 2 is just multiples of Abar
        return represent([Abar.coeff_vector()],
                         list(Cbar.coeff_vector())) is not None
    # Abar = c * u^2: membership means u divides Cbar
    return Cbar.in_ideal(Abar.minimal_space())


def _single_generator(C, B):
    """C in radical<B> for one nonzero quadratic B."""
    if B.rank() >= 2 or B.is_irreducible():
        return represent([B.coeff_vector()], list(C.coeff_vector())) \
            is not None
    _, l1, _ = factor_quadratic(B)  # rank 1: B = c * l1^2
    return divides_linear(l1, C)


# -------------------------------------------------------- refutation sampler

def _poly_det(rows):
    """Determinant of a small matrix of univariate polynomials (coeff lists)."""
    k = len(rows)
    if k == 1:
        return rows[0][0]
    acc = []
    for j in range(k):
        e = rows[0][j]
        if not trim(list(e)):
            continue
        minor = [r[:j] + r[j + 1:] for r in rows[1:]]
        term = pmul(e, _poly_det(minor))
        acc = padd(acc, term if j % 2 == 0 else pneg(term))
    return acc


def _bivariate(Q, point, i, j):
    """Q with all variables fixed except x_i, x_j: polys in x_i indexed by
    the power of x_j (degrees <= 2)."""
    n = Q.n
    out = []  # out[dj] = coeff list in x_i
    fixed = list(point)
    fixed[i] = ZERO
    fixed[j] = ZERO
    # expand Q(f + xi e_i + xj e_j)
    Mf = [sum(Q.mat[a][b] * fixed[b] for b in range(n)) for a in range(n)]
    const = sum(fixed[a] * Mf[a] for a in range(n))
    ci = 2 * Mf[i]
    cj = 2 * Mf[j]
    out = [
        [const, ci, Q.mat[i][i]],            # xj^0: const + ci*xi + aii*xi^2
        [cj, 2 * Q.mat[i][j]],               # xj^1
        [Q.mat[j][j]],                       # xj^2
    ]
    return [trim(list(p)) for p in out]


def _solve_quadratic(a2, a1, a0, d_allowed):
    """Roots of a2 t^2 + a1 t + a0 inside Q(sqrt(d_allowed))."""
    if a2 == 0:
        if a1 == 0:
            return []
        return [-a0 / a1]
    disc = a1 * a1 - 4 * a2 * a0
    try:
        root = sqrt_in_context(disc, d_allowed) if disc != 0 else ZERO
    except WitnessUnavailable:
        return []
    return [(-a1 + root) / (2 * a2), (-a1 - root) / (2 * a2)]


def _peval_list(p, x):
    acc = ZERO
    for c in reversed(p):
        acc = acc * x + c
    return acc


def refutation_sample(C, A, B, tries=40, seed=0):
    """An exact point with A = B = 0 but C != 0, or None.

    Fixes all but two coordinates at small rationals, eliminates one of the
    two remaining by a resultant, and solves exactly (one quadratic
    extension allowed)."""
    n = C.n
    rng = random.Random(seed)
    for trial in range(tries):
        if n < 2:
            return None
        i, j = sorted(rng.sample(range(n), 2))
        point = [q(rng.randint(-3, 3)) for _ in range(n)]
        pa = _bivariate(A, point, i, j)
        pb = _bivariate(B, point, i, j)
        da = max((t for t, p in enumerate(pa) if p), default=-1)
        db = max((t for t, p in enumerate(pb) if p), default=-1)
        if da < 1 or db < 1:
            continue  # no x_j dependence to eliminate this round
        rows = []
        for t in range(db):
            rows.append([[] for _ in range(t)] + list(reversed(pa[:da + 1]))
                        + [[] for _ in range(db - 1 - t)])
        for t in range(da):
            rows.append([[] for _ in range(t)] + list(reversed(pb[:db + 1]))
                        + [[] for _ in range(da - 1 - t)])
        res = _poly_det(rows)
        if not res:
            continue  # common component in x_j; resample
        roots, _ = factor_roots(res)
        for xi in roots:
            d_ctx = ext_tag(xi)
            a2 = _peval_list(pa[2], xi) if len(pa) > 2 else ZERO
            a1 = _peval_list(pa[1], xi) if len(pa) > 1 else ZERO
            a0 = _peval_list(pa[0], xi)
            for xj in _solve_quadratic(a2, a1, a0, d_ctx):
                pt = list(point)
                pt[i] = xi
                pt[j] = xj
                if A.evaluate(pt) == 0 and B.evaluate(pt) == 0 \
                        and C.evaluate(pt) != 0:
                    return pt
    return None


# ----------------------------------------------------------- degree ladder

def _mono_list(nvars, deg):
    if deg == 0:
        return [(0,) * nvars]
    out = []
    for m in _mono_list(nvars, deg - 1):
        last = next((t for t in range(nvars - 1, -1, -1) if m[t]), 0)
        for t in range(last, nvars):
            mm = list(m)
            mm[t] += 1
            out.append(tuple(mm))
    return out


def degree_ladder(C, A, B, k_max=3, cell_cap=400000):
    """YES-only accelerator: C^k = P*A + Q*B solvable by a linear system in
    the degree-2k slice for some k <= k_max."""
    nv = C.n
    pa, pb, pc = quadform_to_poly(A), quadform_to_poly(B), quadform_to_poly(C)
    ck = pc
    for k in range(1, k_max + 1):
        if k > 1:
            ck = ck * pc
        cof = _mono_list(nv, 2 * k - 2)
        target_monos = _mono_list(nv, 2 * k)
        if 2 * len(cof) * len(target_monos) > cell_cap:
            return False
        idx = {m: t for t, m in enumerate(target_monos)}
        cols = []
        for gen in (pa, pb):
            for m in cof:
                col = [ZERO] * len(target_monos)
                for gm, gc in gen.terms.items():
                    mm = tuple(x + y for x, y in zip(gm, m))
                    col[idx[mm]] = col[idx[mm]] + gc
                cols.append(col)
        target = [ZERO] * len(target_monos)
        for m, c in ck.terms.items():
            target[idx[m]] = c
        if represent(cols, target) is not None:
            return True
    return False


# --------------------------------------------------------- main membership

def radical_membership(C, A, B, budget=200000, k_max=3, cross_check=False,
                       tries=40):
    """Decide C in radical<A, B> for homogeneous quadratics.

    Returns {"decision": "yes"|"no"|"undecided", "method": str,
    "witness": point or coefficients or None}.  Accelerated paths are exact;
    the Groebner Rabinowitsch test is the authority of last resort.
    """
    if A.is_zero() and B.is_zero():
        raise PreconditionError("radical_membership with A = B = 0")
    if C.is_zero():
        return {"decision": "yes", "method": "zero", "witness": None}
    n = A.n
    W = span_sum(n, [A.minimal_space(), B.minimal_space(),
                     C.minimal_space()])
    Aw = A.express_in_space(W) if not A.is_zero() else QuadForm.zero(W.dim)
    Bw = B.express_in_space(W) if not B.is_zero() else QuadForm.zero(W.dim)
    Cw = C.express_in_space(W)
    out = _membership_restricted(Cw, Aw, Bw, budget, k_max, tries)
    if cross_check and out["decision"] in ("yes", "no") \
            and out["method"] != "rabinowitsch":
        ref = _rabinowitsch_decide(Cw, Aw, Bw, budget)
        if ref is not None and ref != (out["decision"] == "yes"):
            raise InternalAuthorityError(
                f"fast path {out['method']} disagrees with the oracle")
    return out


def _rabinowitsch_decide(Cw, Aw, Bw, budget):
    try:
        return rabinowitsch(quadform_to_poly(Cw), quadform_to_poly(Aw),
                            quadform_to_poly(Bw), budget)
    except BudgetExhausted:
        return None


def _membership_restricted(Cw, Aw, Bw, budget, k_max, tries):
    if Aw.is_zero() or Bw.is_zero():
        base = Bw if Aw.is_zero() else Aw
        yes = _single_generator(Cw, base)
        return {"decision": "yes" if yes else "no",
                "method": "single_generator", "witness": None}
    co = case_i(Aw, Bw, Cw)
    if co is not None:
        return {"decision": "yes", "method": "case_i",
                "witness": (str(co[0]), str(co[1]))}
    dep = represent([Aw.coeff_vector()], list(Bw.coeff_vector()))
    if dep is not None:  # B = c*A: single-generator ideal
        yes = _single_generator(Cw, Aw)
        return {"decision": "yes" if yes else "no",
                "method": "single_generator", "witness": None}
    roots, whole = squares_in_pencil(Aw, Bw)
    if whole:
        return _whole_degenerate(Cw, Aw, Bw)
    for rt in roots:
        if rt.beta != 0:
            yes = radical_with_linear(Cw, Aw, rt.ell)
        else:
            yes = radical_with_linear(Cw, Bw, rt.ell)
        return {"decision": "yes" if yes else "no",
                "method": "square_pencil",
                "witness": [str(x) for x in rt.ell]}
    pt = refutation_sample(Cw, Aw, Bw, tries=tries)
    if pt is not None:
        return {"decision": "no", "method": "sampler_point",
                "witness": [str(x) for x in pt]}
    if degree_ladder(Cw, Aw, Bw, k_max):
        return {"decision": "yes", "method": "degree_ladder",
                "witness": None}
    ref = _rabinowitsch_decide(Cw, Aw, Bw, budget)
    if ref is None:
        return {"decision": "undecided", "method": "rabinowitsch",
                "witness": None}
    return {"decision": "yes" if ref else "no", "method": "rabinowitsch",
            "witness": None}


def _whole_degenerate(Cw, Aw, Bw):
    """Both generators are squares on lines (whole pencil rank <= 1)."""
    lines = []
    for F in (Aw, Bw):
        if not F.is_zero():
            _, l1, _ = factor_quadratic(F)
            lines.append(l1)
    V = Subspace(Cw.n, [list(l) for l in lines])
    yes = Cw.in_ideal(V)
    return {"decision": "yes" if yes else "no", "method": "degenerate_line",
            "witness": None}


# -------------------------------------------------------- case (iii) decide

def _quotient_setup(A, B):
    """Restrict to W = MS(A)+MS(B), quotient by the common kernel.

    Returns (Aq, Bq, pullback) with pullback the q x n matrix whose rows are
    the quotient coordinate forms on the original variables."""
    n = A.n
    W = span_sum(n, [A.minimal_space(), B.minimal_space()])
    Aw = A.express_in_space(W)
    Bw = B.express_in_space(W)
    r = W.dim
    stacked = [list(row) for row in Aw.mat] + [list(row) for row in Bw.mat]
    K = Subspace(r, kernel_basis(stacked, r))
    comp = K.annihilator()
    cols = [list(b) for b in comp.basis]
    Aq = Aw.substitute(cols)
    Bq = Bw.substitute(cols)
    G = [list(b) for b in K.basis] + cols
    T = invert(transpose(G))[K.dim:]
    PW = [list(b) for b in W.basis]
    pullback = matmul(T, PW)
    return Aq, Bq, pullback


def _pad_to_dim2(U, n):
    for t in range(n):
        if U.dim >= 2:
            return U
        ev = [ZERO] * n
        ev[t] = ONE
        cand = U.sum(Subspace(n, [ev]))
        if cand.dim > U.dim:
            U = cand
    return U


def _verify_u(A, B, U):
    return U.dim == 2 and A.in_ideal(U) and B.in_ideal(U)


def _conic_common_point(Aq, Bq):
    """A common zero of two ternary quadratics, within one quadratic
    extension, or None when the witness lies beyond it.

    Eliminates y3 by a resultant along the pencil of lines y2 = t*y1
    (plus the line y1 = 0), then solves the remaining quadratic exactly."""

    def try_point(y1, y2):
        a0 = (Aq.mat[0][0] * y1 * y1 + 2 * Aq.mat[0][1] * y1 * y2
              + Aq.mat[1][1] * y2 * y2)
        a1 = 2 * (Aq.mat[0][2] * y1 + Aq.mat[1][2] * y2)
        a2 = Aq.mat[2][2]
        for y3 in _solve_quadratic(a2, a1, a0, None):
            pt = [y1, y2, y3]
            if Bq.evaluate(pt) == 0 and Aq.evaluate(pt) == 0:
                return pt
        if a2 == 0 and a1 == 0 and a0 == 0:
            # the whole line (y1, y2, *) lies on Aq; scan Bq along it
            b0 = (Bq.mat[0][0] * y1 * y1 + 2 * Bq.mat[0][1] * y1 * y2
                  + Bq.mat[1][1] * y2 * y2)
            b1 = 2 * (Bq.mat[0][2] * y1 + Bq.mat[1][2] * y2)
            b2 = Bq.mat[2][2]
            for y3 in _solve_quadratic(b2, b1, b0, None):
                return [y1, y2, y3]
            if b2 == 0 and b1 == 0 and b0 == 0:
                return [y1, y2, ZERO]
        return None

    # resultant of the two conics in y3 is a quartic binary form in (y1, y2)
    pa = [
        [Aq.mat[0][0], 2 * Aq.mat[0][1], Aq.mat[1][1]],
        [2 * Aq.mat[0][2], 2 * Aq.mat[1][2]],
        [Aq.mat[2][2]],
    ]
    pb = [
        [Bq.mat[0][0], 2 * Bq.mat[0][1], Bq.mat[1][1]],
        [2 * Bq.mat[0][2], 2 * Bq.mat[1][2]],
        [Bq.mat[2][2]],
    ]
    # pa[k] = coefficient of y3^k as a poly in t where (y1, y2) = (1, t)
    da = max((t for t in range(3) if trim(list(pa[t]))), default=-1)
    db = max((t for t in range(3) if trim(list(pb[t]))), default=-1)
    candidates = [(ONE, q(t)) for t in range(-8, 9)] + [(ZERO, ONE)]
    if da >= 1 and db >= 1:
        rows = []
        for t in range(db):
            rows.append([[] for _ in range(t)] + list(reversed(pa[:da + 1]))
                        + [[] for _ in range(db - 1 - t)])
        for t in range(da):
            rows.append([[] for _ in range(t)] + list(reversed(pb[:db + 1]))
                        + [[] for _ in range(da - 1 - t)])
        res = _poly_det(rows)
        if res:
            roots, _ = factor_roots(res)
            candidates = [(ONE, r) for r in roots
                          if ext_tag(r) is None] + candidates
    for y1, y2 in candidates:
        pt = try_point(y1, y2)
        if pt is not None:
            return pt
    return None


def case_iii_decide(A, B, budget=200000):
    """Existence of a 2-dim space U of linear forms with A, B in <U>.

    Returns {"decision": "yes"|"no"|"undecided", "witness": Subspace|None,
    "witness_status": "ok"|"unavailable"|"none"}."""
    n = A.n
    if A.is_zero() or B.is_zero():
        raise PreconditionError("case_iii_decide needs nonzero forms")
    if A.rank() > 4 or B.rank() > 4:
        return {"decision": "no", "witness": None, "witness_status": "none"}
    Aq, Bq, pull = _quotient_setup(A, B)
    qd = Aq.n
    if qd <= 2:
        U = _pad_to_dim2(Subspace(n, [list(r) for r in pull]), n)
        if not _verify_u(A, B, U):
            raise PaperAssertionFailure("quotient-dim<=2 witness invalid", {})
        return {"decision": "yes", "witness": U, "witness_status": "ok"}
    if qd == 3:
        s = _conic_common_point(Aq, Bq)
        if s is None:
            return {"decision": "yes", "witness": None,
                    "witness_status": "unavailable"}
        ann = Subspace(3, [list(s)]).annihilator()
        U = Subspace(n, matmul([list(r) for r in ann.basis], pull))
        if not _verify_u(A, B, U):
            raise PaperAssertionFailure("conic-point witness invalid", {})
        return {"decision": "yes", "witness": U, "witness_status": "ok"}
    # q >= 4: heuristics, then exhaustive pivot-pattern solvability
    for U in _u_candidates(A, B):
        if _verify_u(A, B, U):
            return {"decision": "yes", "witness": U, "witness_status": "ok"}
    try:
        yes = _isotropic_exists(Aq, Bq, budget)
    except BudgetExhausted:
        return {"decision": "undecided", "witness": None,
                "witness_status": "none"}
    return {"decision": "yes" if yes else "no", "witness": None,
            "witness_status": "unavailable" if yes else "none"}


def _u_candidates(A, B):
    n = A.n
    inter = A.minimal_space().intersection(B.minimal_space())
    if inter.dim == 2:
        yield inter
    try:
        loc = low_rank_locus(A, B, 1)
    except PreconditionError:
        loc = {"roots": [], "whole_pencil": False}
    for rt in loc["roots"]:
        G = A.scale(rt.alpha) + B.scale(rt.beta)
        if G.is_zero() or G.rank() > 2:
            continue
        try:
            _, l1, l2 = factor_quadratic(G)
        except WitnessUnavailable:
            continue
        U = Subspace(n, [list(l1), list(l2)])
        if U.dim == 2:
            yield U


def _isotropic_exists(Aq, Bq, budget):
    """Does a (q-2)-dim subspace exist on which both forms vanish (over C)?
    Parametrized in reduced echelon form per pivot pattern; solvability is
    ideal properness of the resulting quadratic system."""
    qd = Aq.n
    k = qd - 2
    for pattern in combinations(range(qd), k):
        free_cells = []
        for r, p in enumerate(pattern):
            for col in range(p + 1, qd):
                if col not in pattern:
                    free_cells.append((r, col))
        nv = len(free_cells)
        cell_idx = {cell: t for t, cell in enumerate(free_cells)}

        def row_vec(r):
            vec = []
            for col in range(qd):
                if col == pattern[r]:
                    vec.append(Poly.constant(nv, ONE))
                elif (r, col) in cell_idx:
                    vec.append(Poly.variable(nv, cell_idx[(r, col)]))
                else:
                    vec.append(Poly.zero(nv))
            return vec
        rowsP = [row_vec(r) for r in range(k)]
        gens = []
        for M in (Aq.mat, Bq.mat):
            for i in range(k):
                for j in range(i, k):
                    acc = Poly.zero(nv)
                    for a in range(qd):
                        for b in range(qd):
                            if M[a][b] == 0:
                                continue
                            acc = acc + (rowsP[i][a] * rowsP[j][b]).scale(
                                M[a][b])
                    gens.append(acc)
        basis = buchberger(gens, "grevlex", budget)
        if is_proper(basis):
            return True
    return False


# ----------------------------------------------------------- classification

class PairClassification:
    """Which of the three structure cases hold for a confirmed triple."""

    __slots__ = ("case_i", "coefficients", "case_ii", "squares", "case_iii",
                 "witness_u", "undetermined", "exclusive")

    def __init__(self, case_i_, coefficients, case_ii, squares, case_iii,
                 witness_u, undetermined):
        self.case_i = case_i_
        self.coefficients = coefficients
        self.case_ii = case_ii
        self.squares = squares
        self.case_iii = case_iii
        self.witness_u = witness_u
        self.undetermined = undetermined
        flags = [case_i_, case_ii, case_iii]
        self.exclusive = {
            "case_i": case_i_ and not (case_ii or case_iii or undetermined),
            "case_ii": case_ii and not (case_i_ or case_iii or undetermined),
            "case_iii": case_iii and not (case_i_ or case_ii),
        }

    def cases(self):
        out = []
        if self.case_i:
            out.append("i")
        if self.case_ii:
            out.append("ii")
        if self.case_iii:
            out.append("iii")
        return out

    def to_json(self):
        return {
            "case_i": self.case_i,
            "coefficients": [str(c) for c in self.coefficients]
            if self.coefficients else None,
            "case_ii": self.case_ii,
            "squares": [[str(r.alpha), str(r.beta)] for r in self.squares],
            "case_iii": self.case_iii,
            "witness_u": self.witness_u.to_json() if self.witness_u else None,
            "undetermined": self.undetermined,
            "exclusive": self.exclusive,
        }


def classify_triple(A, B, C, budget=200000, membership=None):
    """Full case flags for a triple with C in radical<A, B>.

    Raises PaperAssertionFailure when no case holds although membership was
    confirmed (the structure-theorem completeness check)."""
    if membership is None:
        membership = radical_membership(C, A, B, budget)
    if membership["decision"] != "yes":
        raise PreconditionError(
            f"classify_triple requires a confirmed triple, "
            f"got {membership['decision']}")
    co = case_i(A, B, C)
    roots, whole = squares_in_pencil(A, B)
    has_square = whole or bool(roots)
    decision = case_iii_decide(A, B, budget)
    undetermined = decision["decision"] == "undecided"
    has_u = decision["decision"] == "yes"
    cls = PairClassification(co is not None, co, has_square, roots, has_u,
                             decision["witness"], undetermined)
    if not (cls.case_i or cls.case_ii or cls.case_iii or cls.undetermined):
        raise PaperAssertionFailure(
            "structure trichotomy: no case holds for a confirmed triple",
            {"A": repr(A), "B": repr(B), "C": repr(C)})
    return cls


# ------------------------------------------- strengthened case (iii) shape

class CaseIIIDecomposition:
    """P = c_P(v1*ell + v2^2), Q = c_Q(v1*u - v2^2),
    c_T*T = v2*(ell+u) + alpha*P + beta*Q, all verified symbolically."""

    __slots__ = ("v1", "v2", "ell", "u", "alpha", "beta",
                 "c_p", "c_q", "c_t")

    def __init__(self, v1, v2, ell, u, alpha, beta, c_p, c_q, c_t):
        self.v1 = v1
        self.v2 = v2
        self.ell = ell
        self.u = u
        self.alpha = alpha
        self.beta = beta
        self.c_p = c_p
        self.c_q = c_q
        self.c_t = c_t

    def verify(self, P, Q, T):
        lhs_p = lin_mul(self.v1, self.ell) + lin_square(self.v2)
        lhs_q = lin_mul(self.v1, self.u) - lin_square(self.v2)
        lhs_t = lin_mul(self.v2, [a + b for a, b in zip(self.ell, self.u)]) \
            + P.scale(self.alpha) + Q.scale(self.beta)
        return (P.scale(self.c_p) == lhs_p and Q.scale(self.c_q) == lhs_q
                and T.scale(self.c_t) == lhs_t)


def case3_strong_decompose(P, Q, T, budget=200000):
    """Recover the explicit shape of an exclusive case-(iii) triple."""
    n = P.n
    if Q.minimal_space().contains(P.minimal_space()):
        raise PreconditionError("MS(P) must not be contained in MS(Q)")
    for F in (P, Q, T):
        if not F.is_irreducible():
            raise PreconditionError("decomposition requires irreducible forms")
    loc = low_rank_locus(P, Q, 1)
    cand_pairs = []
    for rt in loc["roots"]:
        if rt.alpha == 0 or rt.beta == 0:
            continue  # irreducibility keeps both coefficients nonzero
        G = P.scale(rt.alpha) + Q.scale(rt.beta)
        if G.rank() != 2:
            continue
        try:
            c, a, b = factor_quadratic(G)
        except WitnessUnavailable:
            continue
        cand_pairs.append((rt, c, a, b))
    for rt, c, a, b in cand_pairs:
        for v1 in (a, b):
            dec = _decompose_with_v1(P, Q, T, v1)
            if dec is not None:
                return dec
    raise WitnessUnavailable(
        "no case-(iii) decomposition within the supported field")


def _decompose_with_v1(P, Q, T, v1):
    n = P.n
    L = Subspace(n, [list(v1)])
    if L.dim == 0:
        return None
    Pbar = P.restrict(L)
    if Pbar.rank() != 1:
        return None
    # P|_{v1=0} = gamma * v2^2 in restricted coordinates; lift v2
    annB = [list(r) for r in L.annihilator().basis]
    Cm = Pbar.mat
    idx = next((t for t in range(Pbar.n) if Cm[t][t] != 0), None)
    if idx is None:
        return None
    gamma = Cm[idx][idx]
    row = [x / gamma for x in Cm[idx]]
    v2 = [sum(row[t] * annB[t][k] for t in range(len(annB)))
          for k in range(n)]
    # scale P by 1/gamma so that the v2^2 coefficient is exactly 1
    c_p = 1 / gamma
    # solve P*c_p - v2^2 = v1*ell for ell (linear solve on matrix entries)
    resid = P.scale(c_p) - lin_square(v2)
    ell = _divide_by_linear(resid, v1)
    if ell is None:
        return None
    # Q side: find c_q, u with c_q*Q = v1*u - v2^2
    c_q, u = _match_q(Q, v1, v2)
    if c_q is None:
        return None
    # T: c_t*T = v2*(ell+u) + alpha*P + beta*Q
    target = lin_mul(v2, [x + y for x, y in zip(ell, u)])
    co = represent([T.coeff_vector(), P.coeff_vector(), Q.coeff_vector()],
                   list(target.coeff_vector()))
    if co is None or co[0] == 0:
        return None
    c_t, alpha, beta = co[0], -co[1], -co[2]
    dec = CaseIIIDecomposition(list(v1), v2, ell, u, alpha, beta,
                               c_p, c_q, c_t)
    return dec if dec.verify(P, Q, T) else None


def _divide_by_linear(F, v1):
    """ell with F = v1*ell, or None; exact linear solve."""
    n = F.n
    cols = []
    for k in range(n):
        ek = [ONE if t == k else ZERO for t in range(n)]
        cols.append(list(lin_mul(v1, ek).coeff_vector()))
    co = represent(cols, list(F.coeff_vector()))
    if co is None:
        return None
    return [co[k] for k in range(n)]


def _match_q(Q, v1, v2):
    """(c_q, u) with Q*c_q = v1*u - v2^2, or (None, None)."""
    n = Q.n
    cols = [list(Q.coeff_vector())]
    for k in range(n):
        ek = [ONE if t == k else ZERO for t in range(n)]
        cols.append([-x for x in lin_mul(v1, ek).coeff_vector()])
    target = [-x for x in lin_square(v2).coeff_vector()]
    co = represent(cols, target)
    if co is None or co[0] == 0:
        return None, None
    return co[0], [co[1 + k] for k in range(n)]


# ------------------------------------------------------------- uniqueness

def unique_T_check(P, Q, Qp, T, Tp, budget=200000):
    """Distinctness consequences for T in radical<P,Q>, T' in radical<P,Q'>.

    Hypotheses are verified; conclusion violations are returned as a
    structured report rather than raised."""
    n = P.n
    R = span_sum(n, [Q.minimal_space(), Qp.minimal_space()])
    if not P.in_ideal(R):
        raise PreconditionError("P must lie in the ideal of MS(Q)+MS(Q')")
    if R.contains(P.minimal_space()):
        raise PreconditionError("MS(P) must not be inside MS(Q)+MS(Q')")
    for X, Y, Z in ((T, P, Q), (Tp, P, Qp)):
        m = radical_membership(X, Y, Z, budget)
        if m["decision"] != "yes":
            raise PreconditionError("membership hypothesis not confirmed")
    for X, Y in ((P, Q), (P, Qp), (Q, Qp), (T, Tp)):
        if represent([X.coeff_vector()], list(Y.coeff_vector())) is not None:
            if (X, Y) != (T, Tp):
                raise PreconditionError("forms must be pairwise independent")
    violations = []
    if represent([T.coeff_vector()], list(Tp.coeff_vector())) is not None:
        violations.append("T and T' are proportional")
    if R.contains(T.minimal_space()):
        violations.append("MS(T) inside MS(Q)+MS(Q')")
    if R.contains(Tp.minimal_space()):
        violations.append("MS(T') inside MS(Q)+MS(Q')")
    return {"ok": not violations, "violations": violations}
