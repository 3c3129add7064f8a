"""Certifying decomposition of robust Sylvester-Gallai configurations of
quadratics.

Stages: neighbor-graph construction (verify_psg), the three-way partition,
the two reductions (square-neighbor compression and low-rank-ideal
absorption), the J-set construction, the four-set partition, the two
shrinking loops, and certificate finalization.  Every counting step of the
underlying argument is asserted at runtime on the concrete instance;
violations surface as PaperAssertionFailure reports, never silent
truncation.
"""

import random

from .errors import (BudgetExhausted, InternalAuthorityError,
                     PaperAssertionFailure, PreconditionError)
from .linalg import Subspace, matmul, rank, rref, span_sum
from .pencils import combo, low_rank_locus, min_rank_completion, \
    squares_in_pencil
from .quadforms import QuadForm, lin_mul, ms_of_set, sample_projection
from .radical import case_iii_decide, radical_membership
from .scalars import ONE, ZERO, conj, ext_tag, q, rational_to_str
from .sg import PointSet, dsw_check, fractional_cut, line_groups, \
    robust_sg_mod_subspace, sg_delta


# ------------------------------------------------------------- configuration

class Configuration:
    """A finite set of pairwise independent irreducible quadratics."""

    __slots__ = ("n", "forms", "delta", "seed")

    def __init__(self, n, forms, delta=None, seed=0):
        self.n = n
        self.forms = list(forms)
        self.delta = None if delta is None else q(delta)
        self.seed = seed
        seen = {}
        for idx, F in enumerate(self.forms):
            if F.n != n:
                raise PreconditionError(f"form {idx}: ambient mismatch")
            if F.rank() < 3:
                raise PreconditionError(f"form {idx} is reducible (rank "
                                        f"{F.rank()} < 3)")
            key = F.key()
            if key in seen:
                raise PreconditionError(
                    f"forms {seen[key]} and {idx} are proportional")
            seen[key] = idx

    @property
    def m(self):
        return len(self.forms)

    def coeff_vectors(self):
        return [list(F.coeff_vector()) for F in self.forms]

    def to_json(self):
        return {"n": self.n,
                "delta": None if self.delta is None
                else rational_to_str(self.delta),
                "seed": self.seed,
                "forms": [F.to_json() for F in self.forms]}

    @classmethod
    def from_json(cls, obj):
        delta = obj.get("delta")
        return cls(obj["n"], [QuadForm.from_json(f) for f in obj["forms"]],
                   delta=delta, seed=obj.get("seed", 0))

    def __repr__(self):
        return f"Configuration(n={self.n}, m={self.m})"


# ----------------------------------------------------------- span machinery

class _Span:
    """Row space with O(rows * width) membership tests via a frozen rref."""

    __slots__ = ("rows", "pivots")

    def __init__(self, rows):
        R, piv = rref([list(r) for r in rows])
        self.rows = [R[i] for i in range(len(piv))]
        self.pivots = piv

    @property
    def dim(self):
        return len(self.pivots)

    def reduce(self, vec):
        v = list(vec)
        for row, p in zip(self.rows, self.pivots):
            if v[p] != 0:
                c = v[p]
                for t in range(p, len(v)):
                    if row[t] != 0:
                        v[t] = v[t] - c * row[t]
        return v

    def contains(self, vec):
        return all(x == 0 for x in self.reduce(vec))


def ring2_rows(V):
    """Coefficient vectors of a spanning set of C[V]_2 (products of basis
    forms)."""
    rows = []
    b = [list(r) for r in V.basis]
    for i in range(len(b)):
        for j in range(i, len(b)):
            rows.append(list(lin_mul(b[i], b[j]).coeff_vector()))
    return rows


def ideal2_rows(V, n):
    """Coefficient vectors spanning the degree-2 slice of the ideal <V>."""
    rows = []
    for v in V.basis:
        for t in range(n):
            e = [ONE if s == t else ZERO for s in range(n)]
            rows.append(list(lin_mul(list(v), e).coeff_vector()))
    return rows


def _rational_ms(F):
    """Smallest Q-rational space containing MS(F): split each basis vector
    into its rational part and its sqrt-coefficient part (conjugation
    closure)."""
    rows = []
    for r in F.minimal_space().basis:
        ra, rb = [], []
        for x in r:
            if ext_tag(x) is None:
                ra.append(q(x))
                rb.append(q(0))
            else:
                ra.append(x.a)
                rb.append(x.b)
        rows.append(ra)
        rows.append(rb)
    return Subspace(F.n, rows)


# ------------------------------------------------------------ neighbor graph

class NeighborGraph:
    """Undirected radical-triple graph with per-edge case labels.

    edges: {(i, j) with i < j: {"cases": frozenset of "i"/"ii"/"iii",
    "witness": index of a verified third member, "method": str}}.
    lines: the collinear groups of coefficient vectors (the case-(i)
    incidence structure).
    """

    __slots__ = ("m", "edges", "lines")

    def __init__(self, m, edges, lines):
        self.m = m
        self.edges = dict(edges)
        self.lines = list(lines)

    def has_edge(self, i, j):
        return (min(i, j), max(i, j)) in self.edges

    def cases(self, i, j):
        e = self.edges.get((min(i, j), max(i, j)))
        return e["cases"] if e else frozenset()

    def witness(self, i, j):
        e = self.edges.get((min(i, j), max(i, j)))
        return e["witness"] if e else None

    def gamma(self, i, case=None):
        out = set()
        for (a, b), e in self.edges.items():
            if i not in (a, b):
                continue
            if case is not None and case not in e["cases"]:
                continue
            out.add(b if a == i else a)
        return out

    def to_json(self):
        return {"m": self.m,
                "edges": [{"i": a, "j": b,
                           "cases": sorted(e["cases"]),
                           "witness": e["witness"],
                           "method": e["method"]}
                          for (a, b), e in sorted(self.edges.items())]}


def verify_psg(config, budget=200000):
    """Total pairwise PSG verification.

    Layered per pair: collinear-triple hashing decides span witnesses;
    pairs with a pencil square or a shared rank-2 ideal get per-candidate
    exact membership tests; structureless pairs can have no witness (by the
    trichotomy) and are closed without any search.  Undecided sub-calls
    abort the verification (it must be total)."""
    forms = config.forms
    m = config.m
    cv = config.coeff_vectors()
    lines = [g for g in line_groups(cv, "span").values() if len(g) >= 3]
    collinear = {}
    for members in lines:
        for a in range(len(members)):
            for b in range(a + 1, len(members)):
                i, j = members[a], members[b]
                third = next(k for k in members if k not in (i, j))
                collinear[(i, j)] = third
    edges = {}
    undecided = []
    for j in range(m):
        for i in range(j):
            Qi, Qj = forms[i], forms[j]
            roots, whole = squares_in_pencil(Qi, Qj)
            has_square = whole or bool(roots)
            has_u, u_wit = False, None
            if Qi.rank() <= 4 and Qj.rank() <= 4:
                d3 = case_iii_decide(Qi, Qj, budget)
                if d3["decision"] == "undecided":
                    undecided.append({"pair": (i, j), "step": "case_iii"})
                    continue
                has_u = d3["decision"] == "yes"
                u_wit = d3["witness"]
            witness, method = None, None
            if (i, j) in collinear:
                witness, method = collinear[(i, j)], "span"
            elif has_square or has_u:
                cand = [k for k in range(m) if k not in (i, j)]
                if not has_square and u_wit is not None:
                    cand = [k for k in cand if forms[k].in_ideal(u_wit)]
                for k in cand:
                    r = radical_membership(forms[k], Qi, Qj, budget)
                    if r["decision"] == "undecided":
                        undecided.append({"pair": (i, j), "candidate": k,
                                          "step": "membership"})
                        witness = None
                        break
                    if r["decision"] == "yes":
                        witness, method = k, r["method"]
                        break
            if witness is None:
                continue
            chk = radical_membership(forms[witness], Qi, Qj, budget)
            if chk["decision"] != "yes":
                raise InternalAuthorityError(
                    f"recorded witness {witness} for pair ({i},{j}) "
                    "fails re-verification")
            cases = set()
            if (i, j) in collinear:
                cases.add("i")
            if has_square:
                cases.add("ii")
            if has_u:
                cases.add("iii")
            edges[(i, j)] = {"cases": frozenset(cases), "witness": witness,
                             "method": method}
    if undecided:
        raise BudgetExhausted(
            f"PSG verification is not total: {len(undecided)} undecided "
            f"pair(s), first: {undecided[:3]}")
    graph = NeighborGraph(m, edges, lines)
    if m < 2:
        return {"delta_actual": q(0), "graph": graph}
    # normalized by m-1 (the other members), matching the linear SG delta
    delta_actual = min(q(len(graph.gamma(i))) for i in range(m)) / q(m - 1)
    return {"delta_actual": delta_actual, "graph": graph}


def partition_123(graph, delta):
    """Members with at least (delta/100)*m neighbors of each case label;
    Q1 is made disjoint from Q2 and Q3."""
    delta = q(delta)
    m = graph.m
    thr = delta * m / 100
    q1 = {i for i in range(m) if q(len(graph.gamma(i, "i"))) >= thr}
    q2 = {i for i in range(m) if q(len(graph.gamma(i, "ii"))) >= thr}
    q3 = {i for i in range(m) if q(len(graph.gamma(i, "iii"))) >= thr}
    q1 -= q2 | q3
    return q1, q2, q3


# ---------------------------------------------------------------- reduce Q2

def _ratio_key(a, ap):
    """Hashable equality key for ap/a across possibly different quadratic
    extension contexts; incomparable values get distinct keys."""
    try:
        v = ap / a
    except Exception:
        return ("mix", ext_tag(a), ext_tag(ap), str(a), str(ap))
    t = ext_tag(v)
    if t is None:
        return ("q", q(v))
    return ("s", t, v.a, v.b)


def _square_rep(P, Qa):
    """First pencil square of (P, Qa): alpha*P + beta*Qa = c*ell^2.

    Returns (a, block, is_ext) with a = coefficient of Qa in
    P = a*Qa + b*ell^2 and block the smallest rational space containing the
    direction(s) of ell (the conjugate direction joins it for extension
    roots, flagged by is_ext)."""
    roots, whole = squares_in_pencil(P, Qa)
    if whole or not roots:
        raise PaperAssertionFailure(
            "a case-(ii) edge has no pencil square",
            {"whole": whole, "roots": len(roots)})
    rt = roots[0]
    al, be = rt.alpha, rt.beta
    if al == 0:
        raise PaperAssertionFailure(
            "pencil square with alpha = 0 against an irreducible form", {})
    a = -be / al
    if ext_tag(al) is None and ext_tag(be) is None:
        D = combo(P, Qa, al, be)
        return a, D.minimal_space(), False
    d1 = combo(P, Qa, al + conj(al), be + conj(be))
    sal = al - conj(al)
    sbe = be - conj(be)
    # (x - conj(x)) = 2b*sqrt(d); its rational part after dividing by sqrt(d)
    rb = (sal.b if ext_tag(sal) is not None else q(0),
          sbe.b if ext_tag(sbe) is not None else q(0))
    d2 = combo(P, Qa, 2 * rb[0], 2 * rb[1])
    return a, span_sum(P.n, [d1.minimal_space(), d2.minimal_space()]), True


def _maximal_i_set(candidates, gamma):
    """Greedy maximal subset where each member has at most one neighbor
    shared with two or more other members."""
    chosen = []
    for cand in candidates:
        trial = chosen + [cand]
        ok = True
        for Qa in trial:
            bad = 0
            for P in gamma[Qa]:
                hits = sum(1 for Qb in trial if Qb != Qa and P in gamma[Qb])
                if hits >= 2:
                    bad += 1
            if bad > 1:
                ok = False
                break
        if ok:
            chosen = trial
    return chosen


def _find_completion_hit(members, V, forms, bound_rank):
    """A combination of <= 2 member forms whose distance from C[V]_2 (for
    bound_rank = 2) or from <V> (bound_rank = 4, i.e. rank_s <= 2 after
    restriction) is small.  Returns (first_member_index, L) or None.

    Complete for combinations supported on at most two members; single
    members and restricted-pencil roots cover the dependency/kernel cases.
    """
    for pos, k in enumerate(members):
        hit = _single_hit(forms[k], V, bound_rank)
        if hit is not None:
            return pos, hit
    for b in range(len(members)):
        for a in range(b):
            Fa, Fb = forms[members[a]], forms[members[b]]
            ra = Fa.restrict(V)
            rb = Fb.restrict(V)
            try:
                loc = low_rank_locus(ra, rb, bound_rank // 2)
            except PreconditionError:
                continue
            for rt in loc["roots"]:
                R = combo(Fa, Fb, rt.alpha, rt.beta)
                hit = _single_hit(R, V, bound_rank)
                if hit is not None:
                    return a, hit
            if loc["whole_pencil"]:
                R = Fa + Fb
                hit = _single_hit(R, V, bound_rank)
                if hit is not None:
                    return a, hit
    return None


def _single_hit(F, V, bound_rank):
    """The off-space part L of F when F is within rank bound_rank of the
    relevant space (C[V]_2 for 2, <V> for 4); None otherwise."""
    if bound_rank == 2:
        if V.dim == 0:
            return F if F.rank() <= 2 and not F.is_zero() else None
        mr, T = min_rank_completion(F, V)
        if mr <= 2:
            L = F - T
            return None if L.is_zero() else L
        return None
    res = F.restrict(V) if V.dim else F
    if res.is_zero() or res.rank() > 4:
        return None
    ann = [list(r) for r in V.annihilator().basis] if V.dim else None
    if ann is None:
        return F
    rows = matmul([list(r) for r in res.mat], ann)
    # ambient representative whose MS equals the lifted restricted MS
    n = F.n
    M = [[ZERO] * n for _ in range(n)]
    for t, row in enumerate(rows):
        lift_row = ann[t]
        for i2 in range(n):
            for j2 in range(n):
                M[i2][j2] = M[i2][j2] + lift_row[i2] * row[j2]
    Msym = [[(M[i2][j2] + M[j2][i2]) / 2 for j2 in range(n)]
            for i2 in range(n)]
    L = QuadForm(n, Msym)
    return None if L.is_zero() else L


def _cleanup_close_combos(J, V, forms, bound_rank, cap=None):
    """Remove J-members while some <= 2-member combination is rank-close to
    the V-structure; grow V by the rational minimal space of the offending
    part.  Returns (J', V', steps)."""
    J = list(J)
    steps = 0
    while J:
        hit = _find_completion_hit(J, V, forms, bound_rank)
        if hit is None:
            break
        pos, L = hit
        J.pop(pos)
        V = V.sum(_rational_ms(L))
        steps += 1
        if cap is not None and steps > cap:
            raise PaperAssertionFailure(
                "rank-proximity cleanup exceeded its step bound",
                {"steps": steps, "cap": cap})
    return J, V, steps


def reduce_q2(config, graph, q2set, delta):
    """Compress the square-neighbor members: a small core I plus a space V
    of linear forms with Q2 inside span(I) + C[V]_2."""
    delta = q(delta)
    n = config.n
    m = config.m
    forms = config.forms
    trace = []
    if not q2set:
        return [], Subspace.zero(n), trace
    thr = delta * m / 100
    gamma = {i: graph.gamma(i, "ii") for i in range(m)}
    for Q in sorted(q2set):
        if q(len(gamma[Q])) < thr:
            raise PreconditionError(
                f"Q2 member {Q} has {len(gamma[Q])} case-(ii) neighbors; "
                f"needs at least (delta/100)m = {thr}")
    I = _maximal_i_set(sorted(q2set), gamma)
    if not q(len(I)) < 600 / delta:
        raise PaperAssertionFailure(
            "core set I reached 600/delta",
            {"size": len(I), "delta": str(delta)})
    counts = {}
    for Qa in I:
        for P in gamma[Qa]:
            counts[P] = counts.get(P, 0) + 1
    buckets = [sum(1 for c in counts.values() if c == t) for t in (1, 2)]
    buckets.append(sum(1 for c in counts.values() if c >= 3))
    trace.append({"stage": "reduce_q2", "step": "core",
                  "I": list(I), "buckets": [m - sum(buckets)] + buckets})
    V = Subspace.zero(n)
    for bpos in range(len(I)):
        for apos in range(bpos):
            Qa, Qb = I[apos], I[bpos]
            common = sorted(gamma[Qa] & gamma[Qb])
            if not common:
                continue
            reps = []
            for P in common:
                a1, blk1, e1 = _square_rep(forms[P], forms[Qa])
                a2, blk2, e2 = _square_rep(forms[P], forms[Qb])
                reps.append((P, _ratio_key(a1, a2), blk1, blk2, e1 or e2))
            anchor = [reps[0]]
            if len({r[1] for r in reps}) > 1:
                anchor.append(next(r for r in reps if r[1] != reps[0][1]))
            anchor_ids = {r[0] for r in anchor}
            block = span_sum(n, [s for r in anchor for s in (r[2], r[3])])
            # rational blocks are 1-dim per square; extension roots carry
            # their conjugate direction, doubling the budget
            limit = 8 if any(r[4] for r in anchor) else 4
            if block.dim > limit:
                raise PaperAssertionFailure(
                    "pairwise V_{i,j} exceeded its dimension bound",
                    {"dim": block.dim, "limit": limit})
            for P, key, blk1, blk2, _ in reps:
                if P in anchor_ids:
                    continue
                if not (block.contains(blk1) and block.contains(blk2)):
                    raise PaperAssertionFailure(
                        "square direction escaped the pairwise space "
                        "(unique-factorization step)",
                        {"pair": (Qa, Qb), "P": P})
            V = V.sum(block)
    I, V, steps = _cleanup_close_combos(I, V, forms, 2, cap=len(I) + 1)
    bound = 720000 / (delta * delta) + 2400 / delta
    if q(V.dim) > bound:
        raise PaperAssertionFailure(
            "dim(V') exceeded the square-compression arithmetic",
            {"dim": V.dim, "bound": str(bound)})
    sp = _Span([list(forms[k].coeff_vector()) for k in I] + ring2_rows(V))
    for Q in sorted(q2set):
        if not sp.contains(list(forms[Q].coeff_vector())):
            raise PaperAssertionFailure(
                "Q2 member escaped span(I, C[V']_2)",
                {"member": Q, "I": list(I), "dimV": V.dim})
    trace.append({"stage": "reduce_q2", "step": "final",
                  "I": list(I), "dimV": V.dim, "cleanup_steps": steps})
    return I, V, trace


# ---------------------------------------------------------------- reduce Q3

def reduce_q3(config, graph, q3set, delta):
    """Greedy ideal absorption: V'' grows by minimal spaces until every Q3
    member lies in the ideal of V''."""
    delta = q(delta)
    n = config.n
    m = config.m
    forms = config.forms
    trace = []
    V = Subspace.zero(n)
    if not q3set:
        return V, trace
    thr = delta * m / 100
    for Q in sorted(q3set):
        if q(len(graph.gamma(Q, "iii"))) < thr:
            raise PreconditionError(
                f"Q3 member {Q} has too few case-(iii) neighbors")
    for (a, b), e in sorted(graph.edges.items()):
        if "iii" not in e["cases"] or (a not in q3set and b not in q3set):
            continue
        msa = forms[a].minimal_space()
        msb = forms[b].minimal_space()
        if msa.dim > 4 or msb.dim > 4 or \
                msa.intersection(msb).dim < 2:
            raise PaperAssertionFailure(
                "case-(iii) edge violates the 4/2 minimal-space shape",
                {"edge": (a, b), "dims": (msa.dim, msb.dim),
                 "inter": msa.intersection(msb).dim})
    added = []
    while True:
        pick = None
        for Q in sorted(q3set):
            if not forms[Q].in_ideal(V):
                pick = Q
                break
        if pick is None:
            break
        ms = forms[pick].minimal_space()
        if ms.dim > 4:
            raise PaperAssertionFailure(
                "absorbed Q3 member has dim(MS) > 4", {"member": pick})
        V = V.sum(ms)
        added.append(pick)
        if q(len(added)) > 300 / delta:
            raise PaperAssertionFailure(
                "Q3 absorption exceeded 300/delta steps",
                {"steps": len(added), "delta": str(delta)})
    if q(V.dim) > 1200 / delta:
        raise PaperAssertionFailure(
            "dim(V'') exceeded 1200/delta",
            {"dim": V.dim, "delta": str(delta)})
    for P in range(m):
        inc = sum(1 for Q in added if "iii" in graph.cases(P, Q) and P != Q)
        if inc > 3:
            raise PaperAssertionFailure(
                "a member meets more than 3 absorbed Q3 cores "
                "(at-most-3 incidence property)",
                {"member": P, "incidences": inc})
    trace.append({"stage": "reduce_q3", "added": added, "dimV": V.dim})
    return V, trace


# ------------------------------------------------------------------ build J

def build_J(config, graph, parts, I, V, delta):
    """The iterative J-construction: seed with I, admit case-(i)-heavy Q1
    members, absorb span closures, bound the leftover by the linear robust
    SG theorem, then enforce the rank-distance invariant."""
    delta = q(delta)
    q1, q2, q3 = parts
    m = config.m
    forms = config.forms
    cv = config.coeff_vectors()
    trace = []
    thr = delta * m / 300
    J = list(I)
    B = set(q2) | set(q3)

    def spanner(jlist):
        ideal_members = [k for k in range(m) if forms[k].in_ideal(V)]
        rows = [cv[k] for k in ideal_members] + [cv[p] for p in jlist] \
            + ring2_rows(V)
        return _Span(rows)

    sp = spanner(J)
    B |= {i for i in sorted(q1) if sp.contains(cv[i])}
    while True:
        pick = None
        for P in sorted(set(q1) - B):
            if q(len(graph.gamma(P, "i") & B)) >= thr:
                pick = P
                break
        if pick is None:
            break
        J.append(pick)
        B.add(pick)
        before = len(B)
        sp = spanner(J)
        B |= {i for i in sorted(set(q1) - B) if sp.contains(cv[i])}
        moved = len(B) - before
        if q(moved) < thr:
            raise PaperAssertionFailure(
                "a J admission absorbed fewer than (delta/300)m members",
                {"admitted": pick, "moved": moved, "threshold": str(thr)})
        trace.append({"stage": "build_J", "step": "admit",
                      "member": pick, "moved": moved})
        if q(len(J)) > 300 / delta + 600 / delta:
            raise PaperAssertionFailure(
                "J admissions exceeded the 300/delta process bound",
                {"size": len(J)})
    leftover = sorted(set(q1) - B)
    if leftover:
        lset = set(leftover)
        thr_left = delta * m / 100 - delta * m / 300
        groups = [g for g in graph.lines if len(set(g) & lset) >= 3]
        partners = {i: set() for i in leftover}
        for g in groups:
            inside = sorted(set(g) & lset)
            for a2 in inside:
                partners[a2].update(k for k in inside if k != a2)
        for P in leftover:
            if q(len(partners[P])) < thr_left:
                raise PaperAssertionFailure(
                    "leftover Q1 member misses its special-partner quota",
                    {"member": P, "partners": len(partners[P]),
                     "threshold": str(thr_left)})
        ps = PointSet(len(cv[0]), [cv[k] for k in leftover])
        if ps.m >= 3:
            d = sg_delta(ps)
            if d > 0:
                dsw_check(ps, d)
        basis = []
        sp_rows = []
        for P in leftover:
            if rank(sp_rows + [cv[P]]) > len(sp_rows):
                sp_rows.append(cv[P])
                basis.append(P)
        J.extend(basis)
        trace.append({"stage": "build_J", "step": "leftover",
                      "size": len(leftover), "basis": basis})
    J, V, steps = _cleanup_close_combos(J, V, forms, 4, cap=len(J) + 1)
    bound = 600 / delta + 300 / delta + 3600 / delta + 1
    if q(len(J)) > bound:
        raise PaperAssertionFailure(
            "|J| exceeded the assembled proof arithmetic",
            {"size": len(J), "bound": str(bound)})
    trace.append({"stage": "build_J", "step": "final", "J": list(J),
                  "dimV": V.dim, "cleanup_steps": steps})
    return J, V, trace


# --------------------------------------------------------- four-way partition

def partition_four(config, J, V, graph):
    """C_V / C_ideal / J_V / J_ideal with the cross-edge and uniqueness
    claims asserted."""
    m = config.m
    n = config.n
    forms = config.forms
    cv = config.coeff_vectors()
    ring = _Span(ring2_rows(V))
    span_jv = _Span(ring2_rows(V) + [cv[p] for p in J])
    span_ji = _Span(ideal2_rows(V, n) + [cv[p] for p in J])
    c_v, c_ideal, j_v, j_ideal = set(), set(), set(), set()
    for i in range(m):
        if ring.contains(cv[i]):
            c_v.add(i)
        elif forms[i].in_ideal(V):
            c_ideal.add(i)
        elif span_jv.contains(cv[i]):
            j_v.add(i)
        elif span_ji.contains(cv[i]):
            j_ideal.add(i)
        else:
            raise PreconditionError(
                f"member {i} escapes span(Q-in-ideal, J, C[V]_2); "
                "partition_four precondition broken")
    low, high = c_v | c_ideal, j_v | j_ideal
    for (a, b), e in graph.edges.items():
        cross = (a in low and b in high) or (b in low and a in high) \
            or (a in j_ideal and b in j_v) or (b in j_ideal and a in j_v)
        if cross and "i" not in e["cases"]:
            raise PaperAssertionFailure(
                "a cross edge between the ideal and span sides is not "
                "case (i)",
                {"edge": (a, b), "cases": sorted(e["cases"])})
    for g in graph.lines:
        gs = set(g)
        for P in sorted(gs & (c_ideal | j_ideal)):
            side = j_v if P in c_ideal else (j_v | c_v)
            hit = sorted(gs & side)
            if not hit:
                continue
            third_pool = j_ideal if P in c_ideal else (j_ideal | c_ideal)
            if not (gs - {P}) & third_pool:
                raise PaperAssertionFailure(
                    "a span line through an ideal member and the span side "
                    "carries no third ideal member",
                    {"member": P, "line": list(g)})
            if len(gs & j_v) > 1:
                raise PaperAssertionFailure(
                    "uniqueness of the spanned third fails: two span-side "
                    "members on one line through an ideal member",
                    {"member": P, "line": list(g)})
    # witness-level uniqueness for the radical (non-span) edges
    seen = {}
    for (a, b), e in graph.edges.items():
        for P, Q1 in ((a, b), (b, a)):
            if P in c_ideal and Q1 in c_v and e["witness"] in c_ideal:
                key = (P, e["witness"])
                if key in seen and seen[key] != Q1:
                    raise PaperAssertionFailure(
                        "two C_V members share one C_ideal witness with the "
                        "same ideal member",
                        {"member": P, "witness": e["witness"],
                         "partners": (seen[key], Q1)})
                seen[key] = Q1
    return {"c_v": c_v, "c_ideal": c_ideal, "j_v": j_v, "j_ideal": j_ideal}


# ------------------------------------------------------- shrink |C_ideal|

def _extract_ell(img):
    """From an image z*ell (z = last variable), the coefficient vector of
    ell."""
    nz = img.n - 1
    row = img.mat[nz]
    ell = [2 * row[t] for t in range(nz)] + [row[nz]]
    return ell


def decrease_C_ideal(state, delta, rng):
    delta = q(delta)
    config = state["config"]
    graph = state["graph"]
    m = config.m
    n = config.n
    forms = config.forms
    parts = state["partition"]
    thr = delta * m / 10
    c_ideal = parts["c_ideal"]
    if q(len(c_ideal)) <= thr:
        state["trace"].append({"stage": "decrease_C_ideal", "step": "noop",
                               "size": len(c_ideal)})
        return state
    V = state["V"]
    heavy = parts["j_ideal"] | parts["j_v"]
    hthr = delta * m / 10
    B1 = {Q for Q in c_ideal if q(len(graph.gamma(Q) & heavy)) >= hthr}
    B2 = sorted(c_ideal - B1)
    newV = V
    if B2:
        newV = newV.sum(_absorb_b2(config, B2, V, delta, rng,
                                   state["trace"]))
    B1 = set(B1)
    B1_prime = set()
    rounds = 0
    eps = delta * delta / 100
    cv = config.coeff_vectors()
    pts = PointSet(len(cv[0]), cv)
    while q(len(B1)) > thr:
        try:
            out = fractional_cut(pts, sorted(B1), eps)
        except PreconditionError as exc:
            raise PaperAssertionFailure(
                "fractional-cut precondition failed inside the B1 loop",
                {"detail": str(exc), "round": rounds})
        survivors = set(out["survivors"])
        if q(len(survivors)) < eps * m / 6:
            raise PaperAssertionFailure(
                "a B1 round extracted fewer than (delta^2/600)m members",
                {"extracted": len(survivors)})
        B1_prime |= survivors
        B1 -= survivors
        rounds += 1
        if q(rounds) > 600 / (delta * delta):
            raise PaperAssertionFailure(
                "B1 extraction exceeded 600/delta^2 rounds",
                {"rounds": rounds})
        state["trace"].append({"stage": "decrease_C_ideal", "step": "cut",
                               "round": rounds, "extracted": len(survivors),
                               "remaining": len(B1)})
    if B1_prime:
        newV = newV.sum(ms_of_set(n, [forms[k] for k in sorted(B1_prime)]))
    J, newV, _ = _cleanup_close_combos(state["J"], newV, forms, 4,
                                       cap=len(state["J"]) + 1)
    state["J"] = J
    state["V"] = newV
    state["partition"] = partition_four(config, J, newV, graph)
    new_size = len(state["partition"]["c_ideal"])
    if q(new_size) > thr:
        raise PaperAssertionFailure(
            "|C_ideal| still exceeds (delta/10)m after the shrink",
            {"size": new_size, "threshold": str(thr)})
    state["trace"].append({"stage": "decrease_C_ideal", "step": "final",
                           "c_ideal": new_size, "dimV": newV.dim})
    return state


def _absorb_b2(config, B2, V, delta, rng, trace):
    """Project the light ideal members along V, run the robust-SG absorption
    on the projected directions, and certify the minimal-space lift bound
    over dim(V) independent draws."""
    m = config.m
    n = config.n
    forms = config.forms
    Dlt = V.dim
    sigma = 0
    first_pts = None
    for draw in range(max(1, Dlt)):
        T = sample_projection(V, rng)
        ells = []
        for k in B2:
            img = T.project(forms[k])
            ells.append(_extract_ell(img))
        zvec = [ZERO] * (len(ells[0]) - 1) + [ONE]
        sigma = max(sigma, rank(ells + [zvec]))
        if draw == 0:
            first_pts = (ells, zvec)
    ells, zvec = first_pts
    nd = len(zvec)
    pts = PointSet(nd, ells + [zvec], dedup=True)
    if pts.m != len(B2) + 1:
        raise PaperAssertionFailure(
            "projected B2 directions are not pairwise independent "
            "(genericity violation)", {"expected": len(B2) + 1,
                                       "got": pts.m})
    heavy_thr = delta * m / 20
    Wrows = [zvec]
    for i, ell in enumerate(ells):
        plane = Subspace(nd, [ell, zvec])
        cnt = sum(1 for j2, e2 in enumerate(ells)
                  if j2 != i and plane.contains_vector(e2))
        if q(cnt) >= heavy_thr and rank(Wrows + [ell]) > len(Wrows):
            Wrows.append(ell)
    if q(len(Wrows) - 1) > 20 / delta:
        raise PaperAssertionFailure(
            "heavy projected directions exceed 20/delta",
            {"count": len(Wrows) - 1})
    W = Subspace(nd, Wrows)
    kpts = [e for e in ells if not W.contains_vector(e)]
    wpts = [p for p in ells + [zvec] if W.contains_vector(p)]
    if kpts:
        tsize = len(kpts) + len(wpts)
        dcall = delta * m / 2 / tsize
        if dcall > 1:
            dcall = q(1)
        try:
            res = robust_sg_mod_subspace(
                PointSet(nd, kpts, dedup=True), W,
                PointSet(nd, wpts, dedup=True), dcall)
        except PreconditionError as exc:
            raise PaperAssertionFailure(
                "projected B2 set violates the relaxed EK-property",
                {"detail": str(exc)})
        trace.append({"stage": "decrease_C_ideal", "step": "b2",
                      "absorbed": len(res["absorbed"]),
                      "dimW": res["W_final"].dim})
    ms = ms_of_set(n, [forms[k] for k in B2])
    if q(ms.dim) > (sigma + 1) * max(1, Dlt):
        raise PaperAssertionFailure(
            "minimal-space lift bound (sigma+1)*dim(V) fails on B2",
            {"dim": ms.dim, "sigma": sigma, "dimV": Dlt})
    return ms


# ------------------------------------------------------- shrink J_ideal

def decrease_J_ideal(state, delta):
    delta = q(delta)
    config = state["config"]
    graph = state["graph"]
    m = config.m
    forms = config.forms
    cv = config.coeff_vectors()
    parts = state["partition"]
    thr = delta * m / 10
    if q(len(parts["c_ideal"])) > thr:
        raise PreconditionError(
            "decrease_J_ideal requires |C_ideal| <= (delta/10)m")
    j_ideal = sorted(parts["j_ideal"])
    if not j_ideal:
        state["trace"].append({"stage": "decrease_J_ideal", "step": "noop"})
        return state
    V = state["V"]
    J = list(state["J"])
    t1 = [Q for Q in j_ideal if q(len(graph.gamma(Q, "ii"))) >= thr]
    t2 = [Q for Q in j_ideal if Q not in t1]
    t1_prime = []
    for Q in t1:
        if all(not (graph.gamma(Q, "ii") & graph.gamma(P, "ii"))
               for P in t1_prime):
            t1_prime.append(Q)
    if q(len(t1_prime)) > 10 / delta:
        raise PaperAssertionFailure(
            "Gamma_(ii)-disjoint core exceeded 10/delta",
            {"size": len(t1_prime)})
    ring = ring2_rows(V)
    for Q in t1:
        if Q in t1_prime:
            continue
        mate = next((P for P in t1_prime
                     if graph.gamma(Q, "ii") & graph.gamma(P, "ii")), None)
        if mate is None:
            raise PaperAssertionFailure(
                "maximality of the Gamma_(ii)-disjoint core fails",
                {"member": Q})
        if not _Span(ring + [cv[mate]]).contains(cv[Q]):
            raise PaperAssertionFailure(
                "shared-square merge fails: Q not in span(Q1, C[V]_2)",
                {"member": Q, "core": mate})
    newJ = J + [p for p in t1_prime if p not in J]
    spW = _Span(ring + [cv[p] for p in newJ])
    t2s = [Q for Q in t2 if not spW.contains(cv[Q])]
    added = []
    if t2s:
        c_ideal = parts["c_ideal"]
        for Q in t2s:
            gi = graph.gamma(Q, "i")
            if q(len(gi)) < 9 * delta * m / 10:
                raise PaperAssertionFailure(
                    "a T2 member misses the 0.9*delta*m case-(i) quota",
                    {"member": Q, "count": len(gi)})
            if q(len(gi - c_ideal)) < 7 * delta * m / 10:
                raise PaperAssertionFailure(
                    "a T2 member misses the 0.7*delta*m quota after "
                    "C_ideal pruning", {"member": Q})
        N = len(cv[0])
        Wspace = Subspace(N, spW.rows)
        kvecs = [cv[Q] for Q in t2s]
        wvecs = [cv[i] for i in range(m) if i not in t2s
                 and Wspace.contains_vector(cv[i])]
        tsize = len(kvecs) + len(wvecs)
        dcall = 7 * delta * m / 10 / tsize
        if dcall > 1:
            dcall = q(1)
        try:
            res = robust_sg_mod_subspace(PointSet(N, kvecs), Wspace,
                                         PointSet(N, wvecs), dcall)
        except PreconditionError as exc:
            raise PaperAssertionFailure(
                "T2 violates the relaxed EK-property in coefficient space",
                {"detail": str(exc)})
        pivot_members = [t2s[p] for p in res["pivots"]]
        newJ += [p for p in pivot_members if p not in newJ]
        # a basis of the unabsorbed leftover suffices: the rest of final_K
        # lies in its span, so J + C[V]_2 still covers all of T2
        basis_rows = []
        for kpos in res["final_K"]:
            member = t2s[kpos]
            if rank(basis_rows + [cv[member]]) > len(basis_rows):
                basis_rows.append(cv[member])
                if member not in newJ:
                    newJ.append(member)
                    added.append(member)
        state["trace"].append({"stage": "decrease_J_ideal", "step": "t2",
                               "pivots": pivot_members,
                               "leftover": len(res["final_K"])})
    growth = len(newJ) - len(J)
    newJ, V, _ = _cleanup_close_combos(newJ, V, forms, 4, cap=len(newJ) + 1)
    state["J"] = newJ
    state["V"] = V
    state["partition"] = partition_four(config, newJ, V, graph)
    state["trace"].append({"stage": "decrease_J_ideal", "step": "final",
                           "growth": growth,
                           "j_ideal": len(state["partition"]["j_ideal"])})
    return state


# ----------------------------------------------------------------- finalize

class Certificate:
    """(J, V) with every configuration member in span(J) + C[V]_2 and the
    dimension bound |J| + dim(V)(dim(V)+1)/2."""

    __slots__ = ("j_indices", "V", "bound", "trace",
                 "independent_dimension", "delta")

    def __init__(self, j_indices, V, trace, independent_dimension, delta):
        self.j_indices = list(j_indices)
        self.V = V
        self.bound = len(self.j_indices) + V.dim * (V.dim + 1) // 2
        self.trace = list(trace)
        self.independent_dimension = independent_dimension
        self.delta = q(delta)

    def validate(self, config):
        cv = config.coeff_vectors()
        sp = _Span(ring2_rows(self.V)
                   + [cv[p] for p in self.j_indices])
        for i in range(config.m):
            if not sp.contains(cv[i]):
                raise PaperAssertionFailure(
                    "certificate does not cover a configuration member",
                    {"member": i})
        if self.independent_dimension > self.bound:
            raise PaperAssertionFailure(
                "configuration dimension exceeds the certificate bound",
                {"dim": self.independent_dimension, "bound": self.bound})
        return True

    def to_json(self):
        return {"J": list(self.j_indices),
                "V": self.V.to_json(),
                "bound": self.bound,
                "independent_dimension": self.independent_dimension,
                "delta": rational_to_str(self.delta),
                "trace": self.trace}


def finalize(state, delta):
    delta = q(delta)
    config = state["config"]
    graph = state["graph"]
    m = config.m
    parts = state["partition"]
    thr = delta * m / 10
    for name in ("c_ideal", "j_ideal"):
        if q(len(parts[name])) > thr:
            raise PreconditionError(
                f"finalize requires |{name}| <= (delta/10)m")
    stragglers = sorted(parts["c_ideal"] | parts["j_ideal"])
    if stragglers:
        report = []
        span_side = parts["c_v"] | parts["j_v"]
        for P in stragglers:
            report.append({"member": P,
                           "span_side_neighbors":
                           len(graph.gamma(P) & span_side)})
        raise PaperAssertionFailure(
            "small nonempty ideal leftovers contradict the "
            "uniqueness-counting argument",
            {"leftovers": report,
             "c_ideal": len(parts["c_ideal"]),
             "j_ideal": len(parts["j_ideal"])})
    cv = config.coeff_vectors()
    cert = Certificate(state["J"], state["V"], state["trace"],
                       rank(cv), delta)
    cert.validate(config)
    return cert


# ------------------------------------------------------------------- driver

def decompose(config, delta, seed=0, budget=200000, verified=None):
    """End-to-end certifying decomposition of a delta-PSG configuration.

    `verified` may carry a previously computed verify_psg result for this
    exact configuration to skip re-verification."""
    delta = q(delta)
    if not 0 < delta <= 1:
        raise PreconditionError("delta must be in (0, 1]")
    res = verified if verified is not None else verify_psg(config, budget)
    if res["delta_actual"] < delta:
        raise PreconditionError(
            f"configuration is only {res['delta_actual']}-PSG, "
            f"below the requested delta {delta}")
    graph = res["graph"]
    m = config.m
    trace = [{"stage": "verify", "delta_actual":
              rational_to_str(res["delta_actual"]), "m": m}]
    parts = partition_123(graph, delta)
    q1, q2, q3 = parts
    covered = q1 | q2 | q3
    if len(covered) != m:
        raise PaperAssertionFailure(
            "a member falls in none of Q1/Q2/Q3 although delta-PSG holds",
            {"missing": sorted(set(range(m)) - covered)})
    trace.append({"stage": "partition_123",
                  "sizes": [len(q1), len(q2), len(q3)]})
    I, Vp, t2 = reduce_q2(config, graph, q2, delta)
    trace.extend(t2)
    Vpp, t3 = reduce_q3(config, graph, q3, delta)
    trace.extend(t3)
    V = Vp.sum(Vpp)
    J, V, tJ = build_J(config, graph, parts, I, V, delta)
    trace.extend(tJ)
    partition = partition_four(config, J, V, graph)
    trace.append({"stage": "partition_four",
                  "sizes": {k: len(v) for k, v in partition.items()}})
    state = {"config": config, "graph": graph, "J": J, "V": V,
             "partition": partition, "trace": trace}
    rng = random.Random(seed)
    state = decrease_C_ideal(state, delta, rng)
    state = decrease_J_ideal(state, delta)
    return finalize(state, delta)
