"""Linear (vector/point) Sylvester-Gallai machinery.

Exact rational point sets, neighbor graphs over projective or affine lines,
delta-SG verification, the robust-SG-modulo-a-subspace absorption loop, and
the fractional-cut process.  Every proof-level counting step is asserted at
runtime on the concrete instance (PaperAssertionFailure on violation); all
threshold comparisons are exact rational inequalities.
"""

import logging

from .errors import PaperAssertionFailure, PreconditionError
from .linalg import Subspace, canonical_vector, rank, vec_sub
from .scalars import q, rational_from_str, rational_to_str

log = logging.getLogger(__name__)


class PointSet:
    """Pairwise linearly independent nonzero rational vectors.

    Two proportional vectors describe the same projective point; the
    constructor rejects such duplicates unless dedup=True, in which case
    later duplicates are silently dropped (first occurrence wins).
    """

    __slots__ = ("n", "points")

    def __init__(self, n, points, dedup=False):
        self.n = n
        out = []
        seen = {}
        for v in points:
            if len(v) != n:
                raise PreconditionError("point length != ambient dimension")
            w = tuple(q(x) for x in v)
            key = canonical_vector(w)
            if key is None:
                raise PreconditionError("zero vector in point set")
            if key in seen:
                if dedup:
                    continue
                raise PreconditionError(
                    f"proportional points at indices {seen[key]} and {len(out)}")
            seen[key] = len(out)
            out.append(w)
        self.points = out

    @property
    def m(self):
        return len(self.points)

    def subset(self, indices):
        return PointSet(self.n, [self.points[i] for i in indices])

    def span_dim(self):
        return rank(list(self.points))

    def affine_dim(self):
        if not self.points:
            return -1
        base = self.points[0]
        return rank([vec_sub(p, base) for p in self.points[1:]])

    def to_json(self):
        return {"dim": self.n,
                "points": [[rational_to_str(x) for x in p]
                           for p in self.points]}

    @classmethod
    def from_json(cls, obj, dedup=False):
        return cls(obj["dim"],
                   [[rational_from_str(x) for x in p] for p in obj["points"]],
                   dedup=dedup)

    def __repr__(self):
        return f"PointSet(n={self.n}, m={self.m})"


# ----------------------------------------------------------- line structure

def _span_line_key(vi, vj):
    s = Subspace(len(vi), [vi, vj])
    if s.dim != 2:
        raise PreconditionError("proportional points have no unique line")
    return s.basis


def _affine_line_key(vi, vj):
    d = canonical_vector(vec_sub(vj, vi))
    if d is None:
        raise PreconditionError("duplicate points have no unique line")
    k = next(i for i, x in enumerate(d) if x != 0)
    base = tuple(vi[t] - vi[k] * d[t] for t in range(len(vi)))
    return (d, base)


def line_groups(vectors, mode="span"):
    """Group indices by the line through each pair.

    Returns {line key: sorted tuple of indices of all set members on that
    line}.  Any two distinct members of a group determine the same line, so
    grouping the pairs recovers full line membership.
    """
    if mode == "span":
        keyfn = _span_line_key
    elif mode == "affine":
        keyfn = _affine_line_key
    else:
        raise PreconditionError(f"unknown line mode {mode!r}")
    groups = {}
    for j in range(len(vectors)):
        for i in range(j):
            groups.setdefault(keyfn(vectors[i], vectors[j]),
                              set()).update((i, j))
    return {k: tuple(sorted(s)) for k, s in groups.items()}


def neighbor_map(vectors, mode="span"):
    """Gamma as a list of sets: j in Gamma[i] iff the line through v_i, v_j
    contains a third set member.  Symmetric by construction."""
    gamma = [set() for _ in vectors]
    for members in line_groups(vectors, mode).values():
        if len(members) < 3:
            continue
        ms = set(members)
        for i in members:
            gamma[i].update(ms - {i})
    return gamma


# -------------------------------------------------------------- delta-SG

def sg_delta(points, mode="span"):
    """Largest delta for which the set is a delta-SG configuration:
    min_i |Gamma(i)| / (m-1), exact rational."""
    m = points.m
    if m < 3:
        raise PreconditionError("need at least 3 points")
    gamma = neighbor_map(points.points, mode)
    return min(q(len(g)) for g in gamma) / q(m - 1)


def sg_dimension(points):
    """Exact dim(span of the point set)."""
    return points.span_dim()


def dsw_check(points, delta, mode="span"):
    """When the set is a delta-SG configuration, its span has dimension at
    most 12/delta + 1.  Returns False when delta-SG does not hold (nothing to
    check); raises PaperAssertionFailure if the bound itself fails."""
    delta = q(delta)
    if delta <= 0:
        raise PreconditionError("delta must be positive")
    if sg_delta(points, mode) < delta:
        return False
    dim = points.span_dim()
    if q(dim) > 12 / delta + 1:
        raise PaperAssertionFailure(
            "delta-SG configuration exceeds dimension 12/delta + 1",
            {"dim": dim, "delta": str(delta), "m": points.m})
    return True


def ek_delta(t1, t2, t3, mode="span"):
    """Largest delta for which (t1, t2, t3) is a delta-EK configuration:
    for p in one set, a neighbor is q in another set such that span(p, q)
    meets the third set; delta = min_p (#neighbors of p) / (#other points).

    Verifier plumbing only (no dimension theorem attached)."""
    if mode != "span":
        raise PreconditionError("EK verification is span-mode only")
    sets = [t1, t2, t3]
    n = sets[0].n
    allpts = [p for s in sets for p in s.points]
    owner = [i for i, s in enumerate(sets) for _ in s.points]
    PointSet(n, allpts)  # pairwise independence across the union
    if min(s.m for s in sets) == 0:
        raise PreconditionError("all three sets must be nonempty")
    groups = line_groups(allpts, "span")
    best = None
    for a, pa in enumerate(allpts):
        others = sum(s.m for i, s in enumerate(sets) if i != owner[a])
        count = 0
        for b, pb in enumerate(allpts):
            if b == a or owner[b] == owner[a]:
                continue
            third = 3 - owner[a] - owner[b]
            members = groups[_span_line_key(pa, pb)]
            if any(c not in (a, b) and owner[c] == third for c in members):
                count += 1
        frac = q(count) / q(others)
        if best is None or frac < best:
            best = frac
    return best


# ---------------------------------------------- robust SG modulo a subspace

def robust_sg_mod_subspace(K, W, Wpoints, delta):
    """Absorption loop: T = K union Wpoints; while some p in K has at least
    0.1*delta*|T| neighbors inside W, absorb p into W and move every K-point
    that lands in the enlarged W.

    Precondition (relaxed EK-property, verified): every p in K has at least
    delta*|T| neighbors in T.  Asserted at runtime: each absorption moves at
    least 0.1*delta*|K| distinct points, the loop takes at most 10/delta
    steps, dim(W_final) <= dim(W) + 10/delta, and
    dim(span T) <= (dim(W) + 10/delta) + (15/delta + 1).
    """
    delta = q(delta)
    if not 0 < delta <= 1:
        raise PreconditionError("delta must be in (0, 1]")
    n = K.n
    if Wpoints.n != n or W.n != n:
        raise PreconditionError("ambient dimension mismatch")
    for v in Wpoints.points:
        if not W.contains_vector(list(v)):
            raise PreconditionError("Wpoints must lie inside W")
    for v in K.points:
        if W.contains_vector(list(v)):
            raise PreconditionError("K must be disjoint from W")
    T = list(K.points) + list(Wpoints.points)
    PointSet(n, T)  # pairwise independence of the union
    kset = set(range(K.m))
    wset = set(range(K.m, len(T)))
    if not kset:
        return {"W_final": W, "absorbed": [], "pivots": [], "steps": 0,
                "final_K": [], "dim_bound_check": True}

    gamma = neighbor_map(T, "span")
    tsize = q(len(T))
    for p in sorted(kset):
        if q(len(gamma[p])) < delta * tsize:
            raise PreconditionError(
                f"point {p} violates the relaxed EK-property: "
                f"{len(gamma[p])} < delta*|T| = {delta * tsize}")

    r0 = W.dim
    threshold = delta * tsize / 10
    steps = 0
    pivots = []
    absorbed = []
    while True:
        pick = None
        for p in sorted(kset):
            if q(len(gamma[p] & wset)) >= threshold:
                pick = p
                break
        if pick is None:
            break
        k_before = len(kset)
        W = W.sum(Subspace(n, [T[pick]]))
        moved = {i for i in kset if W.contains_vector(list(T[i]))}
        kset -= moved
        wset |= moved
        steps += 1
        pivots.append(pick)
        absorbed.extend(sorted(moved))
        if q(len(moved)) < delta * q(k_before) / 10:
            raise PaperAssertionFailure(
                "an absorption step moved fewer than 0.1*delta*|K| points",
                {"moved": len(moved), "k_before": k_before,
                 "delta": str(delta), "step": steps})
        if q(steps) * delta > 10:
            raise PaperAssertionFailure(
                "absorption loop exceeded 10/delta steps",
                {"steps": steps, "delta": str(delta)})
    if q(W.dim) > q(r0) + 10 / delta:
        raise PaperAssertionFailure(
            "dim(W_final) exceeds dim(W) + 10/delta",
            {"dim_final": W.dim, "dim_initial": r0, "delta": str(delta)})
    total_dim = rank(T)
    bound = (q(r0) + 10 / delta) + (15 / delta + 1)
    if q(total_dim) > bound:
        raise PaperAssertionFailure(
            "dim(span T) exceeds (r + 10/delta) + (15/delta + 1)",
            {"dim": total_dim, "bound": str(bound), "delta": str(delta)})
    return {"W_final": W, "absorbed": absorbed, "pivots": pivots,
            "steps": steps, "final_K": sorted(kset),
            "dim_bound_check": True}


# ----------------------------------------------------------- fractional cut

def _cross_degrees(lines, alive, bset):
    """Cross-pair neighbor counts: for v in B the special-line partners in
    the complement and vice versa, restricted to surviving points."""
    deg = {i: set() for i in alive}
    for members in lines:
        live = [i for i in members if i in alive]
        if len(live) < 3:
            continue
        bs = [i for i in live if i in bset]
        us = [i for i in live if i not in bset]
        for v in bs:
            deg[v].update(us)
        for u in us:
            deg[u].update(bs)
    return {i: len(s) for i, s in deg.items()}


def fractional_cut(points, B, delta, mode="span"):
    """Iterated low-degree removal: while some surviving point has fewer
    than (delta/2)*m cross special-line partners, remove the lowest-index
    such point and recount.

    Precondition (verified): at least delta*m^2 pairs (v in B, u outside B)
    lie on a special line.  Asserted: the average cross-degree strictly
    increases at every removal, the survivors B' keep |B'| >= (delta/6)*m,
    and dim(B') <= 24/delta + 1 (span dim in span mode, affine dim in
    affine mode).  The observed survivor fraction is logged.
    """
    delta = q(delta)
    if not 0 < delta <= 1:
        raise PreconditionError("delta must be in (0, 1]")
    m = points.m
    bset = set(B)
    if any(i < 0 or i >= m for i in bset):
        raise PreconditionError("B indices out of range")
    if not bset or len(bset) == m:
        raise PreconditionError("B must be a proper nonempty subset")
    lines = [members for members in line_groups(points.points, mode).values()
             if len(members) >= 3]
    alive = set(range(m))
    deg = _cross_degrees(lines, alive, bset)
    cross_pairs = sum(deg[v] for v in bset)
    if q(cross_pairs) < delta * m * m:
        raise PreconditionError(
            f"only {cross_pairs} cross special-line pairs; "
            f"need at least delta*m^2 = {delta * m * m}")
    avg = q(sum(deg.values())) / q(len(alive))
    removed = []
    low = delta * q(m) / 2
    while True:
        pick = None
        for i in sorted(alive):
            if q(deg[i]) < low:
                pick = i
                break
        if pick is None:
            break
        alive.discard(pick)
        removed.append(pick)
        if not alive:
            raise PaperAssertionFailure(
                "fractional cut removed every point",
                {"delta": str(delta), "m": m})
        deg = _cross_degrees(lines, alive, bset)
        new_avg = q(sum(deg.values())) / q(len(alive))
        if not new_avg > avg:
            raise PaperAssertionFailure(
                "average cross-degree failed to increase at a removal",
                {"removed": pick, "avg_before": str(avg),
                 "avg_after": str(new_avg), "delta": str(delta)})
        avg = new_avg
    bprime = sorted(bset & alive)
    observed = q(len(bprime)) / q(m)
    log.info("fractional_cut survivor fraction |B'|/m = %s (delta = %s)",
             observed, delta)
    if q(len(bprime)) < delta * q(m) / 6:
        raise PaperAssertionFailure(
            "surviving B' smaller than (delta/6)*m",
            {"survivors": len(bprime), "m": m, "delta": str(delta)})
    bp = points.subset(bprime)
    dim = bp.affine_dim() if mode == "affine" else bp.span_dim()
    if q(dim) > 24 / delta + 1:
        raise PaperAssertionFailure(
            "survivors exceed dimension 24/delta + 1",
            {"dim": dim, "delta": str(delta), "survivors": len(bprime)})
    return {"survivors": bprime, "survivors_all": sorted(alive),
            "removed": removed, "observed_constant": observed,
            "dim_check": True}
