"""Classification searches and the cross-intersecting family harness.

Both loom searches enumerate families closed under ``X -> C_a(C_b(X))``
with Ganter's NextClosure, which visits each closed family exactly once in
lectic order.  Every closed family ``A`` is a loom candidate with partner
``B = C_b(A)``; candidates are re-verified from scratch and deduplicated by
canonical form.
"""

from __future__ import annotations

import hashlib
import itertools
import random
import time
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .canon import canonical_form_multi, canonical_key, isomorphic_multi
from .covers import covers_of_size, nu, rainbow_matching_number, tau
from .formats import loom_from_json, loom_to_json
from .fraclp import TooLarge, frac_str, nu_star
from .hypercore import (
    Hypergraph,
    HypergraphError,
    bits,
    full_mask,
    is_cross_intersecting,
    is_uniform,
    make_hypergraph,
)
from .loom import Loom, VerificationReport, verify_loom
from .weave import fano_plane, is_decomposable, r2_loom, split


class Unsupported(HypergraphError):
    pass


@dataclass
class ClassificationResult:
    classes: list[Loom]
    decomposable_count: int
    indecomposable_count: int
    stats: dict = field(default_factory=dict)

    def indecomposable(self) -> list[Loom]:
        return [L for L in self.classes if not is_decomposable(L)]

    def summary_lines(self) -> list[str]:
        return [
            f"classes: {len(self.classes)}",
            f"indecomposable classes: {self.indecomposable_count}",
            f"decomposable classes: {self.decomposable_count}",
        ]


# ---------------------------------------------------------------------------
# closure systems over k-subsets


class _ClosureSystem:
    """``C_a`` / ``C_b`` between ``a``-subsets and ``b``-subsets of ``[n]``.

    Families are bitmasks over the index lists ``self.a_sets`` and
    ``self.b_sets``.
    """

    def __init__(self, n: int, a: int, b: int):
        self.n = n
        self.a_sets = [_m(c) for c in itertools.combinations(range(n), a)]
        self.b_sets = self.a_sets if a == b else [_m(c) for c in itertools.combinations(range(n), b)]
        self.a_index = {e: i for i, e in enumerate(self.a_sets)}
        self.b_index = {e: i for i, e in enumerate(self.b_sets)}
        self.hit_a = [_hit_mask(e, self.b_sets) for e in self.a_sets]
        self.hit_b = self.hit_a if a == b else [_hit_mask(e, self.a_sets) for e in self.b_sets]
        self.all_a = full_mask(len(self.a_sets))
        self.all_b = full_mask(len(self.b_sets))
        self.evaluations = 0

    def covers_b(self, X: int) -> int:
        """``b``-sets meeting every ``a``-set of ``X``."""
        out = self.all_b
        while X:
            low = X & -X
            out &= self.hit_a[low.bit_length() - 1]
            X ^= low
        return out

    def covers_a(self, Y: int) -> int:
        out = self.all_a
        while Y:
            low = Y & -Y
            out &= self.hit_b[low.bit_length() - 1]
            Y ^= low
        return out

    def close(self, X: int) -> int:
        self.evaluations += 1
        return self.covers_a(self.covers_b(X))

    def a_family(self, X: int) -> Hypergraph:
        return Hypergraph.from_masks(self.n, [self.a_sets[i] for i in bits(X)])

    def b_family(self, Y: int) -> Hypergraph:
        return Hypergraph.from_masks(self.n, [self.b_sets[i] for i in bits(Y)])


def _m(combo) -> int:
    out = 0
    for v in combo:
        out |= 1 << v
    return out


def _hit_mask(e: int, others: Sequence[int]) -> int:
    out = 0
    for j, f in enumerate(others):
        if e & f:
            out |= 1 << j
    return out


def next_closure(ground: Sequence[int], close):
    """Yield every closed subset of ``ground`` in lectic order.

    Subsets are bitmasks over positions in ``ground``; ``close`` maps such
    a mask to its closure (also a mask over positions).
    """
    g = len(ground)
    full = full_mask(g)
    cur = close(0)
    yield cur
    while cur != full:
        for i in range(g - 1, -1, -1):
            if cur >> i & 1:
                continue
            below = cur & ((1 << i) - 1)
            nxt = close(below | (1 << i))
            if nxt & ((1 << i) - 1) == below:
                cur = nxt
                yield cur
                break
        else:
            return


def _position_maps(ground: Sequence[int]):
    def to_pos(X: int) -> int:
        out = 0
        for k, i in enumerate(ground):
            if X >> i & 1:
                out |= 1 << k
        return out

    def from_pos(Z: int) -> int:
        out = 0
        for k in bits(Z):
            out |= 1 << ground[k]
        return out

    return to_pos, from_pos


class _Collector:
    """Verify candidates and keep one representative per isomorphism class."""

    def __init__(self):
        self.by_key: dict[str, Loom] = {}
        self.verified = 0
        self.rejected = 0
        self.duplicates = 0

    def offer(self, A: Hypergraph, B: Hypergraph, name: str) -> None:
        if not A.edges or not B.edges:
            self.rejected += 1
            return
        L, _ = verify_loom(A, B)
        if L is None:
            self.rejected += 1
            return
        self.verified += 1
        (CA, CB), _ = canonical_form_multi([A, B])
        key = canonical_key([CA, CB])
        if key in self.by_key:
            self.duplicates += 1
            return
        C, _ = verify_loom(CA, CB)
        C.name = f"{name}#{len(self.by_key) + 1}"
        self.by_key[key] = C

    def result(self, stats: dict) -> ClassificationResult:
        classes = [self.by_key[k] for k in sorted(self.by_key, key=lambda k: (_class_order(self.by_key[k]), k))]
        dec = sum(1 for L in classes if is_decomposable(L))
        stats.update(verified=self.verified, rejected=self.rejected, duplicates=self.duplicates)
        return ClassificationResult(classes, dec, len(classes) - dec, stats)


def _class_order(L: Loom):
    return (is_decomposable(L), len(L.A), len(L.B))


# ---------------------------------------------------------------------------
# (3,3)


GRID_COLUMNS = ("147", "258", "369")
GRID_ROWS = ("123", "456", "789")


def _one_based(words: Sequence[str]) -> list[int]:
    return [_m(int(c) - 1 for c in w) for w in words]


def classify_33_looms(workers: int = 1) -> ClassificationResult:
    """All ``(3,3)``-looms up to isomorphism.

    Every such loom has 9 vertices and perfect matchings in both sides, so
    after relabelling ``M = {147, 258, 369}`` lies in ``A`` and
    ``N = {123, 456, 789}`` in ``B``.  Then ``A`` is contained in the 27
    transversals of ``N`` and is closed under ``C_3 C_3``; the search runs
    over those closed families that contain ``M``.  ``workers`` is accepted
    for interface compatibility; the search is sequential.
    """
    start = time.perf_counter()
    sysm = _ClosureSystem(9, 3, 3)
    M = _one_based(GRID_COLUMNS)
    N = _one_based(GRID_ROWS)
    seed = 0
    for e in M:
        seed |= 1 << sysm.a_index[e]
    ground = [i for i, e in enumerate(sysm.a_sets) if all((e & f).bit_count() == 1 for f in N)]
    to_pos, from_pos = _position_maps(ground)
    col = _Collector()
    nodes = 0
    for Z in next_closure(ground, lambda Z: to_pos(sysm.close(from_pos(Z) | seed))):
        nodes += 1
        X = from_pos(Z)
        col.offer(sysm.a_family(X), sysm.b_family(sysm.covers_b(X)), "L33")
    stats = {
        "closed_families": nodes,
        "closure_evaluations": sysm.evaluations,
        "ground_size": len(ground),
        "workers": workers,
        "wall_time": time.perf_counter() - start,
    }
    return col.result(stats)


def loom33_conditions(L: Loom) -> VerificationReport:
    """The three equivalent structural conditions for a ``(3,3)``-loom."""
    rep = VerificationReport()
    V = L.vertices
    rep.add("nine_vertices", V.bit_count() == 9, f"|V| = {V.bit_count()}")
    nA, nB = nu(L.A).value, nu(L.B).value
    rep.add("nu_three", nA == 3 and nB == 3, f"nu(A) = {nA}, nu(B) = {nB}")
    bad = None
    for H in (L.A, L.B):
        for e, f in itertools.combinations(H.edges, 2):
            if not e & f and (V & ~(e | f)) not in H:
                bad = [bits(e), bits(f)]
                break
        if bad:
            break
    rep.add("complement_rule", bad is None, "V - (e u f) is an edge for disjoint e, f", bad)
    return rep


# ---------------------------------------------------------------------------
# (r,2)


R2_MAX = 5
R2_EXHAUSTIVE_MAX = 3


def _bipartite_unions(total: int):
    """Multisets of ``(a, b)``, ``1 <= a <= b``, with ``sum(a + b) == total``."""
    pairs = [(a, b) for a in range(1, total) for b in range(a, total) if a + b <= total]

    def rec(left: int, start: int, acc: list):
        if left == 0:
            yield list(acc)
            return
        for k in range(start, len(pairs)):
            a, b = pairs[k]
            if a + b <= left:
                acc.append(pairs[k])
                yield from rec(left - a - b, k, acc)
                acc.pop()

    yield from rec(total, 0, [])


def _bipartite_union_graph(blocks) -> tuple[int, list[int]]:
    edges = []
    start = 0
    for a, b in blocks:
        X = range(start, start + a)
        Y = range(start + a, start + a + b)
        edges.extend((1 << u) | (1 << v) for u in X for v in Y)
        start += a + b
    return start, edges


def enumerate_r2_looms(r: int, max_classes: Optional[int] = None, exhaustive: bool = False) -> ClassificationResult:
    """All ``(r,2)``-looms on ``2r`` vertices up to isomorphism.

    By default ``B`` ranges over disjoint unions of complete bipartite
    graphs spanning ``2r`` vertices and ``A = C_r(B)``.  With ``exhaustive``
    (only for ``r <= 3``) every closed graph on ``2r`` vertices is tried.
    """
    if r < 1:
        raise ValueError("r must be positive")
    if r > R2_MAX:
        raise TooLarge(f"(r,2) enumeration is limited to r <= {R2_MAX}")
    if exhaustive and r > R2_EXHAUSTIVE_MAX:
        raise TooLarge(f"exhaustive (r,2) search is limited to r <= {R2_EXHAUSTIVE_MAX}")
    start = time.perf_counter()
    n = 2 * r
    col = _Collector()
    nodes = 0
    if exhaustive:
        # closed families of edges (2-sets), partner family of r-sets
        sysm = _ClosureSystem(n, 2, r)
        ground = list(range(len(sysm.a_sets)))
        for Y in next_closure(ground, sysm.close):
            nodes += 1
            col.offer(sysm.b_family(sysm.covers_b(Y)), sysm.a_family(Y), "R2")
            if max_classes is not None and len(col.by_key) >= max_classes:
                break
    else:
        for blocks in _bipartite_unions(n):
            nodes += 1
            _, edges = _bipartite_union_graph(blocks)
            B = Hypergraph.from_masks(n, edges)
            A = covers_of_size(B, r)
            col.offer(A, B, "R2")
            if max_classes is not None and len(col.by_key) >= max_classes:
                break
    stats = {"candidates": nodes, "exhaustive": exhaustive, "wall_time": time.perf_counter() - start}
    return col.result(stats)


def r2_factor_check(L: Loom) -> VerificationReport:
    """Each factor along the components of ``B`` is isomorphic to ``V_q x2 V_q``."""
    rep = VerificationReport()
    sp = split(L)
    factors = sp.factors if sp is not None and sp.kind == 1 else [L]
    for i, F in enumerate(factors):
        model = r2_loom([F.r])
        same = F.s == 2 and isomorphic_multi([F.A, F.B], [model.A, model.B]) is not None
        rep.add(f"factor_{i + 1}", same, f"({F.r},{F.s}) factor on {F.vertices.bit_count()} vertices")
    return rep


def partition_count(r: int) -> int:
    """Number of integer partitions of ``r`` (Euler's recurrence)."""
    p = [1] + [0] * r
    for k in range(1, r + 1):
        for m in range(k, r + 1):
            p[m] += p[m - k]
    return p[r]


# ---------------------------------------------------------------------------
# atlas files


def class_hash(L: Loom) -> str:
    return hashlib.sha256(canonical_key([L.A, L.B]).encode()).hexdigest()[:16]


def atlas_to_json(result: ClassificationResult, kind: str) -> dict:
    stats = {k: v for k, v in result.stats.items() if k != "wall_time"}
    return {
        "kind": kind,
        "classes": {class_hash(L): {**loom_to_json(L), "decomposable": is_decomposable(L)} for L in result.classes},
        "decomposable_count": result.decomposable_count,
        "indecomposable_count": result.indecomposable_count,
        "stats": stats,
    }


def atlas_looms(data: dict, verify: bool = True) -> dict[str, Loom]:
    return {h: loom_from_json(rec, verify) for h, rec in data["classes"].items()}


def atlas_diff(first: dict, second: dict) -> dict:
    a, b = set(first["classes"]), set(second["classes"])
    return {
        "only_first": sorted(a - b),
        "only_second": sorted(b - a),
        "common": len(a & b),
        "identical": a == b,
    }


# ---------------------------------------------------------------------------
# families of pairwise cross-intersecting hypergraphs


def mols_family(r: int) -> list[Hypergraph]:
    """``r + 1`` pairwise orthogonal perfect matchings of an ``r x r`` grid.

    Only ``r = 2`` (the three perfect matchings of ``K_4``) and ``r = 3``
    (the four parallel classes of the affine plane of order 3) are built in.
    """
    if r == 2:
        classes = [[(0, 1), (2, 3)], [(0, 2), (1, 3)], [(0, 3), (1, 2)]]
        return [make_hypergraph(4, c) for c in classes]
    if r == 3:
        pts = [(x, y) for x in range(3) for y in range(3)]
        pos = {p: i for i, p in enumerate(pts)}
        out = []
        for d in ((0, 1), (1, 0), (1, 1), (1, 2)):
            lines = set()
            for p in pts:
                line = frozenset(pos[((p[0] + t * d[0]) % 3, (p[1] + t * d[1]) % 3)] for t in range(3))
                lines.add(line)
            out.append(make_hypergraph(9, [sorted(l) for l in lines]))
        return out
    raise Unsupported(f"no built-in orthogonal matching family for r = {r}")


def fano_copies(m: int) -> list[Hypergraph]:
    return [fano_plane()] * m


def _uniformity(family: Sequence[Hypergraph]) -> Optional[int]:
    sizes = {is_uniform(H) for H in family}
    return sizes.pop() if len(sizes) == 1 else None


def _cross_candidates(family: Sequence[Hypergraph], n: int, r: int) -> list[int]:
    out = []
    for c in itertools.combinations(range(n), r):
        e = _m(c)
        if all(e & f for H in family for f in H.edges):
            out.append(e)
    return out


def family_check(family: Sequence[Hypergraph], trials: int = 0, seed: int = 0) -> dict:
    """Cross-intersection, every ``tau*``, and extension attempts.

    An extension trial picks a random nonempty set of ``r``-sets meeting
    every edge of the family and checks that some member of the enlarged
    family has ``tau* < r``.
    """
    r = _uniformity(family)
    pairs = []
    for i, j in itertools.combinations(range(len(family)), 2):
        nR = rainbow_matching_number([family[i], family[j]]).value
        pairs.append({"pair": [i, j], "nuR": nR, "cross_intersecting": nR < 2})
    cross = all(p["cross_intersecting"] for p in pairs)
    ts = [nu_star(H).value for H in family]
    report = {
        "members": len(family),
        "uniformity": r,
        "cross_intersecting": cross,
        "pairs": pairs,
        "taustar": [frac_str(t) for t in ts],
        "min_taustar": frac_str(min(ts)),
        "all_equal_r": r is not None and all(t == r for t in ts),
    }
    if trials and r is not None:
        n = family[0].n
        cand = _cross_candidates(family, n, r)
        rng = random.Random(seed)
        done, forced = 0, 0
        if cand:
            for _ in range(trials):
                k = rng.randint(1, len(cand))
                extra = Hypergraph.from_masks(n, rng.sample(cand, k))
                done += 1
                if min(ts + [nu_star(extra).value]) < r:
                    forced += 1
        report["extension"] = {"candidates": len(cand), "trials": done, "forced_below_r": forced}
    report["passed"] = cross
    return report


def random_cross_family(rng: random.Random, r: int, m: int, n: int) -> Optional[list[Hypergraph]]:
    """``m`` pairwise cross-intersecting ``r``-uniform hypergraphs on ``[n]``.

    Each member is a random nonempty set of ``r``-sets meeting every edge
    of the members drawn before it; ``None`` if that set runs dry.
    """
    allsets = [_m(c) for c in itertools.combinations(range(n), r)]
    family: list[Hypergraph] = []
    for _ in range(m):
        cand = [e for e in allsets if all(e & f for H in family for f in H.edges)]
        if not cand:
            return None
        k = rng.randint(1, min(len(cand), 2 * r))
        family.append(Hypergraph.from_masks(n, rng.sample(cand, k)))
    return family


def extension_trials(r: int, trials: int, seed: int, n: Optional[int] = None) -> dict:
    """Random families of ``r + 2`` pairwise cross-intersecting members.

    Every trial must have a member with ``tau* < r``.
    """
    n = r * r if n is None else n
    rng = random.Random(seed)
    done, violations, attempts = 0, [], 0
    while done < trials:
        attempts += 1
        fam = random_cross_family(rng, r, r + 2, n)
        if fam is None:
            continue
        done += 1
        ts = [nu_star(H).value for H in fam]
        if min(ts) >= r:
            violations.append([[bits(e) for e in H.edges] for H in fam])
    return {"r": r, "trials": done, "attempts": attempts, "violations": violations}


# ---------------------------------------------------------------------------
# property battery


def random_cross_intersecting(r: int, seed: int) -> tuple[Hypergraph, Hypergraph]:
    """A random cross-intersecting pair with ``A`` ``r``-uniform.

    ``B`` is drawn from the ``s``-sets meeting every edge of ``A``, so the
    rainbow matching number is below 2 by construction.  Some draws plant
    the rows of an ``r x r`` grid in ``A`` and its columns in ``B``, the
    shape where the fractional cover bound is attained.
    """
    rng = random.Random(seed)
    while True:
        mode = rng.random()
        if mode < 0.25:
            A, B = _planted_pair(rng, r)
        else:
            s = r if mode < 0.7 else rng.randint(1, r + 1)
            n = rng.randint(max(r, s) + 1, max(r, s) + 4)
            pool = [_m(c) for c in itertools.combinations(range(n), r)]
            A_edges = rng.sample(pool, rng.randint(1, min(5, len(pool))))
            cand = [
                _m(c) for c in itertools.combinations(range(n), s) if all(_m(c) & e for e in A_edges)
            ]
            if not cand:
                continue
            B_edges = rng.sample(cand, rng.randint(1, min(len(cand), 5)))
            A, B = Hypergraph.from_masks(n, A_edges), Hypergraph.from_masks(n, B_edges)
        return A, B


def _planted_pair(rng: random.Random, r: int) -> tuple[Hypergraph, Hypergraph]:
    n = r * r
    rows = [_m(range(i * r, i * r + r)) for i in range(r)]
    cols = [_m(range(j, n, r)) for j in range(r)]
    extra = []
    for _ in range(rng.randint(0, 3)):
        extra.append(_m(j + r * rng.randrange(r) for j in range(r)))
    A_edges = rows + extra
    cand = [
        _m(c)
        for c in itertools.combinations(range(n), r)
        if all(_m(c) & e for e in A_edges) and _m(c) not in cols
    ]
    B_edges = cols + rng.sample(cand, rng.randint(0, min(3, len(cand))))
    return Hypergraph.from_masks(n, A_edges), Hypergraph.from_masks(n, B_edges)


BATTERY_CHECKS = (
    "taustar_at_most_r",
    "taustar_at_most_max_rs",
    "equality_reaches_a_side",
    "double_cover_contains",
    "triple_cover_stable",
    "sandwich",
    "cross_intersecting",
)


def sample_checks(A: Hypergraph, B: Hypergraph) -> dict:
    """Evaluate every battery property on one pair.

    Returns ``{name: True/False/None}`` plus the numbers used.
    """
    r, s = is_uniform(A), is_uniform(B)
    U = A.union(B)
    ts = nu_star(U).value
    tA, tB = nu_star(A).value, nu_star(B).value
    integral_tau, integral_nu = tau(U).value, nu(U).value
    out: dict = {}
    out["cross_intersecting"] = rainbow_matching_number([A, B]).value < 2
    out["taustar_at_most_r"] = ts <= r if r == s else None
    out["taustar_at_most_max_rs"] = ts <= max(r, s)
    out["equality_reaches_a_side"] = (max(tA, tB) == r) if (r == s and ts == r) else None
    CsA = covers_of_size(A, s)
    CrCsA = covers_of_size(CsA, r)
    out["double_cover_contains"] = set(A.edges) <= set(CrCsA.edges)
    out["triple_cover_stable"] = covers_of_size(CrCsA, s).edges == CsA.edges
    out["sandwich"] = integral_nu <= ts <= integral_tau
    out["values"] = {
        "r": r,
        "s": s,
        "n": A.n,
        "taustar": frac_str(ts),
        "taustar_A": frac_str(tA),
        "taustar_B": frac_str(tB),
        "tau": integral_tau,
        "nu": integral_nu,
    }
    return out


def property_battery(count: int, seed: int, r: int) -> dict:
    """Run every property on ``count`` seeded samples; a deterministic report."""
    tallies = {name: {"run": 0, "violations": 0} for name in BATTERY_CHECKS}
    bad = []
    equality_cases = 0
    for i in range(count):
        A, B = random_cross_intersecting(r, seed * 1_000_003 + i)
        res = sample_checks(A, B)
        if res["equality_reaches_a_side"] is not None:
            equality_cases += 1
        for name in BATTERY_CHECKS:
            v = res[name]
            if v is None:
                continue
            tallies[name]["run"] += 1
            if not v:
                tallies[name]["violations"] += 1
                bad.append(
                    {
                        "sample": i,
                        "check": name,
                        "A": [bits(e) for e in A.edges],
                        "B": [bits(e) for e in B.edges],
                        "values": res["values"],
                    }
                )
    return {
        "r": r,
        "count": count,
        "seed": seed,
        "checks": tallies,
        "equality_cases": equality_cases,
        "violations": bad,
        "ok": not bad,
    }


__all__ = [
    "ClassificationResult",
    "Unsupported",
    "classify_33_looms",
    "enumerate_r2_looms",
    "mols_family",
    "family_check",
    "random_cross_intersecting",
    "property_battery",
]
