"""Loom constructions: named looms, compositions, blow-ups and graph looms."""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from . import covers, fraclp
from .hypercore import (
    Hypergraph,
    HypergraphError,
    bits,
    connected_components,
    is_orthogonal,
    is_uniform,
    join_all,
    make_hypergraph,
    mask,
    restrict,
)
from .loom import Loom, VerificationReport, loom_closure, verify_loom


class LoomError(RuntimeError):
    """A construction that must yield a loom did not."""


class UniformityMismatch(HypergraphError):
    pass


class NotRegular(HypergraphError):
    pass


class OddOrder(HypergraphError):
    pass


class ConditionFailed(HypergraphError):
    def __init__(self, report: VerificationReport):
        super().__init__("; ".join(c.name + ": " + c.detail for c in report.failures()))
        self.report = report


class HypothesisUnmet(HypergraphError):
    pass


def _verified(A: Hypergraph, B: Hypergraph, name: str) -> Loom:
    L, rep = verify_loom(A, B)
    if L is None:
        raise LoomError(f"{name} failed verification: " + "; ".join(rep.lines()))
    L.name = name
    return L


# ---------------------------------------------------------------------------
# named looms


@functools.lru_cache(maxsize=None)
def loom_U() -> Loom:
    H = make_hypergraph(1, [[0]])
    return _verified(H, H, "U")


@functools.lru_cache(maxsize=None)
def loom_V(r: int) -> Loom:
    """The ``(r, 1)``-loom: one edge and its singletons."""
    A = make_hypergraph(r, [range(r)])
    B = make_hypergraph(r, [[v] for v in range(r)])
    return _verified(A, B, f"V{r}")


@functools.lru_cache(maxsize=None)
def matching_transversal_loom(r: int, s: int) -> Loom:
    """``s`` disjoint ``r``-sets against all of their transversals."""
    blocks = [list(range(i * r, (i + 1) * r)) for i in range(s)]
    A = make_hypergraph(r * s, blocks)
    B = make_hypergraph(r * s, itertools.product(*blocks))
    return _verified(A, B, f"MT{r},{s}")


def grid_labels(r: int) -> list[str]:
    return [str(i + 1) for i in range(r * r)]


@functools.lru_cache(maxsize=None)
def grid_loom(r: int) -> Loom:
    """Rows and columns of the ``r x r`` grid against its permutation subgrids."""
    rows = [[i * r + j for j in range(r)] for i in range(r)]
    cols = [[i * r + j for i in range(r)] for j in range(r)]
    perms = [[i * r + p[i] for i in range(r)] for p in itertools.permutations(range(r))]
    A = make_hypergraph(r * r, rows + cols, grid_labels(r))
    B = make_hypergraph(r * r, perms, grid_labels(r))
    return _verified(A, B, f"L{r},{r}")


def _digits(words: Sequence[str]) -> list[list[int]]:
    return [[int(ch) - 1 for ch in w] for w in words]


VANE_C = ["147", "258", "369", "159", "158", "247", "259", "368"]
VANE_D = ["123", "456", "789", "357", "126", "345", "489", "567"]


@functools.lru_cache(maxsize=None)
def vane_33() -> Loom:
    """The indecomposable (3,3)-loom other than the grid loom, grid-numbered."""
    C = make_hypergraph(9, _digits(VANE_C), grid_labels(3))
    D = make_hypergraph(9, _digits(VANE_D), grid_labels(3))
    return _verified(C, D, "V3,3")


def fano_plane() -> Hypergraph:
    lines = ["124", "235", "346", "457", "561", "672", "713"]
    return make_hypergraph(7, _digits(lines))


# ---------------------------------------------------------------------------
# composition


def _move(e: int, targets: Sequence[int]) -> int:
    m = 0
    for v in bits(e):
        m |= 1 << targets[v]
    return m


def place(H: Hypergraph, targets: Sequence[int], n: int) -> Hypergraph:
    """Send vertex ``v`` of ``H`` to ``targets[v]`` in a universe of size ``n``."""
    return Hypergraph.from_masks(n, (_move(e, targets) for e in H.edges))


def _concat_labels(looms: Sequence[Loom]) -> Optional[list[str]]:
    labels = []
    for i, L in enumerate(looms):
        own = L.A.labels or [str(v + 1) for v in range(L.n)]
        labels.extend(f"{i + 1}.{x}" for x in own)
    return labels


def _compose(L1: Loom, L2: Loom, which: int, verify: bool) -> Loom:
    n = L1.n + L2.n
    first = list(range(L1.n))
    second = list(range(L1.n, n))
    A1, B1 = place(L1.A, first, n), place(L1.B, first, n)
    A2, B2 = place(L2.A, second, n), place(L2.B, second, n)
    if which == 1:
        if L1.s != L2.s:
            raise UniformityMismatch(f"1-composition needs equal s, got {L1.s} and {L2.s}")
        A, B = join_all([A1, A2]), B1.union(B2)
        r, s = L1.r + L2.r, L1.s
    else:
        if L1.r != L2.r:
            raise UniformityMismatch(f"2-composition needs equal r, got {L1.r} and {L2.r}")
        A, B = A1.union(A2), join_all([B1, B2])
        r, s = L1.r, L1.s + L2.s
    labels = _concat_labels([L1, L2])
    A = Hypergraph(n, A.edges, tuple(labels))
    B = Hypergraph(n, B.edges, tuple(labels))
    name = f"({L1.name or '?'} x{which} {L2.name or '?'})"
    provenance = {"op": f"compose{which}", "factors": [L1.name, L2.name], "offsets": [0, L1.n]}
    if verify:
        L = _verified(A, B, name)
    else:
        rep = VerificationReport()
        ok, bad = is_orthogonal(A, B)
        rep.add("A_uniform", is_uniform(A) == r, f"r={r}")
        rep.add("B_uniform", is_uniform(B) == s, f"s={s}")
        rep.add("orthogonal", ok, "", None if ok else {"a": bits(bad[0]), "b": bits(bad[1])})
        rep.add("composition", True, "tau and closure axioms follow from verified factors")
        if not rep.ok:
            raise LoomError(f"{name}: " + "; ".join(rep.lines()))
        L = Loom(A, B, r, s, rep, name)
    L.provenance = provenance
    return L


def compose1(L1: Loom, L2: Loom, verify: bool = True) -> Loom:
    """``(A1 * A2, B1 | B2)`` on disjoint copies; needs equal ``s``."""
    return _compose(L1, L2, 1, verify)


def compose2(L1: Loom, L2: Loom, verify: bool = True) -> Loom:
    """``(A1 | A2, B1 * B2)`` on disjoint copies; needs equal ``r``."""
    return _compose(L1, L2, 2, verify)


def compose_many(looms: Sequence[Loom], which: int, verify: bool = True) -> Loom:
    out = looms[0]
    for L in looms[1:]:
        out = _compose(out, L, which, verify)
    return out


# ---------------------------------------------------------------------------
# decomposition


def compact(hypergraphs: Sequence[Hypergraph], vertices: int) -> tuple[list[Hypergraph], list[int]]:
    """Re-index hypergraphs living inside ``vertices`` onto ``0..k-1``.

    Returns the new hypergraphs and the list of original vertex indices.
    """
    old = bits(vertices)
    pos = {v: i for i, v in enumerate(old)}
    out = []
    for H in hypergraphs:
        labels = None
        if H.labels is not None:
            labels = [H.labels[v] for v in old]
        masks = []
        for e in H.edges:
            m = 0
            for v in bits(e):
                m |= 1 << pos[v]
            masks.append(m)
        out.append(Hypergraph.from_masks(len(old), masks, labels))
    return out, old


@dataclass
class Split:
    """One level of decomposition: ``kind`` 1 means ``L = F1 x1 F2 x1 ...``."""

    kind: int
    factors: list[Loom]
    vertex_maps: list[list[int]] = field(default_factory=list)


def split(L: Loom, verify: bool = True) -> Optional[Split]:
    """Split along the components of a disconnected side, or ``None``.

    If ``B`` is disconnected each factor is ``(A restricted to V(B_i), B_i)``;
    otherwise if ``A`` is disconnected the roles swap.
    """
    for kind, joined, unioned in ((1, L.A, L.B), (2, L.B, L.A)):
        comps = connected_components(unioned)
        if len(comps) < 2:
            continue
        factors, maps = [], []
        for part, sub in comps:
            other = restrict(joined, part)
            (X, Y), old = compact([other, sub], part)
            A_i, B_i = (X, Y) if kind == 1 else (Y, X)
            if verify:
                F = _verified(A_i, B_i, f"{L.name or 'L'}/{kind}.{len(factors) + 1}")
            else:
                F = Loom(A_i, B_i, is_uniform(A_i), is_uniform(B_i), name=f"factor{len(factors) + 1}")
            factors.append(F)
            maps.append(old)
        return Split(kind, factors, maps)
    return None


def decompose(L: Loom, verify: bool = True) -> list[Loom]:
    """Indecomposable factors of ``L``; ``[L]`` when both sides are connected."""
    sp = split(L, verify)
    if sp is None:
        return [L]
    out = []
    for F in sp.factors:
        out.extend(decompose(F, verify))
    return out


def is_decomposable(L: Loom) -> bool:
    return len(connected_components(L.A)) > 1 or len(connected_components(L.B)) > 1


# ---------------------------------------------------------------------------
# blow-ups


@dataclass
class BlowupSpec:
    """An orthogonal pair ``P = (A, B)`` on ``[n]`` and one loom per vertex.

    ``placement[i]`` optionally names where the vertices of part ``i`` go in
    the blown-up universe; by default parts are laid out consecutively.
    """

    A: Hypergraph
    B: Hypergraph
    parts: list[Loom]
    placement: Optional[list[list[int]]] = None

    def __post_init__(self):
        n = self.A.n
        if self.B.n != n or len(self.parts) != n:
            raise HypergraphError("P and the part list must agree on n")
        if not (self.A.is_grounded() and self.B.is_grounded()):
            raise HypergraphError("both sides of P must cover [n]")
        ok, _ = is_orthogonal(self.A, self.B)
        if not ok:
            raise HypergraphError("P must be orthogonal")
        if self.placement is None:
            self.placement, start = [], 0
            for L in self.parts:
                self.placement.append(list(range(start, start + L.n)))
                start += L.n
        seen = [v for p in self.placement for v in p]
        if len(set(seen)) != len(seen) or any(len(p) != L.n for p, L in zip(self.placement, self.parts)):
            raise HypergraphError("placement must give each part distinct fresh vertices")

    @property
    def size(self) -> int:
        return max(v for p in self.placement for v in p) + 1


@dataclass
class BlowupResult:
    C: Hypergraph
    D: Hypergraph
    c: Optional[int]
    d: Optional[int]
    conditions: VerificationReport
    placed: list[tuple[Hypergraph, Hypergraph]]


def blow_up(spec: BlowupSpec, verify: bool = False):
    """Build ``P[L_1..L_n] = (C, D)`` and evaluate the sufficient loom conditions.

    The conditions are: ``C`` and ``D`` uniform; every minimal cover ``f`` of
    ``A`` outside ``B`` has ``sum(s_j for j in f) > d``; every minimal cover
    ``e`` of ``B`` outside ``A`` has ``sum(r_i for i in e) > c``.

    Without ``verify`` a :class:`BlowupResult` is returned.  With ``verify``
    a failed condition raises :class:`ConditionFailed`, otherwise the pair is
    verified and returned as a :class:`Loom`.
    """
    N = spec.size
    placed = [
        (place(L.A, tgt, N), place(L.B, tgt, N)) for L, tgt in zip(spec.parts, spec.placement)
    ]
    C_edges, D_edges = [], []
    for a in spec.A.edges:
        C_edges.extend(join_all([placed[i][0] for i in bits(a)]).edges)
    for b in spec.B.edges:
        D_edges.extend(join_all([placed[j][1] for j in bits(b)]).edges)
    C = Hypergraph.from_masks(N, C_edges)
    D = Hypergraph.from_masks(N, D_edges)
    c, d = is_uniform(C), is_uniform(D)

    rep = VerificationReport()
    rep.add("uniform", c is not None and d is not None, f"c={c}, d={d}")
    r = [L.r for L in spec.parts]
    s = [L.s for L in spec.parts]
    if d is not None:
        bad = [f for f in covers.minimal_covers(spec.A).edges if f not in spec.B and sum(s[j] for j in bits(f)) <= d]
        rep.add(
            "minimal_covers_of_A",
            not bad,
            "" if not bad else f"sum of s over {[j + 1 for j in bits(bad[0])]} <= d={d}",
            [bits(f) for f in bad] or None,
        )
    if c is not None:
        bad = [e for e in covers.minimal_covers(spec.B).edges if e not in spec.A and sum(r[i] for i in bits(e)) <= c]
        rep.add(
            "minimal_covers_of_B",
            not bad,
            "" if not bad else f"sum of r over {[i + 1 for i in bits(bad[0])]} <= c={c}",
            [bits(e) for e in bad] or None,
        )
    result = BlowupResult(C, D, c, d, rep, placed)
    if not verify:
        return result
    if not rep.ok:
        raise ConditionFailed(rep)
    L, vrep = verify_loom(C, D)
    if L is None:
        raise LoomError("blow-up met the sufficient conditions but failed verification")
    L.name = "blowup"
    L.report.extend(rep)
    return L


def blowup_matching_audit(spec: BlowupSpec, result: BlowupResult) -> VerificationReport:
    """Check that perfect (fractional) matchings transfer through the blow-up.

    Needs ``P`` to be a ``(p, q)``-loom, ``(C, D)`` a ``(c, d)``-loom and the
    parts inside each edge of ``A`` to share their ``s``.
    """
    P, prep = verify_loom(spec.A, spec.B)
    if P is None:
        raise HypothesisUnmet("P is not a loom")
    if result.c is None or result.d is None:
        raise HypothesisUnmet("blow-up is not uniform")
    s = [L.s for L in spec.parts]
    for a in spec.A.edges:
        if len({s[i] for i in bits(a)}) != 1:
            raise HypothesisUnmet(f"parts {[i + 1 for i in bits(a)]} have different s")
    q, d = P.s, result.d
    C = result.C
    rep = VerificationReport()

    nuA = covers.nu(spec.A).value
    if nuA == q:
        lhs = covers.nu(C).value == d
        rhs = all(covers.nu(L.A).value == L.s for L in spec.parts)
        rep.add("pm_transfer", lhs == rhs, f"nu(C)=d: {lhs}; nu(A_i)=s_i for all i: {rhs}")
    else:
        rep.add("pm_transfer", None, f"nu(A)={nuA} != q={q}")

    f = fraclp.has_perfect_fractional_matching(spec.A)
    ws = [fraclp.has_perfect_fractional_matching(L.A) for L in spec.parts]
    if f is None or any(w is None for w in ws):
        rep.add("pfm_transfer", None, "A or some A_i has no perfect fractional matching")
        return rep
    g: dict[int, Fraction] = {}
    for a, fa in f.items():
        idx = bits(a)
        sa = s[idx[0]]
        p = len(idx)
        choices = [
            [(_move(e, spec.placement[i]), w) for e, w in ws[i].items()] for i in idx
        ]
        for combo in itertools.product(*choices):
            e = 0
            weight = fa
            for part_edge, w in combo:
                e |= part_edge
                weight *= w
            weight /= Fraction(sa) ** (p - 1)
            if weight:
                g[e] = g.get(e, Fraction(0)) + weight
    ok = fraclp.is_perfect_fractional_matching(C, g)
    rep.add("pfm_transfer", ok, f"explicit weighting on {len(g)} edges of C is perfect: {ok}", None)
    rep.checks[-1].witness = {"weights": len(g)}
    return rep


# ---------------------------------------------------------------------------
# graphs


def complete_graph(n: int) -> Hypergraph:
    return make_hypergraph(n, itertools.combinations(range(n), 2))


def complete_bipartite(n: int, m: Optional[int] = None) -> Hypergraph:
    m = n if m is None else m
    return make_hypergraph(n + m, ((i, n + j) for i in range(n) for j in range(m)))


def petersen() -> Hypergraph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return make_hypergraph(10, outer + spokes + inner)


def regularity(G: Hypergraph) -> Optional[int]:
    degs = {G.degree(v) for v in range(G.n)}
    return degs.pop() if len(degs) == 1 else None


def triangle_blowup(G: Hypergraph) -> Hypergraph:
    """Replace every vertex of a cubic graph by a triangle.

    Vertex ``v`` becomes ``3v, 3v+1, 3v+2``; the ``k``-th edge at ``v`` (in
    edge order) leaves from ``3v+k``.
    """
    if regularity(G) != 3:
        raise NotRegular("triangle blow-up needs a 3-regular graph")
    slot = [0] * G.n
    edges = []
    for v in range(G.n):
        edges += [(3 * v, 3 * v + 1), (3 * v + 1, 3 * v + 2), (3 * v, 3 * v + 2)]
    for e in G.edges:
        u, v = bits(e)
        edges.append((3 * u + slot[u], 3 * v + slot[v]))
        slot[u] += 1
        slot[v] += 1
    return make_hypergraph(3 * G.n, edges)


def edge_labels(G: Hypergraph) -> list[str]:
    return ["-".join(str(v + 1) for v in bits(e)) for e in G.edges]


PM_LIMIT = 10**6


def perfect_matchings(G: Hypergraph, limit: int = PM_LIMIT) -> list[int]:
    """All perfect matchings of ``G`` as masks over edge indices."""
    index = {e: i for i, e in enumerate(G.edges)}
    inc: list[list[int]] = [[] for _ in range(G.n)]
    for e in G.edges:
        for v in bits(e):
            inc[v].append(e)
    out: list[int] = []

    def rec(left: int, chosen: int):
        if not left:
            out.append(chosen)
            if len(out) > limit:
                raise covers.BudgetExceeded("pm", len(out), None, len(out))
            return
        low = left & -left
        v = low.bit_length() - 1
        for e in inc[v]:
            if e & ~left == 0:
                rec(left & ~e, chosen | (1 << index[e]))

    if G.n % 2 == 0:
        rec((1 << G.n) - 1, 0)
    return out


def pm_hypergraph(G: Hypergraph) -> Hypergraph:
    """Perfect matchings of ``G`` as a hypergraph on the edge set of ``G``."""
    return Hypergraph.from_masks(len(G.edges), perfect_matchings(G), edge_labels(G))


def star_hypergraph(G: Hypergraph) -> Hypergraph:
    """Vertex stars of ``G`` as a hypergraph on the edge set of ``G``."""
    stars = []
    for v in range(G.n):
        b = 1 << v
        m = mask(i for i, e in enumerate(G.edges) if e & b)
        if m:
            stars.append(m)
    return Hypergraph.from_masks(len(G.edges), stars, edge_labels(G))


def graph_loom(G: Hypergraph, budget: Optional[int] = None) -> tuple[Optional[Loom], VerificationReport]:
    """Loom closure of ``(PM(G), ST(G))`` for a regular graph of even order."""
    s = regularity(G)
    if s is None:
        raise NotRegular("graph looms need a regular graph")
    if G.n % 2:
        raise OddOrder("graph looms need an even number of vertices")
    A, B = pm_hypergraph(G), star_hypergraph(G)
    if not A.edges:
        rep = VerificationReport()
        rep.add("perfect_matchings", False, "graph has no perfect matching")
        return None, rep
    L, rep = loom_closure(A, B, budget)
    if L is not None:
        labels = edge_labels(G)
        L.A = Hypergraph(L.A.n, L.A.edges, tuple(labels))
        L.B = Hypergraph(L.B.n, L.B.edges, tuple(labels))
        L.name = f"L(G{G.n})"
    return L, rep


# ---------------------------------------------------------------------------
# (r, 2)-looms


def r2_loom(q: Sequence[int]) -> Loom:
    """The ``(sum q, 2)``-loom with blocks ``X_i1, X_i2`` of size ``q_i``.

    ``A`` holds the ``2^t`` unions picking one side per block, ``B`` the
    complete bipartite graphs between the two sides of each block.
    """
    sides = []
    start = 0
    for qi in q:
        sides.append((list(range(start, start + qi)), list(range(start + qi, start + 2 * qi))))
        start += 2 * qi
    n = start
    A = [sum(choice, []) for choice in itertools.product(*sides)]
    B = [(u, v) for X1, X2 in sides for u in X1 for v in X2]
    return _verified(make_hypergraph(n, A), make_hypergraph(n, B), "R2" + "+".join(map(str, q)))
