"""Exact integral covering and matching.

All searches work on bitmask edges.  Budgets count search nodes; running out
raises :class:`BudgetExceeded` carrying the best bounds known at that point,
never a guessed exact value.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .hypercore import (
    EmptyHypergraph,
    Hypergraph,
    UniverseMismatch,
    bits,
    edge_key,
    full_mask,
)

DEFAULT_BUDGET = 10**8


class BudgetExceeded(RuntimeError):
    def __init__(self, quantity: str, lower: int, upper: Optional[int], nodes: int, witness=None):
        super().__init__(
            f"{quantity}: node budget exhausted after {nodes} nodes (bounds {lower}..{upper})"
        )
        self.quantity = quantity
        self.lower = lower
        self.upper = upper
        self.nodes = nodes
        self.witness = witness


@dataclass(frozen=True)
class IntCertificate:
    """An exact integral optimum with a feasible witness.

    ``witness`` is a list of vertex masks: the single cover for ``tau``, the
    matching edges for ``nu`` and ``nuR``.  For ``nuR`` the member index of
    each edge is in ``members``.  ``nodes`` and ``depth`` attest the
    exhaustive search that proved optimality.
    """

    quantity: str
    value: int
    witness: tuple[int, ...]
    nodes: int
    depth: int = 0
    members: tuple[int, ...] = field(default=())
    proof: str = "exhaustive"

    def witness_lists(self) -> list[list[int]]:
        if self.quantity == "tau":
            return [bits(self.witness[0])] if self.witness else [[]]
        return [bits(w) for w in self.witness]

    def to_json(self) -> dict:
        out = {
            "quantity": self.quantity,
            "value": self.value,
            "witness": self.witness_lists(),
            "nodes": self.nodes,
        }
        if self.members:
            out["members"] = list(self.members)
        return out


class _Counter:
    __slots__ = ("nodes", "budget", "depth")

    def __init__(self, budget):
        self.nodes = 0
        self.depth = 0
        self.budget = DEFAULT_BUDGET if budget is None else budget

    def tick(self, depth: int):
        self.nodes += 1
        if depth > self.depth:
            self.depth = depth
        if self.nodes > self.budget:
            raise _OutOfBudget


class _OutOfBudget(Exception):
    pass


def _packing_bound(edges: Sequence[int], allowed: int) -> int:
    """Greedy count of edges with pairwise disjoint allowed parts."""
    used = 0
    count = 0
    for e in edges:
        part = e & allowed
        if not part & used:
            used |= part
            count += 1
    return count


def _degree_bound(edges: Sequence[int], allowed: int) -> int:
    """``ceil(#edges / max vertex degree)`` over allowed vertices."""
    if not edges:
        return 0
    deg: dict[int, int] = {}
    for e in edges:
        x = e & allowed
        while x:
            low = x & -x
            deg[low] = deg.get(low, 0) + 1
            x ^= low
    if not deg:
        return math.inf
    return -(-len(edges) // max(deg.values()))


def _lower_bound(edges: Sequence[int], allowed: int) -> int:
    if not edges:
        return 0
    return max(_packing_bound(edges, allowed), _degree_bound(edges, allowed))


def _greedy_cover(edges: Sequence[int]) -> int:
    cover = 0
    remaining = list(edges)
    while remaining:
        deg: dict[int, int] = {}
        for e in remaining:
            x = e
            while x:
                low = x & -x
                deg[low] = deg.get(low, 0) + 1
                x ^= low
        best = max(deg, key=lambda b: (deg[b], -b))
        cover |= best
        remaining = [e for e in remaining if not e & best]
    return cover


# ---------------------------------------------------------------------------
# covering number


@functools.lru_cache(maxsize=512)
def _tau_cached(H: Hypergraph, budget: Optional[int]) -> IntCertificate:
    edges = list(H.edges)
    best_cover = _greedy_cover(edges)
    best = [best_cover.bit_count(), best_cover]
    counter = _Counter(budget)

    def search(chosen: int, size: int, excluded: int, uncovered: list[int], depth: int):
        counter.tick(depth)
        if not uncovered:
            if size < best[0]:
                best[0], best[1] = size, chosen
            return
        allowed = ~excluded
        if size + _lower_bound(uncovered, allowed) >= best[0]:
            return
        e = min(uncovered, key=lambda x: (x & allowed).bit_count())
        part = e & allowed
        if not part:
            return
        banned = excluded
        for v in bits(part):
            b = 1 << v
            rest = [u for u in uncovered if not u & b]
            search(chosen | b, size + 1, banned, rest, depth + 1)
            banned |= b
            if size + 1 >= best[0]:
                break

    try:
        search(0, 0, 0, edges, 0)
    except _OutOfBudget:
        raise BudgetExceeded("tau", 0, best[0], counter.nodes, best[1]) from None
    return IntCertificate("tau", best[0], (best[1],), counter.nodes, counter.depth)


def tau(H: Hypergraph, budget: Optional[int] = None) -> IntCertificate:
    """Covering number with a minimum cover as witness (branch and bound)."""
    if not H.edges:
        raise EmptyHypergraph("tau of an empty hypergraph")
    return _tau_cached(H, budget)


def has_cover_of_size(H: Hypergraph, k: int, budget: Optional[int] = None) -> Optional[int]:
    """Some cover with at most ``k`` vertices, or ``None``."""
    edges = list(H.edges)
    counter = _Counter(budget)
    greedy = _greedy_cover(edges)
    if greedy.bit_count() <= k:
        return greedy
    found = []

    def search(chosen, size, excluded, uncovered, depth):
        counter.tick(depth)
        if not uncovered:
            found.append(chosen)
            return True
        allowed = ~excluded
        if size + _lower_bound(uncovered, allowed) > k:
            return False
        e = min(uncovered, key=lambda x: (x & allowed).bit_count())
        banned = excluded
        for v in bits(e & allowed):
            b = 1 << v
            if search(chosen | b, size + 1, banned, [u for u in uncovered if not u & b], depth + 1):
                return True
            banned |= b
        return False

    try:
        search(0, 0, 0, edges, 0)
    except _OutOfBudget:
        raise BudgetExceeded("tau", 0, None, counter.nodes) from None
    return found[0] if found else None


# ---------------------------------------------------------------------------
# enumeration of covers


def _cover_search(
    H: Hypergraph, k: Optional[int], minimal: bool, counter: _Counter, max_size: Optional[int]
) -> list[int]:
    """Enumerate covers.

    Branching on an uncovered edge ``e = v1..vm`` tries "``vi`` is the first
    vertex of ``e`` in the cover", excluding ``v1..v(i-1)``.  Every target set
    therefore has exactly one search path, so no deduplication is needed.
    """
    edges = list(H.edges)
    universe = full_mask(H.n)
    out: list[int] = []
    limit = k if k is not None else max_size

    def privates_ok(chosen: int) -> bool:
        # every chosen vertex must still own an edge it alone covers
        need = chosen
        for e in edges:
            x = e & chosen
            if x and not x & (x - 1):
                need &= ~x
                if not need:
                    return True
        return need == 0

    def search(chosen: int, size: int, excluded: int, uncovered: list[int], depth: int):
        counter.tick(depth)
        if minimal and size > 1 and not privates_ok(chosen):
            return
        if not uncovered:
            if minimal:
                out.append(chosen)
                return
            extra = k - size
            free = bits(universe & ~chosen & ~excluded)
            if extra == 0:
                out.append(chosen)
            elif extra <= len(free):
                _extend(chosen, free, extra, out)
            return
        allowed = ~excluded
        if limit is not None and size + _lower_bound(uncovered, allowed) > limit:
            return
        e = min(uncovered, key=lambda x: (x & allowed).bit_count())
        part = e & allowed
        banned = excluded
        for v in bits(part):
            b = 1 << v
            search(chosen | b, size + 1, banned, [u for u in uncovered if not u & b], depth + 1)
            banned |= b

    search(0, 0, 0, edges, 0)
    return out


def _extend(base: int, free: list[int], extra: int, out: list[int]):
    from itertools import combinations

    for combo in combinations(free, extra):
        m = base
        for v in combo:
            m |= 1 << v
        out.append(m)


@functools.lru_cache(maxsize=512)
def _covers_cached(H: Hypergraph, k: Optional[int], minimal: bool, max_size, budget) -> Hypergraph:
    counter = _Counter(budget)
    try:
        found = _cover_search(H, k, minimal, counter, max_size)
    except _OutOfBudget:
        raise BudgetExceeded("covers", 0, None, counter.nodes) from None
    return Hypergraph.from_masks(H.n, found)


def covers_of_size(
    H: Hypergraph,
    k: Optional[int] = None,
    minimal_only: bool = False,
    max_size: Optional[int] = None,
    budget: Optional[int] = None,
) -> Hypergraph:
    """``C_k(H)``: all ``k``-subsets of the universe meeting every edge.

    With ``minimal_only`` the inclusion-minimal covers are returned instead
    and ``k`` is ignored (``max_size`` optionally caps their size).  An empty
    ``H`` is covered by the empty set only, which is not a valid edge, so the
    result is then empty for ``k == 0`` and all ``k``-sets otherwise.
    """
    if minimal_only:
        if not H.edges:
            return Hypergraph(H.n, ())
        return _covers_cached(H, None, True, max_size, budget)
    if k is None:
        raise ValueError("k is required unless minimal_only is set")
    if k <= 0 or k > H.n:
        return Hypergraph(H.n, ())
    return _covers_cached(H, k, False, None, budget)


def minimal_covers(H: Hypergraph, max_size: Optional[int] = None) -> Hypergraph:
    return covers_of_size(H, minimal_only=True, max_size=max_size)


def is_cover(H: Hypergraph, c: int) -> bool:
    return all(e & c for e in H.edges)


# ---------------------------------------------------------------------------
# exact hitting sets


def perp(H: Hypergraph, max_size: Optional[int] = None, limit: Optional[int] = None) -> list[int]:
    """Sets ``p`` with ``|p & h| == 1`` for every edge, of size at most ``max_size``.

    The default cap is the largest edge size of ``H``.  ``limit`` stops after
    that many sets.
    """
    if max_size is None:
        max_size = max((e.bit_count() for e in H.edges), default=0)
    edges = list(H.edges)
    out: list[int] = []
    universe = H.support

    def search(chosen: int, forbidden: int, size: int):
        if limit is not None and len(out) >= limit:
            return
        pending = None
        for e in edges:
            if e & chosen:
                continue
            avail = e & ~forbidden
            if not avail:
                return
            if pending is None or avail.bit_count() < (pending & ~forbidden).bit_count():
                pending = e
        if pending is None:
            out.append(chosen)
            return
        if size >= max_size:
            return
        for v in bits(pending & ~forbidden):
            b = 1 << v
            # the rest of every edge through v is now off limits
            block = 0
            for e in edges:
                if e & b:
                    block |= e
            if block & chosen:
                continue
            search(chosen | b, forbidden | (block & ~b), size + 1)
            forbidden |= b

    if not edges:
        return []
    search(0, full_mask(H.n) & ~universe, 0)
    return sorted(out, key=edge_key)


def is_pinnable(H: Hypergraph) -> Optional[int]:
    """Some member of ``H^perp`` (no size cap), or ``None``."""
    found = perp(H, max_size=H.n, limit=1)
    return found[0] if found else None


# ---------------------------------------------------------------------------
# matchings


@functools.lru_cache(maxsize=512)
def _nu_cached(H: Hypergraph, budget: Optional[int]) -> IntCertificate:
    edges = list(H.edges)
    if not edges:
        return IntCertificate("nu", 0, (), 0)
    min_size = min(e.bit_count() for e in edges)
    counter = _Counter(budget)
    best: list = [0, ()]

    # greedy start
    used = 0
    greedy = []
    for e in edges:
        if not e & used:
            used |= e
            greedy.append(e)
    best[0], best[1] = len(greedy), tuple(greedy)

    def search(avail: list[int], chosen: list[int], depth: int):
        counter.tick(depth)
        if len(chosen) > best[0]:
            best[0], best[1] = len(chosen), tuple(chosen)
        if not avail:
            return
        support = 0
        for e in avail:
            support |= e
        if len(chosen) + min(len(avail), support.bit_count() // min_size) <= best[0]:
            return
        low = support & -support
        through = [e for e in avail if e & low]
        for e in through:
            chosen.append(e)
            search([f for f in avail if not f & e], chosen, depth + 1)
            chosen.pop()
        # low unmatched
        search([f for f in avail if not f & low], chosen, depth + 1)

    try:
        search(edges, [], 0)
    except _OutOfBudget:
        raise BudgetExceeded("nu", best[0], None, counter.nodes, best[1]) from None
    return IntCertificate("nu", best[0], best[1], counter.nodes, counter.depth)


def nu(H: Hypergraph, budget: Optional[int] = None) -> IntCertificate:
    """Matching number with a maximum matching as witness."""
    return _nu_cached(H, budget)


def rainbow_matching_number(
    family: Sequence[Hypergraph], budget: Optional[int] = None
) -> IntCertificate:
    """Largest matching using edges from pairwise distinct members of ``family``."""
    if not family:
        return IntCertificate("nuR", 0, (), 0)
    n = family[0].n
    if any(H.n != n for H in family):
        raise UniverseMismatch("family members must share a universe")
    m = len(family)
    counter = _Counter(budget)
    best: list = [0, (), ()]

    def search(i: int, used: int, chosen: list[int], members: list[int], depth: int):
        counter.tick(depth)
        if len(chosen) > best[0]:
            best[0], best[1], best[2] = len(chosen), tuple(chosen), tuple(members)
        if i == m or len(chosen) + (m - i) <= best[0]:
            return
        for e in family[i].edges:
            if not e & used:
                chosen.append(e)
                members.append(i)
                search(i + 1, used | e, chosen, members, depth + 1)
                chosen.pop()
                members.pop()
                if best[0] == m:
                    return
        search(i + 1, used, chosen, members, depth + 1)

    try:
        search(0, 0, [], [], 0)
    except _OutOfBudget:
        raise BudgetExceeded("nuR", best[0], m, counter.nodes, best[1]) from None
    return IntCertificate("nuR", best[0], best[1], counter.nodes, counter.depth, best[2])


def has_perfect_matching(H: Hypergraph, universe: Optional[int] = None) -> Optional[tuple[int, ...]]:
    """A matching whose union is ``universe`` (default: the support of ``H``)."""
    target = H.support if universe is None else universe
    if not H.edges:
        return () if target == 0 else None
    by_vertex: dict[int, list[int]] = {}
    for e in H.edges:
        if e & ~target:
            continue
        for v in bits(e):
            by_vertex.setdefault(v, []).append(e)

    def search(left: int, chosen: list[int]):
        if not left:
            return tuple(chosen)
        low = left & -left
        v = low.bit_length() - 1
        for e in by_vertex.get(v, ()):
            if e & ~left == 0:
                chosen.append(e)
                got = search(left & ~e, chosen)
                if got is not None:
                    return got
                chosen.pop()
        return None

    return search(target, [])


def matchings(H: Hypergraph, size: int):
    """Yield every matching with exactly ``size`` edges (as sorted tuples)."""
    edges = list(H.edges)

    def rec(start, used, chosen):
        if len(chosen) == size:
            yield tuple(chosen)
            return
        for i in range(start, len(edges)):
            e = edges[i]
            if not e & used:
                chosen.append(e)
                yield from rec(i + 1, used | e, chosen)
                chosen.pop()

    yield from rec(0, 0, [])
