"""Hypergraphs over bitmask edges.

An edge is a Python ``int`` used as a bit vector: bit ``i`` set means vertex
``i`` belongs to the edge.  A :class:`Hypergraph` keeps its edges deduplicated
and sorted by ``(size, value)``; that order is the tie-break for every search
in the package.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence


class HypergraphError(ValueError):
    pass


class IndexOutOfRange(HypergraphError):
    pass


class EmptyEdge(HypergraphError):
    pass


class EmptyHypergraph(HypergraphError):
    pass


class UniverseMismatch(HypergraphError):
    pass


class UniverseOverlap(HypergraphError):
    pass


class NotUniform(HypergraphError):
    pass


# ---------------------------------------------------------------------------
# bit helpers


def popcount(x: int) -> int:
    return x.bit_count()


def bits(x: int) -> list[int]:
    """Indices of the set bits of ``x`` in increasing order."""
    out = []
    while x:
        low = x & -x
        out.append(low.bit_length() - 1)
        x ^= low
    return out


def mask(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def full_mask(n: int) -> int:
    return (1 << n) - 1


def edge_key(e: int) -> tuple[int, int]:
    return (e.bit_count(), e)


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Hypergraph:
    """A finite hypergraph on the vertex universe ``0..n-1``.

    Build instances with :func:`make_hypergraph` or :meth:`from_masks`; the
    raw constructor trusts its input.
    """

    n: int
    edges: tuple[int, ...]
    labels: Optional[tuple[str, ...]] = field(default=None, compare=False)

    @classmethod
    def from_masks(cls, n: int, masks: Iterable[int], labels=None) -> "Hypergraph":
        limit = 1 << n
        uniq = set()
        for e in masks:
            if e == 0:
                raise EmptyEdge("empty edge")
            if e >= limit or e < 0:
                raise IndexOutOfRange(f"edge {bits(e)} exceeds universe of size {n}")
            uniq.add(e)
        if labels is not None:
            labels = tuple(str(x) for x in labels)
            if len(labels) != n:
                raise HypergraphError(f"expected {n} labels, got {len(labels)}")
        return cls(n, tuple(sorted(uniq, key=edge_key)), labels)

    def __len__(self) -> int:
        return len(self.edges)

    def __iter__(self):
        return iter(self.edges)

    def __contains__(self, e: int) -> bool:
        return e in self._edge_set

    @property
    def _edge_set(self) -> frozenset[int]:
        cached = self.__dict__.get("_es")
        if cached is None:
            cached = frozenset(self.edges)
            object.__setattr__(self, "_es", cached)
        return cached

    @property
    def support(self) -> int:
        """Union of all edges, as a mask."""
        cached = self.__dict__.get("_support")
        if cached is None:
            cached = 0
            for e in self.edges:
                cached |= e
            object.__setattr__(self, "_support", cached)
        return cached

    def is_grounded(self) -> bool:
        return self.support == full_mask(self.n)

    def edge_lists(self) -> list[list[int]]:
        return [bits(e) for e in self.edges]

    def degree(self, v: int) -> int:
        b = 1 << v
        return sum(1 for e in self.edges if e & b)

    def sizes(self) -> set[int]:
        return {e.bit_count() for e in self.edges}

    def union(self, other: "Hypergraph") -> "Hypergraph":
        if other.n != self.n:
            raise UniverseMismatch(f"universes differ: {self.n} vs {other.n}")
        return Hypergraph.from_masks(self.n, self.edges + other.edges, self.labels)

    def with_n(self, n: int) -> "Hypergraph":
        """Same edges on a larger universe."""
        if n < self.n:
            raise HypergraphError("cannot shrink universe")
        return Hypergraph(n, self.edges, None)

    def shifted(self, offset: int, n: int) -> "Hypergraph":
        """Move every vertex ``v`` to ``v + offset`` inside a universe of size ``n``."""
        if offset + self.n > n:
            raise IndexOutOfRange("shift leaves the universe")
        return Hypergraph(n, tuple(sorted((e << offset for e in self.edges), key=edge_key)))

    def relabel(self, perm: Sequence[int]) -> "Hypergraph":
        """Apply the vertex map ``v -> perm[v]``."""
        return Hypergraph.from_masks(self.n, (apply_perm(e, perm) for e in self.edges))

    def format(self, one_based: bool = True) -> str:
        base = 1 if one_based else 0
        parts = []
        for e in self.edges:
            vs = [v + base for v in bits(e)]
            if self.n + base <= 10:
                parts.append("".join(str(v) for v in vs))
            else:
                parts.append("{" + ",".join(str(v) for v in vs) + "}")
        return "{" + ", ".join(parts) + "}"

    def __repr__(self) -> str:
        return f"Hypergraph(n={self.n}, edges={self.format(one_based=False)})"


def make_hypergraph(n: int, edges: Iterable[Iterable[int]], labels=None) -> Hypergraph:
    """Build a hypergraph from vertex-index collections.

    Raises :class:`IndexOutOfRange` for indices outside ``0..n-1`` and
    :class:`EmptyEdge` for an empty edge.
    """
    masks = []
    for edge in edges:
        edge = list(edge)
        if not edge:
            raise EmptyEdge("empty edge")
        for v in edge:
            if not 0 <= v < n:
                raise IndexOutOfRange(f"vertex {v} not in 0..{n - 1}")
        masks.append(mask(edge))
    return Hypergraph.from_masks(n, masks, labels)


def apply_perm(e: int, perm: Sequence[int]) -> int:
    out = 0
    for v in bits(e):
        out |= 1 << perm[v]
    return out


# ---------------------------------------------------------------------------
# predicates and set algebra


def is_uniform(H: Hypergraph) -> Optional[int]:
    """Common edge size of ``H``, or ``None`` when sizes differ."""
    if not H.edges:
        raise EmptyHypergraph("uniformity of an empty hypergraph is undefined")
    sizes = H.sizes()
    return sizes.pop() if len(sizes) == 1 else None


def is_orthogonal(A: Hypergraph, B: Hypergraph) -> tuple[bool, Optional[tuple[int, int]]]:
    """Check ``|a & b| == 1`` for all pairs; returns the first violating pair."""
    if A.n != B.n:
        raise UniverseMismatch(f"universes differ: {A.n} vs {B.n}")
    for a in A.edges:
        for b in B.edges:
            x = a & b
            if x == 0 or x & (x - 1):
                return False, (a, b)
    return True, None


def is_cross_intersecting(A: Hypergraph, B: Hypergraph) -> bool:
    return all(a & b for a in A.edges for b in B.edges)


def join(A: Hypergraph, C: Hypergraph) -> Hypergraph:
    """All unions ``a | c``; the two hypergraphs must live on disjoint vertices."""
    if A.n != C.n:
        raise UniverseMismatch(f"universes differ: {A.n} vs {C.n}")
    if A.support & C.support:
        raise UniverseOverlap(f"shared vertices {bits(A.support & C.support)}")
    return Hypergraph.from_masks(A.n, (a | c for a in A.edges for c in C.edges))


def join_all(parts: Sequence[Hypergraph]) -> Hypergraph:
    out = parts[0]
    for P in parts[1:]:
        out = join(out, P)
    return out


def restrict(H: Hypergraph, T: int, with_dropped: bool = False):
    """``{h & T : h in H}`` with empty traces removed.

    With ``with_dropped`` the number of edges whose trace was empty is
    returned alongside.
    """
    traces = [h & T for h in H.edges]
    dropped = sum(1 for t in traces if t == 0)
    out = Hypergraph.from_masks(H.n, (t for t in traces if t))
    return (out, dropped) if with_dropped else out


def induced(H: Hypergraph, T: int) -> Hypergraph:
    """Edges of ``H`` lying inside ``T``."""
    return Hypergraph(H.n, tuple(e for e in H.edges if e & ~T == 0))


def connected_components(H: Hypergraph) -> list[tuple[int, Hypergraph]]:
    """Components of the 1-skeleton, as ``(vertex mask, sub-hypergraph)`` pairs.

    Parts are ordered by their lowest vertex.
    """
    parent = list(range(H.n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in H.edges:
        vs = bits(e)
        r0 = find(vs[0])
        for v in vs[1:]:
            rv = find(v)
            if rv != r0:
                parent[rv] = r0
    groups: dict[int, int] = {}
    for v in bits(H.support):
        root = find(v)
        groups[root] = groups.get(root, 0) | (1 << v)
    parts = sorted(groups.values(), key=lambda m: (m & -m))
    return [(p, induced(H, p)) for p in parts]


def is_connected(H: Hypergraph) -> bool:
    return len(connected_components(H)) <= 1


def star(H: Hypergraph, v: int) -> Hypergraph:
    if not 0 <= v < H.n:
        raise IndexOutOfRange(f"vertex {v} not in 0..{H.n - 1}")
    b = 1 << v
    return Hypergraph(H.n, tuple(e for e in H.edges if e & b))


def is_r_partite(H: Hypergraph) -> Optional[list[int]]:
    """Sides ``V_1..V_r`` (as masks) with every edge meeting each side once.

    Found by backtracking colouring of the 1-skeleton with ``r`` colours;
    ``None`` if no such partition exists.
    """
    r = is_uniform(H)
    if r is None:
        raise NotUniform("r-partiteness needs a uniform hypergraph")
    verts = bits(H.support)
    nbr = {v: 0 for v in verts}
    for e in H.edges:
        for v in bits(e):
            nbr[v] |= e & ~(1 << v)
    # most constrained first keeps the search short
    order = sorted(verts, key=lambda v: -popcount(nbr[v]))
    colour: dict[int, int] = {}

    def place(i: int, used: int) -> bool:
        if i == len(order):
            return True
        v = order[i]
        banned = {colour[u] for u in bits(nbr[v]) if u in colour}
        # colours beyond the first unused one are symmetric
        for c in range(min(r, used + 1)):
            if c in banned:
                continue
            colour[v] = c
            if place(i + 1, max(used, c + 1)):
                return True
            del colour[v]
        return False

    if not place(0, 0):
        return None
    sides = [0] * r
    for v, c in colour.items():
        sides[c] |= 1 << v
    return sides


def complement_universe(H: Hypergraph) -> int:
    return full_mask(H.n) & ~H.support


def all_subsets_of_size(n: int, k: int):
    for combo in itertools.combinations(range(n), k):
        yield mask(combo)
