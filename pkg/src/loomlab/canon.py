"""Canonical labelling of (tuples of) hypergraphs.

Colour refinement on vertices followed by individualisation and search over
the remaining cells.  The certificate of a leaf is the tuple of relabelled,
sorted edge lists; the canonical form is the lexicographically least one.
Automorphisms found on the way prune sibling branches in the same orbit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .hypercore import Hypergraph, apply_perm, bits, edge_key


@dataclass(frozen=True)
class IsoCertificate:
    """Vertex map ``v -> permutation[v]``."""

    permutation: tuple[int, ...]

    def apply(self, H: Hypergraph) -> Hypergraph:
        return H.relabel(self.permutation)

    def inverse(self) -> "IsoCertificate":
        inv = [0] * len(self.permutation)
        for i, p in enumerate(self.permutation):
            inv[p] = i
        return IsoCertificate(tuple(inv))


class _Search:
    def __init__(self, families: Sequence[Hypergraph]):
        self.n = families[0].n
        self.families = [tuple(H.edges) for H in families]
        # incidence: vertex -> list of (family index, edge mask)
        self.inc: list[list[tuple[int, int]]] = [[] for _ in range(self.n)]
        for fi, edges in enumerate(self.families):
            for e in edges:
                for v in bits(e):
                    self.inc[v].append((fi, e))
        self.best: Optional[tuple] = None
        self.best_perm: Optional[list[int]] = None
        self.automorphisms: list[list[int]] = []
        self.leaves = 0

    def refine(self, cells: list[list[int]]) -> list[list[int]]:
        """Refine an ordered partition until it is equitable w.r.t. edge traces."""
        while True:
            cell_of = [0] * self.n
            for ci, cell in enumerate(cells):
                for v in cell:
                    cell_of[v] = ci
            cell_masks = []
            for cell in cells:
                m = 0
                for v in cell:
                    m |= 1 << v
                cell_masks.append(m)

            def signature(v):
                sig = []
                for fi, e in self.inc[v]:
                    sig.append((fi, tuple((e & cm).bit_count() for cm in cell_masks)))
                sig.sort()
                return tuple(sig)

            new_cells = []
            changed = False
            for cell in cells:
                if len(cell) == 1:
                    new_cells.append(cell)
                    continue
                groups: dict[tuple, list[int]] = {}
                for v in cell:
                    groups.setdefault(signature(v), []).append(v)
                if len(groups) > 1:
                    changed = True
                    for key in sorted(groups):
                        new_cells.append(groups[key])
                else:
                    new_cells.append(cell)
            cells = new_cells
            if not changed:
                return cells

    def certificate(self, perm: list[int]) -> tuple:
        return tuple(
            tuple(sorted((apply_perm(e, perm) for e in edges), key=edge_key))
            for edges in self.families
        )

    def run(self, cells: list[list[int]], path: list[int]):
        cells = self.refine(cells)
        target = next((i for i, c in enumerate(cells) if len(c) > 1), None)
        if target is None:
            self.leaves += 1
            perm = [0] * self.n
            for pos, cell in enumerate(cells):
                perm[cell[0]] = pos
            cert = self.certificate(perm)
            if self.best is None or cert < self.best:
                self.best, self.best_perm = cert, perm
            elif cert == self.best:
                # perm^-1 . best_perm is an automorphism
                inv = [0] * self.n
                for v, p in enumerate(perm):
                    inv[p] = v
                auto = [inv[self.best_perm[v]] for v in range(self.n)]
                if any(auto[v] != v for v in range(self.n)):
                    self.automorphisms.append(auto)
            return
        cell = cells[target]
        explored: list[int] = []
        for v in cell:
            if explored and self._same_orbit(v, explored, path):
                continue
            explored.append(v)
            rest = [u for u in cell if u != v]
            child = cells[:target] + [[v], rest] + cells[target + 1:]
            self.run(child, path + [v])

    def _same_orbit(self, v: int, explored: list[int], path: list[int]) -> bool:
        gens = [a for a in self.automorphisms if all(a[p] == p for p in path)]
        if not gens:
            return False
        orbit = {v}
        frontier = [v]
        while frontier:
            x = frontier.pop()
            for g in gens:
                y = g[x]
                if y not in orbit:
                    orbit.add(y)
                    frontier.append(y)
        return any(u in orbit for u in explored)


def _initial_cells(n: int, colours: Optional[Sequence[int]]) -> list[list[int]]:
    if colours is None:
        return [list(range(n))] if n else []
    groups: dict[int, list[int]] = {}
    for v in range(n):
        groups.setdefault(colours[v], []).append(v)
    return [groups[k] for k in sorted(groups)]


def canonical_form_multi(
    families: Sequence[Hypergraph], colours: Optional[Sequence[int]] = None
) -> tuple[tuple[Hypergraph, ...], IsoCertificate]:
    """Canonically relabel several hypergraphs on one universe at once.

    Edges from different families stay distinguished, so a loom ``(A, B)``
    is relabelled as a pair.  ``colours`` optionally fixes a vertex colouring
    that relabelling must preserve.
    """
    n = families[0].n
    if any(H.n != n for H in families):
        raise ValueError("families must share a universe")
    search = _Search(families)
    if n == 0:
        return tuple(families), IsoCertificate(())
    search.run(_initial_cells(n, colours), [])
    perm = search.best_perm
    out = tuple(Hypergraph(n, edges) for edges in search.best)
    return out, IsoCertificate(tuple(perm))


def canonical_form(H: Hypergraph) -> tuple[Hypergraph, IsoCertificate]:
    (C,), cert = canonical_form_multi([H])
    return C, cert


def isomorphic_multi(
    first: Sequence[Hypergraph], second: Sequence[Hypergraph]
) -> Optional[IsoCertificate]:
    """Vertex map sending every family of ``first`` onto the matching family of ``second``."""
    if len(first) != len(second) or first[0].n != second[0].n:
        return None
    if any(len(a) != len(b) for a, b in zip(first, second)):
        return None
    c1, p1 = canonical_form_multi(first)
    c2, p2 = canonical_form_multi(second)
    if tuple(H.edges for H in c1) != tuple(H.edges for H in c2):
        return None
    inv2 = p2.inverse().permutation
    return IsoCertificate(tuple(inv2[p1.permutation[v]] for v in range(first[0].n)))


def isomorphic(H1: Hypergraph, H2: Hypergraph) -> Optional[IsoCertificate]:
    return isomorphic_multi([H1], [H2])


def canonical_key(families: Sequence[Hypergraph]) -> str:
    """Stable text key of the canonical form, usable as a dictionary key or hash input."""
    forms, _ = canonical_form_multi(families)
    return f"{forms[0].n}:" + "|".join(",".join(format(e, "x") for e in H.edges) for H in forms)
