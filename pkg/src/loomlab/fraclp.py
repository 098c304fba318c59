"""Exact fractional matching and covering numbers.

The LPs here all have 0/1 constraint matrices: one row per vertex, one
column per edge.  They are solved by a revised simplex over
:class:`fractions.Fraction` with Bland's rule, so every value and every
witness is exact.  A column is stored as a bitmask over rows, which makes
pricing a sum of dual values over the vertices of an edge.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .hypercore import EmptyHypergraph, Hypergraph, HypergraphError, bits

ZERO = Fraction(0)
ONE = Fraction(1)


class NotGrounded(HypergraphError):
    pass


class EvenSubset(HypergraphError):
    pass


class TooLarge(HypergraphError):
    pass


class NotAGraph(HypergraphError):
    pass


def frac_str(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_frac(text: str) -> Fraction:
    return Fraction(text)


@dataclass
class FracCertificate:
    """Matched fractional matching (``primal``) and fractional cover (``dual``).

    ``primal`` maps edge masks to weights and ``dual`` maps vertex indices to
    weights; both omit zeros.  Equal totals prove optimality.
    """

    value: Fraction
    primal: dict[int, Fraction]
    dual: dict[int, Fraction]
    pivots: int = 0
    slack: dict = field(default_factory=dict)

    def primal_total(self) -> Fraction:
        return sum(self.primal.values(), ZERO)

    def dual_total(self) -> Fraction:
        return sum(self.dual.values(), ZERO)

    def check(self, H: Hypergraph) -> bool:
        """Feasibility of both witnesses and equality of their totals."""
        if any(w < 0 for w in self.primal.values()) or any(w < 0 for w in self.dual.values()):
            return False
        if any(e not in H for e in self.primal):
            return False
        load = _vertex_load(self.primal)
        if any(x > 1 for x in load.values()):
            return False
        for e in H.edges:
            if sum((self.dual.get(v, ZERO) for v in bits(e)), ZERO) < 1:
                return False
        return self.primal_total() == self.dual_total() == self.value

    def complementary_slackness(self, H: Hypergraph) -> bool:
        load = _vertex_load(self.primal)
        for v, g in self.dual.items():
            if g > 0 and load.get(v, ZERO) != 1:
                return False
        for e, f in self.primal.items():
            if f > 0 and sum((self.dual.get(v, ZERO) for v in bits(e)), ZERO) != 1:
                return False
        return True

    def to_json(self) -> dict:
        return {
            "quantity": "nustar",
            "value": frac_str(self.value),
            "primal": [
                {"edge": bits(e), "weight": frac_str(w)}
                for e, w in sorted(self.primal.items(), key=lambda kv: (kv[0].bit_count(), kv[0]))
            ],
            "dual": {str(v): frac_str(w) for v, w in sorted(self.dual.items())},
            "pivots": self.pivots,
        }


def _vertex_load(weights: dict[int, Fraction]) -> dict[int, Fraction]:
    load: dict[int, Fraction] = {}
    for e, w in weights.items():
        for v in bits(e):
            load[v] = load.get(v, ZERO) + w
    return load


# ---------------------------------------------------------------------------
# revised simplex on 0/1 columns


class _Simplex:
    """``max c.x`` s.t. ``A x = 1``, ``x >= 0`` where the last ``m`` columns
    are the identity (slacks or artificials) and form the starting basis."""

    def __init__(self, m: int, columns: Sequence[int], costs: Sequence[Fraction]):
        self.m = m
        self.columns = list(columns)
        self.costs = [Fraction(c) for c in costs]
        self.N = len(self.columns)
        # basis[i] = column index of the i-th basic variable
        self.basis = list(range(self.N - m, self.N))
        self.binv = [[ONE if i == j else ZERO for j in range(m)] for i in range(m)]
        self.xb = [ONE] * m
        self.pivots = 0

    def duals(self) -> list[Fraction]:
        y = [ZERO] * self.m
        for i, col in enumerate(self.basis):
            c = self.costs[col]
            if c:
                row = self.binv[i]
                for j in range(self.m):
                    if row[j]:
                        y[j] += c * row[j]
        return y

    def solve(self) -> None:
        while True:
            y = self.duals()
            entering = None
            for j in range(self.N):
                col = self.columns[j]
                d = self.costs[j]
                while col:
                    low = col & -col
                    d -= y[low.bit_length() - 1]
                    col ^= low
                if d > 0:
                    entering = j
                    break
            if entering is None:
                return
            rows = bits(self.columns[entering])
            u = [sum((self.binv[i][r] for r in rows), ZERO) for i in range(self.m)]
            leave = None
            best_ratio = None
            for i in range(self.m):
                if u[i] > 0:
                    ratio = self.xb[i] / u[i]
                    if (
                        best_ratio is None
                        or ratio < best_ratio
                        or (ratio == best_ratio and self.basis[i] < self.basis[leave])
                    ):
                        best_ratio, leave = ratio, i
            if leave is None:
                raise ArithmeticError("unbounded LP")
            self._pivot(leave, entering, u)

    def _pivot(self, p: int, entering: int, u: list[Fraction]) -> None:
        piv = u[p]
        prow = [x / piv for x in self.binv[p]]
        self.binv[p] = prow
        xp = self.xb[p] / piv
        self.xb[p] = xp
        for i in range(self.m):
            if i != p and u[i]:
                f = u[i]
                row = self.binv[i]
                for j in range(self.m):
                    if prow[j]:
                        row[j] -= f * prow[j]
                self.xb[i] -= f * xp
        self.basis[p] = entering
        self.pivots += 1

    def values(self) -> dict[int, Fraction]:
        return {col: x for col, x in zip(self.basis, self.xb) if x}


def _rows_of(H: Hypergraph) -> tuple[list[int], dict[int, int]]:
    verts = bits(H.support)
    return verts, {v: i for i, v in enumerate(verts)}


def _compress(e: int, index: dict[int, int]) -> int:
    out = 0
    for v in bits(e):
        out |= 1 << index[v]
    return out


def nu_star(H: Hypergraph) -> FracCertificate:
    """Fractional matching number with matching primal and dual witnesses.

    ``tau_star`` is the same number; read the fractional cover from ``dual``.
    """
    if not H.edges:
        raise EmptyHypergraph("nu* of an empty hypergraph")
    verts, index = _rows_of(H)
    m = len(verts)
    edges = list(H.edges)
    cols = [_compress(e, index) for e in edges] + [1 << i for i in range(m)]
    costs = [ONE] * len(edges) + [ZERO] * m
    lp = _Simplex(m, cols, costs)
    lp.solve()
    primal = {edges[c]: x for c, x in lp.values().items() if c < len(edges)}
    y = lp.duals()
    dual = {verts[i]: y[i] for i in range(m) if y[i]}
    value = sum(primal.values(), ZERO)
    cert = FracCertificate(value, primal, dual, lp.pivots)
    cert.slack = {"tight_vertices": sum(1 for x in _vertex_load(primal).values() if x == 1)}
    return cert


def tau_star(H: Hypergraph) -> Fraction:
    return nu_star(H).value


def has_perfect_fractional_matching(H: Hypergraph) -> Optional[dict[int, Fraction]]:
    """Weights with load exactly 1 at every vertex, or ``None``.

    Solved as a phase-one feasibility problem on the equality system.
    """
    if not H.is_grounded():
        raise NotGrounded("every vertex must lie in an edge")
    verts, index = _rows_of(H)
    m = len(verts)
    edges = list(H.edges)
    cols = [_compress(e, index) for e in edges] + [1 << i for i in range(m)]
    costs = [ZERO] * len(edges) + [-ONE] * m
    lp = _Simplex(m, cols, costs)
    lp.solve()
    vals = lp.values()
    if any(c >= len(edges) for c in vals):
        return None
    return {edges[c]: x for c, x in vals.items()}


def is_perfect_fractional_matching(H: Hypergraph, weights: dict[int, Fraction]) -> bool:
    if any(w < 0 for w in weights.values()) or any(e not in H for e in weights):
        return False
    load = _vertex_load(weights)
    return all(load.get(v, ZERO) == 1 for v in bits(H.support))


# ---------------------------------------------------------------------------
# graphs


def _check_graph(G: Hypergraph) -> None:
    if any(e.bit_count() != 2 for e in G.edges):
        raise NotAGraph("every edge of a graph has two vertices")


def max_degree(G: Hypergraph) -> int:
    return max((G.degree(v) for v in range(G.n)), default=0)


def t_value(G: Hypergraph, U: int) -> Fraction:
    """``2 |E(G[U])| / (|U| - 1)`` for an odd vertex set ``U`` of size at least 3."""
    _check_graph(G)
    k = U.bit_count()
    if k % 2 == 0:
        raise EvenSubset(f"|U| = {k} is even")
    if k < 3:
        raise EvenSubset("|U| must be at least 3")
    inside = sum(1 for e in G.edges if e & ~U == 0)
    return Fraction(2 * inside, k - 1)


T_MAX_LIMIT = 24


def t_max(G: Hypergraph) -> tuple[Fraction, int]:
    """Largest ``t(U)`` over odd ``U`` with ``|U| >= 3``, with a maximiser.

    Brute force; refuses graphs with more than 24 vertices.
    """
    _check_graph(G)
    if G.n > T_MAX_LIMIT:
        raise TooLarge(f"t_max is limited to {T_MAX_LIMIT} vertices")
    adj = [0] * G.n
    for e in G.edges:
        a, b = bits(e)
        adj[a] |= 1 << b
        adj[b] |= 1 << a
    best = ZERO
    best_set = 0
    for k in range(3, G.n + 1, 2):
        for combo in itertools.combinations(range(G.n), k):
            U = 0
            for v in combo:
                U |= 1 << v
            twice = sum((adj[v] & U).bit_count() for v in combo)
            t = Fraction(twice, k - 1)
            if t > best:
                best, best_set = t, U
    return best, best_set


def fractional_edge_chromatic(G: Hypergraph) -> Fraction:
    """``max(max degree, t(G))``."""
    t, _ = t_max(G)
    return max(Fraction(max_degree(G)), t)
