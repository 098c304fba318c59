"""Independent re-checker for emitted certificates.

Deliberately self-contained: it imports nothing from the rest of the
package, works on the JSON shapes (vertex lists and ``"p/q"`` strings) and
uses only Python sets, ``itertools`` and ``Fraction``.  Every function
returns a dict with a boolean ``ok`` and the individual findings.

Optimality of an integral value is confirmed by brute force when the
search space is small enough (``limit`` subsets); otherwise ``optimal`` is
``None`` (not checked).
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from math import comb

LIMIT = 2_000_000


def _edges(edges) -> list[frozenset]:
    return [frozenset(e) for e in edges]


def _vertices(edges) -> set:
    out: set = set()
    for e in edges:
        out |= set(e)
    return out


def _meets_all(S, edges) -> bool:
    return all(S & e for e in edges)


def check_tau(edges, cert: dict, limit: int = LIMIT) -> dict:
    E = _edges(edges)
    k = int(cert["value"])
    W = frozenset(cert["witness"][0]) if cert["witness"] else frozenset()
    feasible = len(W) == k and _meets_all(W, E)
    V = sorted(_vertices(E))
    optimal = None
    if k == 0:
        optimal = not E
    elif comb(len(V), k - 1) <= limit:
        optimal = not any(_meets_all(frozenset(c), E) for c in itertools.combinations(V, k - 1))
    return {"quantity": "tau", "feasible": feasible, "optimal": optimal, "ok": feasible and optimal is not False}


def _is_matching(chosen) -> bool:
    seen: set = set()
    for e in chosen:
        if seen & e:
            return False
        seen |= e
    return True


def _has_matching(E, k: int, limit: int):
    """``True``/``False`` if a ``k``-matching exists, ``None`` if too costly."""
    if comb(len(E), k) > limit:
        return None
    return any(_is_matching(c) for c in itertools.combinations(E, k))


def check_nu(edges, cert: dict, limit: int = LIMIT) -> dict:
    E = _edges(edges)
    k = int(cert["value"])
    W = [frozenset(w) for w in cert["witness"]]
    feasible = len(W) == k and all(w in E for w in W) and _is_matching(W)
    bigger = _has_matching(list(set(E)), k + 1, limit)
    optimal = None if bigger is None else not bigger
    return {"quantity": "nu", "feasible": feasible, "optimal": optimal, "ok": feasible and optimal is not False}


def check_nuR(family, cert: dict, limit: int = LIMIT) -> dict:
    fam = [_edges(H) for H in family]
    k = int(cert["value"])
    W = [frozenset(w) for w in cert["witness"]]
    members = list(cert.get("members", []))
    feasible = (
        len(W) == k
        and len(members) == k
        and len(set(members)) == k
        and all(W[i] in fam[members[i]] for i in range(k))
        and _is_matching(W)
    )
    optimal = True
    if k < len(fam):
        groups = list(itertools.combinations(range(len(fam)), k + 1))
        work = sum(_prod(len(fam[i]) for i in idx) for idx in groups)
        if work > limit:
            optimal = None
        else:
            for idx in groups:
                if any(_is_matching(c) for c in itertools.product(*(fam[i] for i in idx))):
                    optimal = False
                    break
    return {"quantity": "nuR", "feasible": feasible, "optimal": optimal, "ok": feasible and optimal is not False}


def _prod(xs) -> int:
    out = 1
    for x in xs:
        out *= x
    return out


def check_nustar(edges, cert: dict) -> dict:
    """Primal and dual feasibility plus equal totals prove the LP value."""
    E = _edges(edges)
    value = Fraction(cert["value"])
    primal = {frozenset(p["edge"]): Fraction(p["weight"]) for p in cert["primal"]}
    dual = {int(v): Fraction(w) for v, w in cert["dual"].items()}
    load: dict = {}
    for e, w in primal.items():
        for v in e:
            load[v] = load.get(v, Fraction(0)) + w
    primal_ok = (
        all(w >= 0 for w in primal.values())
        and all(e in E for e in primal)
        and all(x <= 1 for x in load.values())
    )
    dual_ok = all(w >= 0 for w in dual.values()) and all(
        sum((dual.get(v, Fraction(0)) for v in e), Fraction(0)) >= 1 for e in E
    )
    totals = sum(primal.values(), Fraction(0)) == value == sum(dual.values(), Fraction(0))
    return {
        "quantity": "nustar",
        "primal_feasible": primal_ok,
        "dual_feasible": dual_ok,
        "equal_totals": totals,
        "ok": primal_ok and dual_ok and totals,
    }


def check_perfect_fractional(edges, weights: dict) -> dict:
    """``weights`` maps a tuple of vertices (or ``"1,2,3"`` text) to a rational."""
    E = set(_edges(edges))
    load: dict = {}
    ok = True
    for key, w in weights.items():
        e = frozenset(int(x) for x in key.split(",")) if isinstance(key, str) else frozenset(key)
        w = Fraction(w)
        ok &= w >= 0 and e in E
        for v in e:
            load[v] = load.get(v, Fraction(0)) + w
    ok &= all(load.get(v, 0) == 1 for v in _vertices(E))
    return {"quantity": "pfm", "ok": bool(ok)}


def _covers_of_size(edges, vertices, k: int) -> set:
    return {frozenset(c) for c in itertools.combinations(sorted(vertices), k) if _meets_all(frozenset(c), edges)}


def check_loom(data: dict, limit: int = LIMIT) -> dict:
    """Re-derive every loom axiom for a Loom JSON record from scratch."""
    A = set(_edges(data["A"]["edges"]))
    B = set(_edges(data["B"]["edges"]))
    r, s = int(data["r"]), int(data["s"])
    V = set(range(int(data["A"]["n"])))
    out: dict = {}
    out["nonempty"] = bool(A) and bool(B)
    out["uniform"] = all(len(a) == r for a in A) and all(len(b) == s for b in B)
    out["orthogonal"] = all(len(a & b) == 1 for a in A for b in B)
    small = comb(len(V), max(r, s)) <= limit
    if small:
        CrB = _covers_of_size(B, V, r)
        CsA = _covers_of_size(A, V, s)
        out["A_equals_CrB"] = CrB == A
        out["B_equals_CsA"] = CsA == B
        out["tau_A"] = not _covers_of_size(A, V, s - 1) and bool(CsA)
        out["tau_B"] = not _covers_of_size(B, V, r - 1) and bool(CrB)
    else:
        for name in ("A_equals_CrB", "B_equals_CsA", "tau_A", "tau_B"):
            out[name] = None
    return {"quantity": "loom", "checks": out, "ok": all(v is not False for v in out.values())}


def check_certificate(edges, cert: dict, limit: int = LIMIT) -> dict:
    q = cert.get("quantity")
    if q == "tau":
        return check_tau(edges, cert, limit)
    if q == "nu":
        return check_nu(edges, cert, limit)
    if q == "nustar":
        return check_nustar(edges, cert)
    raise ValueError(f"unknown certificate quantity {q!r}")
