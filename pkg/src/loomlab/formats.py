"""JSON file formats.

Hypergraph: ``{"n": int, "edges": [[int, ...], ...], "labels": [str, ...]?}``
with 0-based vertices.  Loom: ``{"A": Hypergraph, "B": Hypergraph, "r": int,
"s": int, "report": {...}}``.  Blow-up spec: ``{"P": {"A": ..., "B": ...},
"parts": [Loom, ...]}``.  Rationals are ``"p/q"`` strings.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from .hypercore import Hypergraph, HypergraphError, bits, make_hypergraph


class FormatError(ValueError):
    pass


def hypergraph_to_json(H: Hypergraph) -> dict:
    out: dict[str, Any] = {"n": H.n, "edges": [bits(e) for e in H.edges]}
    if H.labels is not None:
        out["labels"] = list(H.labels)
    return out


def hypergraph_from_json(data: dict) -> Hypergraph:
    try:
        return make_hypergraph(int(data["n"]), data["edges"], data.get("labels"))
    except KeyError as exc:
        raise FormatError(f"hypergraph JSON lacks {exc}") from None
    except (TypeError, HypergraphError) as exc:
        raise FormatError(f"bad hypergraph JSON: {exc}") from None


def loom_to_json(L) -> dict:
    out = {
        "A": hypergraph_to_json(L.A),
        "B": hypergraph_to_json(L.B),
        "r": L.r,
        "s": L.s,
        "report": L.report.to_json(),
    }
    if L.name:
        out["name"] = L.name
    return out


def loom_pair_from_json(data: dict) -> tuple[Hypergraph, Hypergraph]:
    try:
        return hypergraph_from_json(data["A"]), hypergraph_from_json(data["B"])
    except KeyError as exc:
        raise FormatError(f"loom JSON lacks {exc}") from None


def loom_from_json(data: dict, verify: bool = True):
    """Rebuild a loom; with ``verify`` the axioms are re-checked from scratch."""
    from .loom import Loom, verify_loom

    A, B = loom_pair_from_json(data)
    if verify:
        L, rep = verify_loom(A, B)
        if L is None:
            raise FormatError("stored pair is not a loom: " + "; ".join(rep.lines()))
        L.name = data.get("name", "")
        return L
    return Loom(A, B, int(data["r"]), int(data["s"]), name=data.get("name", ""))


def dumps(obj: Any) -> str:
    """Byte-stable JSON text."""
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def read_json(path) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: {exc}") from None


def write_json(path, obj: Any) -> None:
    Path(path).write_text(dumps(obj))
