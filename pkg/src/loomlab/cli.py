"""Command-line front end.

Exit codes: 0 success, 2 verification failed, 3 budget exceeded,
64 usage or input error.  With ``--json`` results go to stdout as JSON and
errors to stderr as JSON.  Human output prints vertices 1-based; JSON is
0-based.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass
from typing import Any, Optional

from . import atlas, covers, fraclp, recheck, weave
from .covers import BudgetExceeded
from .formats import (
    FormatError,
    dumps,
    hypergraph_from_json,
    hypergraph_to_json,
    loom_from_json,
    loom_pair_from_json,
    loom_to_json,
    read_json,
    write_json,
)
from .hypercore import Hypergraph, HypergraphError, bits
from .loom import Loom, VerificationReport, audit_lemmas, conjecture_report, loom_closure, pfm_question, verify_loom

EXIT_OK = 0
EXIT_FAILED = 2
EXIT_BUDGET = 3
EXIT_USAGE = 64


class UsageError(Exception):
    pass


class Failed(Exception):
    """Verification failed; ``payload`` is still printed."""

    def __init__(self, payload: Any, lines: list[str]):
        super().__init__("verification failed")
        self.payload = payload
        self.lines = lines


# ---------------------------------------------------------------------------
# construction expressions


class ExprError(UsageError):
    def __init__(self, text: str, pos: int, message: str):
        super().__init__(f"{message} at position {pos + 1}: {text!r}")
        self.pos = pos


@dataclass
class _Arity:
    ints: int = 0
    exprs: int = 0
    path: bool = False


_FUNCS = {
    "loomU": _Arity(),
    "vane33": _Arity(),
    "petersen": _Arity(),
    "fano": _Arity(),
    "vloom": _Arity(ints=1),
    "gridloom": _Arity(ints=1),
    "kgraph": _Arity(ints=1),
    "kbip": _Arity(ints=1),
    "mtloom": _Arity(ints=2),
    "trblow": _Arity(exprs=1),
    "graphloom": _Arity(exprs=1),
    "compose1": _Arity(exprs=2),
    "compose2": _Arity(exprs=2),
    "blowup": _Arity(path=True),
}


class _Parser:
    """Recursive descent over ``name`` / ``name(args)``; whitespace is ignored."""

    def __init__(self, text: str, budget: Optional[int] = None):
        self.text = text
        self.pos = 0
        self.budget = budget

    def fail(self, message: str, pos: Optional[int] = None):
        raise ExprError(self.text, self.pos if pos is None else pos, message)

    def skip(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch: str) -> None:
        if self.peek() != ch:
            self.fail(f"expected {ch!r}")
        self.pos += 1

    def ident(self) -> str:
        self.skip()
        start = self.pos
        while self.pos < len(self.text) and (self.text[self.pos].isalnum() or self.text[self.pos] == "_"):
            self.pos += 1
        if start == self.pos or self.text[start].isdigit():
            self.fail("expected a name", start)
        return self.text[start : self.pos]

    def integer(self) -> int:
        self.skip()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if start == self.pos:
            self.fail("expected an integer")
        return int(self.text[start : self.pos])

    def path(self) -> str:
        self.skip()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos] != ")":
            self.pos += 1
        p = self.text[start : self.pos].strip()
        if not p:
            self.fail("expected a file name", start)
        return p

    def parse(self):
        value = self.expr()
        if self.peek():
            self.fail("unexpected trailing input")
        return value

    def expr(self):
        start = self.pos
        name = self.ident()
        spec = _FUNCS.get(name)
        if spec is None:
            self.fail(f"unknown name {name!r}", start)
        args: list = []
        if spec.ints or spec.exprs or spec.path:
            self.expect("(")
            count = spec.ints + spec.exprs + (1 if spec.path else 0)
            for i in range(count):
                if i:
                    self.expect(",")
                if spec.path:
                    args.append(self.path())
                elif spec.ints:
                    args.append(self.integer())
                else:
                    args.append((self.pos, self.expr()))
            self.expect(")")
        try:
            return self.apply(name, args, start)
        except (HypergraphError, FormatError) as exc:
            self.fail(f"{name}: {exc}", start)

    def _loom(self, arg) -> Loom:
        pos, v = arg
        if not isinstance(v, Loom):
            self.fail("expected a loom", pos)
        return v

    def _graph(self, arg) -> Hypergraph:
        pos, v = arg
        if not isinstance(v, Hypergraph) or any(e.bit_count() != 2 for e in v.edges):
            self.fail("expected a graph", pos)
        return v

    def apply(self, name: str, args: list, start: int):
        if name == "loomU":
            return weave.loom_U()
        if name == "vane33":
            return weave.vane_33()
        if name == "petersen":
            return weave.petersen()
        if name == "fano":
            return weave.fano_plane()
        if name == "vloom":
            return weave.loom_V(args[0])
        if name == "gridloom":
            return weave.grid_loom(args[0])
        if name == "kgraph":
            return weave.complete_graph(args[0])
        if name == "kbip":
            return weave.complete_bipartite(args[0])
        if name == "mtloom":
            return weave.matching_transversal_loom(args[0], args[1])
        if name == "trblow":
            return weave.triangle_blowup(self._graph(args[0]))
        if name == "graphloom":
            L, rep = weave.graph_loom(self._graph(args[0]), self.budget)
            if L is None:
                raise Failed({"expression": self.text, "report": rep.to_json()}, rep.lines())
            return L
        if name in ("compose1", "compose2"):
            f = weave.compose1 if name == "compose1" else weave.compose2
            return f(self._loom(args[0]), self._loom(args[1]))
        if name == "blowup":
            return _blowup_from_file(args[0])
        self.fail(f"unknown name {name!r}", start)


def _blowup_from_file(path: str) -> Loom:
    data = read_json(path)
    try:
        P = data["P"]
        A = hypergraph_from_json(P["A"])
        B = hypergraph_from_json(P["B"])
        parts = [loom_from_json(rec) for rec in data["parts"]]
    except KeyError as exc:
        raise FormatError(f"blow-up spec lacks {exc}") from None
    spec = weave.BlowupSpec(A, B, parts, data.get("placement"))
    try:
        return weave.blow_up(spec, verify=True)
    except weave.ConditionFailed as exc:
        raise Failed({"blowup": path, "report": exc.report.to_json()}, _report_lines(exc.report)) from None


def construct(expr: str, budget: Optional[int] = None):
    return _Parser(expr, budget).parse()


# ---------------------------------------------------------------------------
# input files


def _load(path: str):
    """A loom record gives ``(A, B)``, a hypergraph record gives ``H``."""
    data = read_json(path)
    if not isinstance(data, dict):
        raise FormatError(f"{path}: expected a JSON object")
    if "A" in data and "B" in data:
        return loom_pair_from_json(data)
    return hypergraph_from_json(data)


def _hypergraph(path: str) -> Hypergraph:
    got = _load(path)
    if isinstance(got, tuple):
        return got[0].union(got[1])
    return got


def _side(path: str, which: int) -> Hypergraph:
    got = _load(path)
    return got[which] if isinstance(got, tuple) else got


def _plus_one(obj):
    if isinstance(obj, bool):
        return obj
    if isinstance(obj, int):
        return obj + 1
    if isinstance(obj, list):
        return [_plus_one(x) for x in obj]
    return obj


def _fmt_set(vs) -> str:
    return "{" + ",".join(str(v + 1) for v in vs) + "}"


# ---------------------------------------------------------------------------
# verbs


def cmd_compute(args) -> tuple[Any, list[str]]:
    H = _hypergraph(args.file)
    q = args.quantity
    if q in ("tau", "nu"):
        cert = (covers.tau if q == "tau" else covers.nu)(H, args.budget)
        out = cert.to_json()
        lines = [f"{q} = {cert.value}", "witness: " + " ".join(_fmt_set(w) for w in out["witness"])]
        return out, lines
    if q in ("nustar", "taustar"):
        cert = fraclp.nu_star(H)
        out = cert.to_json()
        out["quantity"] = q
        lines = [f"{q} = {fraclp.frac_str(cert.value)}"]
        lines.append(
            "fractional matching: "
            + ", ".join(f"{_fmt_set(bits(e))}:{fraclp.frac_str(w)}" for e, w in sorted(cert.primal.items()))
        )
        lines.append(
            "fractional cover: " + ", ".join(f"{v + 1}:{fraclp.frac_str(w)}" for v, w in sorted(cert.dual.items()))
        )
        return out, lines
    if q == "chistar":
        t, U = fraclp.t_max(H)
        delta = fraclp.max_degree(H)
        value = max(fraclp.Fraction(delta), t)
        out = {
            "quantity": "chistar",
            "value": fraclp.frac_str(value),
            "max_degree": delta,
            "t": fraclp.frac_str(t),
            "U": bits(U),
        }
        return out, [f"chistar = {fraclp.frac_str(value)} (max degree {delta}, t = {fraclp.frac_str(t)} on {_fmt_set(bits(U))})"]
    raise UsageError(f"unknown quantity {q!r}")


def _report_lines(rep: VerificationReport) -> list[str]:
    lines = rep.lines()
    for c in rep.failures():
        if c.witness is not None:
            lines.append(f"  {c.name} witness (1-based): {_plus_one(c.witness)}")
    return lines


def cmd_verify(args):
    if args.what == "loom":
        if len(args.files) not in (1, 2):
            raise UsageError("verify loom takes one loom file or two hypergraph files")
        A = _side(args.files[0], 0)
        B = _side(args.files[-1], 1) if len(args.files) == 2 else _side(args.files[0], 1)
        L, rep = verify_loom(A, B, args.budget)
        out = {"loom": L is not None, "report": rep.to_json()}
        if L is not None:
            out["r"], out["s"] = L.r, L.s
        lines = _report_lines(rep)
        lines.append(f"({L.r},{L.s})-loom" if L is not None else "not a loom")
        if L is None:
            raise Failed(out, lines)
        return out, lines
    if args.what == "cert":
        if len(args.files) != 2:
            raise UsageError("verify cert takes a hypergraph file and a certificate file")
        H = _hypergraph(args.files[0])
        cert = read_json(args.files[1])
        if cert.get("quantity") == "taustar":
            cert = {**cert, "quantity": "nustar"}
        try:
            res = recheck.check_certificate(H.edge_lists(), cert)
        except (KeyError, ValueError) as exc:
            raise FormatError(f"bad certificate: {exc}") from None
        lines = [f"{k}: {v}" for k, v in res.items()]
        if not res["ok"]:
            raise Failed(res, lines)
        return res, lines
    raise UsageError(f"unknown verify target {args.what!r}")


def cmd_construct(args):
    value = construct(args.expr, args.budget)
    if isinstance(value, Loom):
        data = loom_to_json(value)
        summary = f"{value.name or 'loom'}: ({value.r},{value.s})-loom, |A|={len(value.A)}, |B|={len(value.B)}"
    else:
        data = hypergraph_to_json(value)
        summary = f"hypergraph on {value.n} vertices with {len(value)} edges"
    if args.output:
        write_json(args.output, data)
        return {"written": args.output, "summary": summary}, [summary, f"written to {args.output}"]
    return data, [dumps(data).rstrip("\n")]


def cmd_closure(args):
    A = _side(args.fileA, 0)
    B = _side(args.fileB, 1)
    L, rep = loom_closure(A, B, args.budget)
    out: dict = {"loom": L is not None, "report": rep.to_json()}
    lines = _report_lines(rep)
    if L is None:
        raise Failed(out, lines)
    out["result"] = loom_to_json(L)
    lines.append(f"({L.r},{L.s})-loom")
    lines.append(f"A = {L.A.format()}")
    lines.append(f"B = {L.B.format()}")
    if args.output:
        write_json(args.output, loom_to_json(L))
    return out, lines


def cmd_classify(args):
    if args.kind == "diff":
        if len(args.files) != 2:
            raise UsageError("classify diff takes two atlas files")
        d = atlas.atlas_diff(read_json(args.files[0]), read_json(args.files[1]))
        lines = [
            f"common classes: {d['common']}",
            f"only in first: {len(d['only_first'])}",
            f"only in second: {len(d['only_second'])}",
        ]
        if not d["identical"]:
            raise Failed(d, lines)
        return d, lines
    if args.files:
        raise UsageError("classify 33|r2 takes no file arguments")
    if args.kind == "33":
        res = atlas.classify_33_looms(workers=args.threads)
        kind = "33"
    else:
        if args.r is None:
            raise UsageError("classify r2 needs --r")
        res = atlas.enumerate_r2_looms(args.r)
        kind = f"r2:{args.r}"
    data = atlas.atlas_to_json(res, kind)
    if args.output:
        write_json(args.output, data)
    lines = res.summary_lines()
    for L in res.classes:
        tag = "decomposable" if weave.is_decomposable(L) else "indecomposable"
        lines.append(f"  {atlas.class_hash(L)}  ({L.r},{L.s})  |A|={len(L.A)} |B|={len(L.B)}  {tag}")
    return data, lines


def cmd_battery(args):
    rep = atlas.property_battery(args.count, args.seed, args.r)
    lines = [f"r={rep['r']} samples={rep['count']} seed={rep['seed']}"]
    for name, t in rep["checks"].items():
        lines.append(f"  {name}: run {t['run']}, violations {t['violations']}")
    if not rep["ok"]:
        raise Failed(rep, lines)
    return rep, lines


def cmd_audit(args):
    A, B = _load_pair(args.loomfile)
    L, vrep = verify_loom(A, B, args.budget)
    out: dict = {"verify": vrep.to_json()}
    lines = ["verification:"] + _report_lines(vrep)
    if L is None:
        raise Failed(out, lines)
    lem = audit_lemmas(L)
    conj = conjecture_report(L, args.budget)
    pfm = pfm_question(L)
    out.update(lemmas=lem.to_json(), conjecture=conj.to_json(), pfm=pfm.to_json())
    lines += ["lemmas:"] + _report_lines(lem) + ["conjectures:"] + _report_lines(conj)
    lines += ["perfect fractional matchings (informational):"] + pfm.lines()
    if not (lem.ok and conj.ok):
        raise Failed(out, lines)
    return out, lines


def _load_pair(path: str):
    got = _load(path)
    if not isinstance(got, tuple):
        raise FormatError(f"{path}: expected a loom record with A and B")
    return got


# ---------------------------------------------------------------------------
# argument parsing


class _ArgParser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _ArgParser(prog="loomlab", description="Exact computations on looms and cross-intersecting hypergraphs.")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.add_argument("--threads", type=int, default=1, help="worker count (LOOMLAB_THREADS overrides)")
    p.add_argument("--budget", type=int, default=None, help="node budget for exact searches")
    sub = p.add_subparsers(dest="verb", parser_class=_ArgParser)

    c = sub.add_parser("compute", help="tau, nu, taustar, nustar or chistar of a file")
    c.add_argument("quantity", choices=["tau", "nu", "taustar", "nustar", "chistar"])
    c.add_argument("file")
    c.set_defaults(func=cmd_compute)

    v = sub.add_parser("verify", help="verify a loom or re-check a certificate")
    v.add_argument("what", choices=["loom", "cert"])
    v.add_argument("files", nargs="+")
    v.set_defaults(func=cmd_verify)

    k = sub.add_parser("construct", help="build a named object from an expression")
    k.add_argument("expr")
    k.add_argument("-o", "--output")
    k.set_defaults(func=cmd_construct)

    cl = sub.add_parser("closure", help="loom closure of a pair")
    cl.add_argument("fileA")
    cl.add_argument("fileB")
    cl.add_argument("-o", "--output")
    cl.set_defaults(func=cmd_closure)

    s = sub.add_parser("classify", help="classification searches and atlas diffs")
    s.add_argument("kind", choices=["33", "r2", "diff"])
    s.add_argument("files", nargs="*")
    s.add_argument("--r", type=int)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_classify)

    b = sub.add_parser("battery", help="seeded property battery")
    b.add_argument("--count", type=int, default=500)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--r", type=int, default=3)
    b.set_defaults(func=cmd_battery)

    a = sub.add_parser("audit", help="lemma and conjecture report for a loom file")
    a.add_argument("loomfile")
    a.set_defaults(func=cmd_audit)
    return p


def _emit(args_json: bool, payload: Any, lines: list[str], stream) -> None:
    if args_json:
        stream.write(dumps(payload))
    else:
        for line in lines:
            print(line, file=stream)


def _error(as_json: bool, code: int, kind: str, message: str) -> int:
    if as_json:
        sys.stderr.write(dumps({"error": kind, "message": message, "exit_code": code}))
    else:
        print(f"loomlab: {kind}: {message}", file=sys.stderr)
    return code


def main(argv: Optional[list[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    as_json = "--json" in argv
    try:
        args = build_parser().parse_args(argv)
        if args.verb is None:
            raise UsageError("a verb is required")
        env = os.environ.get("LOOMLAB_THREADS")
        if env:
            try:
                args.threads = int(env)
            except ValueError:
                raise UsageError(f"LOOMLAB_THREADS must be an integer, got {env!r}") from None
        if args.threads < 1:
            raise UsageError("--threads must be positive")
        payload, lines = args.func(args)
    except UsageError as exc:
        return _error(as_json, EXIT_USAGE, "usage", str(exc))
    except Failed as exc:
        _emit(as_json, exc.payload, exc.lines, sys.stdout)
        return EXIT_FAILED
    except BudgetExceeded as exc:
        return _error(as_json, EXIT_BUDGET, "budget", str(exc))
    except weave.LoomError as exc:
        return _error(as_json, EXIT_FAILED, "loom", str(exc))
    except (FormatError, HypergraphError, OSError) as exc:
        return _error(as_json, EXIT_USAGE, type(exc).__name__, str(exc))
    _emit(as_json, payload, lines, sys.stdout)
    return EXIT_OK


run = main


if __name__ == "__main__":
    sys.exit(main())
