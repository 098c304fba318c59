"""Loom verification, closure, lemma audits and conjecture checks."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Optional

from . import covers, fraclp
from .hypercore import (
    Hypergraph,
    UniverseMismatch,
    bits,
    is_orthogonal,
    is_uniform,
)


@dataclass
class Check:
    name: str
    passed: Optional[bool]
    detail: str = ""
    witness: Any = None

    def to_json(self) -> dict:
        out = {"name": self.name, "passed": self.passed, "detail": self.detail}
        if self.witness is not None:
            out["witness"] = self.witness
        return out


@dataclass
class VerificationReport:
    """Named checks in evaluation order.

    ``passed`` is ``None`` for checks that do not apply.  A failed check
    carries a concrete counter-witness in ``witness``.
    """

    checks: list[Check] = field(default_factory=list)

    def add(self, name, passed, detail="", witness=None) -> Check:
        c = Check(name, passed, detail, witness)
        self.checks.append(c)
        return c

    def extend(self, other: "VerificationReport") -> None:
        self.checks.extend(other.checks)

    def get(self, name: str) -> Optional[Check]:
        for c in self.checks:
            if c.name == name:
                return c
        return None

    @property
    def ok(self) -> bool:
        return all(c.passed is not False for c in self.checks)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if c.passed is False]

    def to_json(self) -> dict:
        return {"ok": self.ok, "checks": [c.to_json() for c in self.checks]}

    def lines(self) -> list[str]:
        tag = {True: "PASS", False: "FAIL", None: "n/a "}
        return [f"{tag[c.passed]}  {c.name}: {c.detail}".rstrip(": ") for c in self.checks]


@dataclass
class Loom:
    """A verified ``(r, s)``-loom ``(A, B)``."""

    A: Hypergraph
    B: Hypergraph
    r: int
    s: int
    report: VerificationReport = field(default_factory=VerificationReport, compare=False)
    name: str = field(default="", compare=False)
    provenance: dict = field(default_factory=dict, compare=False)

    @property
    def n(self) -> int:
        return self.A.n

    @property
    def vertices(self) -> int:
        return self.A.support | self.B.support

    def swapped(self) -> "Loom":
        return Loom(self.B, self.A, self.s, self.r, self.report, self.name)

    def union(self) -> Hypergraph:
        return self.A.union(self.B)

    def to_json(self) -> dict:
        from .formats import loom_to_json

        return loom_to_json(self)


def _sets(masks) -> list[list[int]]:
    return [bits(m) for m in masks]


def verify_loom(
    A: Hypergraph, B: Hypergraph, budget: Optional[int] = None
) -> tuple[Optional[Loom], VerificationReport]:
    """Check the loom axioms exactly and return ``(loom or None, report)``.

    Axiom 4 is checked as an equality: ``C_r(B)`` and ``C_s(A)`` are computed
    in full and compared with ``A`` and ``B``.
    """
    rep = VerificationReport()
    if A.n != B.n:
        raise UniverseMismatch(f"universes differ: {A.n} vs {B.n}")
    if not A.edges or not B.edges:
        rep.add("nonempty", False, "both components need edges")
        return None, rep
    r = is_uniform(A)
    s = is_uniform(B)
    rep.add("A_uniform", r is not None, f"r={r}" if r else f"sizes {sorted(A.sizes())}")
    rep.add("B_uniform", s is not None, f"s={s}" if s else f"sizes {sorted(B.sizes())}")
    ok, bad = is_orthogonal(A, B)
    rep.add(
        "orthogonal",
        ok,
        "" if ok else f"|a & b| = {(bad[0] & bad[1]).bit_count()}",
        None if ok else {"a": bits(bad[0]), "b": bits(bad[1])},
    )
    if r is None or s is None:
        return None, rep

    tA = covers.tau(A, budget)
    tB = covers.tau(B, budget)
    rep.add(
        "tau",
        tA.value == s and tB.value == r,
        f"tau(A)={tA.value} (want {s}), tau(B)={tB.value} (want {r})",
        None
        if tA.value == s and tB.value == r
        else {"cover_of_A": bits(tA.witness[0]), "cover_of_B": bits(tB.witness[0])},
    )

    CrB = covers.covers_of_size(B, r, budget=budget)
    CsA = covers.covers_of_size(A, s, budget=budget)
    extra_A = [e for e in CrB.edges if e not in A]
    stray_A = [e for e in A.edges if e not in CrB]
    extra_B = [e for e in CsA.edges if e not in B]
    stray_B = [e for e in B.edges if e not in CsA]
    okA = not extra_A and not stray_A
    okB = not extra_B and not stray_B
    rep.add(
        "A_equals_CrB",
        okA,
        f"|C_r(B)|={len(CrB)}, |A|={len(A)}"
        + (f"; {len(extra_A)} covers missing from A" if extra_A else ""),
        None if okA else {"missing": _sets(extra_A), "not_covers": _sets(stray_A)},
    )
    rep.add(
        "B_equals_CsA",
        okB,
        f"|C_s(A)|={len(CsA)}, |B|={len(B)}"
        + (f"; {len(extra_B)} covers missing from B" if extra_B else ""),
        None if okB else {"missing": _sets(extra_B), "not_covers": _sets(stray_B)},
    )
    if rep.ok:
        return Loom(A, B, r, s, rep), rep
    return None, rep


def loom_closure(
    A: Hypergraph, B: Hypergraph, budget: Optional[int] = None
) -> tuple[Optional[Loom], VerificationReport]:
    """Replace ``(A, B)`` by ``(C_r(B), C_s(C_r(B)))`` once and verify.

    One round is enough by the identities ``C_r(C_s(H)) >= H`` and
    ``C_s(C_r(C_s(H))) = C_s(H)``; if verification still fails the report says
    which axiom broke.
    """
    rep = VerificationReport()
    r = is_uniform(A)
    s = is_uniform(B)
    if r is None or s is None:
        rep.add("uniform_input", False, "closure needs uniform components")
        return None, rep
    A2 = covers.covers_of_size(B, r, budget=budget)
    rep.add("closure_A", True, f"|C_r(B)|={len(A2)} (was {len(A)})")
    if not A2.edges:
        rep.add("closure_nonempty", False, "C_r(B) is empty")
        return None, rep
    B2 = covers.covers_of_size(A2, s, budget=budget)
    rep.add("closure_B", True, f"|C_s(C_r(B))|={len(B2)} (was {len(B)})")
    if not B2.edges:
        rep.add("closure_nonempty", False, "C_s(C_r(B)) is empty")
        return None, rep
    loom, vrep = verify_loom(A2, B2, budget)
    rep.extend(vrep)
    if loom is not None:
        loom.report = rep
    return loom, rep


def is_loom(A: Hypergraph, B: Hypergraph) -> bool:
    return verify_loom(A, B)[0] is not None


# ---------------------------------------------------------------------------
# audits


def _stars(H: Hypergraph) -> dict[int, frozenset]:
    out = {}
    for v in bits(H.support):
        b = 1 << v
        out[v] = frozenset(e for e in H.edges if e & b)
    return out


def _star_law(H: Hypergraph):
    st = _stars(H)
    for x, sx in st.items():
        for y, sy in st.items():
            if x != y and sx < sy:
                return (x, y)
    return None


def _matching_law(H: Hypergraph, other_size: int, r: int, nverts: int):
    """Matchings of ``H`` are perfect exactly when they have ``other_size`` edges."""
    pm = covers.has_perfect_matching(H)
    if pm is not None and len(pm) != other_size:
        return {"perfect_matching_of_size": len(pm), "matching": _sets(pm)}
    m = covers.nu(H)
    if m.value == other_size and nverts != r * other_size:
        return {"non_perfect_matching_of_size": other_size, "matching": _sets(m.witness)}
    return None


def audit_lemmas(L: Loom) -> VerificationReport:
    """Instance checks of the structural lemmas on a verified loom."""
    rep = VerificationReport()
    A, B, r, s = L.A, L.B, L.r, L.s
    rep.add(
        "same_vertex_set",
        A.support == B.support,
        "",
        None if A.support == B.support else {"symmetric_difference": bits(A.support ^ B.support)},
    )

    if r == s and r > 1:
        lonely = None
        for H in (A, B):
            for e in H.edges:
                if not any(not e & f for f in H.edges):
                    lonely = bits(e)
                    break
            if lonely:
                break
        rep.add("disjoint_partner", lonely is None, "every edge has a disjoint edge", lonely)
    else:
        rep.add("disjoint_partner", None, "needs r = s > 1")

    bad = _star_law(A) or _star_law(B)
    rep.add(
        "star_containment_is_equality",
        bad is None,
        "",
        None if bad is None else {"x": bad[0], "y": bad[1]},
    )

    nverts = L.vertices.bit_count()
    wA = _matching_law(A, s, r, nverts)
    wB = _matching_law(B, r, s, nverts)
    rep.add("perfect_iff_size", wA is None and wB is None, "", wA or wB)

    nsA = fraclp.nu_star(A)
    nsB = fraclp.nu_star(B)
    pfmA = fraclp.has_perfect_fractional_matching(A)
    pfmB = fraclp.has_perfect_fractional_matching(B)
    lawA = (pfmA is not None) == (nsA.value == s)
    lawB = (pfmB is not None) == (nsB.value == r)
    rep.add(
        "pfm_iff_nustar",
        lawA and lawB,
        f"nu*(A)={fraclp.frac_str(nsA.value)} pfm(A)={pfmA is not None}; "
        f"nu*(B)={fraclp.frac_str(nsB.value)} pfm(B)={pfmB is not None}",
    )

    for H, other, k, label in ((A, B, s, "A"), (B, A, r, "B")):
        ts = nsA.value if label == "A" else nsB.value
        if ts == k:
            P = covers.perp(H, max_size=H.n)
            same = Hypergraph.from_masks(H.n, P) == other
            rep.add(
                f"perp_{label}",
                same,
                f"tau*({label})={k} so the other side is {label}^perp",
                None if same else {"perp_only": _sets(set(P) - set(other.edges))},
            )
        else:
            rep.add(f"perp_{label}", None, f"tau*({label}) != {k}")

    if r == s and nsA.value == r:
        pins = covers.perp(L.union(), max_size=L.n)
        wrong = [p for p in pins if p.bit_count() != r]
        rep.add(
            "pinning_sets_have_size_r",
            not wrong,
            f"{len(pins)} pinning sets",
            _sets(wrong) if wrong else None,
        )
    else:
        rep.add("pinning_sets_have_size_r", None, "needs r = s and tau*(A) = r")
    return rep


@dataclass
class LoomQuantities:
    tau: Optional[int]
    tau_bounds: tuple[int, Optional[int]]
    nu: Optional[int]
    tau_star: Fraction
    tau_star_A: Fraction
    tau_star_B: Fraction
    vertices: int
    nu_A: Optional[int] = None
    nu_B: Optional[int] = None

    def to_json(self) -> dict:
        f = fraclp.frac_str
        return {
            "tau": self.tau,
            "tau_bounds": list(self.tau_bounds),
            "nu": self.nu,
            "nu_A": self.nu_A,
            "nu_B": self.nu_B,
            "tau_star": f(self.tau_star),
            "tau_star_A": f(self.tau_star_A),
            "tau_star_B": f(self.tau_star_B),
            "V": self.vertices,
        }


def loom_quantities(L: Loom, budget: Optional[int] = None) -> LoomQuantities:
    """Exact ``tau``, ``nu`` and ``tau*`` of ``A | B`` and ``tau*`` of each side.

    When a search runs out of budget the exact value is left as ``None`` and
    the proven bounds are kept.
    """
    U = L.union()
    try:
        t = covers.tau(U, budget).value
        bounds = (t, t)
    except covers.BudgetExceeded as exc:
        t, bounds = None, (max(exc.lower, 1), exc.upper)
    nu_vals = []
    for H in (L.A, L.B):
        try:
            nu_vals.append(covers.nu(H, budget).value)
        except covers.BudgetExceeded:
            nu_vals.append(None)
    nu_u = None if None in nu_vals else max(nu_vals)
    ts = fraclp.nu_star(U).value
    if t is None:
        # tau >= ceil(tau*) holds without the search
        bounds = (max(bounds[0], -(-ts.numerator // ts.denominator)), bounds[1])
    return LoomQuantities(
        t,
        bounds,
        nu_u,
        ts,
        fraclp.nu_star(L.A).value,
        fraclp.nu_star(L.B).value,
        L.vertices.bit_count(),
        nu_vals[0],
        nu_vals[1],
    )


def gl_bound(L: Loom, budget: Optional[int] = None) -> Check:
    """``tau(A | B) <= r + s - 2``, checked by exhibiting such a cover."""
    r, s = L.r, L.s
    if r < 2 or s < 2:
        return Check("gl_bound", None, f"out of domain for (r,s)=({r},{s})")
    k = r + s - 2
    try:
        c = covers.has_cover_of_size(L.union(), k, budget)
    except covers.BudgetExceeded:
        return Check("gl_bound", None, f"undecided within budget (k={k})")
    if c is None:
        pinned = covers.is_pinnable(L.union())
        note = "pinnable" if pinned is not None else "not pinnable, so outside the pinnable form of the bound"
        return Check("gl_bound", False, f"no cover of size {k}; A|B {note}", {"pinnable": pinned is not None})
    return Check("gl_bound", True, f"cover of size {c.bit_count()} <= {k}", bits(c))


def conjecture_report(L: Loom, budget: Optional[int] = None) -> VerificationReport:
    """Instance checks of the loom conjectures; a failure is a finding, not a bug."""
    rep = VerificationReport()
    r, s = L.r, L.s
    ts = fraclp.nu_star(L.union())
    tA = fraclp.nu_star(L.A)
    tB = fraclp.nu_star(L.B)
    f = fraclp.frac_str
    rep.add(
        "tau_star_loom_equals_max",
        ts.value == max(r, s),
        f"tau*(L)={f(ts.value)}, max(r,s)={max(r, s)}",
        None if ts.value == max(r, s) else {"finding": "research-grade"},
    )
    both = tA.value == s and tB.value == r
    rep.add(
        "tau_star_components",
        both,
        f"tau*(A)={f(tA.value)} (want {s}), tau*(B)={f(tB.value)} (want {r})",
        None if both else {"finding": "research-grade"},
    )
    nv = L.vertices.bit_count()
    rep.add("vertex_count_rs", nv == r * s, f"|V|={nv}, rs={r * s}")
    rep.checks.append(gl_bound(L, budget))
    return rep


def pfm_question(L: Loom) -> VerificationReport:
    """Whether each side has a perfect fractional matching (open in general; logged only)."""
    rep = VerificationReport()
    for label, H in (("A", L.A), ("B", L.B)):
        w = fraclp.has_perfect_fractional_matching(H)
        rep.add(f"pfm_{label}", w is not None, "")
    return rep
