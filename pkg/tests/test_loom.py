import random

import pytest
from hypothesis import given, settings, strategies as st

from loomlab.covers import covers_of_size, nu
from loomlab.hypercore import UniverseMismatch, bits, make_hypergraph
from loomlab.loom import (
    audit_lemmas,
    conjecture_report,
    gl_bound,
    is_loom,
    loom_closure,
    loom_quantities,
    pfm_question,
    verify_loom,
)
from loomlab.weave import (
    complete_graph,
    grid_loom,
    loom_U,
    loom_V,
    matching_transversal_loom,
    petersen,
    pm_hypergraph,
    r2_loom,
    star_hypergraph,
    triangle_blowup,
    vane_33,
)

import oracles


# ---------------------------------------------------------------------------
# verification


def test_grid_and_vane_verify():
    for L in (grid_loom(3), vane_33()):
        L2, rep = verify_loom(L.A, L.B)
        assert L2 is not None and rep.ok
        assert (L2.r, L2.s) == (3, 3)


def test_single_vertex_loom():
    L = loom_U()
    assert (L.r, L.s) == (1, 1)
    assert is_loom(L.A, L.B)


def test_petersen_pair_fails_closure_axiom_with_five_missing_covers():
    P = petersen()
    A, B = pm_hypergraph(P), star_hypergraph(P)
    L, rep = verify_loom(A, B)
    assert L is None
    check = rep.get("B_equals_CsA")
    assert check.passed is False
    assert len(check.witness["missing"]) == 5
    assert check.witness["not_covers"] == []
    # the listed sets are exactly the 3-covers of A that are not stars
    stars = {frozenset(s) for s in oracles.sets(B)}
    brute = oracles.covers_of_size(oracles.sets(A), A.n, 3) - stars
    assert {frozenset(m) for m in check.witness["missing"]} == brute
    # the remaining axioms hold
    for name in ("A_uniform", "B_uniform", "orthogonal", "tau", "A_equals_CrB"):
        assert rep.get(name).passed


def test_non_uniform_and_non_orthogonal_pairs_fail():
    A = make_hypergraph(3, [[0], [1, 2]])
    B = make_hypergraph(3, [[0, 1]])
    L, rep = verify_loom(A, B)
    assert L is None and rep.get("A_uniform").passed is False
    H = make_hypergraph(2, [[0, 1]])
    L, rep = verify_loom(H, H)
    assert L is None
    assert rep.get("orthogonal").passed is False
    with pytest.raises(UniverseMismatch):
        verify_loom(H, make_hypergraph(3, [[0]]))


def test_report_lines_and_json():
    _, rep = verify_loom(grid_loom(3).A, grid_loom(3).B)
    assert all(line.startswith("PASS") for line in rep.lines())
    data = rep.to_json()
    assert data["ok"] is True


# ---------------------------------------------------------------------------
# closure


def test_petersen_closure_adds_five_triples():
    P = petersen()
    L, rep = loom_closure(pm_hypergraph(P), star_hypergraph(P))
    assert L is not None
    assert (L.r, L.s) == (5, 3)
    assert len(L.B) == 15
    assert len(L.A) == 6


def test_closure_is_idempotent_on_looms():
    for L in (grid_loom(3), vane_33(), r2_loom([1, 2])):
        L2, _ = loom_closure(L.A, L.B)
        assert L2.A == L.A and L2.B == L.B


def test_triangle_blown_petersen_fails_orthogonality():
    T = triangle_blowup(petersen())
    L, rep = loom_closure(pm_hypergraph(T), star_hypergraph(T))
    assert L is None
    check = rep.get("orthogonal")
    assert check.passed is False
    a, b = set(check.witness["a"]), set(check.witness["b"])
    assert len(a & b) >= 2


# ---------------------------------------------------------------------------
# audits


def test_audit_lemmas_on_named_looms():
    for L in (grid_loom(3), vane_33(), matching_transversal_loom(2, 3), r2_loom([1, 1])):
        rep = audit_lemmas(L)
        assert rep.ok, rep.lines()


def test_audit_lemmas_on_petersen_loom():
    P = petersen()
    L, _ = loom_closure(pm_hypergraph(P), star_hypergraph(P))
    rep = audit_lemmas(L)
    assert rep.ok, rep.lines()


def test_loom_quantities_grid():
    q = loom_quantities(grid_loom(3))
    assert q.tau == 5
    assert q.nu == 3 == q.nu_A == q.nu_B
    assert q.tau_star == 3
    assert q.tau_star_A == 3 and q.tau_star_B == 3
    assert q.vertices == 9
    assert q.to_json()["tau_star"] == "3/1"


def test_loom_nu_is_max_of_sides():
    P = petersen()
    L, _ = loom_closure(pm_hypergraph(P), star_hypergraph(P))
    q = loom_quantities(L)
    assert q.nu == max(nu(L.A).value, nu(L.B).value) == 5
    assert oracles.max_matching(oracles.sets(L.union())) == q.nu


def test_swapped_loom_is_a_loom():
    for L in (vane_33(), loom_V(4), r2_loom([2, 1])):
        S = L.swapped()
        assert (S.r, S.s) == (L.s, L.r)
        assert is_loom(S.A, S.B)


def test_gl_bound_domain_and_outcomes():
    assert gl_bound(loom_V(3)).passed is None
    # matching/transversal looms have a cover of size r + s - 1 and no smaller one
    check = gl_bound(matching_transversal_loom(2, 2))
    assert check.passed is False
    assert check.witness == {"pinnable": False}
    K6, _ = loom_closure(pm_hypergraph(complete_graph(6)), star_hypergraph(complete_graph(6)))
    check = gl_bound(K6)
    assert check.passed is True
    assert len(check.witness) <= K6.r + K6.s - 2


def test_conjecture_report_fractional_parts_hold():
    for L in (grid_loom(3), vane_33(), r2_loom([1, 2])):
        rep = conjecture_report(L)
        for name in ("tau_star_loom_equals_max", "tau_star_components", "vertex_count_rs"):
            assert rep.get(name).passed, name


def test_pfm_question_is_informational():
    rep = pfm_question(grid_loom(3))
    assert [c.name for c in rep.checks] == ["pfm_A", "pfm_B"]
    assert rep.ok


# ---------------------------------------------------------------------------
# properties


@st.composite
def relabelled_looms(draw):
    L = draw(st.sampled_from([grid_loom(3), vane_33(), r2_loom([1, 2]), matching_transversal_loom(2, 3)]))
    perm = draw(st.permutations(range(L.n)))
    return L, list(perm)


@settings(max_examples=30, deadline=None)
@given(relabelled_looms())
def test_verification_is_relabelling_invariant(Lp):
    L, perm = Lp
    A, B = L.A.relabel(perm), L.B.relabel(perm)
    L2, rep = verify_loom(A, B)
    assert L2 is not None and (L2.r, L2.s) == (L.r, L.s)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_dropping_an_edge_breaks_the_closure_axiom(seed):
    L = grid_loom(3)
    rng = random.Random(seed)
    e = rng.choice(L.A.edges)
    A = make_hypergraph(9, [bits(x) for x in L.A.edges if x != e])
    got, rep = verify_loom(A, L.B)
    assert got is None
    assert rep.get("A_equals_CrB").passed is False
    assert e in covers_of_size(L.B, 3)
