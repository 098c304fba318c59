import pytest

from loomlab.canon import isomorphic_multi
from loomlab.covers import nu, tau
from loomlab.hypercore import HypergraphError, bits, is_uniform, make_hypergraph
from loomlab.loom import is_loom, verify_loom
from loomlab.weave import (
    BlowupSpec,
    ConditionFailed,
    HypothesisUnmet,
    NotRegular,
    OddOrder,
    UniformityMismatch,
    blow_up,
    blowup_matching_audit,
    complete_bipartite,
    complete_graph,
    compose1,
    compose2,
    compose_many,
    decompose,
    graph_loom,
    grid_loom,
    is_decomposable,
    loom_U,
    loom_V,
    matching_transversal_loom,
    perfect_matchings,
    petersen,
    pm_hypergraph,
    r2_loom,
    split,
    triangle_blowup,
    vane_33,
)

import oracles


def same_pair(L, M):
    return set(L.A.edges) == set(M.A.edges) and set(L.B.edges) == set(M.B.edges)


# ---------------------------------------------------------------------------
# named looms


@pytest.mark.parametrize("r", range(1, 7))
def test_single_edge_looms(r):
    L = loom_V(r)
    assert (L.r, L.s) == (r, 1)
    assert len(L.A) == 1 and len(L.B) == r


def test_matching_transversal_sizes():
    L = matching_transversal_loom(3, 2)
    assert (L.r, L.s) == (3, 2)
    assert len(L.A) == 2 and len(L.B) == 9


def test_grid_loom_sizes():
    L = grid_loom(4)
    assert len(L.A) == 8 and len(L.B) == 24


# ---------------------------------------------------------------------------
# composition


def test_joining_copies_of_u_gives_single_edge_loom():
    for r in range(1, 5):
        L = compose_many([loom_U()] * r, 1)
        assert same_pair(L, loom_V(r))


def test_second_composition_of_single_edges_is_matching_transversal():
    for r, s in ((2, 2), (3, 2), (2, 3)):
        L = compose_many([loom_V(r)] * s, 2)
        assert same_pair(L, matching_transversal_loom(r, s))


def test_composition_rejects_mismatched_uniformity():
    with pytest.raises(UniformityMismatch):
        compose1(loom_V(2), grid_loom(3))
    with pytest.raises(UniformityMismatch):
        compose2(loom_V(2), loom_V(3))


def test_unverified_composition_still_verifies():
    L = compose2(grid_loom(3), vane_33(), verify=False)
    assert (L.r, L.s) == (3, 6)
    assert is_loom(L.A, L.B)
    assert L.provenance["op"] == "compose2"


# ---------------------------------------------------------------------------
# decomposition


def test_split_and_decompose_round_trip():
    L = compose2(grid_loom(3), vane_33())
    sp = split(L)
    assert sp.kind == 2 and len(sp.factors) == 2
    assert is_decomposable(L)
    again = compose_many(sp.factors, sp.kind)
    assert isomorphic_multi([again.A, again.B], [L.A, L.B]) is not None
    factors = decompose(L)
    for F, target in zip(factors, (grid_loom(3), vane_33())):
        assert isomorphic_multi([F.A, F.B], [target.A, target.B]) is not None


def test_indecomposable_looms_do_not_split():
    for L in (grid_loom(3), vane_33(), loom_U()):
        assert split(L) is None
        assert decompose(L) == [L]
        assert not is_decomposable(L)


def test_single_edge_loom_decomposes_into_points():
    assert len(decompose(loom_V(4))) == 4


# ---------------------------------------------------------------------------
# blow-ups


def vane_spec():
    # P on five points; two single-edge pieces swapped, one point kept
    A = make_hypergraph(5, [[0, 3], [1, 4], [0, 2, 4]])
    B = make_hypergraph(5, [[0, 1], [3, 4], [1, 2, 3]])
    V2 = loom_V(2)
    parts = [V2.swapped(), V2, loom_U(), V2, V2.swapped()]
    return BlowupSpec(A, B, parts, [[0, 1], [2, 5], [4], [3, 6], [7, 8]])


def test_vane_is_a_blow_up():
    res = blow_up(vane_spec())
    assert (res.c, res.d) == (3, 3)
    assert res.conditions.ok
    V = vane_33()
    assert set(res.C.edges) == set(V.A.edges)
    assert set(res.D.edges) == set(V.B.edges)
    L = blow_up(vane_spec(), verify=True)
    assert same_pair(L, V)


def test_blow_up_condition_failure_raises():
    G = grid_loom(2)
    spec = BlowupSpec(G.A, G.B, [loom_V(2), loom_U(), loom_U(), loom_U()])
    res = blow_up(spec)
    assert not res.conditions.ok
    with pytest.raises(ConditionFailed) as info:
        blow_up(spec, verify=True)
    assert info.value.report.get("uniform").passed is False


def test_blow_up_of_points_is_identity():
    G = grid_loom(2)
    L = blow_up(BlowupSpec(G.A, G.B, [loom_U()] * 4), verify=True)
    assert same_pair(L, G)


def test_blowup_spec_validation():
    G = grid_loom(2)
    with pytest.raises(HypergraphError):
        BlowupSpec(G.A, G.B, [loom_U()] * 3)
    with pytest.raises(HypergraphError):
        BlowupSpec(G.A, G.A, [loom_U()] * 4)
    with pytest.raises(HypergraphError):
        BlowupSpec(G.A, G.B, [loom_U()] * 4, [[0], [0], [1], [2]])


def test_matching_audit():
    G = grid_loom(2)
    for parts in ([loom_V(2)] * 4, [grid_loom(2)] * 4):
        spec = BlowupSpec(G.A, G.B, parts)
        res = blow_up(spec)
        rep = blowup_matching_audit(spec, res)
        assert rep.ok, rep.lines()
        assert rep.get("pm_transfer").passed


def test_matching_audit_needs_a_loom():
    spec = vane_spec()
    with pytest.raises(HypothesisUnmet):
        blowup_matching_audit(spec, blow_up(spec))


# ---------------------------------------------------------------------------
# graph looms


def edge_tuples(G):
    return [tuple(bits(e)) for e in G.edges]


def test_perfect_matching_counts_against_enumeration():
    for n, count in ((6, 15), (8, 105), (10, 945)):
        K = complete_graph(n)
        assert len(perfect_matchings(K)) == count == len(oracles.perfect_matchings(n, edge_tuples(K)))
    P = petersen()
    assert len(perfect_matchings(P)) == 6 == len(oracles.perfect_matchings(10, edge_tuples(P)))


def test_pm_of_complete_graph_has_cover_number_n_minus_one():
    for n in (4, 6):
        assert tau(pm_hypergraph(complete_graph(n))).value == n - 1


def test_k33_graph_loom_is_grid_loom():
    L, rep = graph_loom(complete_bipartite(3))
    assert L is not None, rep.lines()
    G = grid_loom(3)
    assert isomorphic_multi([L.A, L.B], [G.A, G.B]) is not None


def test_k6_graph_loom():
    L, _ = graph_loom(complete_graph(6))
    assert (L.r, L.s) == (3, 5)
    assert len(L.A) == 15


def test_graph_loom_errors():
    with pytest.raises(NotRegular):
        graph_loom(make_hypergraph(3, [[0, 1], [1, 2]]))
    with pytest.raises(OddOrder):
        graph_loom(complete_graph(5))
    with pytest.raises(NotRegular):
        triangle_blowup(complete_graph(5))


def test_triangle_blowup_shape():
    T = triangle_blowup(petersen())
    assert T.n == 30 and len(T) == 45
    assert all(T.degree(v) == 3 for v in range(30))


# ---------------------------------------------------------------------------
# (r, 2)-looms


@pytest.mark.parametrize("q", [[1], [2], [1, 1], [3, 1], [1, 1, 2]])
def test_r2_looms(q):
    L = r2_loom(q)
    assert (L.r, L.s) == (sum(q), 2)
    assert nu(L.A).value == 2
    assert nu(L.B).value == sum(q)
    assert len(L.A) == 2 ** len(q)
    assert is_uniform(L.B) == 2
    F = decompose(L)
    assert len(F) >= len(q)


def test_r2_loom_blocks_are_single_edge_compositions():
    for k in (1, 2, 3):
        L = r2_loom([k])
        M = compose2(loom_V(k), loom_V(k))
        assert isomorphic_multi([L.A, L.B], [M.A, M.B]) is not None
        assert verify_loom(L.A, L.B)[0] is not None
