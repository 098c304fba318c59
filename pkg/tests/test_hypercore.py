import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from loomlab.canon import canonical_form, canonical_form_multi, canonical_key, isomorphic, isomorphic_multi
from loomlab.hypercore import (
    EmptyEdge,
    EmptyHypergraph,
    Hypergraph,
    IndexOutOfRange,
    NotUniform,
    UniverseMismatch,
    UniverseOverlap,
    apply_perm,
    bits,
    connected_components,
    full_mask,
    is_orthogonal,
    is_r_partite,
    is_uniform,
    join,
    make_hypergraph,
    mask,
    restrict,
    star,
)
from loomlab.weave import (
    VANE_C,
    complete_graph,
    fano_plane,
    grid_loom,
    pm_hypergraph,
    r2_loom,
    star_hypergraph,
    vane_33,
)

import oracles


def digits(words):
    return [[int(c) - 1 for c in w] for w in words]


# ---------------------------------------------------------------------------
# construction


def test_vane_first_component_has_eight_edges():
    H = make_hypergraph(9, digits(VANE_C))
    assert len(H) == 8
    assert is_uniform(H) == 3


def test_single_vertex_hypergraph():
    H = make_hypergraph(1, [[0]])
    assert H.edges == (1,)
    assert H.is_grounded()


def test_duplicates_removed_and_sorted():
    H = make_hypergraph(3, [[0, 1], [1, 0], [1, 2]])
    assert len(H) == 2
    H2 = make_hypergraph(4, [[0, 1, 2], [3], [1, 2]])
    assert [e.bit_count() for e in H2.edges] == [1, 2, 3]


def test_constructor_errors():
    with pytest.raises(IndexOutOfRange):
        make_hypergraph(3, [[0, 3]])
    with pytest.raises(EmptyEdge):
        make_hypergraph(3, [[]])


def test_groundedness_is_recorded_not_forced():
    H = make_hypergraph(4, [[0, 1]])
    assert not H.is_grounded()
    assert H.n == 4


# ---------------------------------------------------------------------------
# predicates


def test_is_uniform():
    assert is_uniform(vane_33().A) == 3
    assert is_uniform(make_hypergraph(2, [[0], [0, 1]])) is None
    assert is_uniform(star_hypergraph(complete_graph(6))) == 5
    with pytest.raises(EmptyHypergraph):
        is_uniform(Hypergraph(3, ()))


def test_is_orthogonal():
    V = vane_33()
    assert is_orthogonal(V.A, V.B) == (True, None)
    H = make_hypergraph(2, [[0, 1]])
    ok, w = is_orthogonal(H, H)
    assert not ok and w == (0b11, 0b11)
    G = grid_loom(3)
    assert is_orthogonal(G.A, G.B)[0]
    with pytest.raises(UniverseMismatch):
        is_orthogonal(H, make_hypergraph(3, [[0]]))


def test_join_examples():
    assert join(make_hypergraph(2, [[0]]), make_hypergraph(2, [[1]])).edges == (0b11,)
    with pytest.raises(UniverseOverlap):
        join(make_hypergraph(2, [[0]]), make_hypergraph(2, [[0, 1]]))


def test_join_of_block_sides_has_two_to_the_t_edges():
    for t in range(1, 5):
        L = r2_loom([1] * t)
        assert len(L.A) == 2**t


def test_join_pm_k6_with_stars_k10():
    pm6 = oracles.perfect_matchings(6, [tuple(bits(e)) for e in complete_graph(6).edges])
    assert len(pm6) == 15
    A = pm_hypergraph(complete_graph(6))
    S = star_hypergraph(complete_graph(10))
    n = A.n + S.n
    J = join(A.with_n(n), S.shifted(A.n, n))
    assert len(J) == 15 * 10
    assert is_uniform(J) == 3 + 9


def test_restrict_examples():
    H = make_hypergraph(4, [[0, 1], [2, 3]])
    R, dropped = restrict(H, mask([0, 1]), with_dropped=True)
    assert R.edges == (0b11,) and dropped == 1
    F = fano_plane()
    assert restrict(F, full_mask(F.n)) == F


def test_connected_components_examples():
    L = r2_loom([1, 2])
    assert len(connected_components(L.B)) == 2
    assert len(connected_components(make_hypergraph(4, [[0, 1, 2, 3]]))) == 1


def test_star():
    tri = make_hypergraph(3, [[0, 1], [1, 2], [0, 2]])
    assert len(star(tri, 0)) == 2
    K6 = complete_graph(6)
    assert all(len(star(K6, v)) == 5 for v in range(6))
    with pytest.raises(IndexOutOfRange):
        star(tri, 3)


def test_is_r_partite_against_brute_force():
    G = grid_loom(3)
    sides = is_r_partite(G.A)
    assert sides is not None
    assert all(all((e & s).bit_count() == 1 for s in sides) for e in G.A.edges)
    assert oracles.r_partition_exists(oracles.sets(G.A), range(9), 3)
    F = fano_plane()
    assert is_r_partite(F) is None
    assert not oracles.r_partition_exists(oracles.sets(F), range(7), 3)
    assert is_r_partite(make_hypergraph(4, [[0, 1, 2, 3]])) is not None
    with pytest.raises(NotUniform):
        is_r_partite(make_hypergraph(3, [[0], [1, 2]]))


# ---------------------------------------------------------------------------
# canonical forms


def random_relabel(H, rng):
    perm = list(range(H.n))
    rng.shuffle(perm)
    return H.relabel(perm), perm


def test_canonical_form_invariant_for_grid_loom():
    G = grid_loom(3)
    rng = random.Random(5)
    base = canonical_key([G.A, G.B])
    for _ in range(100):
        perm = list(range(9))
        rng.shuffle(perm)
        assert canonical_key([G.A.relabel(perm), G.B.relabel(perm)]) == base


def test_grid_and_vane_first_components_not_isomorphic():
    assert isomorphic(grid_loom(3).A, vane_33().A) is None


def test_isomorphic_self_gives_automorphism():
    F = fano_plane()
    cert = isomorphic(F, F)
    assert cert is not None
    assert F.relabel(cert.permutation) == F
    H = make_hypergraph(4, [[0, 1], [2], [3]])
    cert = isomorphic(H, H)
    assert H.relabel(cert.permutation) == H


def test_isomorphism_certificate_maps_edges():
    V = vane_33()
    rng = random.Random(11)
    perm = list(range(9))
    rng.shuffle(perm)
    A2, B2 = V.A.relabel(perm), V.B.relabel(perm)
    cert = isomorphic_multi([V.A, V.B], [A2, B2])
    assert cert is not None
    assert V.A.relabel(cert.permutation) == A2
    assert V.B.relabel(cert.permutation) == B2


def test_canonical_form_distinguishes_families():
    V = vane_33()
    (CA, CB), _ = canonical_form_multi([V.A, V.B])
    assert len(CA) == len(V.A) and len(CB) == len(V.B)
    # swapping the roles of the two sides of a non-trivial pair
    G = r2_loom([2])
    assert canonical_key([G.A, G.B]) != canonical_key([G.B, G.A])


# ---------------------------------------------------------------------------
# properties


@st.composite
def hypergraphs(draw, max_n=7, max_edges=8):
    n = draw(st.integers(1, max_n))
    edges = draw(
        st.lists(st.sets(st.integers(0, n - 1), min_size=1, max_size=n), min_size=1, max_size=max_edges)
    )
    return make_hypergraph(n, edges)


@settings(max_examples=60, deadline=None)
@given(hypergraphs(), st.randoms(use_true_random=False))
def test_canonical_form_is_relabelling_invariant(H, rng):
    C, cert = canonical_form(H)
    assert H.relabel(cert.permutation) == C
    for _ in range(5):
        H2, _ = random_relabel(H, rng)
        assert canonical_form(H2)[0] == C


@settings(max_examples=80, deadline=None)
@given(hypergraphs(), hypergraphs())
def test_orthogonality_is_symmetric(A, B):
    n = max(A.n, B.n)
    A, B = A.with_n(n), B.with_n(n)
    assert is_orthogonal(A, B)[0] == is_orthogonal(B, A)[0]


@settings(max_examples=80, deadline=None)
@given(hypergraphs(max_n=9, max_edges=10))
def test_every_edge_lies_in_exactly_one_component(H):
    comps = connected_components(H)
    parts = [p for p, _ in comps]
    for a, b in itertools.combinations(parts, 2):
        assert not a & b
    for e in H.edges:
        assert sum(1 for p in parts if e & ~p == 0) == 1
    assert sum(len(sub) for _, sub in comps) == len(H)


@settings(max_examples=60, deadline=None)
@given(hypergraphs(max_n=5), hypergraphs(max_n=5))
def test_join_then_restrict_round_trip(A, C):
    n = A.n + C.n
    A2 = A.with_n(n)
    C2 = C.shifted(A.n, n)
    J = join(A2, C2)
    assert restrict(J, full_mask(A.n)) == A2
    assert restrict(J, full_mask(n) & ~full_mask(A.n)) == C2


@settings(max_examples=60, deadline=None)
@given(hypergraphs(max_n=6), st.randoms(use_true_random=False))
def test_apply_perm_preserves_sizes(H, rng):
    H2, perm = random_relabel(H, rng)
    assert sorted(e.bit_count() for e in H.edges) == sorted(e.bit_count() for e in H2.edges)
    assert {apply_perm(e, perm) for e in H.edges} == set(H2.edges)
