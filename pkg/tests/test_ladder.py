"""Ladder graph structure: weights, enumeration, orbits, restriction."""

from fractions import Fraction

import pytest

from ergolab import graphop, ladder
from ergolab.core import HALF, ONE, TWO, SparseVector

E, T, B, V, S = ladder.entry, ladder.top, ladder.bottom, ladder.sink, ladder.SOURCE


def test_rung_positions():
    assert [ladder.rung_position(n) for n in range(1, 6)] == [1, 4, 11, 26, 57]


def test_rung_index_inverts_rung_position():
    for n in range(1, 80):
        assert ladder.rung_index(ladder.rung_position(n)) == n
    for j in (2, 3, 5, 10, 12, 25, 27, 100, 2**40):
        assert ladder.rung_index(j) is None
    assert ladder.rung_index(ladder.rung_position(60)) == 60  # huge positions too
    assert ladder.rung_index(0) is None


def test_bottom_weights_follow_the_rung_pattern():
    landings = {ladder.rung_position(n) for n in range(1, 8)}
    for j in range(1, 200):
        expected = TWO if j in landings else HALF if j - 1 in landings else ONE
        assert ladder.bottom_weight(j) == expected
    assert ladder.bottom_weight(1) == 2
    assert ladder.bottom_weight(2) == HALF
    assert ladder.bottom_weight(3) == 1


def test_window_products_stay_between_half_and_two():
    """Products of consecutive bottom weights never leave [1/2, 2]."""
    for start in range(1, 120):
        product = ONE
        for j in range(start, 0, -1):
            product *= ladder.bottom_weight(j)
            assert HALF <= product <= TWO


def test_vertex_constructors_validate():
    with pytest.raises(ValueError):
        ladder.top(2, 2)
    with pytest.raises(ValueError):
        ladder.bottom(0, 0)
    with pytest.raises(ValueError):
        ladder.entry(-1)
    with pytest.raises(ValueError):
        ladder.make_gk(0)
    with pytest.raises(ValueError):
        ladder.rung_position(0)


def test_vertex_labels():
    assert ladder.vertex_label(S) == "S"
    assert ladder.vertex_label(E(0)) == "E(0)"
    assert ladder.vertex_label(T(1, 4)) == "T(1,4)"
    assert ladder.vertex_label(B(0, 11)) == "B(0,11)"
    assert ladder.vertex_label(V(3)) == "V(3)"


def test_combined_enumeration_prefix_is_frozen():
    graph = ladder.make_counterexample()
    labels = [ladder.vertex_label(graph.enumerate_vertex(i)) for i in range(12)]
    assert labels == [
        "S", "E(0)", "V(0)", "T(0,1)", "B(0,1)",
        "E(1)", "V(1)", "T(0,2)", "T(1,2)", "B(0,2)", "B(1,1)", "E(2)",
    ]


def test_enumerations_are_bijective():
    combined = ladder.make_counterexample()
    for i in range(5000):
        assert combined.index_of_vertex(combined.enumerate_vertex(i)) == i
    for graph in (ladder.make_g0(), ladder.make_gk(3)):
        for i in range(600):
            assert graph.index_of_vertex(graph.enumerate_vertex(i)) == i
    spine = ladder.make_entry_spine(2)
    for i in range(600):
        assert spine.index_of_vertex(spine.enumerate_vertex(i)) == i


def test_index_rejects_foreign_vertices():
    g2 = ladder.make_gk(2)
    with pytest.raises(ValueError):
        g2.index_of_vertex(E(3))
    with pytest.raises(ValueError):
        g2.index_of_vertex(S)
    combined = ladder.make_counterexample()
    with pytest.raises(ValueError):
        combined.index_of_vertex(("T", 3, 2))  # top depth below the copy minimum
    spine = ladder.make_entry_spine(0)
    with pytest.raises(ValueError):
        spine.index_of_vertex(V(1))


def test_oracles_are_consistent_and_column_bounded():
    for graph, n in (
        (ladder.make_counterexample(), 2000),
        (ladder.make_g0(), 800),
        (ladder.make_gk(3), 800),
        (ladder.make_entry_spine(1), 800),
    ):
        report = graphop.verify_c0_conditions(graph, n, 2)
        assert report.passed, report.summary()


def test_g0_single_steps_match_the_construction():
    g0 = ladder.make_g0()
    assert graphop.apply(g0, SparseVector.unit(E(0))) == SparseVector.unit(T(0, 1))
    step = graphop.apply(g0, SparseVector.unit(T(0, 1)))
    assert step == SparseVector({T(0, 2): 1, B(0, 1): HALF})
    assert graphop.apply(g0, SparseVector.unit(V(0))) == SparseVector()
    back = graphop.apply_adjoint(g0, SparseVector.unit(V(0)))
    assert back == SparseVector({B(0, 1): 2})
    assert graphop.apply_adjoint(g0, SparseVector.unit(T(0, 2))) == SparseVector.unit(T(0, 1))


def test_g0_small_powers_frozen():
    # frozen from the forward path enumeration oracle
    g0 = ladder.make_g0()
    x3 = graphop.power_apply(g0, SparseVector.unit(E(0)), 3)
    assert x3 == SparseVector({T(0, 3): 1, B(0, 4): HALF, V(0): 1})
    x4 = graphop.power_apply(g0, SparseVector.unit(E(0)), 4)
    assert x4 == SparseVector({T(0, 4): 1, B(0, 3): 1, B(0, 11): HALF})


@pytest.mark.parametrize(
    "make,k,expected_lengths",
    [
        (ladder.make_g0, 0, [3, 7, 15, 31, 63, 127]),
        (lambda: ladder.make_gk(1), 1, [6, 14, 30, 62, 126]),
        (lambda: ladder.make_gk(2), 2, [13, 29, 61, 125]),
    ],
)
def test_entry_to_sink_paths_have_weight_one(make, k, expected_lengths):
    graph = make()
    paths = graphop.enumerate_paths_up_to(graph, E(k), V(k), 127)
    assert sorted(p.length for p in paths) == expected_lengths
    assert all(p.weight == 1 for p in paths)


def test_source_to_sink_paths_in_the_combined_graph():
    graph = ladder.make_counterexample()
    paths = graphop.enumerate_paths_up_to(graph, S, V(0), 70)
    assert sorted(p.length for p in paths) == [4, 8, 16, 32, 64]
    assert all(p.weight == 1 for p in paths)
    paths1 = graphop.enumerate_paths_up_to(graph, S, V(1), 70)
    assert sorted(p.length for p in paths1) == [8, 16, 32, 64]


def test_orbit_predicate_values():
    assert [n for n in range(1, 130) if ladder.orbit_predicate("g0", 0, n)] == [3, 7, 15, 31, 63, 127]
    assert [n for n in range(1, 70) if ladder.orbit_predicate("gk", 2, n)] == [13, 29, 61]
    assert [n for n in range(1, 70) if ladder.orbit_predicate("combined", 0, n)] == [4, 8, 16, 32, 64]
    assert [n for n in range(1, 70) if ladder.orbit_predicate("combined", 2, n)] == [16, 32, 64]
    assert ladder.orbit_predicate("combined", 3, 16) == 0


def test_orbit_predicate_validates():
    with pytest.raises(ValueError):
        ladder.orbit_predicate("g0", 1, 3)
    with pytest.raises(ValueError):
        ladder.orbit_predicate("gk", 0, 3)
    with pytest.raises(ValueError):
        ladder.orbit_predicate("nope", 0, 3)
    with pytest.raises(ValueError):
        ladder.orbit_predicate("combined", 0, -1)


def test_orbit_matches_simulation_on_standalone_copies():
    for kind, k in (("g0", 0), ("gk", 1)):
        graph = ladder.make_g0() if k == 0 else ladder.make_gk(k)
        x = SparseVector.unit(E(k))
        for n in range(1, 140):
            x = graphop.apply(graph, x)
            assert x[V(k)] == ladder.orbit_predicate(kind, k, n), (kind, k, n)


def test_spine_restriction_is_exact():
    """Powers restricted to the spine vertex set equal powers of the spine."""
    combined = ladder.make_counterexample()
    for copy in (0, 2):
        spine = ladder.make_entry_spine(copy)
        keep = ladder.spine_vertex_set(copy)
        full = SparseVector.unit(S)
        small = SparseVector.unit(S)
        for t in range(1, 41):
            full = graphop.apply(combined, full)
            small = graphop.apply(spine, small)
            assert full.restrict(keep) == small, (copy, t)


def test_spine_vertex_set_membership():
    keep = ladder.spine_vertex_set(1)
    assert keep(S) and keep(E(7)) and keep(T(1, 2)) and keep(B(1, 9)) and keep(V(1))
    assert not keep(T(0, 1)) and not keep(V(0)) and not keep(B(2, 1))
