"""Graph-presented operators: application, paths, truncated norms."""

from fractions import Fraction

import pytest

from ergolab import graphop, ladder
from ergolab.core import ONE, SparseVector
from ergolab.graphop import PathCount, graph_from_edges

H = Fraction(1, 2)


@pytest.fixture()
def diamond():
    # a -> b (1/2), a -> c (2), b -> d (1), c -> d (1/2), d absorbs nothing
    return graph_from_edges(
        {
            "a": [("b", H), ("c", 2)],
            "b": [("d", 1)],
            "c": [("d", H)],
        },
        "diamond",
    )


def test_apply_pushes_mass_forward(diamond):
    image = graphop.apply(diamond, SparseVector.unit("a"))
    assert dict(image.items()) == {"b": H, "c": Fraction(2)}
    second = graphop.apply(diamond, image)
    assert dict(second.items()) == {"d": H * 1 + 2 * H}
    assert graphop.power_apply(diamond, SparseVector.unit("a"), 2) == second
    assert graphop.power_apply(diamond, SparseVector.unit("a"), 0)["a"] == 1


def test_apply_adjoint_pulls_mass_backward(diamond):
    image = graphop.apply_adjoint(diamond, SparseVector.unit("d"))
    assert dict(image.items()) == {"b": Fraction(1), "c": H}


def test_adjoint_duality_on_all_pairs(diamond):
    verts = diamond.finite_vertices
    for n in range(4):
        for u in verts:
            fw = graphop.power_apply(diamond, SparseVector.unit(u), n)
            for v in verts:
                bw = SparseVector.unit(v)
                for _ in range(n):
                    bw = graphop.apply_adjoint(diamond, bw)
                assert fw[v] == bw[u], (u, v, n)


def test_enumerate_paths(diamond):
    paths = graphop.enumerate_paths(diamond, "a", "d", 2)
    assert len(paths) == 2
    assert {p.weight for p in paths} == {H, ONE}
    assert all(p.length == 2 and p.start == "a" and p.end == "d" for p in paths)
    assert graphop.enumerate_paths(diamond, "a", "d", 1) == []
    both = graphop.enumerate_paths_up_to(diamond, "a", "d", 5)
    assert [p.length for p in both] == [2, 2]


def test_path_weight(diamond):
    assert graphop.path_weight(diamond, ["a", "c", "d"]) == 1
    with pytest.raises(ValueError):
        graphop.path_weight(diamond, ["a", "d"])


def test_count_paths_matches_enumeration(diamond):
    for v in diamond.finite_vertices:
        for n in range(4):
            expected = [
                p
                for u in diamond.finite_vertices
                for p in graphop.enumerate_paths(diamond, u, v, n)
            ]
            got = graphop.count_paths_to(diamond, v, n, len(diamond.finite_vertices))
            assert got.count == len(expected)
            assert got.max_weight == max((p.weight for p in expected), default=Fraction(0))


def test_count_paths_profile_matches_pointwise(diamond):
    n_trunc = len(diamond.finite_vertices)
    for v in diamond.finite_vertices:
        profile = graphop.count_paths_profile(diamond, v, 5, n_trunc)
        for n, pc in enumerate(profile):
            assert pc == graphop.count_paths_to(diamond, v, n, n_trunc)


def test_count_paths_respects_truncation(diamond):
    # truncation 1 admits only the start vertex "a" (sorted order)
    assert diamond.enumerate_vertex(0) == "a"
    pc = graphop.count_paths_to(diamond, "d", 2, 1)
    assert pc == PathCount(2, ONE)


def test_verify_c0_conditions_passes_on_consistent_graph(diamond):
    report = graphop.verify_c0_conditions(diamond, 4, 2)
    assert report.passed
    assert report.max_column_sum == 2  # the incoming weight of "c"
    assert report.max_out_degree == 2
    assert "pass" in report.summary()


def test_verify_c0_conditions_flags_bound_violation(diamond):
    report = graphop.verify_c0_conditions(diamond, 4, Fraction(3, 2))
    assert not report.passed
    assert report.max_column_sum == 2


def test_verify_c0_conditions_detects_oracle_mismatch():
    """A predecessor oracle that forgets an edge must be reported."""
    g = graphop.C0Graph(
        successors=lambda v: ((("b",), ONE),) if v == ("a",) else (),
        predecessors=lambda v: (),  # wrong: drops the edge a -> b
        enumerate_vertex=lambda i: [("a",), ("b",)][i],
        index_of_vertex=lambda v: {("a",): 0, ("b",): 1}[v],
        description="inconsistent",
    )
    report = graphop.verify_c0_conditions(g, 2, 10)
    assert not report.passed
    assert any("missing" in issue for issue in report.violations)


def test_graph_from_edges_rejects_bad_weights():
    with pytest.raises(ValueError):
        graph_from_edges({"a": [("b", 0)]})
    with pytest.raises(ValueError):
        graph_from_edges({"a": [("b", -1)]})


def test_truncated_norm_monotone_in_truncation():
    graph = ladder.make_counterexample()
    profile = graphop.operator_norm_profile(graph, 2000)
    assert all(x <= y for x, y in zip(profile, profile[1:]))
    assert profile[-1] == 2
    for n_trunc in (1, 7, 100, 2000):
        assert profile[n_trunc - 1] == graphop.operator_norm_truncated(graph, n_trunc)


def test_power_norm_monotone_in_truncation():
    graph = ladder.make_counterexample()
    for n_power in (2, 3):
        values = [
            graphop.power_norm_truncated(graph, n_power, n_trunc)
            for n_trunc in (10, 50, 200, 800)
        ]
        assert all(x <= y for x, y in zip(values, values[1:]))


def test_power_norms_sweep_matches_pointwise():
    graph = ladder.make_g0()
    sweep = graphop.power_norms_sweep(graph, 5, 60)
    for n, value in enumerate(sweep, start=1):
        assert value == graphop.power_norm_truncated(graph, n, 60)


def test_missing_enumeration_raises():
    g = graphop.C0Graph(successors=lambda v: (), predecessors=lambda v: ())
    with pytest.raises(ValueError):
        g.enumerate_vertex(0)
    with pytest.raises(ValueError):
        g.index_of_vertex(("a",))
