"""Averaging engines, compactness witness, and fixed-space certificates."""

from fractions import Fraction

import pytest

from ergolab import blockdiag, ergodic, graphop, ladder
from ergolab.core import HALF, ONE, SparseVector
from ergolab.ergodic import (
    BudgetExceeded,
    block_handle,
    cesaro_apply,
    cesaro_trace,
    fixed_space_certificate,
    graph_handle,
    power_mean_ergodic_check,
    renorm_estimate,
    replay_certificate,
    scalar_rotation_check,
    weak_compactness_witness,
)


def test_cesaro_apply_satisfies_the_averaging_recurrence():
    graph = ladder.make_g0()
    op = graph_handle(graph)
    x = SparseVector.unit(ladder.entry(0))
    avg = x
    power = x
    for n in range(1, 25):
        assert cesaro_apply(op, x, n) == avg, n
        power = graphop.apply(graph, power)
        avg = (avg.scale(n) + power).scale(Fraction(1, n + 1))


def test_trace_from_a_dead_end_vertex():
    op = graph_handle(ladder.make_g0())
    trace = cesaro_trace(op, SparseVector.unit(ladder.sink(0)), [1, 2, 4])
    assert trace.norms() == {1: ONE, 2: HALF, 4: Fraction(1, 4)}
    assert [rec.support for rec in trace.records] == [1, 1, 1]


def test_trace_fast_engine_agrees_with_generic():
    op = graph_handle(ladder.make_counterexample())
    x = SparseVector.unit(ladder.SOURCE)
    fast = cesaro_trace(op, x, [4, 16, 48], engine="fast")
    slow = cesaro_trace(op, x, [4, 16, 48], engine="generic")
    assert fast.norms() == slow.norms()
    assert all(rec.support is None for rec in fast.records)
    assert all(isinstance(rec.support, int) for rec in slow.records)
    auto = cesaro_trace(op, x, [4, 16, 48])
    assert auto.norms() == fast.norms()


def test_engine_forcing_and_validation():
    op = graph_handle(ladder.make_g0())
    x = SparseVector.unit(ladder.entry(0))
    with pytest.raises(ValueError):
        cesaro_trace(op, x, [4], engine="fast")
    with pytest.raises(ValueError):
        cesaro_trace(op, x, [4], engine="warp")
    with pytest.raises(ValueError):
        cesaro_trace(op, x, [])
    with pytest.raises(ValueError):
        cesaro_apply(op, x, 0)
    with pytest.raises(ValueError):
        power_mean_ergodic_check(op, x, 0, 4, 1)


def test_power_mean_check_cross_engine():
    op = graph_handle(ladder.make_counterexample())
    x = SparseVector.unit(ladder.SOURCE)
    fast = power_mean_ergodic_check(op, x, 2, 32, Fraction(1, 4))
    slow = power_mean_ergodic_check(op, x, 2, 32, Fraction(1, 4), engine="generic")
    assert fast.engine == "fast" and slow.engine == "generic"
    assert fast.value == slow.value
    assert fast.passed and slow.passed
    assert "pass" in fast.summary()


def test_scalar_rotation_cross_engine():
    op = graph_handle(ladder.make_counterexample())
    x = SparseVector.unit(ladder.SOURCE)
    fast = scalar_rotation_check(op, x, -1, 32, 1)
    slow = scalar_rotation_check(op, x, -1, 32, 1, engine="generic")
    assert fast.value == slow.value
    assert isinstance(fast.value, Fraction)
    rot_fast = scalar_rotation_check(op, x, 1j, 24, 1)
    rot_slow = scalar_rotation_check(op, x, 1j, 24, 1, engine="generic")
    assert rot_fast.value == pytest.approx(rot_slow.value, rel=1e-12)


def test_scalar_rotation_rejects_bad_factors():
    op = graph_handle(ladder.make_g0())
    x = SparseVector.unit(ladder.entry(0))
    with pytest.raises(ValueError):
        scalar_rotation_check(op, x, 2, 4, 1)
    with pytest.raises(ValueError):
        scalar_rotation_check(op, x, 0.5 + 0.5j, 4, 1)
    with pytest.raises(ValueError):
        scalar_rotation_check(block_handle(), SparseVector.unit(0), 1j, 4, 1)


def test_block_handle_average_carries_the_coefficients():
    op = block_handle(power=2)
    for m in (1, 2, 5):
        lo = 2 * (m - 1)
        x = SparseVector({lo: ONE, lo + 1: -ONE})
        for n in (1, 4, 9):
            avg = cesaro_apply(op, x, n)
            assert avg[lo] == blockdiag.b_coeff(m, n, 1)
            assert avg[lo + 1] == -blockdiag.b_coeff(m, n, 1)


def test_budget_cap_interrupts_wide_averages():
    op = graph_handle(ladder.make_counterexample())
    x = SparseVector.unit(ladder.SOURCE)
    with pytest.raises(BudgetExceeded):
        cesaro_apply(op, x, 64, max_support=10)
    with pytest.raises(BudgetExceeded):
        cesaro_trace(op, x, [64], max_support=10, engine="generic")


def test_weak_compactness_witness_small_triangle():
    graph = ladder.make_counterexample()
    witness = weak_compactness_witness(graph, 3, 1)
    assert witness.values == [
        [ONE, 0, 0, 0],
        [ONE, ONE, 0, 0],
    ]
    assert witness.matches_triangle
    assert "cluster point" in witness.conclusion
    with pytest.raises(ValueError):
        weak_compactness_witness(graph, -1, 0)


def test_renorm_estimate_values():
    combined = ladder.make_counterexample()
    assert renorm_estimate(combined, SparseVector.unit(ladder.SOURCE), 40) == 1
    g0 = ladder.make_g0()
    assert renorm_estimate(g0, SparseVector.unit(ladder.bottom(0, 4)), 4) == 2
    with pytest.raises(ValueError):
        renorm_estimate(g0, SparseVector.unit(ladder.entry(0)), -1)


def test_renorm_estimate_is_uniformly_bounded():
    combined = ladder.make_counterexample()
    for v in combined.vertices_up_to(12):
        x = SparseVector.unit(v)
        assert renorm_estimate(combined, x, 30) <= 4 * x.sup_norm()


@pytest.mark.parametrize(
    "make",
    [ladder.make_counterexample, ladder.make_g0, lambda: ladder.make_gk(1), lambda: ladder.make_gk(3)],
)
def test_ladder_certificates_replay_cleanly(make):
    graph = make()
    cert = fixed_space_certificate(graph)
    assert cert.conclusion == "only_zero"
    replay = replay_certificate(cert, graph)
    assert replay.ok, replay.issues
    assert replay.coverage_checked == 200
    assert "pass" in replay.summary()


def test_certificate_structure_for_the_combined_graph():
    cert = fixed_space_certificate(ladder.make_counterexample())
    assert [step.rule for step in cert.steps] == [
        "sink",
        "chain_to_zero",
        "null_class",
        "null_class",
        "substitution",
    ]
    assert cert.covers(ladder.SOURCE)
    assert cert.covers(ladder.top(2, 9))
    assert not cert.covers(("X", 0))
    assert "only_zero" in cert.summary()


def test_replay_detects_a_tampered_graph():
    base = ladder.make_g0()

    def bad_successors(v):
        if v == ladder.sink(0):
            return ((ladder.sink(0), ONE),)
        return base.successors(v)

    tampered = graphop.C0Graph(
        successors=bad_successors,
        predecessors=base.predecessors,
        enumerate_vertex=base.enumerate_vertex,
        index_of_vertex=base.index_of_vertex,
        description="copy 0 with a looped sink",
    )
    replay = replay_certificate(fixed_space_certificate(base), tampered)
    assert not replay.ok
    assert any("out-edges" in issue for issue in replay.issues)


def test_replay_detects_a_mismatched_graph():
    cert = fixed_space_certificate(ladder.make_counterexample())
    replay = replay_certificate(cert, ladder.make_g0())
    assert not replay.ok
    assert any("rejected" in issue for issue in replay.issues)


def test_finite_chain_certificate():
    graph = graphop.graph_from_edges(
        {("a",): [(("b",), ONE)], ("b",): [(("c",), HALF)], ("c",): []},
        description="three-vertex chain",
    )
    cert = fixed_space_certificate(graph)
    assert cert.conclusion == "only_zero"
    assert len(cert.steps) == 3
    replay = replay_certificate(cert, graph)
    assert replay.ok, replay.issues
    assert replay.coverage_checked == 3


def test_self_loop_is_reported_not_guessed():
    graph = graphop.graph_from_edges(
        {("a",): [(("a",), ONE)]}, description="one self-loop"
    )
    cert = fixed_space_certificate(graph)
    assert cert.conclusion == "inconclusive"
    assert cert.relations  # the unresolved equation is recorded
    replay = replay_certificate(cert, graph)
    assert replay.ok  # nothing was claimed, so nothing fails
    assert replay.coverage_checked == 0


def test_unpresented_graph_is_inconclusive():
    graph = graphop.C0Graph(
        successors=lambda v: (),
        predecessors=lambda v: (),
        description="opaque graph",
    )
    cert = fixed_space_certificate(graph)
    assert cert.conclusion == "inconclusive"
