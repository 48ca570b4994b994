"""Exact long-window Cesaro averages for the combined ladder graph.

Direct simulation of the source orbit is quadratic: after t steps the orbit
vector has on the order of t*t/2 nonzero coordinates, which puts windows of
length 1024 far out of reach of coordinate-by-coordinate arithmetic.  The
sweep here computes the same sup norms exactly in roughly log-linear time by
exploiting three structural facts, each of which is cross-checked against
the generic engine in the test suite.

1.  Occupancy of copy 0 is rigid.  At time t >= 3 the orbit of e_S restricted
    to the source, the entry chain and copy 0 consists of the entry head (one
    coordinate, value 1), the top head (value 1), and one "wave" per rung
    taken so far, walking down the bottom chain one position per step.  Wave
    n sits at bottom position j = 2**(n+1) - t and reaches the sink exactly
    at time t = 2**(n+1) with value exactly 1.

2.  Wave values are determined by position.  The doubling weights at rung
    landing positions and the halving weights right after them telescope, so
    a wave's value at bottom position j is 1/2 when j is a rung landing
    position and 1 otherwise, independently of which rung spawned it.

3.  Copies are suffixes of copy 0.  Copy k receives exactly the waves
    spawned by rungs n >= k+1, delayed by nothing: coordinate B(k, j) at
    time t equals the copy-0 wave contribution for each wave n with
    n - 1 >= k, and the sink V(k) fires when such a wave dies.  Hence every
    Cesaro sum over copy k is a suffix, in birth order, of the contribution
    stream of the matching copy-0 coordinate, and the copy can be recovered
    without ever materialising it.

A cell at position j > step-horizon is visited at most once inside the
window (consecutive powers of two are too far apart), so its accumulated
magnitude is at most 1 and never exceeds the source coordinate's exact
contribution of 1; only cells with j up to the horizon need streams.

The averaging convention is A_n = (1/n) * (x + Sx + ... + S**(n-1) x) with
S = factor * T**step_power, so A_1 is the identity.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterable, List, Tuple, Union

from .core import HALF, ONE, as_rational
from .ladder import rung_index

Factor = Union[Fraction, int, complex]


def _normalize_factor(factor) -> Union[Fraction, complex]:
    """Accept +1, -1 (exact) or a unimodular complex number."""
    if isinstance(factor, complex):
        if abs(abs(factor) - 1.0) > 1e-12:
            raise ValueError(f"factor must have modulus 1, got {factor!r}")
        return factor
    factor = as_rational(factor)
    if factor == ONE or factor == -ONE:
        return factor
    raise ValueError(f"exact factors must be 1 or -1, got {factor}; pass a complex for rotations")


def combined_cesaro_sup_norms(
    schedule: Iterable[int], step_power: int = 1, factor: Factor = 1
) -> Dict[int, Union[Fraction, float]]:
    """Sup norms of Cesaro averages of factor * T**step_power at the source.

    For every n in ``schedule`` returns the sup norm of the n-th Cesaro
    average applied to the source unit vector of the combined ladder graph.
    Exact rationals for factor +1 or -1; floats (from exact rational
    contribution streams, combined in double precision) for complex factors.
    """
    schedule = sorted(set(int(n) for n in schedule))
    if not schedule or schedule[0] < 1:
        raise ValueError(f"schedule must be a nonempty set of positive window lengths")
    if step_power < 1:
        raise ValueError(f"step_power must be a positive integer, got {step_power}")
    factor = _normalize_factor(factor)
    exact = isinstance(factor, Fraction)

    n_max = schedule[-1]
    horizon = step_power * (n_max - 1)
    retain = max(horizon, 4)
    wanted = set(schedule)

    # streams[j] collects (max copy index, engine step, exact value) for the
    # copy-0 bottom cell at position j; the sink gets its own stream.  The
    # max copy index is strictly increasing along each stream, which is what
    # makes every suffix realizable by some copy.
    streams: Dict[int, List[Tuple[int, int, Fraction]]] = {}
    sink_stream: List[Tuple[int, int, Fraction]] = []
    results: Dict[int, Union[Fraction, float]] = {}

    def record(stream: List[Tuple[int, int, Fraction]], kmax: int, k: int, value: Fraction):
        if stream and stream[-1][0] >= kmax:
            raise AssertionError("copy bounds must increase along a contribution stream")
        stream.append((kmax, k, value))

    def evaluate(n_eval: int) -> Union[Fraction, float]:
        # the source coordinate contributes exactly 1 at engine step 0, and
        # every other single-visit cell at most that much
        if exact:
            best = ONE
            for stream in [sink_stream, *streams.values()]:
                total = Fraction(0)
                local = Fraction(0)
                for _, k, value in reversed(stream):
                    if factor < 0 and (k & 1):
                        total -= value
                    else:
                        total += value
                    mag = -total if total < 0 else total
                    if mag > local:
                        local = mag
                if local > best:
                    best = local
            return best / n_eval
        best = 1.0
        lam = complex(factor)
        for stream in [sink_stream, *streams.values()]:
            total = 0j
            local = 0.0
            for _, k, value in reversed(stream):
                total += lam**k * float(value)
                mag = abs(total)
                if mag > local:
                    local = mag
            if local > best:
                best = local
        return best / n_eval

    for k in range(n_max):
        t = step_power * k
        if t >= 4 and not (t & (t - 1)):
            # a wave dies into the sink exactly at the powers of two; the
            # arriving mass is exactly 1 and reaches sinks V(0)..V(n-1)
            record(sink_stream, t.bit_length() - 3, k, ONE)
        if t >= 3:
            nn = t.bit_length()  # smallest nn with 2**nn > t
            while (1 << nn) <= t + retain:
                n = nn - 1
                if n + 2 <= t:
                    j = (1 << nn) - t
                    value = HALF if rung_index(j) is not None else ONE
                    record(streams.setdefault(j, []), n - 1, k, value)
                nn += 1
        if (k + 1) in wanted:
            results[k + 1] = evaluate(k + 1)
    return results


def fast_cesaro_available(graph) -> bool:
    """Whether the sweep applies to this graph (the combined ladder form)."""
    return getattr(graph, "kind", None) == "combined"
