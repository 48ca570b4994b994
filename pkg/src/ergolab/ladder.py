"""The ladder family of weighted graphs and their combined form.

A single ladder copy with index k has an entry vertex, an infinite top chain,
an infinite bottom chain draining into a sink, and rungs from the top chain
to the bottom chain.  Edge weights are arranged so that every entry-to-sink
path has total weight exactly 1, while the lengths of those paths thin out
geometrically.  The combined graph strings countably many copies along a
common entry chain fed by a single source, one copy per index k >= 0.

Vertices are plain tagged tuples so they hash fast and sort cheaply:

    ("S",)        source (combined graph only), rendered  S
    ("E", k)      entry vertex of copy k, rendered        E(k)
    ("T", k, n)   top chain of copy k, depth n >= k+1,    T(k,n)
    ("B", k, j)   bottom chain of copy k, position j >= 1, B(k,j)
    ("V", k)      sink of copy k, rendered                V(k)

The bottom chain walks from large positions toward the sink, so B(k,1) is the
last stop before V(k).  Rung n of the top chain lands at bottom position
rung_position(n) = 2**(n+1) - n - 2, and the bottom weights double exactly at
those landing positions and halve right after them; this is what makes every
entry-to-sink weight collapse to 1.
"""

from __future__ import annotations

from fractions import Fraction
from math import isqrt
from typing import List, Optional, Tuple

from .core import HALF, ONE, TWO
from .graphop import C0Graph, Vertex

SOURCE: Vertex = ("S",)


def entry(k: int) -> Vertex:
    if k < 0:
        raise ValueError(f"entry index must be nonnegative, got {k}")
    return ("E", k)


def top(k: int, n: int) -> Vertex:
    if k < 0:
        raise ValueError(f"copy index must be nonnegative, got {k}")
    if n < k + 1:
        raise ValueError(f"top depth must be at least {k + 1} in copy {k}, got {n}")
    return ("T", k, n)


def bottom(k: int, j: int) -> Vertex:
    if k < 0:
        raise ValueError(f"copy index must be nonnegative, got {k}")
    if j < 1:
        raise ValueError(f"bottom position must be positive, got {j}")
    return ("B", k, j)


def sink(k: int) -> Vertex:
    if k < 0:
        raise ValueError(f"copy index must be nonnegative, got {k}")
    return ("V", k)


def vertex_label(v: Vertex) -> str:
    """Render a vertex in the compact S / E(k) / T(k,n) / B(k,j) / V(k) form."""
    tag = v[0]
    if tag == "S":
        return "S"
    if tag == "E":
        return f"E({v[1]})"
    if tag == "T":
        return f"T({v[1]},{v[2]})"
    if tag == "B":
        return f"B({v[1]},{v[2]})"
    if tag == "V":
        return f"V({v[1]})"
    raise ValueError(f"not a ladder vertex: {v!r}")


def rung_position(n: int) -> int:
    """Bottom position hit by the rung leaving top depth n.

    rung_position(n) = 2**(n+1) - n - 2, so successive rungs land at
    1, 4, 11, 26, 57, ... and the gaps double.
    """
    if n < 1:
        raise ValueError(f"rung depth must be positive, got {n}")
    return (1 << (n + 1)) - n - 2


def rung_index(j: int) -> Optional[int]:
    """Inverse of rung_position: the n with rung_position(n) == j, or None.

    Works for arbitrarily large j by guessing n from the bit length of j.
    """
    if j < 1:
        return None
    bl = j.bit_length()
    for n in (bl - 1, bl, bl + 1):
        if n >= 1 and rung_position(n) == j:
            return n
    return None


def bottom_weight(j: int) -> Fraction:
    """Weight of the bottom chain edge leaving position j (toward j-1).

    2 at rung landing positions, 1/2 immediately after them, 1 elsewhere.
    The landing positions and their successors never collide, so every
    window product of consecutive bottom weights stays within [1/2, 2].
    """
    if j < 1:
        raise ValueError(f"bottom position must be positive, got {j}")
    if rung_index(j) is not None:
        return TWO
    if rung_index(j - 1) is not None:
        return HALF
    return ONE


class LadderFamilyGraph(C0Graph):
    """A ladder graph, either one standalone copy or the combined form.

    kind is "g0", "gk" or "combined"; copy_index records k for standalone
    copies and is None for the combined graph.
    """

    def __init__(self, kind: str, copy_index: Optional[int], **kwargs):
        super().__init__(**kwargs)
        self.kind = kind
        self.copy_index = copy_index


def _copy_successors(k: int, v: Vertex):
    """Out-edges of a vertex inside copy k, excluding the entry chain."""
    tag = v[0]
    if tag == "T":
        _, _, n = v
        return (
            (top(k, n + 1), ONE),
            (bottom(k, rung_position(n)), HALF),
        )
    if tag == "B":
        _, _, j = v
        target = sink(k) if j == 1 else bottom(k, j - 1)
        return ((target, bottom_weight(j)),)
    if tag == "V":
        return ()
    raise ValueError(f"vertex {v!r} does not belong to copy {k}")


def _copy_predecessors(k: int, v: Vertex):
    """In-edges of a top, bottom or sink vertex of copy k, minus the entry edge."""
    tag = v[0]
    if tag == "T":
        _, _, n = v
        if n == k + 1:
            return None  # fed by the entry vertex; caller supplies that edge
        return ((top(k, n - 1), ONE),)
    if tag == "B":
        _, _, j = v
        edges = [(bottom(k, j + 1), bottom_weight(j + 1))]
        i = rung_index(j)
        if i is not None and i >= k + 1:
            edges.append((top(k, i), HALF))
        return tuple(edges)
    if tag == "V":
        return ((bottom(k, 1), bottom_weight(1)),)
    raise ValueError(f"vertex {v!r} does not belong to copy {k}")


def _standalone_enumerate(k: int, i: int) -> Vertex:
    # order: E(k), V(k), then T and B alternating by depth
    if i == 0:
        return entry(k)
    if i == 1:
        return sink(k)
    m, off = divmod(i - 2, 2)
    return top(k, k + 1 + m) if off == 0 else bottom(k, 1 + m)


def _standalone_index(k: int, v: Vertex) -> int:
    tag = v[0]
    if tag == "E" and v[1] == k:
        return 0
    if tag == "V" and v[1] == k:
        return 1
    if tag == "T" and v[1] == k:
        n = v[2]
        if n < k + 1:
            raise ValueError(f"top depth {n} below minimum {k + 1} for copy {k}")
        return 2 + 2 * (n - k - 1)
    if tag == "B" and v[1] == k:
        j = v[2]
        if j < 1:
            raise ValueError(f"bottom position must be positive, got {j}")
        return 3 + 2 * (j - 1)
    raise ValueError(f"vertex {v!r} is not in copy {k}")


def _make_standalone(k: int) -> LadderFamilyGraph:
    def successors(v: Vertex):
        if v[0] == "E":
            if v[1] != k:
                raise ValueError(f"vertex {v!r} is not in copy {k}")
            return ((top(k, k + 1), ONE),)
        return _copy_successors(k, v)

    def predecessors(v: Vertex):
        if v[0] == "E":
            if v[1] != k:
                raise ValueError(f"vertex {v!r} is not in copy {k}")
            return ()
        edges = _copy_predecessors(k, v)
        if edges is None:
            return ((entry(k), ONE),)
        return edges

    return LadderFamilyGraph(
        kind="g0" if k == 0 else "gk",
        copy_index=k,
        successors=successors,
        predecessors=predecessors,
        enumerate_vertex=lambda i: _standalone_enumerate(k, i),
        index_of_vertex=lambda v: _standalone_index(k, v),
        description=f"ladder copy {k}",
    )


def make_g0() -> LadderFamilyGraph:
    """The full ladder copy: entry, top chain from depth 1, all rungs."""
    return _make_standalone(0)


def make_gk(k: int) -> LadderFamilyGraph:
    """Ladder copy k >= 1: the top chain starts at depth k+1, so the first
    k rungs are missing while the bottom chain keeps its full weight pattern."""
    if k < 1:
        raise ValueError(f"copy index must be at least 1 (use make_g0 for 0), got {k}")
    return _make_standalone(k)


def _tier_start(t: int) -> int:
    return 1 + t * t + 3 * t


def _combined_enumerate(i: int) -> Vertex:
    # tier t holds E(t), V(t), the depth-(t+1) tops of copies 0..t and the
    # bottom antidiagonal B(k, t-k+1); tiers are laid out consecutively
    if i == 0:
        return SOURCE
    t = (isqrt(4 * i + 5) - 3) // 2
    off = i - _tier_start(t)
    if off == 0:
        return entry(t)
    if off == 1:
        return sink(t)
    if off <= t + 2:
        return top(off - 2, t + 1)
    k = off - t - 3
    return bottom(k, t - k + 1)


def _combined_index(v: Vertex) -> int:
    tag = v[0]
    if tag == "S":
        return 0
    if tag == "E":
        return _tier_start(v[1])
    if tag == "V":
        return _tier_start(v[1]) + 1
    if tag == "T":
        _, k, n = v
        if n < k + 1:
            raise ValueError(f"top depth {n} below minimum {k + 1} for copy {k}")
        return _tier_start(n - 1) + 2 + k
    if tag == "B":
        _, k, j = v
        if j < 1:
            raise ValueError(f"bottom position must be positive, got {j}")
        t = k + j - 1
        return _tier_start(t) + t + 3 + k
    raise ValueError(f"not a ladder vertex: {v!r}")


def make_counterexample() -> LadderFamilyGraph:
    """The combined graph: source, entry chain, one ladder copy per k >= 0.

    The entry chain E(0) -> E(1) -> ... carries weight-1 edges, every E(k)
    also feeds the top chain of copy k, and the source feeds E(0).
    """

    def successors(v: Vertex):
        tag = v[0]
        if tag == "S":
            return ((entry(0), ONE),)
        if tag == "E":
            k = v[1]
            return ((entry(k + 1), ONE), (top(k, k + 1), ONE))
        return _copy_successors(v[1], v)

    def predecessors(v: Vertex):
        tag = v[0]
        if tag == "S":
            return ()
        if tag == "E":
            k = v[1]
            return ((SOURCE, ONE),) if k == 0 else ((entry(k - 1), ONE),)
        edges = _copy_predecessors(v[1], v)
        if edges is None:
            return ((entry(v[1]), ONE),)
        return edges

    return LadderFamilyGraph(
        kind="combined",
        copy_index=None,
        successors=successors,
        predecessors=predecessors,
        enumerate_vertex=_combined_enumerate,
        index_of_vertex=_combined_index,
        description="combined ladder graph",
    )


def make_entry_spine(copy: int = 0) -> C0Graph:
    """The combined graph restricted to the source, entry chain and one copy.

    This is the induced subgraph on {S, all E(i)} plus the top chain, bottom
    chain and sink of the chosen copy.  No path of the combined graph leaves
    this vertex set and returns, so orbits restricted to these coordinates
    agree with orbits computed in the full graph.
    """
    if copy < 0:
        raise ValueError(f"copy index must be nonnegative, got {copy}")

    def successors(v: Vertex):
        tag = v[0]
        if tag == "S":
            return ((entry(0), ONE),)
        if tag == "E":
            k = v[1]
            edges = [(entry(k + 1), ONE)]
            if k == copy:
                edges.append((top(copy, copy + 1), ONE))
            return tuple(edges)
        return _copy_successors(copy, v)

    def predecessors(v: Vertex):
        tag = v[0]
        if tag == "S":
            return ()
        if tag == "E":
            k = v[1]
            return ((SOURCE, ONE),) if k == 0 else ((entry(k - 1), ONE),)
        edges = _copy_predecessors(copy, v)
        if edges is None:
            return ((entry(copy), ONE),)
        return edges

    def enum(i: int) -> Vertex:
        if i == 0:
            return SOURCE
        if i == 1:
            return sink(copy)
        t, off = divmod(i - 2, 3)
        if off == 0:
            return entry(t)
        if off == 1:
            return top(copy, copy + 1 + t)
        return bottom(copy, 1 + t)

    def index_of(v: Vertex) -> int:
        tag = v[0]
        if tag == "S":
            return 0
        if tag == "V" and v[1] == copy:
            return 1
        if tag == "E":
            return 2 + 3 * v[1]
        if tag == "T" and v[1] == copy:
            return 3 + 3 * (v[2] - copy - 1)
        if tag == "B" and v[1] == copy:
            return 4 + 3 * (v[2] - 1)
        raise ValueError(f"vertex {v!r} is not on the entry spine of copy {copy}")

    return C0Graph(
        successors=successors,
        predecessors=predecessors,
        enumerate_vertex=enum,
        index_of_vertex=index_of,
        description=f"entry spine of copy {copy}",
    )


def spine_vertex_set(copy: int):
    """Membership test for the vertex set of make_entry_spine(copy)."""

    def contains(v: Vertex) -> bool:
        tag = v[0]
        if tag in ("S", "E"):
            return True
        return v[1] == copy

    return contains


def orbit_predicate(kind: str, k: int, n: int) -> int:
    """Predicted sink coordinate of the n-th orbit vector, 0 or 1.

    For a standalone copy k started at its entry vertex, the sink coordinate
    of T^n e_entry is 1 exactly when n = 2**(m+2) - k - 1 for some m >= k,
    and 0 otherwise.  For the combined graph started at the source, the sink
    of copy k reads 1 exactly when n = 2**(m+2) for some m >= k.  All other
    values of n give 0 because at most one path of each length reaches a
    given sink and its weight telescopes to 1.
    """
    if n < 0:
        raise ValueError(f"step count must be nonnegative, got {n}")
    if k < 0:
        raise ValueError(f"copy index must be nonnegative, got {k}")
    if kind in ("g0", "gk"):
        if kind == "g0" and k != 0:
            raise ValueError(f"kind 'g0' requires k = 0, got {k}")
        if kind == "gk" and k < 1:
            raise ValueError(f"kind 'gk' requires k >= 1, got {k}")
        target = n + k + 1
        if target & (target - 1):
            return 0
        m = target.bit_length() - 3
        return 1 if m >= k else 0
    if kind == "combined":
        if n < 4 or n & (n - 1):
            return 0
        m = n.bit_length() - 3
        return 1 if m >= k else 0
    raise ValueError(f"unknown graph kind {kind!r}")
