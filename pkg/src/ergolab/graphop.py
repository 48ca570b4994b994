"""Positive operators presented by weighted directed graphs.

A graph with nonnegative edge weights acts on finitely supported vectors by
pushing mass along edges: the image of a coordinate vector e_u is the weighted
sum of e_v over the out-edges u -> v.  When every vertex has finitely many
out-edges with summable weights and the incoming weight sums are uniformly
bounded, the action extends to a bounded positive operator on the space of
null sequences, with operator norm equal to the largest incoming weight sum.

Graphs are given by oracles (successor and predecessor callables plus a
vertex enumeration), so infinite graphs are first-class.  All operations here
are exact; norms of the infinite operator are approached through truncations
onto the first N enumerated vertices, which by positivity increase to the
true value.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from operator import mul
from typing import Callable, Iterable, List, Optional, Sequence, Tuple

from .core import ONE, ZERO, SparseVector, as_rational

Vertex = Tuple
Edge = Tuple[Vertex, Fraction]


class C0Graph:
    """Weighted directed graph with oracle access, presenting an operator.

    Parameters
    ----------
    successors, predecessors:
        Callables mapping a vertex to a sequence of (vertex, weight) pairs.
        Weights must be positive rationals; missing edges are simply absent.
    enumerate_vertex, index_of_vertex:
        A bijection between naturals and the vertex set, used for
        truncations.  Optional for auxiliary graphs that are only stepped.
    description:
        Short human-readable label used in reports.
    finite_vertices:
        For finite graphs, the full vertex tuple.  Enables concrete
        fixed-space analysis.
    """

    def __init__(
        self,
        successors: Callable[[Vertex], Sequence[Edge]],
        predecessors: Callable[[Vertex], Sequence[Edge]],
        enumerate_vertex: Optional[Callable[[int], Vertex]] = None,
        index_of_vertex: Optional[Callable[[Vertex], int]] = None,
        description: str = "",
        finite_vertices: Optional[Tuple[Vertex, ...]] = None,
    ):
        self._successors = successors
        self._predecessors = predecessors
        self._enumerate = enumerate_vertex
        self._index_of = index_of_vertex
        self.description = description
        self.finite_vertices = finite_vertices
        self._succ_cache: dict = {}

    def successors(self, v: Vertex) -> Sequence[Edge]:
        cached = self._succ_cache.get(v)
        if cached is None:
            cached = tuple(self._successors(v))
            self._succ_cache[v] = cached
        return cached

    def predecessors(self, v: Vertex) -> Sequence[Edge]:
        return tuple(self._predecessors(v))

    def enumerate_vertex(self, i: int) -> Vertex:
        if self._enumerate is None:
            raise ValueError(f"graph {self.description!r} has no vertex enumeration")
        if i < 0:
            raise ValueError(f"vertex index must be nonnegative, got {i}")
        return self._enumerate(i)

    def index_of_vertex(self, v: Vertex) -> int:
        if self._index_of is None:
            raise ValueError(f"graph {self.description!r} has no vertex enumeration")
        return self._index_of(v)

    def vertices_up_to(self, n: int) -> List[Vertex]:
        """The first n enumerated vertices."""
        return [self.enumerate_vertex(i) for i in range(n)]

    def __repr__(self) -> str:
        return f"C0Graph({self.description!r})"


def graph_from_edges(
    edges: dict, description: str = "finite graph"
) -> C0Graph:
    """Build a finite graph from an explicit successor map.

    ``edges`` maps each vertex to an iterable of (target, weight) pairs.
    Vertices that only appear as targets get an empty successor list.
    Predecessors and a sorted enumeration are derived automatically.
    """
    succ: dict = {}
    pred: dict = {}
    for u, out in edges.items():
        succ.setdefault(u, [])
        for v, w in out:
            w = as_rational(w)
            if w <= ZERO:
                raise ValueError(f"edge {u!r} -> {v!r} has nonpositive weight {w}")
            succ[u].append((v, w))
            succ.setdefault(v, [])
            pred.setdefault(v, []).append((u, w))
    vertices = tuple(sorted(succ, key=repr))
    order = {v: i for i, v in enumerate(vertices)}
    return C0Graph(
        successors=lambda v: succ.get(v, ()),
        predecessors=lambda v: pred.get(v, ()),
        enumerate_vertex=lambda i: vertices[i],
        index_of_vertex=lambda v: order[v],
        description=description,
        finite_vertices=vertices,
    )


def apply(graph: C0Graph, x: SparseVector) -> SparseVector:
    """Image of x under the graph operator: push mass along out-edges."""
    out: dict = {}
    for u, xu in x.items():
        for v, w in graph.successors(u):
            contrib = xu * w
            cur = out.get(v)
            if cur is None:
                out[v] = contrib
            else:
                cur = cur + contrib
                if cur:
                    out[v] = cur
                else:
                    del out[v]
    return SparseVector._from_clean(out)


def apply_adjoint(graph: C0Graph, y: SparseVector) -> SparseVector:
    """Image of y under the adjoint: pull mass backwards along in-edges."""
    out: dict = {}
    for v, yv in y.items():
        for u, w in graph.predecessors(v):
            contrib = yv * w
            cur = out.get(u)
            if cur is None:
                out[u] = contrib
            else:
                cur = cur + contrib
                if cur:
                    out[u] = cur
                else:
                    del out[u]
    return SparseVector._from_clean(out)


def power_apply(graph: C0Graph, x: SparseVector, n: int) -> SparseVector:
    """n-fold application of the graph operator to x.  n = 0 returns x."""
    if n < 0:
        raise ValueError(f"power must be nonnegative, got {n}")
    for _ in range(n):
        x = apply(graph, x)
    return x


def truncation_indicator(graph: C0Graph, n: int) -> SparseVector:
    """The all-ones vector on the first n enumerated vertices."""
    return SparseVector._from_clean({graph.enumerate_vertex(i): ONE for i in range(n)})


def operator_norm_truncated(graph: C0Graph, n_trunc: int) -> Fraction:
    """Sup norm of the image of the indicator of the first n_trunc vertices.

    By positivity this increases with n_trunc toward the operator norm, so
    any single value is a certified lower bound.
    """
    return apply(graph, truncation_indicator(graph, n_trunc)).sup_norm()


def operator_norm_profile(graph: C0Graph, n_trunc: int) -> List[Fraction]:
    """Truncated operator norms for every truncation 1..n_trunc.

    Computed in one incremental pass: the image of the indicator grows one
    column at a time, and the running sup is recorded after each column.
    """
    out: dict = {}
    best = ZERO
    profile: List[Fraction] = []
    for i in range(n_trunc):
        u = graph.enumerate_vertex(i)
        for v, w in graph.successors(u):
            cur = out.get(v)
            cur = w if cur is None else cur + w
            out[v] = cur
            if cur > best:
                best = cur
        profile.append(best)
    return profile


def power_norm_truncated(graph: C0Graph, n_power: int, n_trunc: int) -> Fraction:
    """Sup norm of T^n_power applied to the truncation indicator."""
    image = power_apply(graph, truncation_indicator(graph, n_trunc), n_power)
    return image.sup_norm()


def power_norms_sweep(graph: C0Graph, n_max: int, n_trunc: int) -> List[Fraction]:
    """Truncated norms of T, T^2, ..., T^n_max in a single incremental pass."""
    x = truncation_indicator(graph, n_trunc)
    norms: List[Fraction] = []
    for _ in range(n_max):
        x = apply(graph, x)
        norms.append(x.sup_norm())
    return norms


@dataclass(frozen=True)
class Path:
    """A directed path recorded as its vertex sequence and total weight."""

    vertices: Tuple[Vertex, ...]
    weight: Fraction

    @property
    def length(self) -> int:
        return len(self.vertices) - 1

    @property
    def start(self) -> Vertex:
        return self.vertices[0]

    @property
    def end(self) -> Vertex:
        return self.vertices[-1]


def enumerate_paths(graph: C0Graph, u: Vertex, v: Vertex, n: int) -> List[Path]:
    """All directed paths from u to v of length exactly n, with weights.

    Depth-first over out-edges; intended for short lengths where the number
    of partial paths stays manageable.
    """
    if n < 0:
        raise ValueError(f"path length must be nonnegative, got {n}")
    found: List[Path] = []
    # iterative DFS carrying the running weight alongside the vertex tuple
    frames: List[Tuple[Tuple[Vertex, ...], Fraction]] = [((u,), ONE)]
    while frames:
        path, weight = frames.pop()
        depth = len(path) - 1
        if depth == n:
            if path[-1] == v:
                found.append(Path(path, weight))
            continue
        for target, w in graph.successors(path[-1]):
            frames.append((path + (target,), weight * w))
    found.sort(key=lambda p: tuple(repr(x) for x in p.vertices))
    return found


def enumerate_paths_up_to(
    graph: C0Graph, u: Vertex, v: Vertex, n_max: int
) -> List[Path]:
    """All paths from u to v of every length 0..n_max, in one traversal."""
    found: List[Path] = []
    frames: List[Tuple[Tuple[Vertex, ...], Fraction]] = [((u,), ONE)]
    while frames:
        path, weight = frames.pop()
        if path[-1] == v:
            found.append(Path(path, weight))
        if len(path) - 1 == n_max:
            continue
        for target, w in graph.successors(path[-1]):
            frames.append((path + (target,), weight * w))
    found.sort(key=lambda p: (p.length, tuple(repr(x) for x in p.vertices)))
    return found


def path_weight(graph: C0Graph, vertices: Sequence[Vertex]) -> Fraction:
    """Product of edge weights along an explicit vertex sequence."""
    weights = []
    for a, b in zip(vertices, vertices[1:]):
        for target, w in graph.successors(a):
            if target == b:
                weights.append(w)
                break
        else:
            raise ValueError(f"no edge {a!r} -> {b!r}")
    return reduce(mul, weights, ONE)


@dataclass(frozen=True)
class PathCount:
    """Count and largest weight of paths of one length into one endpoint."""

    count: int
    max_weight: Fraction


def count_paths_to(graph: C0Graph, v: Vertex, n: int, n_trunc: int) -> PathCount:
    """Paths of length n ending at v that start among the first n_trunc vertices.

    Walks the graph backwards from v with a level of (count, max weight)
    cells, then aggregates over the admissible starting vertices.  Exact and
    much cheaper than forward enumeration.
    """
    if n < 0:
        raise ValueError(f"path length must be nonnegative, got {n}")
    level: dict = {v: (1, ONE)}
    for _ in range(n):
        nxt: dict = {}
        for y, (cnt, mw) in level.items():
            for x, w in graph.predecessors(y):
                wmw = w * mw
                cur = nxt.get(x)
                if cur is None:
                    nxt[x] = (cnt, wmw)
                else:
                    nxt[x] = (cur[0] + cnt, wmw if wmw > cur[1] else cur[1])
        level = nxt
        if not level:
            break
    total = 0
    best = ZERO
    for x, (cnt, mw) in level.items():
        if graph.index_of_vertex(x) < n_trunc:
            total += cnt
            if mw > best:
                best = mw
    return PathCount(total, best)


def count_paths_profile(
    graph: C0Graph, v: Vertex, n_max: int, n_trunc: int
) -> List[PathCount]:
    """PathCount for every length 0..n_max into v, in one backward sweep."""
    profile: List[PathCount] = []
    level: dict = {v: (1, ONE)}
    for _ in range(n_max + 1):
        total = 0
        best = ZERO
        for x, (cnt, mw) in level.items():
            if graph.index_of_vertex(x) < n_trunc:
                total += cnt
                if mw > best:
                    best = mw
        profile.append(PathCount(total, best))
        nxt: dict = {}
        for y, (cnt, mw) in level.items():
            for x, w in graph.predecessors(y):
                wmw = w * mw
                cur = nxt.get(x)
                if cur is None:
                    nxt[x] = (cnt, wmw)
                else:
                    nxt[x] = (cur[0] + cnt, wmw if wmw > cur[1] else cur[1])
        level = nxt
        if not level:
            profile.extend(PathCount(0, ZERO) for _ in range(n_max - len(profile) + 1))
            break
    return profile


@dataclass
class C0ConditionsReport:
    """Outcome of checking the summability and column-bound conditions."""

    truncation: int
    bound: Fraction
    max_column_sum: Fraction
    max_column_at: Optional[Vertex]
    max_out_degree: int
    violations: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations and self.max_column_sum <= self.bound

    def summary(self) -> str:
        state = "pass" if self.passed else "fail"
        return (
            f"[{state}] first {self.truncation} vertices: "
            f"max incoming weight sum {self.max_column_sum} (bound {self.bound}), "
            f"max out-degree {self.max_out_degree}, "
            f"{len(self.violations)} consistency violations"
        )


def verify_c0_conditions(graph: C0Graph, n_trunc: int, bound) -> C0ConditionsReport:
    """Check, on the first n_trunc vertices, that the graph presents an operator.

    Verifies finite out-degree with positive weights, incoming weight sums
    bounded by ``bound``, and that the successor and predecessor oracles
    describe the same edge set.
    """
    bound = as_rational(bound)
    report = C0ConditionsReport(
        truncation=n_trunc,
        bound=bound,
        max_column_sum=ZERO,
        max_column_at=None,
        max_out_degree=0,
    )
    for i in range(n_trunc):
        u = graph.enumerate_vertex(i)
        out_edges = graph.successors(u)
        if len(out_edges) > report.max_out_degree:
            report.max_out_degree = len(out_edges)
        for v, w in out_edges:
            if w <= ZERO:
                report.violations.append(f"edge {u!r} -> {v!r} has nonpositive weight {w}")
            if not any(p == u and pw == w for p, pw in graph.predecessors(v)):
                report.violations.append(
                    f"edge {u!r} -> {v!r} (weight {w}) missing from predecessors({v!r})"
                )
        column = ZERO
        for p, w in graph.predecessors(u):
            column += w
            if not any(s == u and sw == w for s, sw in graph.successors(p)):
                report.violations.append(
                    f"edge {p!r} -> {u!r} (weight {w}) missing from successors({p!r})"
                )
        if column > report.max_column_sum:
            report.max_column_sum = column
            report.max_column_at = u
    return report
