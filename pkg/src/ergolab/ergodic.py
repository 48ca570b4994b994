"""Cesaro averaging engines, convergence checks and fixed-space certificates.

The functions here treat an operator abstractly through a handle (apply one
step, optionally apply the adjoint) and compute Cesaro averages

    A_n x = (1/n) * (x + Tx + ... + T**(n-1) x)

in a single incremental pass.  For the combined ladder graph started at its
source the generic pass is quadratic in n, so the checks transparently hand
long windows to the exact structural sweep in :mod:`ergolab.sweeps`; the two
engines are verified against each other in the tests and the choice can be
forced either way.

The certificate machinery addresses the other half of mean ergodicity.  An
average of powers can only converge to 0 for every start vector if no
nonzero functional is fixed by the transposed action; ``y`` is such a
functional when y_u equals the weighted sum of y over the successors of u.
For the ladder graphs this is ruled out symbolically (sinks force 0, zero
climbs the bottom chains, summability kills the constant top and entry
chains), and the resulting derivation is replayable against the graph
oracles step by step.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

from . import graphop, ladder, sweeps
from .core import ONE, ZERO, SparseVector, as_rational
from .graphop import C0Graph, Vertex


class BudgetExceeded(RuntimeError):
    """Raised when an averaging pass outgrows its configured step or support cap."""


@dataclass
class OperatorHandle:
    """One-step access to an operator on finitely supported vectors.

    ``positive`` is advisory: it asserts that apply maps nonnegative vectors
    to nonnegative vectors, which tests spot-check.  ``graph`` links back to
    a graph presentation when one exists; it enables the complex-factor
    stepping path and the structural fast sweep.
    """

    apply: Callable[[SparseVector], SparseVector]
    adjoint_apply: Optional[Callable[[SparseVector], SparseVector]] = None
    description: str = ""
    positive: bool = True
    graph: Optional[C0Graph] = None

    def supports_fast_sweep(self, x: SparseVector) -> bool:
        return (
            self.graph is not None
            and sweeps.fast_cesaro_available(self.graph)
            and x == SparseVector.unit(ladder.SOURCE)
        )


def graph_handle(graph: C0Graph) -> OperatorHandle:
    """Handle for the operator presented by a weighted graph."""
    return OperatorHandle(
        apply=lambda x: graphop.apply(graph, x),
        adjoint_apply=lambda y: graphop.apply_adjoint(graph, y),
        description=graph.description or "graph operator",
        positive=True,
        graph=graph,
    )


def block_handle(power: int = 1) -> OperatorHandle:
    """Handle for the block-diagonal operator (blockwise ``power``-th powers)."""
    from .blockdiag import BlockOperator

    op = BlockOperator(power)
    return OperatorHandle(
        apply=op.apply,
        adjoint_apply=op.apply,  # each block is symmetric
        description=f"block-diagonal operator, power {power}",
        positive=False,  # blocks have positive entries but V-components may flip sign
    )


def cesaro_apply(
    op: OperatorHandle,
    x: SparseVector,
    n: int,
    max_support: Optional[int] = None,
) -> SparseVector:
    """The n-th Cesaro average A_n x, by one incremental pass.

    Maintains the current power T^k x and the running sum; raises
    :class:`BudgetExceeded` if the sum's support outgrows ``max_support``.
    """
    if n < 1:
        raise ValueError(f"window length must be positive, got {n}")
    acc = dict(x.items())
    cur = x
    for _ in range(n - 1):
        cur = op.apply(cur)
        for key, value in cur.items():
            prev = acc.get(key)
            acc[key] = value if prev is None else prev + value
        if max_support is not None and len(acc) > max_support:
            raise BudgetExceeded(
                f"support {len(acc)} exceeded cap {max_support} while averaging"
            )
    scale = Fraction(1, n)
    return SparseVector({key: scale * value for key, value in acc.items()})


@dataclass(frozen=True)
class TraceRecord:
    n: int
    sup_norm: Fraction
    support: Optional[int]


@dataclass
class CesaroTrace:
    """Sup norms (and support sizes when available) of A_n x along a schedule."""

    description: str
    records: List[TraceRecord]

    def norms(self) -> Dict[int, Fraction]:
        return {rec.n: rec.sup_norm for rec in self.records}


def cesaro_trace(
    op: OperatorHandle,
    x: SparseVector,
    schedule: Sequence[int],
    max_support: Optional[int] = None,
    engine: str = "auto",
) -> CesaroTrace:
    """Record sup norms of A_n x for every n in the schedule, one pass.

    engine "auto" uses the exact structural sweep when the handle is the
    combined ladder graph started at the source; "generic" forces the
    incremental pass; "fast" requires the sweep and errors otherwise.
    """
    wanted = sorted(set(int(n) for n in schedule))
    if not wanted or wanted[0] < 1:
        raise ValueError("schedule must be a nonempty collection of positive lengths")
    if engine not in ("auto", "generic", "fast"):
        raise ValueError(f"unknown engine {engine!r}")
    use_fast = op.supports_fast_sweep(x) if engine == "auto" else (engine == "fast")
    if use_fast:
        if not op.supports_fast_sweep(x):
            raise ValueError("fast engine requires the combined graph started at the source")
        values = sweeps.combined_cesaro_sup_norms(wanted)
        records = [TraceRecord(n, values[n], None) for n in wanted]
        return CesaroTrace(op.description, records)
    records = []
    acc = dict(x.items())
    cur = x
    wanted_set = set(wanted)
    for k in range(1, wanted[-1] + 1):
        if k > 1:
            cur = op.apply(cur)
            for key, value in cur.items():
                prev = acc.get(key)
                acc[key] = value if prev is None else prev + value
            if max_support is not None and len(acc) > max_support:
                raise BudgetExceeded(
                    f"support {len(acc)} exceeded cap {max_support} at window {k}"
                )
        if k in wanted_set:
            nonzero = [value for value in acc.values() if value]
            sup = max((abs(value) for value in nonzero), default=ZERO) / k
            records.append(TraceRecord(k, sup, len(nonzero)))
    return CesaroTrace(op.description, records)


@dataclass(frozen=True)
class CheckResult:
    """Outcome of a single boundedness check on a Cesaro average."""

    passed: bool
    value: Union[Fraction, float]
    threshold: Fraction
    n: int
    detail: str
    engine: str

    def summary(self) -> str:
        state = "pass" if self.passed else "fail"
        return f"[{state}] {self.detail}: value {self.value} vs threshold {self.threshold}"


FLOAT_TOL = 1e-9  # absolute slack for threshold comparisons on the float path


def _compare(value, threshold: Fraction) -> bool:
    if isinstance(value, float):
        return value <= float(threshold) + FLOAT_TOL
    return value <= threshold


def power_mean_ergodic_check(
    op: OperatorHandle,
    x: SparseVector,
    step_power: int,
    n: int,
    threshold,
    engine: str = "auto",
) -> CheckResult:
    """Check that the n-th Cesaro average of T**step_power stays small at x.

    Computes the sup norm of (1/n) * sum_{k<n} T**(step_power*k) x exactly
    and compares it with the threshold.
    """
    if step_power < 1:
        raise ValueError(f"step_power must be a positive integer, got {step_power}")
    threshold = as_rational(threshold)
    if engine not in ("auto", "generic", "fast"):
        raise ValueError(f"unknown engine {engine!r}")
    use_fast = op.supports_fast_sweep(x) if engine == "auto" else (engine == "fast")
    if use_fast:
        if not op.supports_fast_sweep(x):
            raise ValueError("fast engine requires the combined graph started at the source")
        value = sweeps.combined_cesaro_sup_norms([n], step_power=step_power)[n]
        used = "fast"
    else:

        def stepped_apply(v: SparseVector) -> SparseVector:
            for _ in range(step_power):
                v = op.apply(v)
            return v

        stepped = OperatorHandle(
            apply=stepped_apply, description=f"{op.description} ** {step_power}"
        )
        value = cesaro_apply(stepped, x, n).sup_norm()
        used = "generic"
    return CheckResult(
        passed=_compare(value, threshold),
        value=value,
        threshold=threshold,
        n=n,
        detail=f"window {n} of {op.description} to the power {step_power}",
        engine=used,
    )


def scalar_rotation_check(
    op: OperatorHandle,
    x: SparseVector,
    factor,
    n: int,
    threshold,
    engine: str = "auto",
) -> CheckResult:
    """Check the n-th Cesaro average of factor * T at x, |factor| = 1.

    Exact for factor +1 or -1.  Complex factors run in double precision on
    exact contribution data (fast engine) or on a float stepping pass
    (generic engine, graph-backed handles only), with threshold comparisons
    slackened by an absolute 1e-9.
    """
    threshold = as_rational(threshold)
    if engine not in ("auto", "generic", "fast"):
        raise ValueError(f"unknown engine {engine!r}")
    use_fast = op.supports_fast_sweep(x) if engine == "auto" else (engine == "fast")
    if use_fast:
        if not op.supports_fast_sweep(x):
            raise ValueError("fast engine requires the combined graph started at the source")
        value = sweeps.combined_cesaro_sup_norms([n], factor=factor)[n]
        used = "fast"
    elif isinstance(factor, complex):
        if op.graph is None:
            raise ValueError("complex factors need a graph-backed handle")
        if abs(abs(factor) - 1.0) > 1e-12:
            raise ValueError(f"factor must have modulus 1, got {factor!r}")
        value = _complex_cesaro_sup(op.graph, x, factor, n)
        used = "generic"
    else:
        factor = as_rational(factor)
        if factor != ONE and factor != -ONE:
            raise ValueError(f"exact factors must be 1 or -1, got {factor}")
        acc = dict(x.items())
        cur = x
        for _ in range(1, n):
            # cur tracks (factor * T)**k x
            cur = op.apply(cur)
            if factor == -ONE:
                cur = cur.scale(-ONE)
            for key, term in cur.items():
                prev = acc.get(key)
                acc[key] = term if prev is None else prev + term
        nonzero = [abs(term) for term in acc.values() if term]
        value = (max(nonzero) if nonzero else ZERO) / n
        used = "generic"
    return CheckResult(
        passed=_compare(value, threshold),
        value=value,
        threshold=threshold,
        n=n,
        detail=f"window {n} of {factor} * {op.description}",
        engine=used,
    )


def _complex_cesaro_sup(graph: C0Graph, x: SparseVector, factor: complex, n: int) -> float:
    cur = {key: complex(float(value), 0.0) for key, value in x.items()}
    acc = dict(cur)
    for _ in range(1, n):
        nxt: dict = {}
        for u, c in cur.items():
            for v, w in graph.successors(u):
                nxt[v] = nxt.get(v, 0j) + c * float(w)
        cur = {u: factor * c for u, c in nxt.items()}
        for u, c in cur.items():
            acc[u] = acc.get(u, 0j) + c
    return max(abs(c) for c in acc.values()) / n


@dataclass
class SinkHitTriangle:
    """Exact sink readings of the source orbit along the doubling subsequence.

    values[m][k] holds the coordinate of T**(2**(m+2)) e_S at sink V(k).
    When the triangle pattern holds (1 exactly for k <= m, 0 above), every
    pointwise limit of the subsequence is 1 on all tested sinks, so no
    subsequence of the orbit can settle down inside the space of sequences
    vanishing at infinity.
    """

    k_max: int
    m_max: int
    values: List[List[Fraction]]

    @property
    def matches_triangle(self) -> bool:
        return all(
            value == (ONE if k <= m else ZERO)
            for m, row in enumerate(self.values)
            for k, value in enumerate(row)
        )

    @property
    def conclusion(self) -> str:
        if self.matches_triangle:
            return (
                "every tested sink coordinate is exactly 1 from index k onward, "
                "so no pointwise cluster point of the orbit subsequence vanishes "
                "at infinity on the tested window"
            )
        return "triangle pattern violated; no conclusion"


def weak_compactness_witness(graph: C0Graph, k_max: int, m_max: int) -> SinkHitTriangle:
    """Read the sinks of the combined graph along the doubling subsequence.

    Simulates the full orbit of the source vector out to 2**(m_max+2) steps
    (exact arithmetic, no structural shortcuts) and records the coordinate
    at V(k) for k <= k_max at each step 2**(m+2), m <= m_max.
    """
    if k_max < 0 or m_max < 0:
        raise ValueError("k_max and m_max must be nonnegative")
    x = SparseVector.unit(ladder.SOURCE)
    checkpoints = {1 << (m + 2): m for m in range(m_max + 1)}
    values: List[List[Fraction]] = [[] for _ in range(m_max + 1)]
    horizon = 1 << (m_max + 2)
    for t in range(1, horizon + 1):
        x = graphop.apply(graph, x)
        m = checkpoints.get(t)
        if m is not None:
            values[m] = [x[ladder.sink(k)] for k in range(k_max + 1)]
    return SinkHitTriangle(k_max=k_max, m_max=m_max, values=values)


def renorm_estimate(graph: C0Graph, x: SparseVector, horizon: int) -> Fraction:
    """Largest sup norm along the first ``horizon`` powers applied to |x|.

    This is the finite-horizon value of the natural equivalent norm
    sup_t ||T^t |x| ||; it is nondecreasing in the horizon and, for the
    ladder graphs, bounded by 4 times the starting norm because iterated
    path weights never exceed a factor of 4.
    """
    if horizon < 0:
        raise ValueError(f"horizon must be nonnegative, got {horizon}")
    cur = x.abs()
    best = cur.sup_norm()
    for _ in range(horizon):
        cur = graphop.apply(graph, cur)
        sup = cur.sup_norm()
        if sup > best:
            best = sup
    return best


# ---------------------------------------------------------------------------
# fixed-space certificates


@dataclass(frozen=True)
class VertexFamily:
    """A batch of vertices handled by one derivation step.

    ``members`` is a membership test, ``samples`` a finite set of concrete
    representatives used when the derivation is replayed, ``infinite``
    states whether each equality class inside the family is infinite (the
    summability argument needs that).
    """

    label: str
    members: Callable[[Vertex], bool]
    samples: Tuple[Vertex, ...]
    infinite: bool = False


@dataclass(frozen=True)
class DerivationStep:
    """One rule application: every vertex of the family is forced to zero.

    rule "sink": the vertex has no out-edges, so the fixed-functional
        equation reads y = 0 directly.
    rule "chain_to_zero": the vertex has a single out-edge; following the
        unique successors stays inside the family and reaches an already
        zeroed vertex, so zero propagates back along the chain.
    rule "null_class": the out-edges split into already zeroed targets and
        exactly one weight-1 edge deeper into the same family, so all
        members of the (infinite) class carry one common value; a summable
        functional cannot be a nonzero constant on an infinite set.
    rule "substitution": every out-edge points at an already zeroed vertex.
    """

    rule: str
    family: VertexFamily
    reason: str


@dataclass
class FixedSpaceCertificate:
    """Replayable derivation that the transposed action fixes only zero.

    The fixed functionals in question live on the summable side: y is fixed
    when y_u = sum of w(u, v) * y_v over the out-edges of u.  conclusion is
    "only_zero" when the derivation discharges every vertex, otherwise
    "inconclusive".
    """

    graph_description: str
    steps: List[DerivationStep]
    equality_classes: List[VertexFamily]
    relations: List[str]
    conclusion: str

    @property
    def forced_zero(self) -> List[VertexFamily]:
        return [step.family for step in self.steps]

    def covers(self, v: Vertex) -> bool:
        return any(step.family.members(v) for step in self.steps)

    def summary(self) -> str:
        lines = [f"fixed-space certificate for {self.graph_description}: {self.conclusion}"]
        for step in self.steps:
            lines.append(f"  [{step.rule}] {step.family.label}: {step.reason}")
        return "\n".join(lines)


def _tag_family(tag: str, label: str, samples, infinite=False) -> VertexFamily:
    return VertexFamily(
        label=label,
        members=lambda v, _tag=tag: v[0] == _tag,
        samples=tuple(samples),
        infinite=infinite,
    )


def _ladder_certificate(graph: ladder.LadderFamilyGraph) -> FixedSpaceCertificate:
    combined = graph.kind == "combined"
    k = 0 if combined else graph.copy_index
    ks = (0, 1, 3) if combined else (k,)

    sinks = _tag_family(
        "V",
        "V(k)" + (" for all k >= 0" if combined else f" for k = {k}"),
        [ladder.sink(i) for i in ks],
    )
    bottoms = _tag_family(
        "B",
        "B(k,j), j >= 1" + (" for all k >= 0" if combined else f" for k = {k}"),
        [ladder.bottom(i, j) for i in ks for j in (1, 2, 5, 11)],
    )
    tops = _tag_family(
        "T",
        "T(k,n), n >= k+1"
        + (", one infinite class per k" if combined else f" for k = {k}"),
        [ladder.top(i, i + 1 + d) for i in ks for d in (0, 1, 3)],
        infinite=True,
    )
    steps = [
        DerivationStep(
            rule="sink",
            family=sinks,
            reason="no out-edges, so the fixed equation reads y = 0",
        ),
        DerivationStep(
            rule="chain_to_zero",
            family=bottoms,
            reason="y[B(k,j)] = w * y[B(k,j-1)] down to y[B(k,1)] = 2 * y[V(k)] = 0",
        ),
        DerivationStep(
            rule="null_class",
            family=tops,
            reason="y[T(k,n)] = y[T(k,n+1)] + (1/2) * y[bottom] = y[T(k,n+1)]; "
            "a summable functional constant on an infinite chain is 0",
        ),
    ]
    relations = [
        "y[V(k)] = 0",
        "y[B(k,j)] = bottom_weight(j) * y[B(k,j-1)]",
        "y[T(k,n)] = y[T(k,n+1)] + (1/2) * y[B(k, rung_position(n))]",
    ]
    classes = [tops]
    if combined:
        entries = _tag_family(
            "E",
            "E(k), k >= 0, one infinite class",
            [ladder.entry(i) for i in (0, 1, 4)],
            infinite=True,
        )
        steps.append(
            DerivationStep(
                rule="null_class",
                family=entries,
                reason="y[E(k)] = y[E(k+1)] + y[T(k,k+1)] = y[E(k+1)]; "
                "summable and constant on an infinite chain, hence 0",
            )
        )
        steps.append(
            DerivationStep(
                rule="substitution",
                family=_tag_family("S", "the source S", [ladder.SOURCE]),
                reason="y[S] = y[E(0)] = 0",
            )
        )
        relations.append("y[E(k)] = y[E(k+1)] + y[T(k,k+1)]")
        relations.append("y[S] = y[E(0)]")
        classes.append(entries)
    else:
        steps.append(
            DerivationStep(
                rule="substitution",
                family=_tag_family("E", f"the entry vertex E({k})", [ladder.entry(k)]),
                reason=f"y[E({k})] = y[T({k},{k + 1})] = 0",
            )
        )
        relations.append(f"y[E({k})] = y[T({k},{k + 1})]")
    return FixedSpaceCertificate(
        graph_description=graph.description,
        steps=steps,
        equality_classes=classes,
        relations=relations,
        conclusion="only_zero",
    )


def _finite_certificate(graph: C0Graph) -> FixedSpaceCertificate:
    vertices = graph.finite_vertices
    assert vertices is not None
    zeroed: set = set()
    steps: List[DerivationStep] = []
    changed = True
    while changed:
        changed = False
        for u in vertices:
            if u in zeroed:
                continue
            out = graph.successors(u)
            if all(v in zeroed for v, _ in out):
                zeroed.add(u)
                family = VertexFamily(
                    label=f"vertex {u!r}", members=lambda v, _u=u: v == _u, samples=(u,)
                )
                steps.append(
                    DerivationStep(
                        rule="sink" if not out else "substitution",
                        family=family,
                        reason="no out-edges"
                        if not out
                        else "all out-edges point at zeroed vertices",
                    )
                )
                changed = True
    remaining = [u for u in vertices if u not in zeroed]
    relations = []
    for u in remaining:
        terms = " + ".join(f"{w} * y[{v!r}]" for v, w in graph.successors(u))
        relations.append(f"y[{u!r}] = {terms}")
    conclusion = "only_zero" if not remaining else "inconclusive"
    return FixedSpaceCertificate(
        graph_description=graph.description,
        steps=steps,
        equality_classes=[],
        relations=relations,
        conclusion=conclusion,
    )


def fixed_space_certificate(graph: C0Graph) -> FixedSpaceCertificate:
    """Derive triviality of the transposed fixed space, when possible.

    Ladder family graphs get the symbolic derivation; finite graphs get a
    concrete substitution fixpoint.  Anything else is reported inconclusive
    rather than guessed at.
    """
    if isinstance(graph, ladder.LadderFamilyGraph):
        return _ladder_certificate(graph)
    if graph.finite_vertices is not None:
        return _finite_certificate(graph)
    return FixedSpaceCertificate(
        graph_description=graph.description,
        steps=[],
        equality_classes=[],
        relations=[],
        conclusion="inconclusive",
    )


@dataclass
class ReplayReport:
    """Outcome of replaying a certificate against the graph oracles."""

    ok: bool
    steps_checked: int
    samples_checked: int
    coverage_checked: int
    issues: List[str] = field(default_factory=list)

    def summary(self) -> str:
        state = "pass" if self.ok else "fail"
        return (
            f"[{state}] replayed {self.steps_checked} steps on "
            f"{self.samples_checked} samples, coverage {self.coverage_checked}; "
            f"{len(self.issues)} issues"
        )


def replay_certificate(
    cert: FixedSpaceCertificate,
    graph: C0Graph,
    chain_limit: int = 64,
    coverage: int = 200,
) -> ReplayReport:
    """Re-check every derivation step of a certificate against the graph.

    Each rule's premise is verified on the recorded sample vertices using
    only the successor oracle, in derivation order (so "already zeroed"
    means zeroed by an earlier step).  For graphs with an enumeration the
    first ``coverage`` vertices must each be covered by some step, which
    ties the symbolic families back to the actual vertex set.
    """
    report = ReplayReport(ok=True, steps_checked=0, samples_checked=0, coverage_checked=0)
    done: List[VertexFamily] = []

    def zeroed(v: Vertex) -> bool:
        return any(f.members(v) for f in done)

    for step in cert.steps:
        fam = step.family
        for u in fam.samples:
            report.samples_checked += 1
            try:
                out = graph.successors(u)
            except (ValueError, KeyError) as exc:
                report.issues.append(f"{fam.label}: oracle rejected sample {u!r}: {exc}")
                continue
            if step.rule == "sink":
                if out:
                    report.issues.append(f"{fam.label}: sample {u!r} has out-edges")
            elif step.rule == "substitution":
                bad = [v for v, _ in out if not zeroed(v)]
                if bad:
                    report.issues.append(
                        f"{fam.label}: sample {u!r} has non-zeroed targets {bad!r}"
                    )
            elif step.rule == "chain_to_zero":
                cur = u
                for _ in range(chain_limit):
                    try:
                        out_cur = graph.successors(cur)
                    except (ValueError, KeyError) as exc:
                        report.issues.append(
                            f"{fam.label}: oracle rejected chain vertex {cur!r}: {exc}"
                        )
                        break
                    if len(out_cur) != 1:
                        report.issues.append(
                            f"{fam.label}: chain vertex {cur!r} is not single-exit"
                        )
                        break
                    nxt = out_cur[0][0]
                    if zeroed(nxt):
                        break
                    if not fam.members(nxt):
                        report.issues.append(
                            f"{fam.label}: chain from {u!r} leaves the family at {nxt!r}"
                        )
                        break
                    cur = nxt
                else:
                    report.issues.append(
                        f"{fam.label}: chain from {u!r} did not reach a zeroed vertex "
                        f"within {chain_limit} hops"
                    )
            elif step.rule == "null_class":
                if not fam.infinite:
                    report.issues.append(f"{fam.label}: null_class needs an infinite class")
                deeper = [(v, w) for v, w in out if not zeroed(v)]
                if len(deeper) != 1 or deeper[0][1] != ONE or not fam.members(deeper[0][0]):
                    report.issues.append(
                        f"{fam.label}: sample {u!r} does not step to a single same-class "
                        f"weight-1 successor (got {deeper!r})"
                    )
            else:
                report.issues.append(f"unknown rule {step.rule!r}")
        done.append(fam)
        report.steps_checked += 1

    if cert.conclusion == "only_zero" and graph._enumerate is not None:
        if graph.finite_vertices is not None:
            coverage = min(coverage, len(graph.finite_vertices))
        for i in range(coverage):
            v = graph.enumerate_vertex(i)
            report.coverage_checked += 1
            if not zeroed(v):
                report.issues.append(f"vertex {v!r} (index {i}) not covered by any step")

    report.ok = not report.issues
    return report
