"""Exact scalars and finitely supported vectors.

Everything downstream works over arbitrary-precision rationals so that norms,
orbit entries and averaging coefficients come out exact, never rounded.  The
scalar type is the standard library ``fractions.Fraction``; this module pins
the alias and adds the small amount of vector plumbing the operator code
needs: sparse vectors with no stored zeros, sup and l1 norms, and the Cesaro
average of a signed geometric sequence in closed form.
"""

from __future__ import annotations

import sys
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Tuple

Rational = Fraction

ZERO = Fraction(0)
ONE = Fraction(1)
HALF = Fraction(1, 2)
TWO = Fraction(2)


def as_rational(value) -> Fraction:
    """Coerce ints, fraction strings like ``"3/4"`` and Fractions to Fraction.

    Floats are rejected on purpose: a float argument almost always means an
    inexact value leaked into an exact computation.
    """
    if isinstance(value, float):
        raise TypeError("refusing to coerce float to Rational; pass a Fraction or string")
    return Fraction(value)


def cesaro_geometric(a, p: int, n: int) -> Fraction:
    """Average of the first n powers of (-a)**p, exactly.

    Returns (1/n) * sum_{k=0}^{n-1} r**k with r = (-a)**p, evaluated through
    the closed form (1 - r**n) / ((1 - r) * n) when r != 1 and equal to 1
    otherwise.  The parameter a must lie in [0, 1]; p and n must be positive.

    For odd p the ratio r is nonpositive, the partial sums oscillate in [0, 1]
    and the average is at most 2/n in absolute value.  For even p no such
    decay holds: with a close to 1 the average stays near 1.
    """
    a = as_rational(a)
    if not ZERO <= a <= ONE:
        raise ValueError(f"a must lie in [0, 1], got {a}")
    if p < 1:
        raise ValueError(f"p must be a positive integer, got {p}")
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    r = (-a) ** p
    if r == ONE:
        return ONE
    return (ONE - r**n) / ((ONE - r) * n)


def cesaro_geometric_sum(a, p: int, n: int) -> Fraction:
    """Same average as :func:`cesaro_geometric` but by literal summation.

    Kept as an independent route for cross-checking the closed form; tests
    compare the two on wide parameter grids.
    """
    a = as_rational(a)
    if not ZERO <= a <= ONE:
        raise ValueError(f"a must lie in [0, 1], got {a}")
    if p < 1:
        raise ValueError(f"p must be a positive integer, got {p}")
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    r = (-a) ** p
    total = ZERO
    power = ONE
    for _ in range(n):
        total += power
        power *= r
    return total / n


class SparseVector:
    """Finitely supported vector with exact rational entries.

    Keys may be any hashable index (integers for abstract sequence spaces,
    vertex tuples for graph operators).  Zero entries are never stored, so two
    vectors are equal exactly when their stored entries agree.
    """

    __slots__ = ("_entries",)

    def __init__(self, entries: Mapping | Iterable[Tuple] | None = None):
        clean: dict = {}
        if entries is not None:
            items = entries.items() if isinstance(entries, Mapping) else entries
            for key, value in items:
                value = as_rational(value)
                if value:
                    cur = clean.get(key)
                    if cur is None:
                        clean[key] = value
                    else:
                        cur = cur + value
                        if cur:
                            clean[key] = cur
                        else:
                            del clean[key]
        self._entries = clean

    @classmethod
    def unit(cls, index) -> "SparseVector":
        """Coordinate vector e_index."""
        vec = cls.__new__(cls)
        vec._entries = {index: ONE}
        return vec

    @classmethod
    def _from_clean(cls, entries: dict) -> "SparseVector":
        # internal: entries must already be zero-free Fractions
        vec = cls.__new__(cls)
        vec._entries = entries
        return vec

    def __getitem__(self, index) -> Fraction:
        return self._entries.get(index, ZERO)

    def items(self):
        return self._entries.items()

    def support(self):
        """The set of indices carrying a nonzero entry."""
        return set(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self) -> Iterator:
        return iter(self._entries)

    def __bool__(self) -> bool:
        return bool(self._entries)

    def __eq__(self, other) -> bool:
        if isinstance(other, SparseVector):
            return self._entries == other._entries
        return NotImplemented

    def __add__(self, other: "SparseVector") -> "SparseVector":
        if not isinstance(other, SparseVector):
            return NotImplemented
        out = dict(self._entries)
        for key, value in other._entries.items():
            cur = out.get(key)
            if cur is None:
                out[key] = value
            else:
                cur = cur + value
                if cur:
                    out[key] = cur
                else:
                    del out[key]
        return SparseVector._from_clean(out)

    def __sub__(self, other: "SparseVector") -> "SparseVector":
        if not isinstance(other, SparseVector):
            return NotImplemented
        return self + other.scale(-ONE)

    def scale(self, scalar) -> "SparseVector":
        scalar = as_rational(scalar)
        if not scalar:
            return SparseVector._from_clean({})
        return SparseVector._from_clean(
            {key: scalar * value for key, value in self._entries.items()}
        )

    def __mul__(self, scalar) -> "SparseVector":
        return self.scale(scalar)

    __rmul__ = __mul__

    def abs(self) -> "SparseVector":
        """Entrywise absolute value."""
        return SparseVector._from_clean(
            {key: -value if value < ZERO else value for key, value in self._entries.items()}
        )

    def sup_norm(self) -> Fraction:
        """Largest absolute entry; 0 for the zero vector."""
        if not self._entries:
            return ZERO
        return max(-value if value < ZERO else value for value in self._entries.values())

    def l1_norm(self) -> Fraction:
        """Sum of absolute entries; 0 for the zero vector."""
        total = ZERO
        for value in self._entries.values():
            total += -value if value < ZERO else value
        return total

    def dot(self, other: "SparseVector") -> Fraction:
        """Bilinear pairing sum_i x_i * y_i over the common support."""
        if len(other._entries) < len(self._entries):
            self, other = other, self
        total = ZERO
        for key, value in self._entries.items():
            oth = other._entries.get(key)
            if oth is not None:
                total += value * oth
        return total

    def restrict(self, keep) -> "SparseVector":
        """Vector with entries outside ``keep`` (a membership test) zeroed."""
        return SparseVector._from_clean(
            {key: value for key, value in self._entries.items() if keep(key)}
        )

    def __repr__(self) -> str:
        if not self._entries:
            return "SparseVector(0)"
        shown = sorted(self._entries.items(), key=lambda kv: repr(kv[0]))
        body = ", ".join(f"{key!r}: {value}" for key, value in shown[:8])
        if len(shown) > 8:
            body += f", ... ({len(shown)} entries)"
        return f"SparseVector({{{body}}})"


def sup_norm(vector: SparseVector) -> Fraction:
    return vector.sup_norm()


def l1_norm(vector: SparseVector) -> Fraction:
    return vector.l1_norm()


def _int_str(n: int) -> str:
    try:
        return str(n)
    except ValueError:
        # the interpreter caps huge int-to-str conversions by default; exact
        # output legitimately needs them, so lift the cap for this one call
        limit = sys.get_int_max_str_digits()
        try:
            sys.set_int_max_str_digits(0)
            return str(n)
        finally:
            sys.set_int_max_str_digits(limit)


def fraction_str(value: Fraction) -> str:
    """Render a rational as ``p/q`` (or ``p`` when the denominator is 1)."""
    value = Fraction(value)
    if value.denominator == 1:
        return _int_str(value.numerator)
    return f"{_int_str(value.numerator)}/{_int_str(value.denominator)}"
