"""A block-diagonal family of symmetric doubly stochastic 2x2 matrices.

The m-th block is

    t_block(m) = [[ 1/(2m), 1 - 1/(2m) ],
                  [ 1 - 1/(2m), 1/(2m) ]]

which splits as U - a_m * V with a_m = 1 - 1/m, where U averages the two
coordinates and V takes their signed difference.  U and V are complementary
projections (U*U = U, V*V = V, U*V = V*U = 0), so every power and every
Cesaro average of a block is U plus an explicit multiple of V.  Stacking the
blocks diagonally gives a positive contraction on bounded sequences whose
averages converge block by block but not uniformly: along even powers the
V-coefficients stay bounded away from zero as m grows with n.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List

from .core import HALF, ONE, ZERO, SparseVector, as_rational, cesaro_geometric


@dataclass(frozen=True)
class Block2x2:
    """A 2x2 matrix with exact rational entries, row major."""

    a: Fraction
    b: Fraction
    c: Fraction
    d: Fraction

    def __add__(self, other: "Block2x2") -> "Block2x2":
        return Block2x2(self.a + other.a, self.b + other.b, self.c + other.c, self.d + other.d)

    def __sub__(self, other: "Block2x2") -> "Block2x2":
        return Block2x2(self.a - other.a, self.b - other.b, self.c - other.c, self.d - other.d)

    def __matmul__(self, other: "Block2x2") -> "Block2x2":
        return Block2x2(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def scale(self, scalar) -> "Block2x2":
        scalar = as_rational(scalar)
        return Block2x2(scalar * self.a, scalar * self.b, scalar * self.c, scalar * self.d)

    def matpow(self, p: int) -> "Block2x2":
        if p < 0:
            raise ValueError(f"matrix power must be nonnegative, got {p}")
        result = IDENTITY
        base = self
        while p:
            if p & 1:
                result = result @ base
            base = base @ base
            p >>= 1
        return result

    def apply(self, x, y):
        """Image of the column vector (x, y)."""
        return (self.a * x + self.b * y, self.c * x + self.d * y)

    def inf_norm(self) -> Fraction:
        """Operator norm on the 2-dimensional sup-norm space: max row sum."""
        return max(abs(self.a) + abs(self.b), abs(self.c) + abs(self.d))


IDENTITY = Block2x2(ONE, ZERO, ZERO, ONE)
U = Block2x2(HALF, HALF, HALF, HALF)
V = Block2x2(HALF, -HALF, -HALF, HALF)


def a_coeff(m: int) -> Fraction:
    """The V-coefficient a_m = 1 - 1/m of the m-th block."""
    if m < 1:
        raise ValueError(f"block index must be positive, got {m}")
    return Fraction(m - 1, m)


def t_block(m: int) -> Block2x2:
    """The m-th block, written out entrywise."""
    if m < 1:
        raise ValueError(f"block index must be positive, got {m}")
    small = Fraction(1, 2 * m)
    return Block2x2(small, ONE - small, ONE - small, small)


def block_cesaro(m: int, n: int, p: int) -> Block2x2:
    """Average of the first n powers of t_block(m)**p, via the projection split.

    Equals U + c * V with c = cesaro_geometric(a_coeff(m), p, n); exact for
    every argument.  The independent route that multiplies matrices and
    averages them literally is :func:`block_cesaro_literal`.
    """
    return U + V.scale(cesaro_geometric(a_coeff(m), p, n))


def block_cesaro_literal(m: int, n: int, p: int) -> Block2x2:
    """Same average by repeated matrix multiplication and literal summation."""
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    if p < 1:
        raise ValueError(f"p must be a positive integer, got {p}")
    step = t_block(m).matpow(p)
    power = IDENTITY
    total = IDENTITY
    for _ in range(n - 1):
        power = power @ step
        total = total + power
    return total.scale(Fraction(1, n))


def b_coeff(m: int, n: int, j: int) -> Fraction:
    """V-coefficient of the n-th Cesaro average of the 2j-th block powers.

    This is cesaro_geometric(a_coeff(m), 2j, n).  Because the exponent is
    even the summands are all positive, so no cancellation helps the
    average: along the diagonal m = n the coefficient stays above a fixed
    positive bound no matter how large n gets.
    """
    if j < 1:
        raise ValueError(f"j must be a positive integer, got {j}")
    return cesaro_geometric(a_coeff(m), 2 * j, n)


def sup_deviation(m_max: int, n: int, p: int) -> Fraction:
    """Largest deviation of a block average from its limit projection.

    max over m <= m_max of the sup-operator-norm of block_cesaro(m, n, p) - U.
    For odd p this decays like 2/n uniformly in m_max; for even p it does
    not decay at all once m_max grows with n.
    """
    if m_max < 1:
        raise ValueError(f"m_max must be positive, got {m_max}")
    best = ZERO
    for m in range(1, m_max + 1):
        dev = (block_cesaro(m, n, p) - U).inf_norm()
        if dev > best:
            best = dev
    return best


def sup_deviation_float(m_max: int, n: int, p: int) -> float:
    """Double-precision version of :func:`sup_deviation` for quick sweeps.

    Evaluates the same closed form in IEEE doubles.  The per-block relative
    error is far below 1e-9 for the parameter ranges used here; results of
    record should still come from the exact version.
    """
    if m_max < 1:
        raise ValueError(f"m_max must be positive, got {m_max}")
    if n < 1 or p < 1:
        raise ValueError("n and p must be positive integers")
    best = 0.0
    for m in range(1, m_max + 1):
        r = (-(1.0 - 1.0 / m)) ** p
        if r == 1.0:
            dev = 1.0
        else:
            dev = abs((1.0 - r**n) / ((1.0 - r) * n))
        if dev > best:
            best = dev
    return best


def witness_apply(m_max: int, n: int, j: int) -> List[Fraction]:
    """Blockwise image of the alternating witness vector under the average.

    Applies the n-th Cesaro average of the blockwise 2j-th powers to the
    vector whose every block is (1, -1), and returns the first coordinate of
    each image block for m = 1..m_max.  Since U kills (1, -1) and V fixes
    it, the m-th image block is (c, -c) with c = b_coeff(m, n, j); the
    application is still performed through the matrix so the projection
    algebra is exercised, and the (c, -c) shape is asserted.
    """
    out: List[Fraction] = []
    for m in range(1, m_max + 1):
        x, y = block_cesaro(m, n, 2 * j).apply(ONE, -ONE)
        if y != -x:
            raise AssertionError(f"image block {m} is not antisymmetric: ({x}, {y})")
        out.append(x)
    return out


@dataclass(frozen=True)
class FixedPointReport:
    """Outcome of checking that no block power degenerates to the identity ratio."""

    ok: bool
    count_checked: int
    max_power_value: Fraction
    max_at_m: int

    def summary(self) -> str:
        state = "pass" if self.ok else "fail"
        return (
            f"[{state}] checked {self.count_checked} blocks: "
            f"largest even-power ratio {self.max_power_value} at m = {self.max_at_m}"
        )


def multiplication_fixed_check(m_max: int, j: int) -> FixedPointReport:
    """Verify a_coeff(m)**(2j) != 1 for every m <= m_max.

    The averaging formula for even powers divides by 1 - a_m**(2j); this
    confirms the denominator never vanishes, records the largest ratio seen
    and where it occurs.
    """
    if m_max < 1:
        raise ValueError(f"m_max must be positive, got {m_max}")
    if j < 1:
        raise ValueError(f"j must be a positive integer, got {j}")
    best = -ONE
    best_at = 0
    ok = True
    for m in range(1, m_max + 1):
        value = a_coeff(m) ** (2 * j)
        if value == ONE:
            ok = False
        if value > best:
            best = value
            best_at = m
    return FixedPointReport(ok=ok, count_checked=m_max, max_power_value=best, max_at_m=best_at)


class BlockOperator:
    """The diagonal stack of blocks acting on finitely supported vectors.

    Coordinates are indexed by naturals; indices 2*(m-1) and 2*(m-1) + 1
    form block m.  ``power`` applies t_block(m)**power blockwise.  This is
    the restriction of the bounded-sequence operator to finitely supported
    vectors, which is all the exact machinery ever touches.
    """

    def __init__(self, power: int = 1):
        if power < 1:
            raise ValueError(f"power must be a positive integer, got {power}")
        self.power = power
        self._cache: Dict[int, Block2x2] = {}

    def block(self, m: int) -> Block2x2:
        mat = self._cache.get(m)
        if mat is None:
            mat = t_block(m).matpow(self.power)
            self._cache[m] = mat
        return mat

    def apply(self, x: SparseVector) -> SparseVector:
        out: dict = {}
        blocks = set()
        for idx in x:
            if not isinstance(idx, int) or idx < 0:
                raise ValueError(f"block operator needs natural-number indices, got {idx!r}")
            blocks.add(idx // 2)
        for blk in blocks:
            m = blk + 1
            lo, hi = 2 * blk, 2 * blk + 1
            u, v = self.block(m).apply(x[lo], x[hi])
            if u:
                out[lo] = u
            if v:
                out[hi] = v
        return SparseVector._from_clean(out)
