"""q-calculus on geometric lattices.

Every function in the library lives on a :class:`QGrid`, the finite point set
``base * q**i`` for ``i = 0..depth``.  Sampling at ``q*x`` is an index shift, so
the q-derivative is exact in this representation and the Jackson integral is a
plain (truncated) sum.

The deepest node ``i = depth`` stands in for ``x = 0``: tail sums and products
start there with the empty value.

Grids can optionally carry a decimal precision ``dps``.  The lattice values are
then mpmath numbers held in numpy object arrays.  This matters for residual
checks deep in the lattice, where ``(1 - q) * x`` falls far below double
precision and a q-difference of float samples is pure rounding noise.
"""
from __future__ import annotations

import math
import numbers
from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import mpmath
import numpy as np

from .errors import DomainError, NonConvergedError

DEFAULT_DEPTH = 256
DEFAULT_TOL = 1e-12


# -- elementwise math that works for float64 and mpmath object arrays --------

def _mp_exp(v):
    return v.context.exp(v)


def _mp_log(v):
    return v.context.log(v)


def _mp_sqrt(v):
    return v.context.sqrt(v)


_OBJ_EXP = np.frompyfunc(_mp_exp, 1, 1)
_OBJ_LOG = np.frompyfunc(_mp_log, 1, 1)
_OBJ_SQRT = np.frompyfunc(_mp_sqrt, 1, 1)


def _is_object(a):
    return isinstance(a, mpmath.mpf) or (isinstance(a, np.ndarray) and a.dtype == object)


def exp(a):
    """Elementwise exponential; keeps mpmath precision for object arrays."""
    return _OBJ_EXP(a) if _is_object(a) else np.exp(a)


def log(a):
    """Elementwise natural log.  Callers guarantee positivity."""
    return _OBJ_LOG(a) if _is_object(a) else np.log(a)


def sqrt(a):
    return _OBJ_SQRT(a) if _is_object(a) else np.sqrt(a)


def as_float(a):
    """Convert lattice values (float or mpmath) to a float64 ndarray."""
    return np.asarray(a, dtype=float)


@dataclass(frozen=True)
class QGrid:
    """Geometric lattice ``{base * q**i : i = 0..depth}``.

    Parameters
    ----------
    base : float
        Starting point, nonzero.  Points shrink monotonically toward 0.
    q : float
        Lattice ratio, strictly inside (0, 1).
    depth : int
        Index of the deepest node ``N``; the grid has ``N + 1`` points.
    dps : int, optional
        Decimal digits for multiprecision lattices.  ``None`` means float64.
    """

    base: float
    q: float
    depth: int = DEFAULT_DEPTH
    dps: int | None = None

    def __post_init__(self):
        if not 0.0 < self.q < 1.0:
            raise ValueError(f"lattice ratio q must satisfy 0 < q < 1, got {self.q!r}")
        if self.base == 0 or not math.isfinite(self.base):
            raise ValueError("grid base must be finite and nonzero")
        if isinstance(self.depth, bool) or not isinstance(self.depth, numbers.Integral) or self.depth < 1:
            raise ValueError(f"depth must be a positive integer, got {self.depth!r}")
        if self.dps is not None and self.dps < 16:
            raise ValueError("dps below 16 gives less than float64 precision")

    @cached_property
    def context(self):
        """The private mpmath context for multiprecision grids, else ``None``."""
        if self.dps is None:
            return None
        ctx = mpmath.MPContext()
        ctx.dps = self.dps
        return ctx

    @property
    def multiprecision(self) -> bool:
        return self.dps is not None

    def real(self, value):
        """Coerce a scalar to this grid's number type."""
        if self.dps is None:
            return float(value)
        return self.context.mpf(value)

    def asarray(self, values) -> np.ndarray:
        """Coerce a sequence to this grid's array type (float64 or mpf objects)."""
        if self.dps is None:
            return np.asarray(values, dtype=float)
        mpf = self.context.mpf
        return np.array([mpf(v) for v in np.ravel(np.asarray(values, dtype=object))], dtype=object)

    @cached_property
    def qr(self):
        """``q`` in the grid's number type."""
        return self.real(self.q)

    @cached_property
    def points(self) -> np.ndarray:
        if self.dps is None:
            pts = self.base * self.q ** np.arange(self.depth + 1, dtype=float)
        else:
            b, q = self.real(self.base), self.qr
            pts = np.array([b * q**i for i in range(self.depth + 1)], dtype=object)
        pts.setflags(write=False)
        return pts

    @cached_property
    def steps(self) -> np.ndarray:
        """Jackson weights ``(1 - q) * x_i``, i.e. ``x_i - q*x_i``."""
        h = (1 - self.qr) * self.points
        h.setflags(write=False)
        return h

    def point(self, i: int):
        self._check_index(i, self.depth)
        return self.points[i]

    def truncate(self, depth: int) -> "QGrid":
        """Same lattice cut at a shallower depth."""
        if depth > self.depth:
            raise ValueError(f"cannot extend grid of depth {self.depth} to {depth}")
        if depth == self.depth:
            return self
        return QGrid(self.base, self.q, depth, self.dps)

    def with_precision(self, dps: int | None) -> "QGrid":
        return QGrid(self.base, self.q, self.depth, dps)

    @staticmethod
    def _check_index(i, last):
        if not 0 <= i <= last:
            raise IndexError(f"lattice index {i} outside 0..{last}")


def recommended_dps(base: float, q: float, depth: int, derivative_order: int = 2) -> int:
    """Digits needed for q-differences of order ``derivative_order`` to stay
    accurate to ~1e-20 down to the deepest node of the lattice."""
    deepest_step = math.log10(abs(base) * (1 - q)) + depth * math.log10(q)
    return int(math.ceil(-derivative_order * deepest_step)) + 30


def depth_for_tail(base: float, q: float, tol: float = DEFAULT_TOL) -> int:
    """Smallest depth whose deepest step ``(1 - q) |base| q**N`` is below ``tol``."""
    if not 0 < q < 1:
        raise ValueError(f"q must lie strictly between 0 and 1, got {q!r}")
    n = math.log(tol / ((1 - q) * abs(base))) / math.log(q)
    return max(1, int(math.ceil(n)))


@dataclass(frozen=True, eq=False)
class LatticeFn:
    """A scalar function sampled on a :class:`QGrid`.

    ``values[i]`` is ``f(grid.points[i])``.  Instances are immutable; the value
    array is flagged read-only.
    """

    grid: QGrid
    values: np.ndarray

    def __post_init__(self):
        vals = self.grid.asarray(self.values) if not isinstance(self.values, np.ndarray) else self.values
        if self.grid.multiprecision and vals.dtype != object:
            vals = self.grid.asarray(vals)
        elif not self.grid.multiprecision and vals.dtype != float:
            vals = as_float(vals)
        if vals.shape != (self.grid.depth + 1,):
            raise ValueError(
                f"expected {self.grid.depth + 1} samples for grid depth {self.grid.depth}, got shape {vals.shape}"
            )
        if vals.flags.writeable:
            vals = vals.copy()
            vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_function(cls, grid: QGrid, func: Callable) -> "LatticeFn":
        """Sample a vectorized callable at the grid points."""
        return cls(grid, func(grid.points))

    @classmethod
    def constant(cls, grid: QGrid, c: float) -> "LatticeFn":
        return cls(grid, grid.asarray([c] * (grid.depth + 1)))

    def __len__(self):
        return len(self.values)

    def __getitem__(self, i):
        return self.values[i]

    @property
    def depth(self) -> int:
        return self.grid.depth

    def shift(self) -> "LatticeFn":
        """The function ``x -> f(q*x)``, one node shorter."""
        return LatticeFn(self.grid.truncate(self.depth - 1), self.values[1:])

    def truncate(self, depth: int) -> "LatticeFn":
        return LatticeFn(self.grid.truncate(depth), self.values[: depth + 1])

    def to_float(self) -> np.ndarray:
        return as_float(self.values)

    def _coerce(self, other):
        if isinstance(other, LatticeFn):
            if other.grid != self.grid:
                raise ValueError("lattice functions live on different grids")
            return other.values
        return other

    def __add__(self, other):
        return LatticeFn(self.grid, self.values + self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return LatticeFn(self.grid, self.values - self._coerce(other))

    def __rsub__(self, other):
        return LatticeFn(self.grid, self._coerce(other) - self.values)

    def __mul__(self, other):
        return LatticeFn(self.grid, self.values * self._coerce(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return LatticeFn(self.grid, self.values / self._coerce(other))

    def __neg__(self):
        return LatticeFn(self.grid, -self.values)

    def __repr__(self):
        return f"LatticeFn(grid={self.grid!r}, values=[{len(self.values)} samples])"


def as_lattice(grid: QGrid, f) -> LatticeFn:
    """Accept a LatticeFn, a scalar, or a vectorized callable."""
    if isinstance(f, LatticeFn):
        if f.grid != grid:
            if f.grid.base == grid.base and f.grid.q == grid.q and f.grid.dps == grid.dps and f.depth > grid.depth:
                return f.truncate(grid.depth)
            raise ValueError("lattice function lives on a different grid")
        return f
    if callable(f):
        return LatticeFn.from_function(grid, f)
    return LatticeFn.constant(grid, f)


# -- q-derivative ------------------------------------------------------------

def q_derivative(f: LatticeFn, i: int):
    """``(f(x) - f(qx)) / ((1 - q) x)`` at lattice index ``i``."""
    if not 0 <= i < f.depth:
        raise IndexError(f"q-derivative needs index in 0..{f.depth - 1}, got {i}")
    return (f.values[i] - f.values[i + 1]) / f.grid.steps[i]


def q_derivative_fn(f: LatticeFn) -> LatticeFn:
    """q-derivative at every node that has a successor (depth shrinks by one)."""
    g = f.grid.truncate(f.depth - 1)
    return LatticeFn(g, (f.values[:-1] - f.values[1:]) / f.grid.steps[:-1])


# -- Jackson integral and products ----------------------------------------------

def q_integral(f: LatticeFn, tol: float = DEFAULT_TOL):
    """Jackson integral from 0 to ``grid.base``, truncated at the grid depth.

    Raises
    ------
    NonConvergedError
        If the last summed term is not below ``tol`` in magnitude.
    """
    terms = f.grid.steps * f.values
    last = abs(terms[-1])
    if not last < tol:
        raise NonConvergedError("Jackson sum tail above tolerance; increase grid depth", last)
    return terms.sum()


def q_antiderivative(f: LatticeFn, tol: float = DEFAULT_TOL) -> LatticeFn:
    """``F(x_i) = int_0^{x_i} f d_q t`` at every node."""
    terms = f.grid.steps * f.values
    last = abs(terms[-1])
    if not last < tol:
        raise NonConvergedError("Jackson sum tail above tolerance; increase grid depth", last)
    return LatticeFn(f.grid, np.cumsum(terms[::-1])[::-1])


def q_product(f: LatticeFn, tol: float = DEFAULT_TOL):
    """``prod_n (1 - (1 - q) q**n x f(q**n x))`` over the whole grid."""
    factors = 1 - f.grid.steps * f.values
    _check_positive(factors)
    last = abs(factors[-1] - 1)
    if not last < tol:
        raise NonConvergedError("q-product tail factor not close to 1; increase grid depth", last)
    return np.prod(factors)


def _check_positive(factors):
    bad = np.flatnonzero(~(factors > 0))
    if bad.size:
        raise DomainError("non-positive factor in q-product (log branch)", index=int(bad[0]))


def tail_sum(terms: np.ndarray) -> np.ndarray:
    """``S_i = sum_{k >= i} terms[k]``; one extra trailing entry equal to 0."""
    out = np.concatenate([np.cumsum(terms[::-1])[::-1], terms[:1] * 0])
    return out


def tail_product(factors: np.ndarray, tol: float | None = DEFAULT_TOL) -> np.ndarray:
    """``P_i = prod_{k >= i} factors[k]`` computed as ``exp(sum log)``.

    This is the exp-of-q-integral form of an infinite product.  The result has
    one extra trailing entry equal to 1 (the empty product at ``x = 0``).
    Every factor must be strictly positive.
    """
    _check_positive(factors)
    if tol is not None:
        last = abs(factors[-1] - 1)
        if not last < tol:
            raise NonConvergedError("q-product tail factor not close to 1; increase grid depth", last)
    return exp(tail_sum(log(factors)))


# -- generalized exponential ------------------------------------------------------

@dataclass(frozen=True)
class RSeries:
    """Coefficient rule for ``exp_R(x) = sum_n x**n / (R(q) R(q**2) ... R(q**n))``."""

    rule: Callable
    q: float
    truncation: int = DEFAULT_DEPTH
    tol: float = DEFAULT_TOL


def power_law_rule(alpha: float, q):
    """Rule ``R(x) = p (1 - x**(alpha+1)) / ((1 - q) x**(alpha+1))`` with ``p = q**(alpha+1)``.

    By Euler's identity its ``exp_R`` factorizes as
    ``prod_{k>=0} (1 + (1 - q) x p**k)``.  For ``alpha = 0`` this is the
    q-exponential ``sum q**(n(n-1)/2) x**n / [n]_q!`` with ``d_q e(x) = e(q x)``,
    which tends to ``e**x`` as ``q -> 1``.
    """
    p = q ** (alpha + 1)

    def rule(x):
        y = x ** (alpha + 1)
        return p * (1 - y) / ((1 - q) * y)

    return rule


def exp_R(x, series: RSeries):
    """Truncated generalized exponential.  ``x`` may be a scalar or an array.

    Raises
    ------
    DomainError
        If some ``R(q**k)`` in the denominator chain is zero.
    NonConvergedError
        If the term of order ``series.truncation`` is not below ``series.tol``.
    """
    q = series.q
    qk = q
    term = x * 0 + 1
    total = term
    for k in range(1, series.truncation + 1):
        r = series.rule(qk)
        if r == 0:
            raise DomainError("R vanishes in the exp_R denominator chain", index=k)
        term = term * x / r
        total = total + term
        qk = qk * q
    last = np.max(np.abs(term)) if isinstance(term, np.ndarray) else abs(term)
    if not last < series.tol:
        raise NonConvergedError("exp_R series not converged; raise truncation", last)
    return total
