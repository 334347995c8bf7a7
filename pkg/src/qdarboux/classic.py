"""Differential (q -> 1) counterparts of the lattice formulas.

Everything here is plain quadrature: fixed-step composite trapezoid rules on
uniform nodes starting at 0, plus central differences for residuals.  These
functions are deliberately simple so they can serve as independent oracles
for the q-difference code as ``q`` approaches 1.

All evaluators accept a scalar ``x`` or an array of points.  A point that is
not a quadrature node gets a final partial trapezoid panel, so the integral is
evaluated at exactly that point.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .errors import DomainError, MovablePoleError
from .exprdsl import Expr, Num, evaluate_array, parse

ArrayFn = Callable[[np.ndarray], np.ndarray]


def _as_expr(e) -> Expr:
    if isinstance(e, Expr):
        return e
    if isinstance(e, (int, float)):
        return Num(float(e))
    return parse(e)


class Antiderivative:
    """``F(x) = int_0^x f(y) dy`` by the composite trapezoid rule with step ``h``."""

    def __init__(self, f: ArrayFn, h: float, x_max: float):
        if not h > 0:
            raise ValueError(f"quadrature step must be positive, got {h!r}")
        if not x_max >= 0:
            raise ValueError(f"quadrature span must be [0, x_max] with x_max >= 0, got {x_max!r}")
        self.f, self.h = f, h
        n = int(np.ceil(x_max / h - 1e-9)) + 1
        self.nodes = h * np.arange(n + 1)
        with np.errstate(over="raise", invalid="raise"):
            try:
                self.values = np.asarray(f(self.nodes), dtype=float)
                self.cum = cumulative_trapezoid(self.values, self.nodes, initial=0.0)
            except FloatingPointError as exc:
                raise DomainError(f"quadrature overflow: {exc}") from None
        if not np.all(np.isfinite(self.cum)):
            k = int(np.flatnonzero(~np.isfinite(self.cum))[0])
            raise DomainError("quadrature overflow", index=k)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if np.any(x < 0) or np.any(x > self.nodes[-1] + 1e-12):
            raise ValueError(f"evaluation point outside the quadrature span [0, {self.nodes[-1]}]")
        k = np.clip(np.floor(x / self.h + 1e-9).astype(int), 0, len(self.nodes) - 1)
        dx = x - self.nodes[k]
        on_node = np.abs(dx) <= 1e-12 * max(1.0, self.h)
        fx = np.where(on_node, self.values[k], self.f(np.where(on_node, self.nodes[k], x)))
        return np.where(on_node, self.cum[k], self.cum[k] + dx * (self.values[k] + fx) / 2)


@dataclass(frozen=True)
class ClassicalPotentials:
    """Coefficients ``R, S, T, V`` of ``d/dx (psi, phi) = [[R, S], [V, T]] (psi, phi)``.

    Each coefficient is an expression (text or tree) in ``x`` plus the named
    ``params``.  ``h`` is the quadrature step and ``[0, x_max]`` the span.
    """

    R: Expr = Num(0.0)
    S: Expr = Num(0.0)
    T: Expr = Num(0.0)
    V: Expr = Num(0.0)
    params: Mapping[str, float] = field(default_factory=dict)
    h: float = 1e-3
    x_max: float = 1.0

    def __post_init__(self):
        for name in "RSTV":
            object.__setattr__(self, name, _as_expr(getattr(self, name)))
        object.__setattr__(self, "params", dict(self.params))
        if not self.h > 0:
            raise ValueError(f"quadrature step must be positive, got {self.h!r}")

    @classmethod
    def schrodinger(cls, V="0", **kw) -> "ClassicalPotentials":
        return cls(R=Num(0.0), S=Num(1.0), T=Num(0.0), V=_as_expr(V), **kw)

    def fn(self, e) -> ArrayFn:
        e = _as_expr(e)
        params = self.params
        return lambda xs: evaluate_array(e, xs, params)

    def antiderivative(self, f: ArrayFn) -> Antiderivative:
        # one extra panel so central differences at x_max stay inside the span
        return Antiderivative(f, self.h, self.x_max + self.h)


@dataclass(frozen=True)
class _Pieces:
    A: Antiderivative  # int (R + u0 S)
    C: Antiderivative  # int (T - R - 2 u0 S)
    B: Antiderivative  # int S exp(C)
    P: Antiderivative  # int (T - u0 S)


def _pieces(p: ClassicalPotentials, u0) -> _Pieces:
    R, S, T, u = p.fn(p.R), p.fn(p.S), p.fn(p.T), p.fn(u0)
    A = p.antiderivative(lambda y: R(y) + u(y) * S(y))
    C = p.antiderivative(lambda y: T(y) - R(y) - 2 * u(y) * S(y))
    B = p.antiderivative(lambda y: S(y) * np.exp(C(y)))
    P = p.antiderivative(lambda y: T(y) - u(y) * S(y))
    return _Pieces(A, C, B, P)


def classical_solution_pair(p: ClassicalPotentials, u0, D: float, F: float, x):
    """``(psi(x), phi(x))`` of the differential system from a Riccati seed ``u0``.

    ``psi = exp(int (R + u0 S)) [D + F int S exp(int (T - R - 2 u0 S))]`` and
    ``phi = F exp(int (T - u0 S)) + u0 psi``.
    """
    k = _pieces(p, u0)
    bracket = D + F * k.B(x)
    psi = np.exp(k.A(x)) * bracket
    phi = F * np.exp(k.P(x)) + p.fn(u0)(np.asarray(x, dtype=float)) * psi
    return psi, phi


def _check_denominator(nodes_den, x_den, t):
    zero = np.flatnonzero(x_den == 0)
    if zero.size:
        raise MovablePoleError(f"Backlund denominator vanishes for t={t!r}", index=int(zero[0]))
    flip = np.flatnonzero(np.sign(nodes_den[:-1]) != np.sign(nodes_den[1:]))
    if flip.size:
        raise MovablePoleError(f"movable pole between quadrature nodes for t={t!r}", index=int(flip[0]))


def classical_backlund(u0, p: ClassicalPotentials, t: float, x, check_poles: bool = True):
    """``u0 + t exp(int (T - R - 2 u0 S)) / (1 + t int S exp(int (T - R - 2 u0 S)))``.

    Raises
    ------
    MovablePoleError
        If the denominator vanishes or changes sign on ``[0, max(x)]``.
    """
    xs = np.asarray(x, dtype=float)
    u = p.fn(u0)(xs)
    if t == 0:
        return u
    k = _pieces(p, u0)
    den = 1 + t * k.B(xs)
    if check_poles:
        upto = k.B.nodes <= np.max(xs) + k.B.h
        _check_denominator(1 + t * k.B.cum[upto], np.atleast_1d(den), t)
    return u + t * np.exp(k.C(xs)) / den


def _log_tau(u0, t, p: ClassicalPotentials) -> Callable:
    """``x -> ln(1 + t int_0^x exp(2 int_0^y u0))`` with pole detection on the nodes."""
    u = p.fn(u0)
    inner = p.antiderivative(lambda y: 2 * u(y))
    outer = p.antiderivative(lambda y: np.exp(inner(y)))
    tau_nodes = 1 + t * outer.cum
    if np.any(tau_nodes <= 0):
        k = int(np.flatnonzero(tau_nodes <= 0)[0])
        raise MovablePoleError(f"log argument of the deformation is not positive for t={t!r}", index=k)

    def L(x):
        tau = 1 + t * outer(x)
        if np.any(tau <= 0):
            raise MovablePoleError(f"log argument of the deformation is not positive for t={t!r}")
        return np.log(tau)

    return L


def classical_deformed_solution(u0, t: float, x, h: float = 1e-4, params=None, x_max=None):
    """``u(t, x) = u0 - d/dx ln(1 + t int_0^x exp(2 int_0^y u0))`` (central difference)."""
    xs = np.asarray(x, dtype=float)
    p = ClassicalPotentials.schrodinger(params=params or {}, h=h, x_max=x_max or float(np.max(xs)))
    base = p.fn(u0)(xs)
    if t == 0:
        return base
    _require_interior(xs, h)
    L = _log_tau(u0, t, p)
    return base - (L(xs + h) - L(xs - h)) / (2 * h)


def _require_interior(xs, h):
    if np.any(xs - h < 0):
        raise ValueError("central differences need x >= h")


def classical_deformed_potential(u0, t: float, x, h: float = 1e-4, v0=None, params=None, x_max=None):
    """``V(t, x) = V0(x) - 2 d^2/dx^2 ln(1 + t int_0^x exp(2 int_0^y u0))``.

    ``V0`` is ``v0`` when given, otherwise ``u0' + u0**2`` by central differences.
    """
    xs = np.asarray(x, dtype=float)
    p = ClassicalPotentials.schrodinger(params=params or {}, h=h, x_max=x_max or float(np.max(xs)))
    u = p.fn(u0)
    if v0 is not None:
        V0 = p.fn(v0)(xs)
    else:
        _require_interior(xs, h)
        V0 = (u(xs + h) - u(xs - h)) / (2 * h) + u(xs) ** 2
    if t == 0:
        return V0
    _require_interior(xs, h)
    L = _log_tau(u0, t, p)
    return V0 - 2 * (L(xs + h) - 2 * L(xs) + L(xs - h)) / (h * h)


def rosen_morse(a: float, x):
    """``a**2 (e**(-2ax) - 6 + e**(2ax)) / (e**(-ax) + e**(ax))**2``."""
    x = np.asarray(x, dtype=float)
    em, ep = np.exp(-a * x), np.exp(a * x)
    return a * a * (em * em - 6 + ep * ep) / (em + ep) ** 2


# -- residuals ---------------------------------------------------------------

def riccati_residual(u: ArrayFn, p: ClassicalPotentials, x, delta: float | None = None):
    """``u' + (R - T) u + S u**2 - V`` with a central difference of step ``delta`` (default ``p.h``)."""
    xs = np.asarray(x, dtype=float)
    d = p.h if delta is None else delta
    ux = u(xs)
    du = (u(xs + d) - u(xs - d)) / (2 * d)
    R, S, T, V = (p.fn(e)(xs) for e in (p.R, p.S, p.T, p.V))
    return du + (R - T) * ux + S * ux * ux - V


def system_residual(pair: Callable, p: ClassicalPotentials, x, delta: float | None = None):
    """Residuals of ``psi' = R psi + S phi`` and ``phi' = V psi + T phi``.

    ``pair(x)`` must return ``(psi(x), phi(x))``.
    """
    xs = np.asarray(x, dtype=float)
    d = p.h if delta is None else delta
    psi, phi = pair(xs)
    pp, fp = pair(xs + d)
    pm, fm = pair(xs - d)
    R, S, T, V = (p.fn(e)(xs) for e in (p.R, p.S, p.T, p.V))
    return (pp - pm) / (2 * d) - (R * psi + S * phi), (fp - fm) / (2 * d) - (V * psi + T * phi)


def backlund_residual(u0, p: ClassicalPotentials, t: float, x):
    """Riccati residual of :func:`classical_backlund` at ``x`` with difference step ``p.h``."""
    return riccati_residual(lambda y: classical_backlund(u0, p, t, y), p, x)


def solution_pair_residual(p: ClassicalPotentials, u0, D: float, F: float, x):
    return system_residual(lambda y: classical_solution_pair(p, u0, D, F, y), p, x)
