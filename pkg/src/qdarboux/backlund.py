"""Solution generators for the q-Riccati equation

    R_+ u = d_q u - T u + R u(qx) + S u u(qx) = V.

Given one solution ``u0`` the Darboux gauge with ``c = u0`` triangularizes the
transfer matrix, and the general solution follows from the closed form of an
upper-triangular infinite product.  Its ratio ``phi / psi`` is the
auto-Backlund family::

    u_t = u0 + t E / (1 + t J)

    E(x) = prod_{k>=0} a_k / d_k,   a_k = 1 - (1-q) x_k (R + u0 S)(x_k)
                                    d_k = 1 - (1-q) x_k (T - u0(q x_k) S(x_k))
    J(x) = int_0^x S / a * E  d_q y

which is a one-parameter group in ``t``.  Products and sums run from a node to
the deepest node of the grid; the formulas are exact solutions of the lattice
equation at every node that has a successor.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .darboux import riccati_minus_fn, riccati_plus_fn
from .errors import DegenerateRatioError, DomainError, MovablePoleError, SeedValidationError
from .linsys import PotentialQuad, SolutionPair, triangular_factors
from .qlattice import (
    DEFAULT_TOL,
    LatticeFn,
    QGrid,
    RSeries,
    exp_R,
    power_law_rule,
    q_antiderivative,
    q_derivative_fn,
    sqrt,
)

SEED_TOL = 1e-9


def _compatible(a: QGrid, b: QGrid):
    return a.base == b.base and a.q == b.q and a.dps == b.dps


@dataclass(frozen=True)
class SeedSolution:
    """A known solution ``u0`` of ``R_+ u0 = V``.

    ``u0`` is sampled one node deeper than the coefficients need, since the
    equation at ``x`` involves ``u0(q x)``.  ``potentials`` may be given on the
    same grid as ``u0`` or one node shallower; it is stored at ``depth - 1``.

    Construction checks the Riccati residual at every interior node against
    ``tol * max(1, |V|)`` and raises :class:`SeedValidationError` otherwise.
    """

    u0: LatticeFn
    potentials: PotentialQuad
    tol: float | None = field(default=SEED_TOL, compare=False)

    def __post_init__(self):
        g, pg = self.u0.grid, self.potentials.grid
        if not _compatible(g, pg) or pg.depth not in (g.depth, g.depth - 1):
            raise ValueError("seed and potentials must share a grid (potentials may be one node shallower)")
        object.__setattr__(self, "potentials", self.potentials.truncate(g.depth - 1))
        if self.tol is not None:
            res = self.residual()
            scale = np.maximum(1.0, np.abs(self.potentials.V.to_float()))
            rel = np.abs(res.to_float()) / scale
            k = int(np.argmax(rel))
            if not rel[k] <= self.tol:
                raise SeedValidationError("seed does not solve the q-Riccati equation", rel[k], k)

    @classmethod
    def from_u(cls, u0: LatticeFn, coefficients: PotentialQuad) -> "SeedSolution":
        """Seed whose ``V`` is defined as ``R_+ u0`` (any ``V`` in ``coefficients`` is ignored)."""
        V = riccati_plus_fn(u0, coefficients)
        return cls(u0, coefficients.truncate(u0.depth - 1).with_V(V), tol=None)

    @property
    def grid(self) -> QGrid:
        return self.u0.grid

    @property
    def V(self) -> LatticeFn:
        return self.potentials.V

    def residual(self) -> LatticeFn:
        return riccati_plus_fn(self.u0, self.potentials) - self.V

    def is_schrodinger(self) -> bool:
        p = self.potentials
        return bool(np.all(p.R.values == 0) and np.all(p.T.values == 0) and np.all(p.S.values == 1))


# -- the B+ group -----------------------------------------------------------------

def _parts(u0: LatticeFn, p: PotentialQuad, tol=DEFAULT_TOL):
    """Tail factors of the triangularized transfer product for seed ``u0``."""
    N = u0.depth
    h = u0.grid.steps[:N]
    R, S, T = p.R.values[:N], p.S.values[:N], p.T.values[:N]
    u, uq = u0.values[:N], u0.values[1:]
    a = 1 - h * (R + u * S)
    d = 1 - h * (T - uq * S)
    return triangular_factors(a, d, h * S, tol)


def _denominator_check(den, t):
    zero = np.flatnonzero(den == 0)
    if zero.size:
        raise MovablePoleError(f"Backlund denominator 1 + t*J vanishes for t={float(t)!r}", index=int(zero[0]))
    flip = np.flatnonzero((den[:-1] > 0) != (den[1:] > 0))
    if flip.size:
        raise MovablePoleError(f"movable pole between lattice nodes for t={float(t)!r}", index=int(flip[0]))


def backlund_terms(u0: LatticeFn, p: PotentialQuad, t):
    """Numerator ``t E`` and denominator ``1 + t J`` of the Backlund increment."""
    f = _parts(u0, p)
    t = u0.grid.real(t)
    return t * f.ratio, 1 + t * f.integral


def _plus(u0: LatticeFn, p: PotentialQuad, t, check_poles=True) -> LatticeFn:
    if t == 0:
        return u0
    num, den = backlund_terms(u0, p, t)
    if check_poles:
        _denominator_check(den, t)
    return LatticeFn(u0.grid, u0.values + num / den)


def backlund_plus(seed: SeedSolution, t, check_poles: bool = True) -> LatticeFn:
    """``B+_t u0``: another solution of the same q-Riccati equation.

    Raises
    ------
    MovablePoleError
        If ``1 + t J`` vanishes at, or changes sign between, lattice nodes.
    DomainError
        If a factor ``a_k`` or ``d_k`` is not strictly positive.
    """
    return _plus(seed.u0, seed.potentials, t, check_poles)


@dataclass(frozen=True)
class BacklundOrbit:
    """The point ``B+_t u0`` of the orbit through ``seed``."""

    seed: SeedSolution
    t: float

    @cached_property
    def u(self) -> LatticeFn:
        return backlund_plus(self.seed, self.t)


def general_solution(seed: SeedSolution, D, F) -> SolutionPair:
    """General solution ``(psi, phi)`` of the linear system whose ``V`` is the seed's.

    ``D`` and ``F`` fix the values at the deepest node (the stand-in for 0):
    ``psi(0) = D`` and ``phi(0) = F + D u0(0)``.  ``phi / psi`` is
    :func:`backlund_plus` at ``t = F / D``.

    Raises
    ------
    MovablePoleError
        If ``psi`` vanishes or changes sign on the lattice.
    """
    g = seed.grid
    f = _parts(seed.u0, seed.potentials)
    D, F = g.real(D), g.real(F)
    bracket = D + F * f.integral
    _denominator_check(bracket if D >= 0 else -bracket, F / D if D != 0 else float("inf"))
    psi = bracket / f.upper
    phi = F / f.lower + seed.u0.values * psi
    return SolutionPair(LatticeFn(g, psi), LatticeFn(g, phi))


def cross_ratio(u1, u2, u3, u4):
    """``((u4 - u3)(u1 - u2)) / ((u3 - u1)(u2 - u4))``.

    Works elementwise on arrays.  Coincident values raise
    :class:`DegenerateRatioError`.
    """
    den = (u3 - u1) * (u2 - u4)
    num = (u4 - u3) * (u1 - u2)
    zero = np.flatnonzero(np.atleast_1d((den == 0) | (num == 0)))
    if zero.size:
        idx = int(zero[0]) if np.ndim(den) else None
        raise DegenerateRatioError("coincident values in cross-ratio", index=idx)
    return num / den


def mobius(t, a, b, c, d):
    """Real fractional map ``(a t + b) / (c t + d)``."""
    return (a * t + b) / (c * t + d)


# -- involution-conjugated group and deformation chains -----------------------

def backlund_minus(seed: SeedSolution, t, check_poles: bool = True) -> LatticeFn:
    """``B-_t = I o B+_t o I``: auto-Backlund map of ``R_- u = R_- u0``.

    For ``R = T = 0, S = 1`` this is
    ``u0 - t E / (1 + t J)`` with ``E = prod (1 + (1-q) x u0) / (1 - (1-q) x u0(qx))``.
    """
    if t == 0:
        return seed.u0
    return -_plus(-seed.u0, seed.potentials, t, check_poles)


@dataclass(frozen=True)
class DeformationChain:
    """``B-_{t1...tn} = I B+_{t1} I B+_{t2} ... I B+_{tn} I`` applied to ``seed``.

    The empty chain is the identity.
    """

    seed: SeedSolution
    params: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(self.params))


def chain_stages(chain: DeformationChain) -> list[LatticeFn]:
    """Intermediate solutions ``[u(t_n), u(t_{n-1}, t_n), ..., u(t_1, ..., t_n)]``.

    ``u(t_k, ..., t_n) = -B+_{t_k} u(t_{k+1}, ..., t_n)`` with ``u() = -u0``
    inside a nonempty chain.
    """
    p = chain.seed.potentials
    w = -chain.seed.u0
    stages = []
    for k, t in enumerate(reversed(chain.params)):
        try:
            w = -_plus(w, p, t)
        except DomainError as exc:
            stage = len(chain.params) - k
            raise type(exc)(f"deformation stage t_{stage}: {exc}") from exc
        stages.append(w)
    return stages


def deform_chain(chain: DeformationChain) -> tuple[LatticeFn, LatticeFn]:
    """``(u(t1..tn), V(t1..tn))`` with ``V = R_+ u``.

    The result also satisfies ``R_- u(t1..tn) = V(t2..tn)``; for ``n = 1`` the
    right side is ``R_- u0``.
    """
    if not chain.params:
        return chain.seed.u0, chain.seed.V
    u = chain_stages(chain)[-1]
    return u, riccati_plus_fn(u, chain.seed.potentials)


def _require_schrodinger(seed):
    if not seed.is_schrodinger():
        raise ValueError("this operation needs the Schrodinger specialization R = T = 0, S = 1")


def deformed_potential_once(seed: SeedSolution, t) -> LatticeFn:
    """``V(t, x) = V0(x) - 2 d_q [t E / (1 + t J)]`` for ``B-_t u0``.

    Schrodinger specialization only.  One node shallower than the seed.
    """
    _require_schrodinger(seed)
    if t == 0:
        return seed.V
    num, den = backlund_terms(-seed.u0, seed.potentials, t)
    _denominator_check(den, t)
    incr = LatticeFn(seed.grid, num / den)
    return seed.V - 2 * q_derivative_fn(incr)


def quadratic_reconstruct(V_t: LatticeFn, r_minus_u0: LatticeFn, i: int):
    """Both roots for ``u(t, x)`` from the deformed potential and ``R_- u0``.

    With ``w = (1-q) x (V_t - R_- u0) / 2`` the roots are
    ``(w +- sqrt(w**2 + 2 (V_t + R_- u0))) / 2``; returned as ``(plus, minus)``.
    """
    g = V_t.grid
    h = g.steps[i]
    w = h * (V_t[i] - r_minus_u0[i]) / 2
    disc = w * w + 2 * (V_t[i] + r_minus_u0[i])
    if disc < 0:
        raise DomainError("negative discriminant in quadratic reconstruction", index=i)
    s = sqrt(disc)
    return (w + s) / 2, (w - s) / 2


def quadratic_reconstruct_fn(V_t: LatticeFn, r_minus_u0: LatticeFn) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized :func:`quadratic_reconstruct` over the common nodes."""
    n = min(V_t.depth, r_minus_u0.depth) + 1
    h = V_t.grid.steps[:n]
    v, r = V_t.values[:n], r_minus_u0.values[:n]
    w = h * (v - r) / 2
    disc = w * w + 2 * (v + r)
    bad = np.flatnonzero(disc < 0)
    if bad.size:
        raise DomainError("negative discriminant in quadratic reconstruction", index=int(bad[0]))
    s = sqrt(disc)
    return (w + s) / 2, (w - s) / 2


# -- the power-law example ---------------------------------------------------------

def power_law_potential(a, alpha, grid: QGrid) -> LatticeFn:
    """``a (1 - q**alpha) / (1 - q) x**(alpha-1) + a**2 q**alpha x**(2 alpha)``."""
    x, q = grid.points, grid.qr
    a, alpha = grid.real(a), grid.real(alpha)
    return LatticeFn(grid, a * (1 - q**alpha) / (1 - q) * x ** (alpha - 1) + a * a * q**alpha * x ** (2 * alpha))


def power_law_family(a, alpha, grid: QGrid, tol: float = SEED_TOL) -> SeedSolution:
    """Seed ``u0 = a x**alpha`` of the q-Schrodinger Riccati equation, ``alpha > -1``."""
    if not alpha > -1:
        raise ValueError(f"power-law seed needs alpha > -1, got {alpha!r}")
    if grid.base <= 0:
        raise ValueError("power-law seed needs a positive grid base")
    u0 = LatticeFn(grid, grid.real(a) * grid.points ** grid.real(alpha))
    V0 = power_law_potential(a, alpha, grid)
    return SeedSolution(u0, PotentialQuad.schrodinger(grid, V0), tol=tol)


@dataclass(frozen=True)
class PowerLawClosedForm:
    """Closed forms of ``B-_t (a x**alpha)`` and its potential through ``exp_R``."""

    u: LatticeFn
    V: LatticeFn


def power_law_closed_form(a, alpha, t, grid: QGrid, truncation: int = 256) -> PowerLawClosedForm:
    """Evaluate the ``exp_R`` closed forms on ``grid``.

    With ``z = a x**(alpha+1)`` and ``p = q**(alpha+1)``::

        E(x)  = exp_R(z) / exp_R(-q**alpha z)
        I(x)  = exp_R(p z) / exp_R(-q**alpha z)        (integrand of J)
        u     = a x**alpha - t E / (1 + t J),           J = int_0^x I d_q y
        V     = V0 - 2 t I / ((1 + t J)(1 + q t K)) *
                { (1 + q**alpha) a x**alpha (1 + q t K) - t exp_R(p z) / exp_R(-q**(2 alpha + 1) z) }

    where ``K = int_0^x exp_R(p**2 y**(alpha+1) a) / exp_R(-a q**(2 alpha+1) y**(alpha+1)) d_q y``
    so that ``q K(x) = J(q x)``.  ``exp_R`` uses :func:`power_law_rule`.
    """
    q = grid.qr
    a_, al = grid.real(a), grid.real(alpha)
    t = grid.real(t)
    x = grid.points
    series = RSeries(power_law_rule(al, q), q, truncation)
    p = q ** (al + 1)
    z = a_ * x ** (al + 1)
    den1 = exp_R(-(q**al) * z, series)
    E = exp_R(z, series) / den1
    I = exp_R(p * z, series) / den1
    J = q_antiderivative(LatticeFn(grid, I)).values
    Iq = exp_R(p * p * z, series) / exp_R(-(q ** (2 * al + 1)) * z, series)
    K = q_antiderivative(LatticeFn(grid, Iq)).values
    u = a_ * x**al - t * E / (1 + t * J)
    Eq = exp_R(p * z, series) / exp_R(-(q ** (2 * al + 1)) * z, series)
    V0 = power_law_potential(a, alpha, grid).values
    brace = (1 + q**al) * a_ * x**al * (1 + q * t * K) - t * Eq
    V = V0 - 2 * t * I / ((1 + t * J) * (1 + q * t * K)) * brace
    return PowerLawClosedForm(LatticeFn(grid, u), LatticeFn(grid, V))


def cross_ratio_fn(orbits: Sequence[LatticeFn]) -> np.ndarray:
    """Lattice-wise cross-ratio of four orbit members (no degeneracy check)."""
    u1, u2, u3, u4 = (o.values for o in orbits)
    return ((u4 - u3) * (u1 - u2)) / ((u3 - u1) * (u2 - u4))
