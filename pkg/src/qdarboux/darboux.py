"""Lower-triangular gauge transforms of the transfer matrix and the Riccati
operators they produce.

Conjugating ``Lambda(x)`` by ``D(x) = [[1, 0], [c(x), 1]]``::

    Lambda'(x) = D(q x)^-1 Lambda(x) D(x)

gives an upper-triangular matrix exactly when ``c`` solves the q-Riccati
equation ``R_+ c = V``.  The lower-left entry of ``Lambda'`` is
``(1 - q) x (R_+ c - V)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .linsys import Mat2, PotentialQuad, SolutionPair, lambda_at, lambda_stack, mat2
from .qlattice import LatticeFn, QGrid, q_derivative, q_derivative_fn


@dataclass(frozen=True)
class DarbouxMatrix:
    """``D(x) = [[1, 0], [c(x), 1]]``; unimodular, so always invertible."""

    c: LatticeFn

    def at(self, i: int) -> Mat2:
        one, zero = self.c.grid.real(1), self.c.grid.real(0)
        return mat2(one, zero, self.c[i], one)

    def inverse_at(self, i: int) -> Mat2:
        one, zero = self.c.grid.real(1), self.c.grid.real(0)
        return mat2(one, zero, -self.c[i], one)

    def apply_inverse(self, sol: SolutionPair) -> SolutionPair:
        """``D(x)^-1 (psi, phi)``: the gauge-transformed solution."""
        return SolutionPair(sol.psi, sol.phi - self.c * sol.psi)


TransferMap = Union[PotentialQuad, Callable[[int], Mat2]]


def gauge_transform(lam: TransferMap, D: DarbouxMatrix, i: int) -> Mat2:
    """``D(q x)^-1 Lambda(x) D(x)`` at lattice index ``i``."""
    if not 0 <= i < D.c.depth:
        raise IndexError(f"gauge transform needs D at index {i + 1}; depth is {D.c.depth}")
    m = lambda_at(lam, i) if isinstance(lam, PotentialQuad) else lam(i)
    return D.inverse_at(i + 1) @ m @ D.at(i)


def gauge_potentials(p: PotentialQuad, D: DarbouxMatrix) -> PotentialQuad:
    """Coefficients ``R', S', T', V'`` of the transformed system.

    Built from ``Lambda' = I - (1-q) x M'`` on every node that has a successor,
    so the result is one node shallower than ``D.c``.
    """
    d = min(p.grid.depth, D.c.depth - 1)
    g = D.c.grid.truncate(d)
    lam = lambda_stack(p.truncate(d))
    c = D.c.values
    # D(qx)^-1 Lambda D(x) with D = [[1,0],[c,1]], written out entrywise
    l00 = lam[:, 0, 0] + lam[:, 0, 1] * c[:d + 1]
    l01 = lam[:, 0, 1]
    l10 = -c[1:d + 2] * l00 + lam[:, 1, 0] + lam[:, 1, 1] * c[:d + 1]
    l11 = -c[1:d + 2] * l01 + lam[:, 1, 1]
    h = g.steps
    return PotentialQuad(
        LatticeFn(g, (1 - l00) / h),
        LatticeFn(g, -l01 / h),
        LatticeFn(g, (1 - l11) / h),
        LatticeFn(g, -l10 / h),
    )


def triangular_defect(p: PotentialQuad, c: LatticeFn, i: int):
    """Lower-left entry of the gauge-transformed transfer matrix at index ``i``.

    Equals ``(1 - q) x_i (R_+ c - V)(x_i)``, so it vanishes iff ``c`` solves
    the q-Riccati equation there.
    """
    return gauge_transform(p, DarbouxMatrix(c), i)[1, 0]


def _check_interior(u, i):
    if not 0 <= i < u.depth:
        raise IndexError(f"Riccati operators need index in 0..{u.depth - 1}, got {i}")


def riccati_apply_plus(u: LatticeFn, p: PotentialQuad, i: int):
    """``d_q u - T u + R u(qx) + S u u(qx)`` at index ``i``."""
    _check_interior(u, i)
    ui, uq = u[i], u[i + 1]
    return ((q_derivative(u, i) - p.T[i] * ui) + p.R[i] * uq) + (p.S[i] * ui) * uq


def riccati_apply_minus(u: LatticeFn, p: PotentialQuad, i: int):
    """``-d_q u + T u - R u(qx) + S u u(qx)`` at index ``i``.

    The operation order mirrors :func:`riccati_apply_plus` so that
    ``riccati_apply_plus(-u) == riccati_apply_minus(u)`` holds bit for bit.
    """
    _check_interior(u, i)
    ui, uq = u[i], u[i + 1]
    return ((-q_derivative(u, i) + p.T[i] * ui) - p.R[i] * uq) + (p.S[i] * ui) * uq


def _coeffs(u, p):
    d = u.depth - 1
    if p.grid.depth < d:
        raise ValueError(f"potentials of depth {p.grid.depth} too shallow for u of depth {u.depth}")
    return p.truncate(d), u.truncate(d), u.shift()


def riccati_plus_fn(u: LatticeFn, p: PotentialQuad) -> LatticeFn:
    """:func:`riccati_apply_plus` at every interior node."""
    pp, ui, uq = _coeffs(u, p)
    return ((q_derivative_fn(u) - pp.T * ui) + pp.R * LatticeFn(ui.grid, uq.values)) + (pp.S * ui) * uq.values


def riccati_minus_fn(u: LatticeFn, p: PotentialQuad) -> LatticeFn:
    """:func:`riccati_apply_minus` at every interior node."""
    pp, ui, uq = _coeffs(u, p)
    return ((-q_derivative_fn(u) + pp.T * ui) - pp.R * LatticeFn(ui.grid, uq.values)) + (pp.S * ui) * uq.values


def involution(u: LatticeFn) -> LatticeFn:
    """``u -> -u``."""
    return -u


def q_second_derivative(psi: LatticeFn, i: int):
    if not 0 <= i <= psi.depth - 2:
        raise IndexError(f"second q-derivative needs index in 0..{psi.depth - 2}, got {i}")
    return (q_derivative(psi, i) - q_derivative(psi, i + 1)) / psi.grid.steps[i]


def schrodinger_residual(psi: LatticeFn, V: LatticeFn, i: int):
    """``(-d_q^2 psi + V psi)(x_i)``."""
    return -q_second_derivative(psi, i) + V[i] * psi[i]


def schrodinger_residual_fn(psi: LatticeFn, V: LatticeFn) -> np.ndarray:
    d2 = q_derivative_fn(q_derivative_fn(psi))
    n = d2.depth + 1
    return -d2.values + V.values[:n] * psi.values[:n]


def factored_schrodinger(psi: LatticeFn, u: LatticeFn, i: int):
    """``(d_q + u(qx)) (-d_q + u(x)) psi`` at index ``i``."""
    if not 0 <= i <= psi.depth - 2:
        raise IndexError(f"factored operator needs index in 0..{psi.depth - 2}, got {i}")
    inner = -q_derivative_fn(psi) + u.truncate(psi.depth - 1) * psi.truncate(psi.depth - 1)
    return q_derivative(inner, i) + u[i + 1] * inner[i]


def psi_from_riccati(u: LatticeFn, psi0=1.0) -> LatticeFn:
    """Build ``psi`` from ``psi(qx) / psi(x) = 1 - (1 - q) x u(x)``, i.e. ``u = d_q psi / psi``.

    This is the diagonal relation of the triangularized Schrodinger transfer
    matrix.  ``psi`` is then annihilated by ``-d_q + u``.
    """
    g = u.grid
    start = g.asarray([psi0])
    factors = 1 - g.steps[:-1] * u.values[:-1]
    return LatticeFn(g, np.concatenate([start, start[0] * np.cumprod(factors)]))
