"""The linear q-difference system

    d_q (psi, phi) = [[R, S], [V, T]] (psi, phi)

rewritten as the transfer step ``(psi, phi)(q x) = Lambda(x) (psi, phi)(x)`` with
``Lambda(x) = I - (1 - q) x [[R, S], [V, T]]``.

Solutions flow from the grid base toward 0.  The ordered product of transfer
matrices down to the deepest node approximates the infinite product whose
inverse is the resolvent.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DomainError, NonConvergedError
from .qlattice import DEFAULT_TOL, LatticeFn, QGrid, as_lattice, q_derivative_fn, tail_product, tail_sum

Mat2 = np.ndarray  # shape (2, 2); object dtype on multiprecision grids


def mat2(a, b, c, d) -> Mat2:
    dtype = object if any(not isinstance(v, (int, float, np.floating)) for v in (a, b, c, d)) else float
    return np.array([[a, b], [c, d]], dtype=dtype)


def identity(grid: QGrid) -> Mat2:
    one, zero = grid.real(1), grid.real(0)
    return mat2(one, zero, zero, one)


def det2(m: Mat2):
    return m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]


@dataclass(frozen=True)
class PotentialQuad:
    """Coefficient functions ``R, S, T, V`` of the linear system on one grid."""

    R: LatticeFn
    S: LatticeFn
    T: LatticeFn
    V: LatticeFn

    def __post_init__(self):
        g = self.R.grid
        if not (self.S.grid == g and self.T.grid == g and self.V.grid == g):
            raise ValueError("R, S, T, V must share one grid")

    @classmethod
    def build(cls, grid: QGrid, R=0.0, S=0.0, T=0.0, V=0.0) -> "PotentialQuad":
        """Each coefficient may be a LatticeFn, a constant, or a vectorized callable."""
        return cls(*(as_lattice(grid, f) for f in (R, S, T, V)))

    @classmethod
    def schrodinger(cls, grid: QGrid, V=0.0) -> "PotentialQuad":
        """``R = T = 0, S = 1``: the pair reduces to ``-d_q^2 psi + V psi = 0``."""
        return cls.build(grid, R=0.0, S=1.0, T=0.0, V=V)

    @property
    def grid(self) -> QGrid:
        return self.R.grid

    def truncate(self, depth: int) -> "PotentialQuad":
        return PotentialQuad(*(f.truncate(depth) for f in (self.R, self.S, self.T, self.V)))

    def with_V(self, V: LatticeFn) -> "PotentialQuad":
        d = min(self.grid.depth, V.depth)
        return PotentialQuad(self.R.truncate(d), self.S.truncate(d), self.T.truncate(d), V.truncate(d))


@dataclass(frozen=True)
class SolutionPair:
    """Samples of ``(psi, phi)`` on a shared grid."""

    psi: LatticeFn
    phi: LatticeFn

    def __post_init__(self):
        if self.psi.grid != self.phi.grid:
            raise ValueError("psi and phi must share one grid")

    @property
    def grid(self) -> QGrid:
        return self.psi.grid

    def ratio(self) -> LatticeFn:
        """``u = phi / psi``, the associated Riccati solution."""
        zero = np.flatnonzero(self.psi.values == 0)
        if zero.size:
            raise DomainError("psi vanishes, ratio phi/psi undefined", index=int(zero[0]))
        return self.phi / self.psi


def lambda_at(p: PotentialQuad, i: int) -> Mat2:
    """Transfer matrix ``I - (1 - q) x [[R, S], [V, T]]`` at lattice index ``i``."""
    QGrid._check_index(i, p.grid.depth)
    h = p.grid.steps[i]
    one = p.grid.real(1)
    return mat2(one - h * p.R[i], -h * p.S[i], -h * p.V[i], one - h * p.T[i])


def lambda_stack(p: PotentialQuad) -> np.ndarray:
    """All transfer matrices, shape ``(depth + 1, 2, 2)``."""
    h = p.grid.steps
    out = np.empty((p.grid.depth + 1, 2, 2), dtype=h.dtype)
    out[:, 0, 0] = 1 - h * p.R.values
    out[:, 0, 1] = -h * p.S.values
    out[:, 1, 0] = -h * p.V.values
    out[:, 1, 1] = 1 - h * p.T.values
    return out


def resolvent_product(p: PotentialQuad, i: int = 0, n: int | None = None, tol: float = DEFAULT_TOL) -> Mat2:
    """Ordered product ``Lambda(q**(n-1) x) ... Lambda(q x) Lambda(x)`` at ``x = x_i``.

    With ``n=None`` the product runs to the deepest node (``n = depth - i``) and
    approximates the infinite product; the last factor must then be within
    ``tol`` of the identity.  An explicit ``n`` is an exact finite product and
    is not convergence-checked.
    """
    N = p.grid.depth
    check = n is None
    if n is None:
        n = N - i
    if i < 0 or n < 0 or i + n > N:
        raise IndexError(f"product of {n} factors from index {i} exceeds depth {N}")
    out = identity(p.grid)
    for k in range(i, i + n):
        out = lambda_at(p, k) @ out
    if check and n > 0:
        last = np.max(np.abs(lambda_at(p, i + n - 1) - identity(p.grid)))
        if not last < tol:
            raise NonConvergedError("transfer-matrix product tail not close to identity", last)
    return out


def propagate(p: PotentialQuad, initial) -> SolutionPair:
    """March ``(psi, phi)`` from the base (index 0) toward 0 with the transfer matrices.

    The result satisfies the q-difference system exactly (up to rounding) at
    every index that has a successor.
    """
    g = p.grid
    N = g.depth
    lam = lambda_stack(p)
    psi = np.empty(N + 1, dtype=lam.dtype)
    phi = np.empty(N + 1, dtype=lam.dtype)
    a, b = g.real(initial[0]), g.real(initial[1])
    psi[0], phi[0] = a, b
    finite = np.isfinite if not g.multiprecision else (lambda v: g.context.isfinite(v))
    with np.errstate(over="ignore", invalid="ignore"):
        for i in range(N):
            m = lam[i]
            a, b = m[0, 0] * a + m[0, 1] * b, m[1, 0] * a + m[1, 1] * b
            if not (finite(a) and finite(b)):
                raise DomainError("overflow while propagating solution", index=i + 1)
            psi[i + 1], phi[i + 1] = a, b
    return SolutionPair(LatticeFn(g, psi), LatticeFn(g, phi))


def system_residual(p: PotentialQuad, sol: SolutionPair) -> tuple[LatticeFn, LatticeFn]:
    """``d_q psi - (R psi + S phi)`` and ``d_q phi - (V psi + T phi)`` at interior nodes."""
    d = min(p.grid.depth, sol.grid.depth) - 1
    pp = p.truncate(d)
    psi, phi = sol.psi.truncate(d + 1), sol.phi.truncate(d + 1)
    dpsi, dphi = q_derivative_fn(psi), q_derivative_fn(phi)
    ps, ph = psi.truncate(d), phi.truncate(d)
    return dpsi - (pp.R * ps + pp.S * ph), dphi - (pp.V * ps + pp.T * ph)


class TriangularFactors(NamedTuple):
    """Pieces of the infinite product of upper-triangular transfer matrices
    ``[[a_k, -h_k s_k], [0, d_k]]``, each indexed by the starting node.

    upper, lower : tail products of ``a`` and ``d``
    ratio        : tail product of ``a / d``
    integral     : Jackson-type sum ``sum_{n >= i} h_n s_n / a_n * ratio_n``
    """

    upper: np.ndarray
    lower: np.ndarray
    ratio: np.ndarray
    integral: np.ndarray

    @property
    def off_diagonal(self) -> np.ndarray:
        return -self.lower * self.integral


def triangular_factors(a, d, hs, tol: float | None = DEFAULT_TOL) -> TriangularFactors:
    """Closed form of ``prod_k [[a_k, -hs_k], [0, d_k]]`` in exp-of-q-integral form."""
    upper = tail_product(a, tol)
    lower = tail_product(d, tol)
    ratio = tail_product(a / d, tol)
    integral = tail_sum(hs / a * ratio[:-1])
    return TriangularFactors(upper, lower, ratio, integral)


def closed_form_V0_stack(p: PotentialQuad, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Infinite transfer product for ``V = 0`` in closed form at every node.

    Diagonal entries are ``exp((1/(1-q)) int_0^x ln(1 - (1-q) t R(t)) / t d_q t)``
    (and the same with ``T``); the upper-right entry is
    ``-prod(1 - (1-q) t T) * int_0^x S / (1 - (1-q) t R) * exp(...) d_q t``.
    Shape ``(depth + 1, 2, 2)``; the deepest entry is the identity, matching
    :func:`resolvent_product` truncated at the grid depth.
    """
    N = p.grid.depth
    nz = np.flatnonzero(p.V.values[:N] != 0)
    if nz.size:
        raise DomainError("closed form requires V identically zero", index=int(nz[0]))
    h = p.grid.steps[:N]
    a = 1 - h * p.R.values[:N]
    d = 1 - h * p.T.values[:N]
    f = triangular_factors(a, d, h * p.S.values[:N], tol)
    out = np.zeros((N + 1, 2, 2), dtype=h.dtype)
    if out.dtype == object:
        out[...] = p.grid.real(0)
    out[:, 0, 0] = f.upper
    out[:, 0, 1] = f.off_diagonal
    out[:, 1, 1] = f.lower
    return out


def closed_form_V0(p: PotentialQuad, i: int = 0, tol: float = DEFAULT_TOL) -> Mat2:
    """:func:`closed_form_V0_stack` at one lattice index."""
    QGrid._check_index(i, p.grid.depth)
    return closed_form_V0_stack(p, tol)[i]


def three_term_step(p: PotentialQuad, psi_n, psi_n1, n: int):
    """One step of the recurrence obtained when ``1 - (1-q) x T(x) = 0``::

        psi_{n+2} = [1 - (1-q) x_{n+1} R(x_{n+1})] psi_{n+1}
                    + (1-q)**2 x_{n+1} x_n S(x_{n+1}) V(x_n) psi_n

    On a grid with base 1 the coefficient ``(1-q)**2 x_{n+1} x_n`` is
    ``(1-q)**2 q**(2n+1)``.  The constraint on ``T`` is the caller's business.
    """
    if not 0 <= n <= p.grid.depth - 1:
        raise IndexError(f"recurrence step needs n in 0..{p.grid.depth - 1}, got {n}")
    h = p.grid.steps
    return (1 - h[n + 1] * p.R[n + 1]) * psi_n1 + h[n + 1] * h[n] * p.S[n + 1] * p.V[n] * psi_n


def three_term_sequence(p: PotentialQuad, psi0, psi1) -> np.ndarray:
    """Run :func:`three_term_step` over the whole grid."""
    N = p.grid.depth
    out = [p.grid.real(psi0), p.grid.real(psi1)]
    for n in range(N - 1):
        out.append(three_term_step(p, out[n], out[n + 1], n))
    return np.array(out, dtype=p.grid.steps.dtype)
