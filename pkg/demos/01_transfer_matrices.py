"""Linear q-difference systems on a geometric lattice.

We march (psi, phi) from x = 1 toward 0 with the transfer matrices, then
compare against two independent descriptions of the same solution:
the closed form of the resolvent when V = 0, and the scalar three-term
recurrence that appears once T is tuned to kill the lower-right entry.
"""
import numpy as np

from qdarboux import PotentialQuad, QGrid, closed_form_V0, propagate, resolvent_product, three_term_sequence
from qdarboux.linsys import system_residual
from qdarboux.qlattice import LatticeFn

g = QGrid(base=1.0, q=0.5, depth=256)
print(f"lattice: x_i = q^i, q = {g.q}, nodes 0..{g.depth}, deepest x = {g.points[-1]:.2e}")

# V = 0: the resolvent has a closed form built from tail products and one Jackson-type sum.
p = PotentialQuad.build(g, R=lambda x: 0.2 * x, S=lambda x: 1 - x / 3, T=-0.1)
for i in (0, 10, 100):
    delta = np.max(np.abs(closed_form_V0(p, i) - resolvent_product(p, i)))
    print(f"  node {i:3d}: closed form vs ordered product, max |delta| = {delta:.1e}")

# A generic system, solved by marching.  In float64 the residual is a q-difference,
# so it is only meaningful where (1-q) x is well above machine epsilon.
p = PotentialQuad.build(g, R=0.3, S=lambda x: np.cos(x), T=-0.2, V=lambda x: 1 - x)
sol = propagate(p, (1.0, 0.25))
r1, r2 = system_residual(p, sol)
print(f"propagated solution: psi(1) = {sol.psi[0]}, psi(~0) = {sol.psi[-1]:.6f}")
print(f"  residual of the system on the first 20 nodes: {max(np.abs(r1.values[:20]).max(), np.abs(r2.values[:20]).max()):.1e}")

# With 1 - (1-q) x T(x) = 0 the system collapses to a three-term recurrence for psi.
p3 = PotentialQuad(p.R, p.S, LatticeFn(g, 1 / g.steps), p.V)
sol3 = propagate(p3, (1.0, 0.25))
seq = three_term_sequence(p3, sol3.psi[0], sol3.psi[1])
print(f"three-term recurrence vs marching: max |delta| = {np.max(np.abs(seq - sol3.psi.values)):.1e}")
