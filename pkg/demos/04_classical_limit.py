"""From the lattice to the line: q -> 1.

With alpha = 0 and t = a = 1, the deformed potential tends to the
Rosen-Morse well a^2 (1 - 2 sech^2(a x)) and the q-Backlund image tends to
its differential counterpart.  The lattice is made deep enough that its
smallest node is below 1e-13, which takes roughly 20/(1-q) nodes.
"""
import numpy as np

from qdarboux import QGrid, backlund_plus, deformed_potential_once, depth_for_tail, power_law_family
from qdarboux.classic import ClassicalPotentials, classical_backlund, rosen_morse

print("      q     nodes   |V(1,x) - Rosen-Morse|   |B+ u0 - classical|   on 0.1 <= x <= 1")
for q in (0.9, 0.99, 0.999, 0.9999):
    g = QGrid(1.0, q, depth_for_tail(1.0, q, 1e-13))
    seed = power_law_family(1.0, 0.0, g)
    Vt = deformed_potential_once(seed, 1.0)
    x = g.points[: Vt.depth + 1]
    m = (x >= 0.1) & (x <= 1.0)
    e_rm = np.max(np.abs(Vt.values[m] - rosen_morse(1.0, x[m])))
    u = backlund_plus(seed, 1.0)
    mb = (g.points >= 0.1) & (g.points <= 1.0)
    p = ClassicalPotentials.schrodinger("1", h=1e-4, x_max=1.0)
    e_bk = np.max(np.abs(u.values[mb] - classical_backlund("1", p, 1.0, g.points[mb])))
    print(f"  {q:<8} {g.depth:>7}   {e_rm:22.2e}   {e_bk:19.2e}")
