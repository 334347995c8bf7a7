"""The auto-Backlund family of the q-Riccati equation as a group.

Start from the power-law seed u0 = x (a = 1, alpha = 1), which solves
d_q u + u u(qx) = V0 with V0 = 1 + q x^2.  Every B+_t u0 solves the same
equation; composing two maps adds their parameters, and four members of an
orbit share the cross-ratio of their parameters.

A multiprecision lattice is used so the residual is visible below 1e-100:
in float64 the q-difference at the deepest nodes loses all its digits.
"""
import numpy as np

from qdarboux import QGrid, SeedSolution, backlund_plus, cross_ratio, general_solution, power_law_family, recommended_dps
from qdarboux.backlund import cross_ratio_fn
from qdarboux.darboux import riccati_plus_fn
from qdarboux.linsys import system_residual


def sup(values):
    return max(abs(float(v)) for v in values)


g = QGrid(1.0, 0.5, 256, dps=recommended_dps(1.0, 0.5, 256))
seed = power_law_family(1.0, 1.0, g)
print(f"seed accepted on {g.depth + 1} nodes at {g.dps} digits")

for t in (-0.5, 0.5, 2.0):
    u = backlund_plus(seed, t)
    res = sup((riccati_plus_fn(u, seed.potentials) - seed.V).values)
    print(f"  B+_{t:+.1f} u0: u(1) = {float(u[0]):+.6f}, Riccati residual {res:.1e}")

t1, t2 = 0.3, -0.7
inner = SeedSolution(backlund_plus(seed, t2), seed.potentials, tol=None)
gap = sup((backlund_plus(inner, t1) - backlund_plus(seed, t1 + t2)).values)
print(f"group law B+_{t1} B+_{t2} = B+_{t1 + t2:.1f}: sup gap {gap:.1e}")

ts = (0.0, 0.3, 0.7, 1.0)
cr = cross_ratio_fn([backlund_plus(seed, t) for t in ts])
cr = np.array([float(v) for v in cr[:200]])
print(f"cross-ratio of the orbit: {cr.min():.15f} .. {cr.max():.15f}; of the parameters: {cross_ratio(*ts):.15f}")

sol = general_solution(seed, 1.0, 0.5)
r1, r2 = system_residual(seed.potentials, sol)
print(f"general solution with psi(0)=1, phi(0)=0.5+u0(0): residual {max(sup(r1.values), sup(r2.values)):.1e}")
print(f"  its ratio is B+_0.5 u0: {sup((sol.ratio() - backlund_plus(seed, 0.5)).values):.1e}")
