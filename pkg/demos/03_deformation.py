"""Deforming a Schrodinger potential with the conjugated map B-_t.

u = B-_t u0 keeps R_- u fixed and moves R_+ u to a new potential V(t).  For
the power-law seed both u and V(t) have closed forms in the generalized
exponential exp_R; they are compared here with the generic construction,
and u is recovered from V(t) alone by solving a quadratic at every node.
"""
from qdarboux import (
    QGrid,
    backlund_minus,
    deformed_potential_once,
    power_law_closed_form,
    power_law_family,
    quadratic_reconstruct,
    recommended_dps,
)
from qdarboux.backlund import DeformationChain, deform_chain
from qdarboux.darboux import riccati_minus_fn, riccati_plus_fn


def sup(values):
    return max(abs(float(v)) for v in values)


g = QGrid(1.0, 0.5, 256, dps=recommended_dps(1.0, 0.5, 256))
for alpha in (0.0, 1.0):
    seed = power_law_family(1.0, alpha, g)
    R0 = riccati_minus_fn(seed.u0, seed.potentials)
    print(f"alpha = {alpha}")
    for t in (0.1, 1.0, 5.0):
        u = backlund_minus(seed, t)
        Vt = deformed_potential_once(seed, t)
        n = Vt.depth + 1
        cf = power_law_closed_form(1.0, alpha, t, g)
        plus = sup(riccati_plus_fn(u, seed.potentials).values[:n] - Vt.values)
        minus = sup((riccati_minus_fn(u, seed.potentials) - R0).values)
        closed = max(sup(cf.u.values[:n] - u.values[:n]), sup(cf.V.values[:n] - Vt.values))
        roots = quadratic_reconstruct(Vt, R0, 3)
        hit = min(abs(float(r - u[3])) for r in roots)
        print(f"  t = {t:4}: R+u - V(t) {plus:.0e}, R-u - R-u0 {minus:.0e}, exp_R closed forms {closed:.0e}, "
              f"quadratic root at node 3 off by {hit:.0e}")

seed = power_law_family(1.0, 1.0, g)
u3, V3 = deform_chain(DeformationChain(seed, (0.4, 1.5, 0.2)))
_, V2 = deform_chain(DeformationChain(seed, (1.5, 0.2)))
print(f"three-stage chain: R-u(t1,t2,t3) - V(t2,t3) = {sup((riccati_minus_fn(u3, seed.potentials) - V2).values):.0e}")
