"""q-Darboux transforms, Backlund groups and deformation chains on geometric lattices.

Functions live on the lattice ``base * q**i``; ``q x`` is an index shift, the
q-derivative is an exact difference quotient, and Jackson integrals and
infinite products are truncated tail sums at the grid depth.
"""
from .errors import (
    DegenerateRatioError,
    DomainError,
    MovablePoleError,
    NonConvergedError,
    ParseError,
    QDarbouxError,
    SeedValidationError,
    UnboundParameterError,
)
from .qlattice import (
    LatticeFn,
    QGrid,
    RSeries,
    depth_for_tail,
    exp_R,
    power_law_rule,
    q_antiderivative,
    q_derivative,
    q_derivative_fn,
    q_integral,
    q_product,
    recommended_dps,
)
from .exprdsl import evaluate, parse, sample
from .linsys import (
    PotentialQuad,
    SolutionPair,
    closed_form_V0,
    lambda_at,
    propagate,
    resolvent_product,
    three_term_sequence,
    three_term_step,
)
from .darboux import (
    DarbouxMatrix,
    gauge_transform,
    involution,
    riccati_apply_minus,
    riccati_apply_plus,
    schrodinger_residual,
    triangular_defect,
)
from .backlund import (
    BacklundOrbit,
    DeformationChain,
    SeedSolution,
    backlund_minus,
    backlund_plus,
    cross_ratio,
    deform_chain,
    deformed_potential_once,
    general_solution,
    power_law_closed_form,
    power_law_family,
    quadratic_reconstruct,
)

__version__ = "0.1.0"
