import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import sup
from qdarboux.backlund import (
    BacklundOrbit,
    DeformationChain,
    SeedSolution,
    backlund_minus,
    backlund_plus,
    backlund_terms,
    chain_stages,
    cross_ratio,
    cross_ratio_fn,
    deform_chain,
    deformed_potential_once,
    general_solution,
    mobius,
    power_law_closed_form,
    power_law_family,
    quadratic_reconstruct,
    quadratic_reconstruct_fn,
)
from qdarboux.darboux import riccati_minus_fn, riccati_plus_fn
from qdarboux.errors import (
    DegenerateRatioError,
    DomainError,
    MovablePoleError,
    SeedValidationError,
)
from qdarboux.linsys import PotentialQuad, system_residual
from qdarboux.qlattice import LatticeFn, QGrid, RSeries, exp_R, power_law_rule, q_antiderivative


@pytest.fixture(scope="module")
def mp_seed():
    return power_law_family(1.0, 1.0, QGrid(1.0, 0.5, 256, dps=185))


@pytest.fixture(scope="module")
def float_seed():
    return power_law_family(1.0, 1.0, QGrid(1.0, 0.5, 256))


def generic_seed(grid):
    coeff = PotentialQuad.build(
        grid,
        R=lambda x: 0.3 * np.asarray(x, dtype=float),
        S=lambda x: 1 + 0.2 * np.asarray(x, dtype=float) ** 2,
        T=-0.4,
    )
    u0 = LatticeFn.from_function(grid, lambda x: 0.5 - np.asarray(x, dtype=float))
    return SeedSolution.from_u(u0, coeff)


# -- seeds ----------------------------------------------------------------------

def test_seed_rejects_wrong_potential():
    g = QGrid(1.0, 0.5, 30)
    u0 = LatticeFn(g, g.points)
    with pytest.raises(SeedValidationError) as info:
        SeedSolution(u0, PotentialQuad.schrodinger(g, 0.0))
    assert info.value.index == 0


def test_seed_rejects_mismatched_grid():
    with pytest.raises(ValueError):
        SeedSolution(LatticeFn.constant(QGrid(1.0, 0.5, 10), 0.0), PotentialQuad.build(QGrid(1.0, 0.4, 10)))


def test_seed_potentials_one_node_shallower():
    s = power_law_family(1.0, 0.5, QGrid(1.0, 0.5, 40))
    assert s.potentials.grid.depth == 39
    assert s.is_schrodinger()


def test_from_u_defines_potential():
    s = generic_seed(QGrid(1.0, 0.5, 40))
    assert not s.is_schrodinger()
    assert sup(s.residual().values) == 0


@pytest.mark.parametrize("alpha", [-1.0, -2.5])
def test_power_law_needs_alpha_above_minus_one(alpha):
    with pytest.raises(ValueError):
        power_law_family(1.0, alpha, QGrid(1.0, 0.5, 10))


def test_power_law_needs_positive_base():
    with pytest.raises(ValueError):
        power_law_family(1.0, 1.0, QGrid(-1.0, 0.5, 10))


# -- B+ ------------------------------------------------------------------------------

def test_zero_parameter_is_identity(float_seed):
    assert backlund_plus(float_seed, 0.0) is float_seed.u0
    assert backlund_minus(float_seed, 0.0) is float_seed.u0


@pytest.mark.parametrize("t", [-0.5, 0.2, 3.0])
def test_backlund_plus_solves_same_equation(mp_seed, t):
    u = backlund_plus(mp_seed, t)
    res = riccati_plus_fn(u, mp_seed.potentials) - mp_seed.V
    assert sup(res.values) < 1e-100


def test_backlund_plus_generic_coefficients():
    s = generic_seed(QGrid(1.0, 0.5, 200, dps=150))
    u = backlund_plus(s, 0.7)
    assert sup((riccati_plus_fn(u, s.potentials) - s.V).values) < 1e-80
    assert sup((u - s.u0).values) > 1e-3


def test_backlund_terms_at_deepest_node(float_seed):
    num, den = backlund_terms(float_seed.u0, float_seed.potentials, 2.0)
    assert den[-1] == 1.0
    assert num[-1] == pytest.approx(2.0)


def test_movable_pole_is_detected(float_seed):
    with pytest.raises(MovablePoleError):
        backlund_plus(float_seed, -5.0)
    u = backlund_plus(float_seed, -5.0, check_poles=False)
    assert u.depth == float_seed.u0.depth


def test_orbit_caches_point(float_seed):
    orb = BacklundOrbit(float_seed, 0.4)
    assert orb.u is orb.u
    assert np.array_equal(orb.u.values, backlund_plus(float_seed, 0.4).values)


@given(st.floats(-1, 1), st.floats(-1, 1))
def test_group_law(t1, t2):
    # J stays below 1/2 for this seed, so no parameter sum in [-2, 2] meets a pole
    s = power_law_family(1.0, 0.0, QGrid(1.0, 0.5, 120))
    step = SeedSolution(backlund_plus(s, t2), s.potentials, tol=None)
    lhs = backlund_plus(step, t1)
    rhs = backlund_plus(s, t1 + t2)
    assert np.max(np.abs(lhs.values - rhs.values)) < 1e-10


@given(st.floats(-0.9, 0.9))
def test_inverse_element(t):
    s = power_law_family(1.0, 0.5, QGrid(1.0, 0.5, 120))
    there = SeedSolution(backlund_plus(s, t), s.potentials, tol=None)
    back = backlund_plus(there, -t)
    assert np.max(np.abs(back.values - s.u0.values)) < 1e-10


# -- general solution ------------------------------------------------------------

def test_general_solution_solves_linear_system(mp_seed):
    sol = general_solution(mp_seed, 1.3, -0.4)
    r_psi, r_phi = system_residual(mp_seed.potentials, sol)
    assert sup(r_psi.values) < 1e-100
    assert sup(r_phi.values) < 1e-100


def test_general_solution_initial_values(float_seed):
    sol = general_solution(float_seed, 2.0, 0.5)
    assert sol.psi[-1] == pytest.approx(2.0)
    assert sol.phi[-1] == pytest.approx(0.5 + 2.0 * float_seed.u0[-1])


def test_general_solution_ratio_is_backlund(float_seed):
    sol = general_solution(float_seed, 2.0, 0.5)
    u = backlund_plus(float_seed, 0.25)
    assert np.allclose(sol.ratio().values, u.values, rtol=1e-13, atol=0)


def test_general_solution_detects_zero_of_psi(float_seed):
    with pytest.raises(MovablePoleError):
        general_solution(float_seed, 1.0, -5.0)


# -- cross-ratio -------------------------------------------------------------------

def test_cross_ratio_golden():
    assert cross_ratio(0.0, 0.3, 0.7, 1.0) == pytest.approx(0.09 / 0.49)


def test_cross_ratio_degenerate():
    with pytest.raises(DegenerateRatioError):
        cross_ratio(1.0, 1.0, 2.0, 3.0)
    with pytest.raises(DegenerateRatioError) as info:
        cross_ratio(np.array([1.0, 2.0]), np.array([0.0, 2.0]), np.array([3.0, 5.0]), np.array([4.0, 7.0]))
    assert info.value.index == 1


@given(
    st.lists(st.floats(-5, 5), min_size=4, max_size=4, unique=True),
    st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3),
)
def test_cross_ratio_is_mobius_invariant(ts, a, b, c):
    # d chosen so that the map has unit determinant
    if abs(a) < 0.2:
        return
    d = (1 + b * c) / a
    mapped = [mobius(t, a, b, c, d) for t in ts]
    if any(abs(c * t + d) < 1e-3 for t in ts) or min(abs(x - y) for x in ts for y in ts if x != y) < 1e-2:
        return
    assert cross_ratio(*mapped) == pytest.approx(cross_ratio(*ts), rel=1e-7, abs=1e-9)


def test_orbit_cross_ratio_matches_parameters(float_seed):
    ts = (0.0, 0.3, 0.7, 1.0)
    cr = cross_ratio_fn([backlund_plus(float_seed, t) for t in ts])
    ok = np.abs(backlund_plus(float_seed, 0.7).values - float_seed.u0.values) > 1e-6
    assert np.max(np.abs(cr[ok] - cross_ratio(*ts))) < 1e-8


# -- B- and chains ---------------------------------------------------------------

@pytest.mark.parametrize("t", [0.1, 1.0, 5.0])
def test_backlund_minus_preserves_minus_image(mp_seed, t):
    u = backlund_minus(mp_seed, t)
    p = mp_seed.potentials
    assert sup((riccati_minus_fn(u, p) - riccati_minus_fn(mp_seed.u0, p)).values) < 1e-100


def test_backlund_minus_schrodinger_closed_shape(float_seed):
    num, den = backlund_terms(-float_seed.u0, float_seed.potentials, 0.6)
    u = backlund_minus(float_seed, 0.6)
    assert np.allclose(u.values, float_seed.u0.values - num / den, rtol=1e-15, atol=0)


def test_empty_chain_is_identity(float_seed):
    u, V = deform_chain(DeformationChain(float_seed))
    assert u is float_seed.u0 and V is float_seed.V


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_chain_of_zeros_is_involution_power(float_seed, n):
    u, _ = deform_chain(DeformationChain(float_seed, (0.0,) * n))
    sign = 1 if n % 2 else -1
    assert np.array_equal(u.values, sign * float_seed.u0.values)


def test_single_stage_chain_is_backlund_minus(float_seed):
    u, _ = deform_chain(DeformationChain(float_seed, [0.8]))
    assert np.array_equal(u.values, backlund_minus(float_seed, 0.8).values)


def test_chain_intertwines_consecutive_potentials(mp_seed):
    ts = (0.4, 1.5, 0.2)
    p = mp_seed.potentials
    u3, V3 = deform_chain(DeformationChain(mp_seed, ts))
    u2, V2 = deform_chain(DeformationChain(mp_seed, ts[1:]))
    assert sup((riccati_minus_fn(u3, p) - V2).values) < 1e-90
    assert sup((riccati_plus_fn(u3, p) - V3).values) == 0


def test_chain_stages_report_failing_stage(float_seed):
    with pytest.raises(MovablePoleError, match="stage t_2"):
        chain_stages(DeformationChain(float_seed, (1.0, -1.0)))


def test_once_deformed_potential_matches_chain(mp_seed):
    _, V = deform_chain(DeformationChain(mp_seed, [1.0]))
    Vd = deformed_potential_once(mp_seed, 1.0)
    n = Vd.depth + 1
    assert sup(V.values[:n] - Vd.values) < 1e-90


def test_deformed_potential_needs_schrodinger():
    with pytest.raises(ValueError):
        deformed_potential_once(generic_seed(QGrid(1.0, 0.5, 20)), 0.5)


@pytest.mark.parametrize("t", [0.1, 0.9, 3.0])
def test_quadratic_reconstruction_recovers_minus(mp_seed, t):
    u = backlund_minus(mp_seed, t)
    Vt = deformed_potential_once(mp_seed, t)
    rm = riccati_minus_fn(mp_seed.u0, mp_seed.potentials)
    plus, minus = quadratic_reconstruct_fn(Vt, rm)
    n = len(plus)
    err = np.minimum(np.abs(np.asarray(plus - u.values[:n], dtype=float)),
                     np.abs(np.asarray(minus - u.values[:n], dtype=float)))
    assert np.max(err) < 1e-50
    one = quadratic_reconstruct(Vt, rm, 5)
    assert float(one[0]) == pytest.approx(float(plus[5]))


def test_quadratic_reconstruction_negative_discriminant():
    g = QGrid(1.0, 0.5, 5)
    with pytest.raises(DomainError):
        quadratic_reconstruct(LatticeFn.constant(g, -5.0), LatticeFn.constant(g, -5.0), 1)


# -- closed forms ------------------------------------------------------------------

@pytest.mark.parametrize("alpha", [0.0, 1.0])
def test_closed_form_matches_backlund_minus(alpha):
    g = QGrid(1.0, 0.5, 256, dps=120)
    s = power_law_family(1.0, alpha, g)
    cf = power_law_closed_form(1.0, alpha, 0.7, g)
    u = backlund_minus(s, 0.7)
    V = deformed_potential_once(s, 0.7)
    assert sup(cf.u.values[:200] - u.values[:200]) < 1e-40
    assert sup(cf.V.values[:200] - V.values[:200]) < 1e-40


def test_printed_brace_disagrees_with_lattice_derivative():
    """The variant with q**(alpha+1) a x**alpha (1 + t J) in the brace is not the deformed potential."""
    g = QGrid(1.0, 0.5, 256, dps=120)
    a, alpha, t = 1.0, 1.0, 0.7
    q = g.qr
    series = RSeries(power_law_rule(alpha, q), q, 256)
    x = g.points
    z = a * x ** (alpha + 1)
    p = q ** (alpha + 1)
    den = exp_R(-(q**alpha) * z, series)
    I = exp_R(p * z, series) / den
    J = q_antiderivative(LatticeFn(g, I)).values
    K = q_antiderivative(LatticeFn(g, exp_R(p * p * z, series) / exp_R(-(q ** (2 * alpha + 1)) * z, series))).values
    V0 = power_law_family(a, alpha, g).V.values
    brace = (1 + q**alpha) * a * q ** (alpha + 1) * x**alpha * (1 + t * J) - t * exp_R(p * z, series) / exp_R(
        -(q ** (2 * alpha + 1)) * z, series
    )
    n = len(V0)
    printed = V0 - 2 * t * I[:n] / ((1 + t * J[:n]) * (1 + q * t * K[:n])) * brace[:n]
    V = deformed_potential_once(power_law_family(a, alpha, g), t)
    assert sup(printed[:100] - V.values[:100]) > 1e-2


def _apply_chain(seed, u, params):
    """Run a chain on an arbitrary solution ``u`` of the seed's equation family."""
    start = SeedSolution(u, seed.potentials, tol=None)
    return deform_chain(DeformationChain(start, params))[0]


@pytest.mark.parametrize("ts,ss", [((0.3,), (0.2,)), ((0.4, -0.2), (0.5, 0.1, 0.3)), ((0.2, 0.6, 0.1), (0.3,))])
def test_chain_concatenation(float_seed, ts, ss):
    lhs = _apply_chain(float_seed, _apply_chain(float_seed, float_seed.u0, ss), ts)
    merged = ts[:-1] + (ts[-1] + ss[0],) + ss[1:]
    rhs = _apply_chain(float_seed, float_seed.u0, merged)
    assert np.max(np.abs(lhs.values - rhs.values)) < 1e-12


@pytest.mark.parametrize("ts", [(0.5,), (0.3, 0.4), (0.2, 0.7, 0.1)])
def test_chain_inverse_reverses_and_negates(float_seed, ts):
    forward = _apply_chain(float_seed, float_seed.u0, ts)
    back = _apply_chain(float_seed, forward, tuple(-t for t in reversed(ts)))
    assert np.max(np.abs(back.values - float_seed.u0.values)) < 1e-12


@given(st.floats(-0.8, 0.8), st.floats(-0.8, 0.8))
def test_orbit_transitivity(t1, t2):
    s = power_law_family(1.0, 0.0, QGrid(1.0, 0.5, 100))
    second = SeedSolution(backlund_plus(s, t2), s.potentials, tol=None)
    assert np.max(np.abs(backlund_plus(second, t1 - t2).values - backlund_plus(s, t1).values)) < 1e-10
