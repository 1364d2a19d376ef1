import pytest
import math
import numpy as np
from asympode.dynamics.trajectory import (Tolerances, integrate, integrate_many, dirichlet_quotient, to_csv,
                                          from_csv)
from asympode.dynamics.first_approx import first_approximation, decay_bounds_check
from asympode.dynamics.exceptions import *
from fixtures.trajectories import CUBIC_XI, exact_trajectory

def test_linear_flow(diag12, zero_spec):
    traj = integrate(diag12, zero_spec, [1.0, 1.0], horizon=1.0, samples=11)
    assert len(traj) == 11
    assert traj.times[-1] == 1.0
    assert np.allclose(traj.states[-1], [math.exp(-1), math.exp(-2)], rtol=0, atol=1e-10)
    assert traj.termination == 'horizon'
    assert not traj.non_decay

def test_cubic_first_approximation(scalar_one, cubic_spec):
    traj = integrate(scalar_one, cubic_spec, [0.5], horizon=40.0, samples=4001)
    first = first_approximation(scalar_one, traj)
    assert first.lam_star == 1
    assert first.n0 == 1
    assert first.xi[0] == pytest.approx(CUBIC_XI, abs=1e-7)
    assert first.dirichlet_median == pytest.approx(1.0)
    # exp(t) y(t) - xi* behaves like xi*^3 exp(-2t) / 2
    assert first.approach_slope == pytest.approx(-2.0, abs=0.05)
    assert first.approach_samples >= 20

def test_log_magnitude_phase(diag12, zero_spec):
    traj = integrate(diag12, zero_spec, [1.0, 1.0], horizon=600.0, samples=601)
    assert traj.log_phase_start is not None
    assert traj.log_norms[-1] == pytest.approx(-600.0, rel=1e-8)
    first = first_approximation(diag12, traj)
    assert np.allclose(first.xi, [1.0, 0.0], atol=1e-6)

def test_symmetric_first_approximation(symmetric21, zero_spec):
    traj = integrate(symmetric21, zero_spec, [1.0, 0.5], horizon=20.0, samples=2001)
    first = first_approximation(symmetric21, traj)
    # the component along (-1, 1) decays at rate 1
    assert first.lam_star == 1
    assert np.allclose(first.xi, [0.25, -0.25], atol=1e-7)
    assert first.eigen_residual <= 1e-6

@pytest.mark.asyncio
async def test_integrate_many(diag12, abs_coupling_spec):
    rng = np.random.default_rng(3)
    y0s = [rng.uniform(-0.1, 0.1, size=2) for _ in range(20)]
    trajectories = await integrate_many(diag12, abs_coupling_spec, y0s, horizon=40.0, samples=1001)
    assert len(trajectories) == 20
    for y0, traj in zip(y0s, trajectories):
        assert np.allclose(traj.states[0], y0)
        assert decay_bounds_check(diag12, traj).passed
        first = first_approximation(diag12, traj)
        assert first.lam_star in (1, 2)
        assert first.eigen_residual <= 1e-6

def test_decay_bounds(linear_exact, diag12):
    report = decay_bounds_check(diag12, linear_exact)
    assert report.passed
    assert report.slope == pytest.approx(-1.0, abs=1e-6)
    assert report.lower == pytest.approx(-2.1)
    assert report.upper == pytest.approx(-0.9)
    # both bounds are attained at t = 0
    norm0 = math.hypot(0.7, 0.4)
    assert report.c1 == pytest.approx(norm0)
    assert report.c2 == pytest.approx(norm0)

def test_dirichlet_quotient(symmetric21):
    assert dirichlet_quotient(symmetric21, [1.0, 1.0]) == pytest.approx(3.0)
    assert np.allclose(dirichlet_quotient(symmetric21, [[1.0, -1.0], [2.0, 2.0]]), [1.0, 3.0])

def test_csv_round_trip(cubic_exact):
    restored = from_csv(to_csv(cubic_exact))
    assert np.array_equal(restored.times, cubic_exact.times)
    assert np.allclose(restored.states, cubic_exact.states, rtol=1e-15, atol=0)
    assert restored.tol_rel == cubic_exact.tol_rel
    assert restored.horizon == 40.0

def test_csv_without_rows():
    with pytest.raises(ValueError):
        from_csv('# method=dopri5\n')

def test_zero_initial_condition(scalar_one, cubic_spec):
    with pytest.raises(ZeroInitialCondition):
        integrate(scalar_one, cubic_spec, [0.0])
    with pytest.raises(ZeroInitialCondition):
        integrate(scalar_one, cubic_spec, [float('nan')])

def test_insufficient_decay(diag12, zero_spec):
    traj = integrate(diag12, zero_spec, [1.0, 1.0], horizon=5.0, samples=501)
    with pytest.raises(InsufficientDecay):
        first_approximation(diag12, traj)

def test_non_decay(scalar_one):
    t = np.linspace(0.0, 10.0, 101)
    traj = exact_trajectory(scalar_one, t, np.exp(t)[:, None]).model_copy(update={'non_decay': True})
    with pytest.raises(NonDecay):
        first_approximation(scalar_one, traj)

def test_ambiguous_rate(diag13):
    t = np.linspace(0.0, 20.0, 2001)
    y = np.exp(-2 * t)
    traj = exact_trajectory(diag13, t, np.stack([y, y], axis=1))
    with pytest.raises(AmbiguousRate):
        first_approximation(diag13, traj)

def test_window_fraction_checked(linear_exact, diag12):
    with pytest.raises(ValueError):
        first_approximation(diag12, linear_exact, window=0.0)

def test_tolerances_validated():
    with pytest.raises(ValueError):
        Tolerances(tol_abs=0)

def test_limit_not_an_eigenvector(diag13):
    t = np.linspace(0.0, 20.0, 2001)
    y = np.exp(-t)
    traj = exact_trajectory(diag13, t, np.stack([y, 0.5 * y], axis=1))
    with pytest.raises(NotAnEigenvector) as info:
        first_approximation(diag13, traj)
    assert info.value.residual == pytest.approx(1.0 / math.sqrt(1.25))

def test_eigen_residual_is_measured_before_projection(diag12, linear_exact):
    first = first_approximation(diag12, linear_exact)
    # the fit picks up the mean of -0.4 exp(-t) over the window in the second coordinate
    assert 1e-10 < first.eigen_residual <= 1e-6
    assert first.xi == [pytest.approx(0.7, rel=1e-12), pytest.approx(0.0, abs=1e-15)]

def test_approach_slope_of_linear_flow(diag12, linear_exact):
    first = first_approximation(diag12, linear_exact)
    assert first.approach_slope == pytest.approx(-1.0, rel=1e-7)
    assert first.approach_samples == len(linear_exact)

def test_approach_slope_needs_informative_samples(diag13, zero_spec):
    traj = integrate(diag13, zero_spec, [0.0, 1.0], horizon=6.0, samples=601)
    first = first_approximation(diag13, traj)
    assert first.lam_star == 3
    assert first.approach_slope is None

def test_tolerance_halving(scalar_one, cubic_spec):
    firsts = []
    for tol in (1e-12, 5e-13):
        tolerances = Tolerances(tol_abs=tol, tol_rel=tol)
        traj = integrate(scalar_one, cubic_spec, [0.5], horizon=40.0, tolerances=tolerances, samples=4001)
        firsts.append(first_approximation(scalar_one, traj))
    assert firsts[0].lam_star == firsts[1].lam_star
    xi0, xi1 = np.array(firsts[0].xi), np.array(firsts[1].xi)
    assert np.linalg.norm(xi0 - xi1) <= 1e-7 * np.linalg.norm(xi0)

def test_dirichlet_quotient_settles(diag12, abs_coupling_spec):
    traj = integrate(diag12, abs_coupling_spec, [0.5, 0.5], horizon=40.0, samples=4001)
    small = traj.norms <= 1e-6
    assert np.count_nonzero(small) > 100
    assert np.ptp(traj.dirichlet[small]) <= 1e-6

def test_csv_keeps_step_statistics(diag12, zero_spec):
    traj = integrate(diag12, zero_spec, [1.0, 1.0], horizon=600.0, samples=601)
    restored = from_csv(to_csv(traj))
    assert traj.accepted > 0
    assert (restored.accepted, restored.rejected, restored.evaluations) == (traj.accepted, traj.rejected,
                                                                            traj.evaluations)
    assert restored.log_phase_start == traj.log_phase_start
    assert restored.log_phase_start is not None
    assert from_csv(to_csv(exact_trajectory(diag12, traj.times[:10], traj.states[:10]))).log_phase_start is None
