import pytest
import numpy as np
from fractions import Fraction
from asympode.base.polynomial import VectorPolynomial
from asympode.dynamics.first_approx import FirstApproximation
from asympode.spectral.decomposition import decompose
from asympode.exponents.lattice import build_lattice
from asympode.tensors.provider import TensorProvider
from asympode.termlang.grammar import parse
from asympode.expansion.solver import solve_polynomial_ode, ode_residual, resonant_blocks
from asympode.expansion.forcing import build_Jn, brute_force_Jn, multisets, multinomial
from asympode.expansion.series import expand, evaluate_series, series_to_json, series_from_json
from asympode.expansion.exceptions import *
from fixtures.trajectories import CUBIC_XI

def first_at(lam, xi, n0=1):
    return FirstApproximation(lam_star=lam, xi=xi, n0=n0, dirichlet_tail=[float(lam)],
                              dirichlet_median=float(lam), eigen_residual=0.0, window=0.2, window_start=0.0)

def random_polynomial(rng, dimension, max_degree=3):
    return VectorPolynomial(rng.uniform(-1, 1, size=(rng.integers(0, max_degree + 1) + 1, dimension)))

def test_solver_nonresonant(diag13):
    q = solve_polynomial_ode(diag13, 2, VectorPolynomial([[1.0, 0.0], [0.0, 1.0]]))
    assert np.allclose(q.coefficients, [[-1.0, -1.0], [0.0, 1.0]])

def test_solver_resonant(diag13):
    q = solve_polynomial_ode(diag13, 3, VectorPolynomial.constant([0.0, 1.0]), {2: [0.0, 0.25]})
    assert np.allclose(q.coefficients, [[0.0, 0.25], [0.0, 1.0]])
    assert resonant_blocks(diag13, 3) == [2]
    assert resonant_blocks(diag13, 2) == []

def test_solver_rejects_nonpositive_rate(diag13):
    with pytest.raises(ValueError):
        solve_polynomial_ode(diag13, 0, VectorPolynomial.zero(2))

@pytest.mark.parametrize('matrix', [[[1, 0], [0, '3/2']], [[2, 1], [1, 2]], [[1, 0, 0], [0, 2, 0], [0, 0, 2]]])
def test_solver_random(matrix):
    sd = decompose(matrix)
    rng = np.random.default_rng(7)
    rates = [Fraction(k, 2) for k in range(1, 9)]
    for _ in range(1000):
        mu = rates[rng.integers(len(rates))]
        p = random_polynomial(rng, sd.dimension)
        constants = {j: rng.uniform(-1, 1, size=sd.dimension) for j in resonant_blocks(sd, mu)}
        q = solve_polynomial_ode(sd, mu, p, constants)
        assert ode_residual(sd, mu, q, p) <= 1e-12 * max(1.0, p.max_abs())
        if constants:
            # a resonant block integrates its forcing, raising the degree by one
            j = next(iter(constants))
            block = p.transform(sd.projection(j))
            if not block.is_zero():
                assert q.transform(sd.projection(j)).degree == block.degree + 1
        else:
            assert q.degree == p.degree

def test_multisets_and_weights(two_block, quadratic_cubic_spec):
    lattice = build_lattice(two_block, 1, quadratic_cubic_spec.alphas(), 7)
    assert lattice.tilde[:5] == [0, Fraction(1, 2), 1, Fraction(3, 2), 2]
    assert list(multisets(lattice, 5, Fraction(3, 2))) == [(2, 2, 2), (2, 3), (4,)]
    assert multinomial((2, 2, 3)) == 3
    assert multinomial((2, 3, 4)) == 6

def test_forcing_matches_brute_force(two_block, quadratic_cubic_spec):
    xi = [0.8, 0.0]
    lattice = build_lattice(two_block, 1, quadratic_cubic_spec.alphas(), 7)
    provider = TensorProvider(quadratic_cubic_spec, xi)
    rng = np.random.default_rng(11)
    for _ in range(5):
        polynomials = [VectorPolynomial.constant(xi)] + [random_polynomial(rng, 2) for _ in range(5)]
        for n in range(1, 7):
            fast = build_Jn(polynomials, lattice, provider, n)
            slow = brute_force_Jn(polynomials, lattice, provider, n)
            assert (fast - slow).max_abs() <= 1e-12 * max(1.0, slow.max_abs())

def test_forcing_missing_predecessor(two_block, quadratic_cubic_spec):
    lattice = build_lattice(two_block, 1, quadratic_cubic_spec.alphas(), 7)
    provider = TensorProvider(quadratic_cubic_spec, [0.8, 0.0])
    with pytest.raises(MissingPredecessor):
        build_Jn([VectorPolynomial.constant([0.8, 0.0])], lattice, provider, 4)

def test_cubic_terms(scalar_one, cubic_spec, cubic_first):
    series = expand(scalar_one, cubic_spec, cubic_first, 3)
    assert series.rates == [1, 3, 5]
    assert series.next_rate(3) == 7
    xi = CUBIC_XI
    assert series.terms[0].q == [[pytest.approx(xi, rel=1e-15)]]
    assert series.terms[1].q == [[pytest.approx(xi ** 3 / 2, rel=1e-14)]]
    assert series.terms[2].q == [[pytest.approx(3 * xi ** 5 / 8, rel=1e-13)]]
    assert all(not term.resonances for term in series.terms)
    assert all(term.solved for term in series.terms)

def test_cubic_series_tracks_solution(scalar_one, cubic_spec, cubic_first, cubic_exact):
    series = expand(scalar_one, cubic_spec, cubic_first, 3)
    for i in (100, 200, 300):
        t = cubic_exact.times[i]
        error = abs(evaluate_series(series, t, 3)[0] - cubic_exact.states[i, 0])
        assert error <= 2 * CUBIC_XI ** 7 * np.exp(-7 * t)

def test_linear_fit_is_exact(diag12, zero_spec, linear_first, linear_exact):
    series = expand(diag12, zero_spec, linear_first, 2, policy='fit', trajectory=linear_exact)
    resonance = series.terms[1].resonances[0]
    assert resonance.block == 2
    assert resonance.constant == [pytest.approx(0.0, abs=1e-12), pytest.approx(-0.4, rel=1e-10)]
    for t in np.linspace(0.0, 20.0, 41):
        expected = [0.7 * np.exp(-t), -0.4 * np.exp(-2 * t)]
        assert np.allclose(evaluate_series(series, t, 2), expected, rtol=0, atol=1e-10)

def test_zero_policy_records_resonance(two_block, quadratic_cubic_spec):
    series = expand(two_block, quadratic_cubic_spec, first_at(1, [0.8, 0.0]), 4)
    assert series.rates[:2] == [1, Fraction(3, 2)]
    assert [resonance.block for resonance in series.terms[1].resonances] == [2]
    assert series.terms[1].polynomial.is_zero()
    assert all(term.residual <= 1e-12 for term in series.terms)

def test_truncation_consistency(two_block, quadratic_cubic_spec):
    first = first_at(1, [0.8, 0.0])
    short = expand(two_block, quadratic_cubic_spec, first, 8)
    long = expand(two_block, quadratic_cubic_spec, first, 12)
    for a, b in zip(long.terms[:8], short.terms):
        assert np.allclose(a.q, b.q, rtol=1e-13, atol=1e-15)
    assert long.rates[:8] == short.rates

def test_series_json_round_trip(scalar_one, cubic_spec, cubic_first):
    series = expand(scalar_one, cubic_spec, cubic_first, 4)
    restored = series_from_json(series_to_json(series))
    assert restored.model_dump() == series.model_dump()
    assert restored.lattice.rates == [1, 3, 5, 7, 9]

def test_evaluate_series_bounds(scalar_one, cubic_spec, cubic_first):
    series = expand(scalar_one, cubic_spec, cubic_first, 2)
    with pytest.raises(ValueError):
        evaluate_series(series, 1.0, 3)

def test_unknown_policy(scalar_one, cubic_spec, cubic_first):
    with pytest.raises(UnknownPolicy):
        expand(scalar_one, cubic_spec, cubic_first, 3, policy='guess')

def test_fit_needs_trajectory(scalar_one, cubic_spec, cubic_first):
    with pytest.raises(MissingTrajectory):
        expand(scalar_one, cubic_spec, cubic_first, 3, policy='fit')

def test_inapplicable_at_xi(diag13, cube_root_spec):
    with pytest.raises(InapplicableAtXi) as info:
        expand(diag13, cube_root_spec, first_at(1, [1.0, 0.0]), 3)
    assert info.value.factor == 'sgnpow(x_2, 1/3)'

def test_applicable_off_the_axis(diag13, cube_root_spec):
    series = expand(diag13, cube_root_spec, first_at(3, [0.0, 1.0], n0=2), 2)
    assert series.rates[0] == 3

def test_remainder_mode_limit(scalar_one, cubic_first):
    spec = parse('[-x_1^3]', 1, epsilon_bar='1/2')
    series = expand(scalar_one, spec, cubic_first, 2)
    assert series.n_bar == 2
    with pytest.raises(FiniteModeExceeded) as info:
        expand(scalar_one, spec, cubic_first, 3)
    assert info.value.n_bar == 2

def test_large_ode_residual_is_flagged(mocker, scalar_one, cubic_spec, cubic_first):
    mocker.patch('asympode.expansion.series.ode_residual', return_value=1.0)
    series = expand(scalar_one, cubic_spec, cubic_first, 3)
    # q_1 = xi* is never solved for, so it carries no residual
    assert [term.solved for term in series.terms] == [True, False, False]
    assert series.terms[1].residual == 1.0
