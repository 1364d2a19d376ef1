import pytest
import math
import numpy as np
from fractions import Fraction
from asympode.base.rational import to_fraction, format_fraction, snap, binomial
from asympode.base.polynomial import VectorPolynomial, polynomial_product
from asympode.base.jet import Jet, multi_indices, factorial_ratio
from asympode.base.integrator import DormandPrince, StepSizeUnderflow
from asympode.base.fitting import fit_line, fit_constant
from asympode.base.workers import worker_count, THREADS_VARIABLE

@pytest.mark.parametrize('value,expected', [
    (3, Fraction(3)),
    ('7/12', Fraction(7, 12)),
    ('0.25', Fraction(1, 4)),
    (0.1, Fraction(1, 10)),
    (Fraction(5, 2), Fraction(5, 2)),
])
def test_to_fraction(value, expected):
    assert to_fraction(value) == expected

@pytest.mark.parametrize('value', ['', 'abc', float('nan'), True, None])
def test_to_fraction_rejects(value):
    with pytest.raises(ValueError):
        to_fraction(value)

def test_format_fraction():
    assert format_fraction(Fraction(4, 1)) == '4'
    assert format_fraction(Fraction(-7, 12)) == '-7/12'

def test_snap():
    assert snap(0.3333333333333333, 1e-9) == Fraction(1, 3)
    assert snap(-2.5000000000001, 1e-9) == Fraction(-5, 2)
    assert snap(math.pi, 1e-15) is None

def test_binomial():
    assert binomial(Fraction(1, 2), 2) == Fraction(-1, 8)
    assert binomial(Fraction(5), 2) == 10

def test_polynomial_arithmetic():
    q = VectorPolynomial([[1.0, 0.0], [0.0, 2.0]])
    assert q.degree == 1
    assert np.allclose(q(2.0), [1.0, 4.0])
    assert np.allclose(q(np.array([0.0, 1.0])), [[1.0, 0.0], [1.0, 2.0]])
    assert (q - q).is_zero()
    assert q.derivative() == VectorPolynomial([[0.0, 2.0]])
    assert q.antiderivative([1.0, 1.0]) == VectorPolynomial([[1.0, 1.0], [1.0, 0.0], [0.0, 1.0]])
    assert VectorPolynomial.from_list(q.to_list()) == q

def test_polynomial_trims_zero_rows():
    q = VectorPolynomial([[1.0], [0.0], [0.0]])
    assert q.degree == 0
    assert VectorPolynomial.zero(3).degree == 0

def test_polynomial_immutable():
    q = VectorPolynomial.constant([1.0])
    with pytest.raises(AttributeError):
        q.coefficients = None

def test_polynomial_product():
    left = np.array([[1.0], [1.0]])
    right = np.array([[1.0], [-1.0]])
    assert np.allclose(polynomial_product(left, right)[:, 0], [1.0, 0.0, -1.0])

def test_jet_power_matches_series():
    # (1 + x + y) ** (1/3) around 0
    base = Jet.linear(2, 3, 1.0, [1.0, 1.0])
    cube_root = base.rational_power(Fraction(1, 3))
    assert cube_root.value == pytest.approx(1.0)
    assert cube_root.coefficients[1, 0] == pytest.approx(1 / 3)
    assert cube_root.coefficients[1, 1] == pytest.approx(2 * float(binomial(Fraction(1, 3), 2)))
    assert cube_root.coefficients[3, 0] == pytest.approx(float(binomial(Fraction(1, 3), 3)))

def test_jet_rational_power_needs_positive_base():
    with pytest.raises(ValueError):
        Jet.linear(1, 2, -1.0, [1.0]).rational_power(Fraction(1, 2))

def test_jet_product_truncates():
    x = Jet.linear(1, 2, 0.0, [1.0])
    assert not np.any((x * x * x).coefficients)

def test_multi_indices_and_factorial_ratio():
    assert multi_indices(2, 2) == ((0, 2), (1, 1), (2, 0))
    assert factorial_ratio((1, 1)) == Fraction(1, 2)

def test_dormand_prince_exponential():
    stepper = DormandPrince(lambda t, y: -y, lambda a, b: 1e-12 + 1e-12 * np.maximum(abs(a), abs(b)))
    t, y, h = 0.0, np.array([1.0]), 0.01
    while 1.0 - t > 1e-12:
        t, y, _, h = stepper.step(t, y, h, 1.0 - t)
    assert t == pytest.approx(1.0)
    assert y[0] == pytest.approx(math.exp(-1.0), rel=1e-10)
    assert stepper.accepted > 0

def test_dormand_prince_underflow():
    stepper = DormandPrince(lambda t, y: 1.0 / (1.0 - t) ** 2 * np.ones_like(y),
                            lambda a, b: 1e-14 * np.ones_like(a), h_min=1e-6)
    with pytest.raises(StepSizeUnderflow):
        t, y, h = 0.0, np.array([1.0]), 0.1
        while t < 2.0:
            t, y, _, h = stepper.step(t, y, h, 2.0 - t)

def test_fit_line():
    t = np.linspace(0, 1, 11)
    line = fit_line(t, 3 - 2 * t)
    assert line.slope == pytest.approx(-2)
    assert line.intercept == pytest.approx(3)
    assert line.samples == 11
    with pytest.raises(ValueError):
        fit_line([0.0], [1.0])

def test_fit_constant():
    values = np.array([[1.0, 2.0], [3.0, 2.0]])
    assert np.allclose(fit_constant(values), [2.0, 2.0])

def test_worker_count(monkeypatch):
    monkeypatch.setenv(THREADS_VARIABLE, '3')
    assert worker_count() == 3
    monkeypatch.setenv(THREADS_VARIABLE, 'many')
    assert worker_count() >= 1
    monkeypatch.delenv(THREADS_VARIABLE)
    assert 1 <= worker_count() <= 4
