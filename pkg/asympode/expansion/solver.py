"""Polynomial solutions of  q' + (A - mu) q = p.

On the spectral block of lam_j the equation reads q_j' + (lam_j - mu) q_j = p_j.
Away from resonance the unique polynomial solution of the same degree is
found by back-substitution from the top coefficient; at resonance (lam_j = mu)
q_j is a free constant in the block plus the antiderivative of p_j.
"""
from typing import Dict, List, Optional, Sequence
import numpy as np

from ..base.polynomial import VectorPolynomial
from ..base.rational import to_fraction
from ..exponents.constants import FLOAT_GROUPING_TOL
from ..spectral.decomposition import SpectralData


def resonant_blocks(sd: SpectralData, mu) -> List[int]:
    """1-based blocks j with lam_j = mu."""
    mu = to_fraction(mu)
    tol = 0 if sd.exact else FLOAT_GROUPING_TOL
    return [j for j, eigenvalue in enumerate(sd.distinct, start=1) if abs(eigenvalue - mu) <= tol]


def back_substitute(coefficients: np.ndarray, shift: float) -> np.ndarray:
    """Coefficients of the polynomial q with q' + shift q = p, for shift != 0."""
    q = np.zeros_like(coefficients)
    top = coefficients.shape[0] - 1
    q[top] = coefficients[top] / shift
    for k in range(top - 1, -1, -1):
        q[k] = (coefficients[k] - (k + 1) * q[k + 1]) / shift
    return q


def solve_polynomial_ode(sd: SpectralData, mu, p: VectorPolynomial,
                         resonant_constants: Optional[Dict[int, Sequence[float]]] = None) -> VectorPolynomial:
    mu = to_fraction(mu)
    if mu <= 0:
        raise ValueError('mu must be positive')
    constants = resonant_constants if resonant_constants else {}
    resonant = set(resonant_blocks(sd, mu))
    total = VectorPolynomial.zero(sd.dimension)
    for j in range(1, sd.distinct_count + 1):
        R = sd.projection(j)
        block = p.transform(R)
        if j in resonant:
            constant = R @ np.asarray(constants.get(j, np.zeros(sd.dimension)), dtype=float)
            total = total + block.antiderivative(constant)
        elif not block.is_zero():
            shift = float(sd.distinct[j - 1] - mu)
            total = total + VectorPolynomial(back_substitute(block.coefficients, shift))
    return total


def ode_residual(sd: SpectralData, mu, q: VectorPolynomial, p: VectorPolynomial) -> float:
    """Largest coefficient of q' + (A - mu) q - p."""
    A = np.asarray(sd.matrix, dtype=float) - float(to_fraction(mu)) * np.eye(sd.dimension)
    return (q.derivative() + q.transform(A) - p).max_abs()
