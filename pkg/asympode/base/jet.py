"""Truncated multivariate Taylor polynomials ("jets").

A Jet in d variables of order s holds the coefficients c_a of
sum_{|a| <= s} c_a h^a, the Taylor polynomial of a scalar function at a fixed
base point. Jets are closed under the operations the term language needs
(products, integer powers, rational powers of a jet with positive constant
term), which gives exact-at-float Taylor coefficients of every factor.
"""
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Tuple
import itertools
import math
import numpy as np

from .rational import binomial


@lru_cache(maxsize=64)
def _total_degree(dimension: int, order: int) -> np.ndarray:
    grids = np.indices((order + 1,) * dimension)
    degrees = grids.sum(axis=0)
    degrees.setflags(write=False)
    return degrees


@lru_cache(maxsize=64)
def multi_indices(dimension: int, order: int) -> Tuple[Tuple[int, ...], ...]:
    """All exponent tuples a with |a| == order, in lexicographic order."""
    return tuple(
        index for index in itertools.product(range(order + 1), repeat=dimension)
        if sum(index) == order
    )


class Jet:

    __slots__ = ('dimension', 'order', 'coefficients')

    def __init__(self, dimension: int, order: int, coefficients: np.ndarray = None):
        self.dimension = dimension
        self.order = order
        shape = (order + 1,) * dimension
        if coefficients is None:
            coefficients = np.zeros(shape)
        elif coefficients.shape != shape:
            raise ValueError(f'Jet coefficients must have shape {shape}, got {coefficients.shape}')
        self.coefficients = np.where(_total_degree(dimension, order) <= order, coefficients, 0.0)

    @classmethod
    def constant(cls, dimension: int, order: int, value: float) -> 'Jet':
        jet = cls(dimension, order)
        jet.coefficients[(0,) * dimension] = value
        return jet

    @classmethod
    def linear(cls, dimension: int, order: int, value: float, gradient) -> 'Jet':
        """Jet of the affine function value + gradient . h."""
        jet = cls.constant(dimension, order, value)
        if order >= 1:
            for i, g in enumerate(gradient):
                index = [0] * dimension
                index[i] = 1
                jet.coefficients[tuple(index)] = float(g)
        return jet

    @property
    def value(self) -> float:
        return float(self.coefficients[(0,) * self.dimension])

    def _like(self, coefficients: np.ndarray) -> 'Jet':
        return Jet(self.dimension, self.order, coefficients)

    def __add__(self, other):
        if isinstance(other, Jet):
            return self._like(self.coefficients + other.coefficients)
        return self + Jet.constant(self.dimension, self.order, float(other))

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Jet):
            return self._like(self.coefficients - other.coefficients)
        return self - Jet.constant(self.dimension, self.order, float(other))

    def __neg__(self):
        return self._like(-self.coefficients)

    def scale(self, factor: float) -> 'Jet':
        return self._like(self.coefficients * float(factor))

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return self.scale(other)
        out = np.zeros_like(self.coefficients)
        limit = self.order + 1
        for index in zip(*np.nonzero(self.coefficients)):
            shift_out = tuple(slice(i, None) for i in index)
            shift_in = tuple(slice(0, limit - i) for i in index)
            out[shift_out] += self.coefficients[index] * other.coefficients[shift_in]
        return self._like(out)

    __rmul__ = __mul__

    def integer_power(self, exponent: int) -> 'Jet':
        if exponent < 0:
            raise ValueError('Negative integer powers are taken through rational_power')
        result = Jet.constant(self.dimension, self.order, 1.0)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            exponent >>= 1
            if exponent:
                base = base * base
        return result

    def rational_power(self, exponent: Fraction) -> 'Jet':
        """self ** exponent for a jet with positive constant term.

        Uses (c (1 + g)) ** nu = c ** nu * sum_k binom(nu, k) g ** k with g free of a
        constant term, so the series terminates at k = order.
        """
        exponent = Fraction(exponent)
        if exponent.denominator == 1 and exponent >= 0:
            return self.integer_power(int(exponent))
        base = self.value
        if base <= 0:
            raise ValueError(f'Rational power of a jet needs a positive constant term, got {base}')
        g = self.scale(1.0 / base) - 1.0
        g.coefficients[(0,) * self.dimension] = 0.0
        total = Jet.constant(self.dimension, self.order, 1.0)
        g_power = Jet.constant(self.dimension, self.order, 1.0)
        for k in range(1, self.order + 1):
            g_power = g_power * g
            total = total + g_power.scale(float(binomial(exponent, k)))
        return total.scale(base ** float(exponent))

    def homogeneous_part(self, degree: int) -> Iterator[Tuple[Tuple[int, ...], float]]:
        """Pairs (exponent tuple, coefficient) of the degree-m part."""
        for index in multi_indices(self.dimension, degree):
            yield index, float(self.coefficients[index])


def factorial_ratio(index: Tuple[int, ...]) -> Fraction:
    """a! / |a|! for an exponent tuple a, computed exactly."""
    numerator = 1
    for count in index:
        numerator *= math.factorial(count)
    return Fraction(numerator, math.factorial(sum(index)))
