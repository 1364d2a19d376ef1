from typing import Dict, Optional, Sequence, Tuple
import numpy as np
from pydantic import BaseModel, ConfigDict

from ..base.jet import Jet

Monomial = Tuple[int, ...]


class ScalarPolynomial(BaseModel):
    """Real polynomial in x_1..x_d as a sorted tuple of (exponents, coefficient) pairs.

    Zero coefficients are never stored, so the zero polynomial has no terms.
    """
    model_config = ConfigDict(frozen=True)

    dimension: int
    terms: Tuple[Tuple[Monomial, float], ...] = ()

    @classmethod
    def from_dict(cls, dimension: int, terms: Dict[Monomial, float]) -> 'ScalarPolynomial':
        cleaned = tuple(sorted((tuple(int(a) for a in exponents), float(c))
                               for exponents, c in terms.items() if c != 0))
        return cls(dimension=dimension, terms=cleaned)

    @classmethod
    def zero(cls, dimension: int) -> 'ScalarPolynomial':
        return cls(dimension=dimension)

    @classmethod
    def constant(cls, dimension: int, value: float) -> 'ScalarPolynomial':
        return cls.from_dict(dimension, {(0,) * dimension: value})

    @classmethod
    def variable(cls, dimension: int, index: int, power: int = 1) -> 'ScalarPolynomial':
        exponents = [0] * dimension
        exponents[index] = power
        return cls.from_dict(dimension, {tuple(exponents): 1.0})

    @classmethod
    def linear(cls, row: Sequence[float]) -> 'ScalarPolynomial':
        dimension = len(row)
        terms = {}
        for i, value in enumerate(row):
            exponents = [0] * dimension
            exponents[i] = 1
            terms[tuple(exponents)] = float(value)
        return cls.from_dict(dimension, terms)

    def as_dict(self) -> Dict[Monomial, float]:
        return dict(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(sum(exponents) == 0 for exponents, _ in self.terms)

    @property
    def degrees(self) -> Tuple[int, ...]:
        return tuple(sorted({sum(exponents) for exponents, _ in self.terms}))

    @property
    def degree(self) -> Optional[int]:
        """Total degree of a homogeneous polynomial, None for the zero polynomial."""
        degrees = self.degrees
        if not degrees:
            return None
        if len(degrees) > 1:
            raise ValueError(f'Polynomial is not homogeneous, degrees {degrees}')
        return degrees[0]

    def homogeneous_parts(self) -> Dict[int, 'ScalarPolynomial']:
        parts: Dict[int, Dict[Monomial, float]] = {}
        for exponents, c in self.terms:
            parts.setdefault(sum(exponents), {})[exponents] = c
        return {degree: ScalarPolynomial.from_dict(self.dimension, terms) for degree, terms in parts.items()}

    def constant_value(self) -> float:
        return dict(self.terms).get((0,) * self.dimension, 0.0)

    def __add__(self, other: 'ScalarPolynomial') -> 'ScalarPolynomial':
        terms = self.as_dict()
        for exponents, c in other.terms:
            terms[exponents] = terms.get(exponents, 0.0) + c
        return ScalarPolynomial.from_dict(self.dimension, terms)

    def __neg__(self) -> 'ScalarPolynomial':
        return self.scale(-1.0)

    def __sub__(self, other: 'ScalarPolynomial') -> 'ScalarPolynomial':
        return self + (-other)

    def scale(self, factor: float) -> 'ScalarPolynomial':
        return ScalarPolynomial.from_dict(self.dimension, {e: c * float(factor) for e, c in self.terms})

    def __mul__(self, other):
        if not isinstance(other, ScalarPolynomial):
            return self.scale(other)
        terms: Dict[Monomial, float] = {}
        for left, a in self.terms:
            for right, b in other.terms:
                exponents = tuple(i + j for i, j in zip(left, right))
                terms[exponents] = terms.get(exponents, 0.0) + a * b
        return ScalarPolynomial.from_dict(self.dimension, terms)

    def power(self, exponent: int) -> 'ScalarPolynomial':
        result = ScalarPolynomial.constant(self.dimension, 1.0)
        for _ in range(exponent):
            result = result * self
        return result

    def __call__(self, x) -> np.ndarray:
        """Evaluate at x of shape (..., d)."""
        x = np.asarray(x, dtype=float)
        total = np.zeros(x.shape[:-1])
        for exponents, c in self.terms:
            term = np.full(x.shape[:-1], c)
            for i, a in enumerate(exponents):
                if a:
                    term = term * x[..., i] ** a
            total = total + term
        return total

    def jet(self, base: Sequence[float], order: int) -> Jet:
        """Taylor polynomial of order `order` around base."""
        d = self.dimension
        coordinates = [Jet.linear(d, order, float(base[i]), np.eye(d)[i]) for i in range(d)]
        total = Jet(d, order)
        for exponents, c in self.terms:
            term = Jet.constant(d, order, c)
            for i, a in enumerate(exponents):
                if a:
                    term = term * coordinates[i].integer_power(a)
            total = total + term
        return total

    def linear_row(self) -> np.ndarray:
        """Coefficient row of a linear form."""
        if self.degrees not in ((), (1,)):
            raise ValueError('Not a linear form')
        row = np.zeros(self.dimension)
        for exponents, c in self.terms:
            row[exponents.index(1)] = c
        return row

    def render(self) -> str:
        if not self.terms:
            return '0'
        pieces = []
        for exponents, c in self.terms:
            variables = [f'x_{i + 1}' if a == 1 else f'x_{i + 1}^{a}' for i, a in enumerate(exponents) if a]
            if not variables:
                pieces.append(repr(c))
            elif c == 1:
                pieces.append('*'.join(variables))
            elif c == -1:
                pieces.append('-' + '*'.join(variables))
            else:
                pieces.append('*'.join([repr(c)] + variables))
        text = ' + '.join(pieces)
        return text.replace('+ -', '- ')

