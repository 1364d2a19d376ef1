"""Scalar power factors of the term language.

Each factor is positively homogeneous in x with an exact rational degree:

    NormPower      ||M x||_p ** nu             degree nu
    CoordPower     x_i ** g, |x_i| ** g,
                   |x_i| ** g * sign(x_i)      degree g
    PolyNormPower  ||(P_1(x), ..., P_n(x))||_p ** nu,
                   P_j homogeneous of degree m degree m * nu
"""
from fractions import Fraction
from functools import lru_cache
from typing import Annotated, Dict, Iterable, List, Literal, Sequence, Tuple, Union
import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..base.jet import Jet
from ..base.rational import Rational, format_fraction
from .constants import ABS, PLAIN, SIGNED
from .polynomials import ScalarPolynomial


def _exponent_text(value: Fraction) -> str:
    return format_fraction(value) if value.denominator == 1 and value >= 0 else '{' + format_fraction(value) + '}'


def _is_even_integer(value: Fraction) -> bool:
    return value.denominator == 1 and value.numerator % 2 == 0


@lru_cache(maxsize=256)
def _as_array(matrix: Tuple[Tuple[float, ...], ...]) -> np.ndarray:
    array = np.array(matrix, dtype=float)
    array.setflags(write=False)
    return array


class NormPower(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal['norm'] = 'norm'
    matrix: Tuple[Tuple[float, ...], ...]
    p: Rational = Fraction(2)
    nu: Rational = Fraction(1)

    @field_validator('p')
    @classmethod
    def check_p(cls, value: Fraction) -> Fraction:
        if value < 1:
            raise ValueError(f'norm index must be at least 1, got {format_fraction(value)}')
        return value

    @field_validator('nu')
    @classmethod
    def check_nu(cls, value: Fraction) -> Fraction:
        if value < 0:
            raise ValueError(f'norm exponent must be nonnegative, got {format_fraction(value)}')
        return value

    @property
    def array(self) -> np.ndarray:
        return _as_array(self.matrix)

    @property
    def degree(self) -> Fraction:
        return self.nu

    @property
    def even(self) -> bool:
        return _is_even_integer(self.p)

    @property
    def key(self) -> tuple:
        return ('norm', self.matrix, self.p)

    def is_polynomial(self) -> bool:
        return self.nu == 0 or (self.even and (self.nu / self.p).denominator == 1)

    def with_exponent(self, nu: Fraction) -> 'NormPower':
        return NormPower(matrix=self.matrix, p=self.p, nu=nu)

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.nu == 0:
            return np.ones(x.shape[:-1])
        values = x @ self.array.T
        p = float(self.p)
        if p == 2:
            norm = np.sqrt(np.sum(values * values, axis=-1))
        else:
            norm = np.sum(np.abs(values) ** p, axis=-1) ** (1.0 / p)
        return norm ** float(self.nu)

    def smooth_at(self, xi: Sequence[float]) -> bool:
        if self.is_polynomial():
            return True
        values = self.array @ np.asarray(xi, dtype=float)
        if self.even:
            return bool(np.any(values != 0))
        return bool(np.all(values != 0))

    def jet(self, base: Sequence[float], order: int) -> Jet:
        d = self.array.shape[1]
        total = Jet(d, order)
        for row in self.array:
            form = Jet.linear(d, order, float(row @ np.asarray(base, dtype=float)), row)
            if self.even:
                total = total + form.integer_power(int(self.p))
            else:
                total = total + (form * form).rational_power(self.p / 2)
        return total.rational_power(self.nu / self.p)

    def render(self) -> str:
        d = self.array.shape[1]
        if self.array.shape == (d, d) and np.array_equal(self.array, np.eye(d)):
            argument = 'x'
        else:
            argument = ', '.join(ScalarPolynomial.linear(row).render() for row in self.array)
        p = format_fraction(self.p) if self.p.denominator == 1 else '{' + format_fraction(self.p) + '}'
        text = f'norm{p}({argument})'
        return text if self.nu == 1 else f'{text}^{_exponent_text(self.nu)}'


class CoordPower(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal['coord'] = 'coord'
    index: int
    sign_type: Literal['plain', 'abs', 'signed'] = ABS
    gamma: Rational = Fraction(1)

    @model_validator(mode='after')
    def check_exponent(self) -> 'CoordPower':
        if self.gamma < 0:
            raise ValueError(f'coordinate exponent must be nonnegative, got {format_fraction(self.gamma)}')
        if self.sign_type == PLAIN and self.gamma.denominator != 1:
            raise ValueError(f'plain power x_{self.index + 1}^{format_fraction(self.gamma)} needs an integer exponent')
        if self.index < 0:
            raise ValueError('coordinate index must be positive')
        return self

    @property
    def degree(self) -> Fraction:
        return self.gamma

    @property
    def key(self) -> tuple:
        return ('plain' if self.sign_type == PLAIN else 'coord', self.index)

    def is_polynomial(self) -> bool:
        if self.gamma.denominator != 1:
            return False
        n = self.gamma.numerator
        return self.sign_type == PLAIN or (self.sign_type == ABS and n % 2 == 0) or (self.sign_type == SIGNED and n % 2 == 1)

    def with_exponent(self, gamma: Fraction) -> 'CoordPower':
        return CoordPower(index=self.index, sign_type=self.sign_type, gamma=gamma)

    def __call__(self, x) -> np.ndarray:
        values = np.asarray(x, dtype=float)[..., self.index]
        if self.sign_type == PLAIN:
            return values ** int(self.gamma)
        magnitude = np.abs(values) ** float(self.gamma)
        return magnitude * np.sign(values) if self.sign_type == SIGNED else magnitude

    def smooth_at(self, xi: Sequence[float]) -> bool:
        if self.is_polynomial() or (self.sign_type == ABS and self.gamma == 0):
            return True
        return float(xi[self.index]) != 0

    def jet(self, base: Sequence[float], order: int) -> Jet:
        d = len(base)
        coordinate = Jet.linear(d, order, float(base[self.index]), np.eye(d)[self.index])
        if self.is_polynomial():
            return coordinate.integer_power(int(self.gamma))
        if self.gamma == 0:
            return Jet.constant(d, order, 1.0 if self.sign_type == ABS else float(np.sign(base[self.index])))
        magnitude = (coordinate * coordinate).rational_power(self.gamma / 2)
        return magnitude.scale(np.sign(base[self.index])) if self.sign_type == SIGNED else magnitude

    def render(self) -> str:
        variable = f'x_{self.index + 1}'
        if self.sign_type == PLAIN:
            return f'{variable}^{self.gamma.numerator}'
        if self.sign_type == SIGNED:
            return f'sgnpow({variable}, {format_fraction(self.gamma)})'
        text = f'abs({variable})'
        return text if self.gamma == 1 else f'{text}^{_exponent_text(self.gamma)}'


class PolyNormPower(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal['polynorm'] = 'polynorm'
    polynomials: Tuple[ScalarPolynomial, ...]
    p: Rational = Fraction(2)
    nu: Rational = Fraction(1)

    @model_validator(mode='after')
    def check_arguments(self) -> 'PolyNormPower':
        if not _is_even_integer(self.p) or self.p < 2:
            raise ValueError(f'polynorm index must be an even integer, got {format_fraction(self.p)}')
        if self.nu < 0:
            raise ValueError(f'polynorm exponent must be nonnegative, got {format_fraction(self.nu)}')
        if not self.polynomials:
            raise ValueError('polynorm needs at least one polynomial')
        degrees = set()
        for polynomial in self.polynomials:
            try:
                degree = polynomial.degree
            except ValueError as e:
                raise ValueError(f'polynorm argument {polynomial.render()} is not homogeneous') from e
            if degree is not None:
                degrees.add(degree)
        if len(degrees) != 1 or 0 in degrees:
            raise ValueError(f'polynorm arguments must share one positive degree, got {sorted(degrees)}')
        return self

    @property
    def inner_degree(self) -> int:
        return next(polynomial.degree for polynomial in self.polynomials if not polynomial.is_zero())

    @property
    def degree(self) -> Fraction:
        return self.inner_degree * self.nu

    @property
    def key(self) -> tuple:
        return ('polynorm', self.polynomials, self.p)

    def is_polynomial(self) -> bool:
        return self.nu == 0 or (self.nu / self.p).denominator == 1

    def with_exponent(self, nu: Fraction) -> 'PolyNormPower':
        return PolyNormPower(polynomials=self.polynomials, p=self.p, nu=nu)

    def _base(self, x) -> np.ndarray:
        p = int(self.p)
        return sum(polynomial(x) ** p for polynomial in self.polynomials)

    def __call__(self, x) -> np.ndarray:
        return self._base(x) ** float(self.nu / self.p)

    def smooth_at(self, xi: Sequence[float]) -> bool:
        return self.is_polynomial() or bool(self._base(np.asarray(xi, dtype=float)) > 0)

    def jet(self, base: Sequence[float], order: int) -> Jet:
        p = int(self.p)
        total = Jet(len(base), order)
        for polynomial in self.polynomials:
            total = total + polynomial.jet(base, order).integer_power(p)
        return total.rational_power(self.nu / self.p)

    def render(self) -> str:
        arguments = ', '.join(polynomial.render() for polynomial in self.polynomials)
        text = f'polynorm{format_fraction(self.p)}({arguments})'
        return text if self.nu == 1 else f'{text}^{_exponent_text(self.nu)}'


ScalarFactor = Annotated[Union[NormPower, CoordPower, PolyNormPower], Field(discriminator='kind')]


def merge_factors(dimension: int, factors: Iterable[ScalarFactor]) -> Tuple[Tuple[ScalarFactor, ...], ScalarPolynomial]:
    """Merge factors of equal base by adding exponents.

    Returns the merged non-polynomial factors, sorted by their text, and the
    polynomial remainder (plain powers and factors that became polynomial).
    Products of |x_i| and sign-carrying powers of the same coordinate combine
    into one power whose sign type follows the parity of the signed count.
    """
    polynomial = ScalarPolynomial.constant(dimension, 1.0)
    norms: Dict[tuple, Fraction] = {}
    templates: Dict[tuple, ScalarFactor] = {}
    signs: Dict[tuple, int] = {}
    for factor in factors:
        key = factor.key
        templates.setdefault(key, factor)
        if isinstance(factor, CoordPower):
            norms[key] = norms.get(key, Fraction(0)) + factor.gamma
            signs[key] = signs.get(key, 0) + (factor.sign_type == SIGNED)
        else:
            norms[key] = norms.get(key, Fraction(0)) + factor.nu

    merged: List[ScalarFactor] = []
    for key, exponent in norms.items():
        template = templates[key]
        if isinstance(template, CoordPower):
            if template.sign_type == PLAIN:
                polynomial = polynomial * ScalarPolynomial.variable(dimension, template.index, int(exponent))
                continue
            sign_type = SIGNED if signs[key] % 2 else ABS
            factor = CoordPower(index=template.index, sign_type=sign_type, gamma=exponent)
            if factor.is_polynomial():
                polynomial = polynomial * ScalarPolynomial.variable(dimension, template.index, int(exponent))
                continue
            if sign_type == ABS and exponent == 0:
                continue
        else:
            if exponent == 0:
                continue
            factor = template.with_exponent(exponent)
        merged.append(factor)
    merged.sort(key=lambda factor: factor.render())
    return tuple(merged), polynomial


def power_of(factor: ScalarFactor, exponent: int) -> ScalarFactor:
    """factor ** exponent for a nonnegative integer exponent."""
    if isinstance(factor, CoordPower):
        sign_type = factor.sign_type
        if sign_type == SIGNED and exponent % 2 == 0:
            sign_type = ABS
        return CoordPower(index=factor.index, sign_type=sign_type, gamma=factor.gamma * exponent)
    return factor.with_exponent(factor.nu * exponent)
