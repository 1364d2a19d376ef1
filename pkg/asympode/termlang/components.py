from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple
import logging
import math
import numpy as np
from pydantic import BaseModel, ConfigDict, PrivateAttr, model_validator

from ..base.jet import Jet
from ..base.rational import Rational, format_fraction
from .constants import MODE_FINITE, MODE_INFINITE, MODE_REMAINDER, MODES
from .exceptions import DegreeError
from .factors import ScalarFactor, merge_factors, power_of
from .polynomials import ScalarPolynomial

logger = logging.getLogger(__name__)


def _factor_product(factors: Sequence[ScalarFactor], x: np.ndarray) -> np.ndarray:
    product = np.ones(x.shape[:-1])
    for factor in factors:
        product = product * factor(x)
    return product


class HomogeneousComponent(BaseModel):
    """One product term  (prod of scalar factors) * tail(x)  with a vector polynomial tail.

    The tail entries are zero or homogeneous of a common degree m0, so the
    component is positively homogeneous of degree m0 + sum of factor degrees.
    """
    model_config = ConfigDict(frozen=True)

    dimension: int
    factors: Tuple[ScalarFactor, ...] = ()
    tail: Tuple[ScalarPolynomial, ...]

    @model_validator(mode='after')
    def check_tail(self) -> 'HomogeneousComponent':
        if len(self.tail) != self.dimension:
            raise ValueError(f'tail has {len(self.tail)} entries, expected {self.dimension}')
        degrees = set()
        for entry in self.tail:
            if entry.dimension != self.dimension:
                raise ValueError('tail entry dimension mismatch')
            degrees.update(entry.degrees)
        if len(degrees) > 1:
            raise ValueError(f'tail entries must share one degree, got {sorted(degrees)}')
        return self

    @property
    def tail_degree(self) -> int:
        for entry in self.tail:
            if not entry.is_zero():
                return entry.degree
        return 0

    @property
    def degree(self) -> Fraction:
        return self.tail_degree + sum((factor.degree for factor in self.factors), Fraction(0))

    def is_zero(self) -> bool:
        return all(entry.is_zero() for entry in self.tail)

    def is_polynomial(self) -> bool:
        return all(factor.is_polynomial() for factor in self.factors)

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        tail = np.stack([entry(x) for entry in self.tail], axis=-1)
        return _factor_product(self.factors, x)[..., None] * tail

    def offending_factor(self, xi: Sequence[float]) -> Optional[ScalarFactor]:
        """First factor that is not smooth near xi, None when all are."""
        for factor in self.factors:
            if not factor.smooth_at(xi):
                return factor
        return None

    def jets(self, base: Sequence[float], order: int) -> List[Jet]:
        """Per output coordinate Taylor polynomials of order `order` at base."""
        scalar = Jet.constant(self.dimension, order, 1.0)
        for factor in self.factors:
            scalar = scalar * factor.jet(base, order)
        return [scalar * entry.jet(base, order) for entry in self.tail]

    def scale(self, factor: float) -> 'HomogeneousComponent':
        return HomogeneousComponent(dimension=self.dimension, factors=self.factors,
                                    tail=tuple(entry.scale(factor) for entry in self.tail))

    def render(self) -> str:
        tail = '[' + ', '.join(entry.render() for entry in self.tail) + ']'
        return ' * '.join([factor.render() for factor in self.factors] + [tail])


def make_components(dimension: int, factors: Sequence[ScalarFactor],
                    tail: Sequence[ScalarPolynomial]) -> List[HomogeneousComponent]:
    """Normalize factors and split a tail into homogeneous components."""
    merged, polynomial = merge_factors(dimension, factors)
    tail = [entry * polynomial for entry in tail]
    degrees = sorted({degree for entry in tail for degree in entry.degrees})
    components = []
    for degree in degrees:
        parts = [entry.homogeneous_parts().get(degree, ScalarPolynomial.zero(dimension)) for entry in tail]
        components.append(HomogeneousComponent(dimension=dimension, factors=merged, tail=tuple(parts)))
    return components


def combine(components: Sequence[HomogeneousComponent]) -> List[HomogeneousComponent]:
    """Sum tails of components sharing their factors; drop zero components."""
    grouped: Dict[tuple, HomogeneousComponent] = {}
    for component in components:
        key = (component.factors, component.tail_degree)
        if key in grouped:
            previous = grouped[key]
            tail = tuple(a + b for a, b in zip(previous.tail, component.tail))
            grouped[key] = HomogeneousComponent(dimension=component.dimension, factors=component.factors, tail=tail)
        else:
            grouped[key] = component
    return [component for component in grouped.values() if not component.is_zero()]


class ScalarTerm(BaseModel):
    """Scalar product term  coefficient polynomial * prod of factors, homogeneous of positive degree."""
    model_config = ConfigDict(frozen=True)

    dimension: int
    factors: Tuple[ScalarFactor, ...] = ()
    polynomial: ScalarPolynomial

    @model_validator(mode='after')
    def check_degree(self) -> 'ScalarTerm':
        if len(self.polynomial.degrees) > 1:
            raise ValueError('denominator polynomial part must be homogeneous')
        if self.polynomial.is_zero():
            raise ValueError('denominator term is identically zero')
        return self

    @property
    def degree(self) -> Fraction:
        return self.polynomial.degree + sum((factor.degree for factor in self.factors), Fraction(0))

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return _factor_product(self.factors, x) * self.polynomial(x)

    def render(self) -> str:
        return ' * '.join([factor.render() for factor in self.factors] + ['(' + self.polynomial.render() + ')'])


class Composite(BaseModel):
    """numerator(x) / (1 + denominator(x)), expanded by the geometric series.

    depth None means the full infinite series.
    """
    model_config = ConfigDict(frozen=True)

    numerator: Tuple[HomogeneousComponent, ...]
    denominator: ScalarTerm
    depth: Optional[int] = None

    @model_validator(mode='after')
    def check_composite(self) -> 'Composite':
        if self.denominator.degree <= 0:
            raise ValueError(f'denominator degree must be positive, got {format_fraction(self.denominator.degree)}')
        if self.depth is not None and self.depth < 1:
            raise ValueError('composite depth must be at least 1')
        return self

    @property
    def dimension(self) -> int:
        return self.denominator.dimension

    @property
    def min_degree(self) -> Fraction:
        return min(component.degree for component in self.numerator)

    def term(self, j: int) -> List[HomogeneousComponent]:
        """Components of numerator * (-denominator) ** j."""
        d = self.dimension
        factors = [power_of(factor, j) for factor in self.denominator.factors]
        polynomial = self.denominator.polynomial.power(j).scale((-1) ** j)
        components = []
        for component in self.numerator:
            tail = [entry * polynomial for entry in component.tail]
            components.extend(make_components(d, list(component.factors) + factors, tail))
        return components

    def direct(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        numerator = sum(component(x) for component in self.numerator)
        return numerator / (1.0 + self.denominator(x))[..., None]

    def direct_scaled(self, u: np.ndarray, log_r: float) -> np.ndarray:
        numerator = sum(math.exp(float(component.degree - 1) * log_r) * component(u) for component in self.numerator)
        return numerator / (1.0 + math.exp(float(self.denominator.degree) * log_r) * self.denominator(u))

    def render(self) -> str:
        numerator = ' + '.join(component.render() for component in self.numerator)
        depth = 'inf' if self.depth is None else str(self.depth)
        return f'comp({numerator}; {self.denominator.render()}; {depth})'


class HomogeneousSum(BaseModel):
    """All components of one degree beta: the block F_k."""
    model_config = ConfigDict(frozen=True)

    degree: Rational
    components: Tuple[HomogeneousComponent, ...]

    @property
    def alpha(self) -> Fraction:
        return self.degree - 1

    def is_polynomial(self) -> bool:
        return all(component.is_polynomial() for component in self.components)

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        total = np.zeros(x.shape)
        for component in self.components:
            total = total + component(x)
        return total

    def render(self) -> str:
        return ' + '.join(component.render() for component in self.components)


def group_by_degree(components: Sequence[HomogeneousComponent]) -> List[HomogeneousSum]:
    by_degree: Dict[Fraction, List[HomogeneousComponent]] = {}
    for component in combine(components):
        by_degree.setdefault(component.degree, []).append(component)
    return [HomogeneousSum(degree=degree, components=tuple(by_degree[degree])) for degree in sorted(by_degree)]


class NonlinearitySpec(BaseModel):
    """The nonlinearity F as explicit homogeneous components plus geometric composites.

    mode h1: infinitely many blocks (some composite has depth None).
    mode h2: F is exactly the finite sum of its blocks.
    mode remainder: the blocks approximate F up to O(|x| ** (beta_last + epsilon_bar)).
    """
    model_config = ConfigDict(frozen=True)

    dimension: int
    mode: str = MODE_FINITE
    components: Tuple[HomogeneousComponent, ...] = ()
    composites: Tuple[Composite, ...] = ()
    epsilon_bar: Optional[Rational] = None

    _blocks: Dict[int, List[HomogeneousSum]] = PrivateAttr(default_factory=dict)
    _exact: Optional[tuple] = PrivateAttr(default=None)

    @model_validator(mode='after')
    def check_spec(self) -> 'NonlinearitySpec':
        if self.mode not in MODES:
            raise ValueError(f'mode must be one of {MODES}, got {self.mode!r}')
        infinite = any(composite.depth is None for composite in self.composites)
        if self.mode == MODE_INFINITE and not infinite:
            raise ValueError('mode h1 needs a composite of infinite depth')
        if self.mode != MODE_INFINITE and infinite:
            raise ValueError(f'mode {self.mode} cannot carry a composite of infinite depth')
        if self.mode == MODE_REMAINDER and (self.epsilon_bar is None or self.epsilon_bar <= 0):
            raise ValueError('mode remainder needs a positive epsilon_bar')
        for component in self.components:
            if component.dimension != self.dimension:
                raise ValueError('component dimension mismatch')
        return self

    def model_post_init(self, context) -> None:
        for block in self.blocks(None if self.finite else 1):
            if block.degree <= 1:
                raise DegreeError(f'homogeneous degree {format_fraction(block.degree)} is not greater than 1 '
                                  f'in {block.render()}')

    @property
    def finite(self) -> bool:
        return self.mode != MODE_INFINITE

    @property
    def n_star(self) -> Optional[int]:
        """Number of blocks in the finite modes."""
        return len(self.blocks()) if self.finite else None

    def is_zero(self) -> bool:
        return not self.components and not self.composites

    def blocks(self, count: Optional[int] = None) -> List[HomogeneousSum]:
        """The first `count` blocks in increasing degree (all blocks when count is None in a finite mode)."""
        if self.finite:
            if -1 not in self._blocks:
                components = list(self.components)
                for composite in self.composites:
                    for j in range(composite.depth):
                        components.extend(composite.term(j))
                self._blocks[-1] = group_by_degree(components)
            blocks = self._blocks[-1]
            return blocks if count is None else blocks[:count]
        if count is None:
            raise ValueError('mode h1 has infinitely many blocks, give a count')
        if count not in self._blocks:
            self._blocks[count] = self._infinite_blocks(count)
        return self._blocks[count]

    def _infinite_blocks(self, count: int) -> List[HomogeneousSum]:
        step = min(composite.denominator.degree for composite in self.composites if composite.depth is None)
        floor = min([composite.min_degree for composite in self.composites] +
                    [component.degree for component in self.components])
        components = list(self.components)
        for composite in self.composites:
            if composite.depth is not None:
                for j in range(composite.depth):
                    components.extend(composite.term(j))
        j = 0
        while True:
            for composite in self.composites:
                if composite.depth is None:
                    components.extend(composite.term(j))
            j += 1
            # every degree below floor + j * step is final
            settled = [block for block in group_by_degree(components) if block.degree < floor + j * step]
            if len(settled) >= count:
                return settled[:count]

    def degrees(self, count: Optional[int] = None) -> List[Fraction]:
        return [block.degree for block in self.blocks(count)]

    def alphas(self, count: Optional[int] = None) -> List[Fraction]:
        return [block.alpha for block in self.blocks(count)]

    def render(self) -> str:
        pieces = [component.render() for component in self.components]
        pieces += [composite.render() for composite in self.composites]
        return ' + '.join(pieces) if pieces else '0'


def _model_parts(spec: NonlinearitySpec) -> Tuple[List[HomogeneousComponent], List[Composite]]:
    """Components summed term by term, and composites evaluated by their closed form."""
    if spec._exact is None:
        exact = list(spec.components)
        direct = []
        for composite in spec.composites:
            if composite.depth is None or spec.mode == MODE_REMAINDER:
                direct.append(composite)
            else:
                for j in range(composite.depth):
                    exact.extend(composite.term(j))
        spec._exact = (combine(exact), direct)
    return spec._exact


def evaluate(spec: NonlinearitySpec, x, truncation: int) -> np.ndarray:
    """Partial sum of the first `truncation` blocks."""
    x = np.asarray(x, dtype=float)
    if truncation < 1:
        raise ValueError('truncation must be at least 1')
    if spec.finite and truncation > spec.n_star:
        raise ValueError(f'truncation {truncation} exceeds the {spec.n_star} blocks of a finite nonlinearity')
    total = np.zeros(x.shape)
    for block in spec.blocks(truncation):
        total = total + block(x)
    return total


def evaluate_model(spec: NonlinearitySpec, x) -> np.ndarray:
    """The modeled F used for integration.

    Finite-depth composites count as their truncated sums except in the
    remainder mode, where they stand for the closed form they approximate.
    """
    x = np.asarray(x, dtype=float)
    exact, direct = _model_parts(spec)
    total = np.zeros(x.shape)
    for component in exact:
        total = total + component(x)
    for composite in direct:
        total = total + composite.direct(x)
    return total


def evaluate_scaled(spec: NonlinearitySpec, u, log_r: float) -> np.ndarray:
    """F(exp(log_r) u) / exp(log_r) through homogeneity, without forming exp(log_r) u."""
    u = np.asarray(u, dtype=float)
    exact, direct = _model_parts(spec)
    total = np.zeros(u.shape)
    for component in exact:
        total = total + math.exp(float(component.degree - 1) * log_r) * component(u)
    for composite in direct:
        total = total + composite.direct_scaled(u, log_r)
    return total


def expand_composite(numerator: Sequence[HomogeneousComponent], denominator: ScalarTerm, depth: int) -> NonlinearitySpec:
    """First `depth` geometric-series terms of numerator / (1 + denominator), merged by degree."""
    composite = Composite(numerator=tuple(numerator), denominator=denominator, depth=depth)
    return NonlinearitySpec(dimension=denominator.dimension, mode=MODE_FINITE, composites=(composite,))
