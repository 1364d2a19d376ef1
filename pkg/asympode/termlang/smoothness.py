from fractions import Fraction
from typing import List, Optional, Sequence, Union
import logging
import numpy as np
from pydantic import BaseModel, ConfigDict

from ..base.rational import format_fraction
from .components import HomogeneousComponent, HomogeneousSum, NonlinearitySpec, ScalarTerm
from .constants import MODE_INFINITE, NONDEGENERATE_TOL, SPHERE_SAMPLES, SPHERE_SEED
from .factors import CoordPower, NormPower, PolyNormPower, ScalarFactor

logger = logging.getLogger(__name__)

LIPSCHITZ = 'lipschitz'
CONTINUOUS = 'continuous'


class ComponentSmoothness(BaseModel):
    model_config = ConfigDict(frozen=True)

    component: str
    degree: str
    smooth: bool
    offending_factor: Optional[str] = None


class SmoothnessReport(BaseModel):
    """Whether every factor of F is smooth near xi."""
    model_config = ConfigDict(frozen=True)

    xi: List[float]
    applicable: bool
    components: List[ComponentSmoothness]
    offending_factor: Optional[str] = None

    @property
    def message(self) -> str:
        if self.applicable:
            return 'every factor is smooth near xi'
        return f'factor {self.offending_factor} is not smooth near xi = {self.xi}'


class ComponentClass(BaseModel):
    model_config = ConfigDict(frozen=True)

    component: str
    regularity: str
    reason: str


class Classification(BaseModel):
    """Regularity class of the modeled F: locally Lipschitz or only continuous."""
    model_config = ConfigDict(frozen=True)

    regularity: str
    components: List[ComponentClass]

    @property
    def lipschitz(self) -> bool:
        return self.regularity == LIPSCHITZ


class NondegeneracyReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    factor: str
    minimum: float
    samples: int
    nondegenerate: bool


def sphere_samples(dimension: int, samples: int = SPHERE_SAMPLES, seed: int = SPHERE_SEED) -> np.ndarray:
    """Random unit vectors plus the signed coordinate axes."""
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((samples, dimension))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    axes = np.vstack([np.eye(dimension), -np.eye(dimension)])
    return np.vstack([x, axes])


def _checked_components(spec: NonlinearitySpec) -> List[Union[HomogeneousComponent, ScalarTerm]]:
    if spec.mode != MODE_INFINITE:
        return [component for block in spec.blocks() for component in block.components]
    checked: List[Union[HomogeneousComponent, ScalarTerm]] = list(spec.components)
    for composite in spec.composites:
        checked.extend(composite.numerator)
        checked.append(composite.denominator)
    return checked


def smoothness_domain_check(spec: NonlinearitySpec, xi: Sequence[float]) -> SmoothnessReport:
    """Check that every factor of every component is C-infinity near xi."""
    xi = [float(value) for value in xi]
    if not any(xi):
        raise ValueError('xi must be nonzero')
    entries = []
    offending = None
    for component in _checked_components(spec):
        factor = next((factor for factor in component.factors if not factor.smooth_at(xi)), None)
        entries.append(ComponentSmoothness(component=component.render(), degree=format_fraction(component.degree),
                                           smooth=factor is None,
                                           offending_factor=None if factor is None else factor.render()))
        if factor is not None and offending is None:
            offending = factor.render()
    report = SmoothnessReport(xi=xi, applicable=offending is None, components=entries, offending_factor=offending)
    if not report.applicable:
        logger.warning(f'Inapplicable at xi: {report.message}')
    return report


def _min_degree(factors: Sequence[ScalarFactor]) -> Fraction:
    return min(factor.degree for factor in factors)


def _classify_factors(factors: Sequence[ScalarFactor], tail_degree: int) -> ComponentClass:
    non_polynomial = [factor for factor in factors if not factor.is_polynomial()]
    text = ' * '.join(factor.render() for factor in factors) or '1'
    if not non_polynomial:
        return ComponentClass(component=text, regularity=LIPSCHITZ, reason='polynomial')
    norms = [factor for factor in non_polynomial if isinstance(factor, NormPower)]
    polynorms = [factor for factor in non_polynomial if isinstance(factor, PolyNormPower)]
    coords = [factor for factor in non_polynomial if isinstance(factor, CoordPower)]
    total = tail_degree + sum((factor.degree for factor in non_polynomial), Fraction(0))

    if norms and not polynorms and not coords:
        if all(factor.p > 1 for factor in norms) and tail_degree + _min_degree(norms) > 1:
            return ComponentClass(component=text, regularity=LIPSCHITZ,
                                  reason='norm powers with p > 1 and m0 + min nu > 1')
    if polynorms and not norms and not coords:
        if tail_degree + min(factor.nu for factor in polynorms) > 1:
            return ComponentClass(component=text, regularity=LIPSCHITZ,
                                  reason='poly-norm powers with m0 + min nu > 1')
    if coords and all(factor.gamma == 0 or factor.gamma >= 1 for factor in coords) \
            and all(factor.nu >= 1 for factor in norms + polynorms) and total > 1:
        return ComponentClass(component=text, regularity=LIPSCHITZ,
                              reason='coordinate powers with exponents in {0} or [1, inf)')
    return ComponentClass(component=text, regularity=CONTINUOUS,
                          reason=f'factor exponents {[format_fraction(f.degree) for f in non_polynomial]} '
                                 'give no Lipschitz bound near 0')


def classify(spec: NonlinearitySpec) -> Classification:
    """Sufficient conditions for local Lipschitz continuity, component by component."""
    entries = []
    for component in _checked_components(spec):
        if isinstance(component, ScalarTerm):
            coords = [factor for factor in component.factors
                      if isinstance(factor, CoordPower) and not factor.is_polynomial()]
            if all(factor.gamma == 0 or factor.gamma >= 1 for factor in coords):
                entry = ComponentClass(component=component.render(), regularity=LIPSCHITZ,
                                       reason='denominator is Lipschitz away from 0')
            else:
                entry = ComponentClass(component=component.render(), regularity=CONTINUOUS,
                                       reason='denominator has a coordinate power below 1')
        else:
            entry = _classify_factors(component.factors, component.tail_degree)
            entry = ComponentClass(component=component.render(), regularity=entry.regularity, reason=entry.reason)
        entries.append(entry)
    regularity = LIPSCHITZ if all(entry.regularity == LIPSCHITZ for entry in entries) else CONTINUOUS
    return Classification(regularity=regularity, components=entries)


def check_nondegenerate(factor: PolyNormPower, samples: int = SPHERE_SAMPLES, seed: int = SPHERE_SEED,
                        tol: float = NONDEGENERATE_TOL) -> NondegeneracyReport:
    """Sample min |P(x)|_p over the unit sphere: P(x) = 0 only at x = 0 when the minimum stays positive."""
    dimension = factor.polynomials[0].dimension
    x = sphere_samples(dimension, samples, seed)
    values = np.stack([polynomial(x) for polynomial in factor.polynomials], axis=-1)
    p = int(factor.p)
    norms = np.sum(np.abs(values) ** p, axis=-1) ** (1.0 / p)
    minimum = float(np.min(norms))
    return NondegeneracyReport(factor=factor.render(), minimum=minimum, samples=len(x), nondegenerate=minimum > tol)


def homogeneous_norm(component: Union[HomogeneousComponent, HomogeneousSum], samples: int = SPHERE_SAMPLES,
                     seed: int = SPHERE_SEED) -> float:
    """Estimate of sup over |x| = 1 of |F_k(x)|."""
    dimension = component.components[0].dimension if isinstance(component, HomogeneousSum) else component.dimension
    x = sphere_samples(dimension, samples, seed)
    return float(np.max(np.linalg.norm(component(x), axis=-1)))
