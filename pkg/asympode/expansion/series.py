from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple
import json
import logging
import math
import numpy as np
from pydantic import BaseModel, ConfigDict

from ..base.polynomial import VectorPolynomial
from ..base.rational import Rational, format_fraction
from ..dynamics.first_approx import FirstApproximation
from ..dynamics.trajectory import Trajectory
from ..exponents.constants import FLOAT_GROUPING_TOL
from ..exponents.exceptions import EmptyDegreeList
from ..exponents.lattice import ExponentLattice, build_lattice, finite_mode_limit
from ..spectral.decomposition import SpectralData
from ..tensors.constants import DEFAULT_MAX_ORDER
from ..tensors.provider import TensorProvider
from ..termlang.components import NonlinearitySpec
from ..termlang.constants import MODE_REMAINDER
from ..termlang.smoothness import smoothness_domain_check
from .constants import (EXPONENT_LIMIT, FIT_WINDOW_FRACTION, MIN_FIT_SAMPLES, NOISE_FACTOR, ODE_RESIDUAL_TOL,
                        RESONANCE_FIT, RESONANCE_POLICIES, RESONANCE_ZERO, SCHEMA_VERSION)
from .exceptions import FiniteModeExceeded, InapplicableAtXi, MissingTrajectory, UnknownPolicy
from .forcing import build_Jn
from .solver import ode_residual, resonant_blocks, solve_polynomial_ode

logger = logging.getLogger(__name__)


class Resonance(BaseModel):
    model_config = ConfigDict(frozen=True)

    block: int
    eigenvalue: Rational
    constant: List[float]
    samples: int = 0


class ExpansionTerm(BaseModel):
    """q_n (coefficients lowest power first) at rate mu_n, with its forcing J_n."""
    model_config = ConfigDict(frozen=True)

    n: int
    mu: Rational
    q: List[List[float]]
    forcing: List[List[float]]
    resonances: List[Resonance] = []
    residual: float = 0.0
    solved: bool = True

    @property
    def polynomial(self) -> VectorPolynomial:
        return VectorPolynomial.from_list(self.q)


class ExpansionSeries(BaseModel):
    model_config = ConfigDict(frozen=True)

    schema_version: int = SCHEMA_VERSION
    lam_star: Rational
    xi: List[float]
    n0: int
    mode: str
    n_bar: Optional[int] = None
    policy: str
    lattice: ExponentLattice
    terms: List[ExpansionTerm]

    def __len__(self) -> int:
        return len(self.terms)

    @property
    def rates(self) -> List[Fraction]:
        return [term.mu for term in self.terms]

    @property
    def polynomials(self) -> List[VectorPolynomial]:
        return [term.polynomial for term in self.terms]

    def next_rate(self, n: int) -> Optional[Fraction]:
        """mu_{n+1} when the lattice reaches it."""
        return self.lattice.rate_of(n + 1) if n < len(self.lattice) else None


def evaluate_series(series: ExpansionSeries, t: float, n_terms: int) -> np.ndarray:
    """Sum of q_n(t) exp(-mu_n t) over n <= n_terms, summed with fsum per coordinate."""
    if n_terms > len(series):
        raise ValueError(f'the series has {len(series)} terms, {n_terms} requested')
    parts = [term.polynomial(t) * math.exp(-float(term.mu) * t) for term in series.terms[:n_terms]]
    dimension = len(series.xi)
    return np.array([math.fsum(part[i] for part in parts) for i in range(dimension)])


def partial_sums(polynomials: Sequence[VectorPolynomial], rates: Sequence[Fraction], times: np.ndarray) -> np.ndarray:
    """Rows sum_n q_n(t) exp(-mu_n t) for every t."""
    times = np.asarray(times, dtype=float)
    total = np.zeros((len(times), polynomials[0].dimension if polynomials else 0))
    for q, mu in zip(polynomials, rates):
        total = total + q(times) * np.exp(-float(mu) * times)[:, None]
    return total


def fit_resonant_constant(traj: Trajectory, polynomials: Sequence[VectorPolynomial], rates: Sequence[Fraction],
                          projection: np.ndarray, mu, particular: VectorPolynomial) -> Tuple[np.ndarray, int]:
    """Least squares c in  R (exp(mu t) u(t)) - R particular(t) ~ R c.

    u is y minus the known terms. Only samples where |u| stands above the
    integrator noise floor are used, and of those the later half.
    Returns the constant and the number of samples used.
    """
    mu = float(mu)
    times = traj.times
    usable = mu * times < EXPONENT_LIMIT
    times = times[usable]
    states = traj.states[usable]
    residual = states - partial_sums(polynomials, rates, times)
    floor = NOISE_FACTOR * max(traj.tol_rel, np.finfo(float).eps) * np.linalg.norm(states, axis=1)
    informative = np.flatnonzero(np.linalg.norm(residual, axis=1) > floor)
    if len(informative) < MIN_FIT_SAMPLES:
        logger.warning(f'Only {len(informative)} samples above the noise floor at mu={mu:.6g}; '
                       'resonant constant set to 0')
        return np.zeros(traj.dimension), len(informative)
    last = times[informative[-1]]
    selected = informative[times[informative] >= (1 - FIT_WINDOW_FRACTION) * last]
    if len(selected) < MIN_FIT_SAMPLES:
        selected = informative[-MIN_FIT_SAMPLES:]
    t = times[selected]
    w = (np.exp(mu * t)[:, None] * residual[selected] - particular(t)) @ projection.T
    ones = np.ones((len(t), 1))
    constant, *_ = np.linalg.lstsq(ones, w, rcond=None)
    return projection @ constant[0], len(selected)


def _lattice_for(sd: SpectralData, spec: NonlinearitySpec, lam_star: Fraction, count: int) -> ExponentLattice:
    degrees = spec.alphas() if spec.finite else (lambda j: spec.alphas(j))
    try:
        return build_lattice(sd, lam_star, degrees, count)
    except EmptyDegreeList:
        logger.warning(f'The rate lattice at lam*={format_fraction(lam_star)} has a single element')
        return build_lattice(sd, lam_star, degrees, 1)


def expand(sd: SpectralData, spec: NonlinearitySpec, first: FirstApproximation, n_terms: int,
           policy: str = RESONANCE_ZERO, trajectory: Trajectory = None,
           max_order: int = DEFAULT_MAX_ORDER) -> ExpansionSeries:
    """The terms q_1 .. q_N of the expansion of y around its first approximation.

    The lattice is built one element past N so that the next rate is known.
    Resonant constants are 0 (policy zero) or fitted against the trajectory
    (policy fit).
    """
    if policy not in RESONANCE_POLICIES:
        raise UnknownPolicy(policy)
    if n_terms < 1:
        raise ValueError('n_terms must be at least 1')
    if policy == RESONANCE_FIT and trajectory is None:
        raise MissingTrajectory('the fit resonance policy needs a trajectory')

    xi = np.asarray(first.xi, dtype=float)
    report = smoothness_domain_check(spec, xi)
    if not report.applicable:
        raise InapplicableAtXi(report.offending_factor, list(first.xi))

    lam_star = first.lam_star
    lattice = _lattice_for(sd, spec, lam_star, n_terms + 1)
    if len(lattice) < n_terms:
        logger.warning(f'Only {len(lattice)} rates exist; expanding to {len(lattice)} terms')
        n_terms = len(lattice)

    n_bar = None
    if spec.mode == MODE_REMAINDER:
        degrees = spec.degrees()
        beta_last = degrees[-1] if degrees else Fraction(1)
        n_bar, _ = finite_mode_limit(sd, lattice, beta_last, spec.epsilon_bar)
        if n_terms > n_bar:
            raise FiniteModeExceeded(n_terms, n_bar)

    tol = 0 if sd.exact else FLOAT_GROUPING_TOL
    provider = TensorProvider(spec, xi, max_order)
    polynomials: List[VectorPolynomial] = []
    terms: List[ExpansionTerm] = []
    for n in range(1, n_terms + 1):
        mu = lattice.rate_of(n)
        forcing = build_Jn(polynomials, lattice, provider, n, tol)
        resonances: List[Resonance] = []
        if n == 1:
            q = VectorPolynomial.constant(xi)
        else:
            constants: Dict[int, np.ndarray] = {}
            blocks = resonant_blocks(sd, mu)
            if blocks and policy == RESONANCE_FIT:
                particular = solve_polynomial_ode(sd, mu, forcing)
                rates = lattice.rates[:n - 1]
                for j in blocks:
                    constant, used = fit_resonant_constant(trajectory, polynomials, rates, sd.projection(j), mu,
                                                           particular)
                    constants[j] = constant
                    resonances.append(Resonance(block=j, eigenvalue=sd.distinct[j - 1],
                                                constant=[float(v) for v in constant], samples=used))
            else:
                resonances = [Resonance(block=j, eigenvalue=sd.distinct[j - 1], constant=[0.0] * sd.dimension)
                              for j in blocks]
            q = solve_polynomial_ode(sd, mu, forcing, constants)
        residual = ode_residual(sd, mu, q, forcing) if n > 1 else 0.0
        solved = residual <= ODE_RESIDUAL_TOL * max(1.0, forcing.max_abs())
        if not solved:
            logger.warning(f'q_{n} leaves an ODE residual of {residual:.3e}')
        polynomials.append(q)
        terms.append(ExpansionTerm(n=n, mu=mu, q=q.to_list(), forcing=forcing.to_list(), resonances=resonances,
                                   residual=residual, solved=solved))
        logger.debug(f'q_{n} at mu={format_fraction(mu)}: degree {q.degree}, max |coefficient| {q.max_abs():.6g}')

    return ExpansionSeries(lam_star=lam_star, xi=[float(v) for v in xi], n0=first.n0, mode=spec.mode, n_bar=n_bar,
                           policy=policy, lattice=lattice, terms=terms)


def series_to_json(series: ExpansionSeries) -> str:
    """Floats are written by repr, so series_from_json restores them exactly."""
    return json.dumps(series.model_dump(mode='json'), indent=2, sort_keys=True) + '\n'


def series_from_json(text: str) -> ExpansionSeries:
    return ExpansionSeries.model_validate(json.loads(text))
