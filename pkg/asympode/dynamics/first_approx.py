from typing import List, Optional, Tuple
import logging
import math
import numpy as np
from pydantic import BaseModel, ConfigDict

from ..base.fitting import fit_constant, fit_line
from ..base.rational import Rational, format_fraction
from ..spectral.decomposition import SpectralData
from .constants import (APPROACH_MIN_SAMPLES, APPROACH_NOISE_FACTOR, DECAY_MARGIN, DEFAULT_WINDOW_FRACTION,
                        EIGEN_RESIDUAL_TOL, MIN_DECAY_DECADES, ZERO_LIMIT_TOL)
from .exceptions import AmbiguousRate, InsufficientDecay, NonDecay, NotAnEigenvector, ZeroLimit
from .trajectory import Trajectory

logger = logging.getLogger(__name__)


class FirstApproximation(BaseModel):
    """The leading term xi* exp(-lam* t) of a decaying solution."""
    model_config = ConfigDict(frozen=True)

    lam_star: Rational
    xi: List[float]
    n0: int
    dirichlet_tail: List[float]
    dirichlet_median: float
    eigen_residual: float
    window: float
    window_start: float
    approach_slope: Optional[float] = None
    approach_samples: int = 0


class DecayReport(BaseModel):
    """Tail slope of log |y| against the band [-(Lambda_d + delta), -(Lambda_1 - delta)]."""
    model_config = ConfigDict(frozen=True)

    slope: float
    intercept: float
    lower: float
    upper: float
    delta: float
    c1: float
    c2: float
    window_start: float
    passed: bool


def _check_decay(traj: Trajectory) -> None:
    decades = (traj.log_norms[0] - float(np.min(traj.log_norms))) / math.log(10)
    if traj.non_decay and traj.log_norms[-1] >= traj.log_norms[0]:
        raise NonDecay(f'|y| did not decay: log |y| went from {traj.log_norms[0]:.6g} to {traj.log_norms[-1]:.6g}')
    if decades < MIN_DECAY_DECADES:
        raise InsufficientDecay(f'trajectory decayed {decades:.2f} decades, at least {MIN_DECAY_DECADES} are needed; '
                                'increase the horizon')


def first_approximation(sd: SpectralData, traj: Trajectory,
                        window: float = DEFAULT_WINDOW_FRACTION) -> FirstApproximation:
    """Detect lam* from the Dirichlet quotient tail and fit xi* = lim exp(lam* t) y(t)."""
    if not 0 < window <= 1:
        raise ValueError(f'window fraction must lie in (0, 1], got {window}')
    _check_decay(traj)
    tail = traj.tail(window)
    quotients = traj.dirichlet[tail]
    median = float(np.median(quotients))

    distances = [abs(median - value) for value in sd.distinct_float]
    j = int(np.argmin(distances))
    gaps = np.diff(sd.distinct_float)
    if len(gaps) and distances[j] > float(np.min(gaps)) / 4:
        raise AmbiguousRate(f'Dirichlet quotient tail median {median:.8g} is farther than a quarter of the '
                            f'smallest eigenvalue gap from every eigenvalue')
    lam_star = sd.distinct[j]
    n0 = j + 1

    scaled = traj.scaled(float(lam_star))[tail]
    xi = fit_constant(scaled)
    norm0 = math.exp(traj.log_norms[0])
    if float(np.linalg.norm(xi)) < ZERO_LIMIT_TOL * norm0:
        raise ZeroLimit(f'exp({format_fraction(lam_star)} t) y(t) tends to 0: the solution decays faster; '
                        'retry with a longer horizon')

    residual = float(np.linalg.norm(sd.matrix @ xi - float(lam_star) * xi) / np.linalg.norm(xi))
    if residual > EIGEN_RESIDUAL_TOL:
        raise NotAnEigenvector(residual, format_fraction(lam_star))
    # drop the rounding left in the other eigenspaces
    xi = sd.projection(n0) @ xi
    slope, used = approach_rate(traj, float(lam_star), xi)

    logger.debug(f'First approximation: lam*={format_fraction(lam_star)} (n0={n0}), xi*={list(xi)}, '
                 f'Dirichlet median {median:.10g}, eigen-residual {residual:.3e}')
    return FirstApproximation(
        lam_star=lam_star, xi=[float(v) for v in xi], n0=n0, dirichlet_tail=[float(v) for v in quotients],
        dirichlet_median=median, eigen_residual=residual, window=window,
        window_start=float(traj.times[tail.start]), approach_slope=slope, approach_samples=used,
    )


def approach_rate(traj: Trajectory, lam_star: float, xi: np.ndarray) -> Tuple[Optional[float], int]:
    """Slope of log |exp(lam* t) y(t) - xi*| over the samples above integrator noise.

    Returns (None, samples) when fewer than APPROACH_MIN_SAMPLES samples are informative.
    """
    gap = np.linalg.norm(traj.scaled(lam_star) - xi, axis=1)
    floor = APPROACH_NOISE_FACTOR * max(traj.tol_rel, float(np.finfo(float).eps)) * float(np.linalg.norm(xi))
    informative = gap > floor
    used = int(np.count_nonzero(informative))
    if used < APPROACH_MIN_SAMPLES:
        return None, used
    line = fit_line(traj.times[informative], np.log(gap[informative]))
    if line.slope >= 0:
        logger.warning(f'exp({lam_star:g} t) y(t) does not approach xi*: fitted slope {line.slope:.4g}')
    return line.slope, used


def decay_bounds_check(sd: SpectralData, traj: Trajectory,
                       window: float = DEFAULT_WINDOW_FRACTION) -> DecayReport:
    """Measured constants of c1 exp(-(Lambda_d + delta) t) <= |y(t)| <= c2 exp(-(Lambda_1 - delta) t).

    c1 is the largest constant below the trajectory and c2 the smallest above it.
    """
    tail = traj.tail(window)
    line = fit_line(traj.times[tail], traj.log_norms[tail])
    smallest, largest = sd.distinct_float[0], sd.distinct_float[-1]
    delta = DECAY_MARGIN * largest
    lower, upper = -(largest + delta), -(smallest - delta)
    c1 = math.exp(float(np.min(traj.log_norms + (largest + delta) * traj.times)))
    c2 = math.exp(float(np.max(traj.log_norms + (smallest - delta) * traj.times)))
    passed = lower <= line.slope <= upper
    if not passed:
        logger.warning(f'Tail slope {line.slope:.6g} outside [{lower:.6g}, {upper:.6g}]')
    return DecayReport(slope=line.slope, intercept=line.intercept, lower=lower, upper=upper, delta=delta,
                       c1=c1, c2=c2, window_start=float(traj.times[tail.start]), passed=passed)
