from fractions import Fraction
from typing import List, Optional, Sequence, Tuple
import logging
import numpy as np
from pydantic import BaseModel, ConfigDict

from ..base.fitting import LineFit, fit_line
from ..base.rational import Rational
from ..dynamics.trajectory import Trajectory
from ..expansion.constants import RESONANCE_ZERO
from ..expansion.series import ExpansionSeries, partial_sums
from .constants import (BAND_HIGH, BAND_LOW, DEFAULT_FIT_WINDOW, MIN_FIT_SAMPLES, NOISE_FACTOR,
                        REPORT_SCHEMA_VERSION, SLOPE_TOLERANCE, VERDICT_FAIL, VERDICT_PASS, VERDICT_VACUOUS)
from .exceptions import ResidualUnderflow

logger = logging.getLogger(__name__)


class ResidualFit(BaseModel):
    """Check of u_N = y - sum_{n <= N} q_n exp(-mu_n t) against the next rate."""
    model_config = ConfigDict(frozen=True)

    n: int
    mu: Rational
    next_mu: Optional[Rational] = None
    next_zero: bool = False
    slope: Optional[float] = None
    intercept: Optional[float] = None
    samples: int = 0
    window_start: Optional[float] = None
    window_end: Optional[float] = None
    tolerance: Optional[float] = None
    improved: Optional[bool] = None
    verdict: str
    message: str = ''

    @property
    def passed(self) -> bool:
        return self.verdict != VERDICT_FAIL


class VerificationReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    schema_version: int = REPORT_SCHEMA_VERSION
    policy: str
    tol_abs: float
    tol_rel: float
    fit_window: float
    lattice_window: Rational
    caveat: Optional[str] = None
    fits: List[ResidualFit]
    unsolved: List[int] = []
    times: List[float]
    residual_norms: List[List[float]]

    @property
    def passed(self) -> bool:
        return not self.unsolved and all(fit.passed for fit in self.fits)

    def failure(self) -> str:
        parts = []
        failed = [fit.n for fit in self.fits if not fit.passed]
        if failed:
            parts.append(f'residual slopes disagree with the next rate for N = {failed}')
        if self.unsolved:
            parts.append(f'q_n leaves an ODE residual above tolerance for n = {self.unsolved}')
        return '; '.join(parts)

    @property
    def vacuous(self) -> List[int]:
        return [fit.n for fit in self.fits if fit.verdict == VERDICT_VACUOUS]


def fit_log_slope(t: Sequence[float], values) -> LineFit:
    """Least squares of log |value| against t; rows of a 2-d array are reduced to their norms."""
    values = np.asarray(values, dtype=float)
    magnitudes = np.linalg.norm(values, axis=1) if values.ndim == 2 else np.abs(values)
    return fit_line(t, np.log(magnitudes))


def informative_window(times: np.ndarray, residual: np.ndarray, norms: np.ndarray, scale: float, tol_rel: float,
                       fraction: float = DEFAULT_FIT_WINDOW) -> np.ndarray:
    """Indices of the late informative residual samples.

    A sample is informative when |u| lies in the fitting band and above the
    integrator noise floor. The window is the last `fraction` of their span.
    """
    magnitude = np.linalg.norm(residual, axis=1)
    floor = NOISE_FACTOR * max(tol_rel, np.finfo(float).eps) * norms
    mask = (magnitude > floor) & (magnitude >= BAND_LOW * scale) & (magnitude <= BAND_HIGH * scale)
    indices = np.flatnonzero(mask)
    if len(indices) < MIN_FIT_SAMPLES:
        raise ResidualUnderflow(len(indices))
    first, last = times[indices[0]], times[indices[-1]]
    selected = indices[times[indices] >= last - fraction * (last - first)]
    if len(selected) < MIN_FIT_SAMPLES:
        selected = indices[-MIN_FIT_SAMPLES:]
    return selected


def slope_tolerance(series: ExpansionSeries, n: int) -> Optional[float]:
    """max(5% of mu_{n+1}, half the gap from mu_{n+1} to its nearest lattice neighbour)."""
    rates = series.lattice.rates
    if n >= len(rates):
        return None
    target = rates[n]
    gaps = [target - rates[n - 1]]
    if n + 1 < len(rates):
        gaps.append(rates[n + 1] - target)
    return max(SLOPE_TOLERANCE * float(target), float(min(gaps)) / 2)


def _verdict(slope: float, next_mu: Fraction, next_zero: bool, tolerance: float) -> Tuple[str, str]:
    target = -float(next_mu)
    if next_zero:
        if slope <= target + tolerance:
            return VERDICT_PASS, f'q_next vanishes; slope {slope:.6g} at or below {target:.6g}'
        return VERDICT_FAIL, f'q_next vanishes but slope {slope:.6g} is above {target:.6g} + {tolerance:.3g}'
    if abs(slope - target) <= tolerance:
        return VERDICT_PASS, f'slope {slope:.6g} within {tolerance:.3g} of {target:.6g}'
    return VERDICT_FAIL, f'slope {slope:.6g} is {abs(slope - target):.3g} away from {target:.6g}'


def verify(traj: Trajectory, series: ExpansionSeries, n_max: int = None,
           window: float = DEFAULT_FIT_WINDOW) -> VerificationReport:
    """Fit the decay rate of every truncation error u_N, N = 1 .. n_max, and compare it with mu_{N+1}."""
    n_max = len(series) if n_max is None else min(n_max, len(series))
    if n_max < 1:
        raise ValueError('n_max must be at least 1')
    times = traj.times
    states = traj.states
    norms = traj.norms
    scale = float(norms[0])
    polynomials = series.polynomials

    fits: List[ResidualFit] = []
    streams: List[np.ndarray] = []
    previous_window = None
    for n in range(1, n_max + 1):
        residual = states - partial_sums(polynomials[:n], series.rates[:n], times)
        magnitude = np.linalg.norm(residual, axis=1)
        streams.append(magnitude)
        mu = series.rates[n - 1]
        next_mu = series.next_rate(n)
        next_zero = n < len(series) and series.terms[n].polynomial.is_zero()
        tolerance = slope_tolerance(series, n)

        improved = None
        if previous_window is not None:
            quarter = previous_window[len(previous_window) * 3 // 4:]
            improved = bool(np.mean(magnitude[quarter]) <= np.mean(streams[-2][quarter]))
            if not improved:
                logger.warning(f'Adding q_{n} increased the tail residual')

        try:
            selected = informative_window(times, residual, norms, scale, traj.tol_rel, window)
        except ResidualUnderflow as e:
            logger.warning(f'u_{n}: {e.msg}; reporting a vacuous pass')
            fits.append(ResidualFit(n=n, mu=mu, next_mu=next_mu, next_zero=next_zero, samples=e.samples,
                                    tolerance=tolerance, improved=improved, verdict=VERDICT_VACUOUS,
                                    message=f'{e.msg}; residual reached integrator noise'))
            previous_window = None
            continue
        previous_window = selected

        line = fit_log_slope(times[selected], residual[selected])
        if next_mu is None:
            verdict, message = VERDICT_FAIL, 'residual stands above the noise floor but no further rate exists'
        else:
            verdict, message = _verdict(line.slope, next_mu, next_zero, tolerance)
        logger.debug(f'u_{n}: slope {line.slope:.6g} over t in [{times[selected[0]]:.4g}, {times[selected[-1]]:.4g}]'
                     f' ({verdict})')
        fits.append(ResidualFit(n=n, mu=mu, next_mu=next_mu, next_zero=next_zero, slope=line.slope,
                                intercept=line.intercept, samples=line.samples,
                                window_start=float(times[selected[0]]), window_end=float(times[selected[-1]]),
                                tolerance=tolerance, improved=improved, verdict=verdict, message=message))

    caveat = None
    if series.policy == RESONANCE_ZERO and any(term.resonances for term in series.terms):
        caveat = ('resonant constants were set to zero; the series need not follow this trajectory '
                  'past the first resonant order')
    return VerificationReport(
        policy=series.policy, tol_abs=traj.tol_abs, tol_rel=traj.tol_rel, fit_window=window,
        lattice_window=series.lattice.window, caveat=caveat, fits=fits,
        unsolved=[term.n for term in series.terms[:n_max] if not term.solved], times=[float(t) for t in times],
        residual_norms=[[float(v) for v in stream] for stream in streams],
    )
