"""Dormand-Prince 5(4) embedded Runge-Kutta stepper with adaptive step size."""
from typing import Callable, Optional, Tuple
import logging
import numpy as np

# extended butcher table
C = np.array([0.0, 1/5, 3/10, 4/5, 8/9, 1.0, 1.0])
A = [
    [],
    [1/5],
    [3/40, 9/40],
    [44/45, -56/15, 32/9],
    [19372/6561, -25360/2187, 64448/6561, -212/729],
    [9017/3168, -355/33, 46732/5247, 49/176, -5103/18656],
    [35/384, 0.0, 500/1113, 125/192, -2187/6784, 11/84],
]
B = np.array([35/384, 0.0, 500/1113, 125/192, -2187/6784, 11/84, 0.0])
# coefficients for local truncation error estimate (5th minus embedded 4th order)
E = np.array([71/57600, 0.0, -71/16695, 71/1920, -17253/339200, 22/525, -1/40])

SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 5.0
ORDER = 5


class StepSizeUnderflow(Exception):
    """Raised when the step size falls below the minimum step"""
    pass


class DormandPrince:
    """Adaptive DOPRI5 stepper.

    rhs(t, y) returns dy/dt. scale(y_old, y_new) returns the per-component error
    scale; a step is accepted when the RMS of error/scale is at most one. The
    seventh stage of an accepted step is reused as the first stage of the next
    (first same as last).
    """

    def __init__(self, rhs: Callable[[float, np.ndarray], np.ndarray],
                 scale: Callable[[np.ndarray, np.ndarray], np.ndarray],
                 h_min: float = 1e-14):
        self.rhs = rhs
        self.scale = scale
        self.h_min = h_min
        self.accepted = 0
        self.rejected = 0
        self.evaluations = 0
        self._k_first: Optional[np.ndarray] = None

        self.logger = logging.getLogger('DormandPrince')

    def reset(self) -> None:
        self._k_first = None

    def _evaluate(self, t: float, y: np.ndarray) -> np.ndarray:
        self.evaluations += 1
        return self.rhs(t, y)

    def attempt(self, t: float, y: np.ndarray, h: float) -> Tuple[np.ndarray, float, np.ndarray, np.ndarray]:
        """One trial step; returns (y_new, error_norm, first_stage, last_stage)."""
        k = [self._k_first if self._k_first is not None else self._evaluate(t, y)]
        for stage in range(1, 7):
            increment = sum(a * k_j for a, k_j in zip(A[stage], k) if a)
            k.append(self._evaluate(t + C[stage] * h, y + h * increment))
        y_new = y + h * sum(b * k_j for b, k_j in zip(B, k) if b)
        error = h * sum(e * k_j for e, k_j in zip(E, k) if e)
        scale = self.scale(y, y_new)
        with np.errstate(divide='ignore', invalid='ignore'):
            ratio = np.where(scale > 0, error / scale, np.where(error == 0, 0.0, np.inf))
        norm = float(np.sqrt(np.mean(ratio ** 2)))
        return y_new, norm, k[0], k[6]

    def step(self, t: float, y: np.ndarray, h: float, h_max: float) -> Tuple[float, np.ndarray, float, float]:
        """Advance by one accepted step of size at most h_max.

        Returns (t_new, y_new, h_taken, h_next).
        """
        h = min(h, h_max)
        while True:
            if h < self.h_min:
                raise StepSizeUnderflow(f'Step size {h:.3e} below minimum {self.h_min:.3e} at t={t:.6g}')
            y_new, norm, first, last = self.attempt(t, y, h)
            if np.all(np.isfinite(y_new)) and norm <= 1.0:
                self.accepted += 1
                self._k_first = last
                factor = MAX_FACTOR if norm == 0 else min(MAX_FACTOR, max(MIN_FACTOR, SAFETY * norm ** (-1.0 / ORDER)))
                return t + h, y_new, h, h * factor
            self.rejected += 1
            self._k_first = first
            if not np.isfinite(norm):
                h *= MIN_FACTOR
            else:
                h *= max(MIN_FACTOR, SAFETY * norm ** (-1.0 / ORDER))
            self.logger.debug(f'Rejected step at t={t:.6g}, error norm {norm:.3e}, retrying with h={h:.3e}')
