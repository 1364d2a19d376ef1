from typing import Sequence
import numpy as np
from pydantic import BaseModel, ConfigDict


class LineFit(BaseModel):
    """Least squares line  value ~ slope * t + intercept."""
    model_config = ConfigDict(frozen=True)

    slope: float
    intercept: float
    samples: int
    rms: float


def fit_line(t: Sequence[float], values: Sequence[float]) -> LineFit:
    t = np.asarray(t, dtype=float)
    values = np.asarray(values, dtype=float)
    if t.shape != values.shape or t.ndim != 1:
        raise ValueError(f'fit_line needs two equal length 1-d arrays, got {t.shape} and {values.shape}')
    if len(t) < 2:
        raise ValueError('fit_line needs at least two samples')
    X = np.vstack([np.ones_like(t), t]).T
    (intercept, slope), *_ = np.linalg.lstsq(X, values, rcond=None)
    residual = values - (intercept + slope * t)
    return LineFit(slope=float(slope), intercept=float(intercept), samples=len(t),
                   rms=float(np.sqrt(np.mean(residual ** 2))))


def fit_constant(values: np.ndarray) -> np.ndarray:
    """Least squares constant vector c for rows values[i] ~ c."""
    values = np.asarray(values, dtype=float)
    if values.ndim == 1:
        values = values[:, None]
    ones = np.ones((values.shape[0], 1))
    solution, *_ = np.linalg.lstsq(ones, values, rcond=None)
    return solution[0]
