from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Sequence
import asyncio
import functools
import io
import logging
import math
import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..base.integrator import DormandPrince, StepSizeUnderflow
from ..base.workers import worker_count
from ..spectral.decomposition import SpectralData
from ..termlang.components import NonlinearitySpec, evaluate_model, evaluate_scaled
from .constants import (DEFAULT_H_MIN, DEFAULT_HORIZON, DEFAULT_SAMPLES, DEFAULT_TOL_ABS, DEFAULT_TOL_REL,
                        GROWTH_LIMIT, LOG_PHASE_LOG, MAGNITUDE_FLOOR_LOG, NON_DECAY_FACTOR, TERMINATION_FLOOR,
                        TERMINATION_GROWTH, TERMINATION_HORIZON)
from .exceptions import DynamicsError, StepFailure, ZeroInitialCondition

METHOD = 'dopri5'

# renormalize the direction once its length drifts this far from one
DIRECTION_DRIFT = 1e-8


class Tolerances(BaseModel):
    model_config = ConfigDict(frozen=True)

    tol_abs: float = Field(DEFAULT_TOL_ABS, gt=0, lt=1)
    tol_rel: float = Field(DEFAULT_TOL_REL, gt=0, lt=1)
    h_min: float = Field(DEFAULT_H_MIN, gt=0)


class Trajectory(BaseModel):
    """Samples of y(t) stored as log |y| and y / |y| so that tiny states keep their precision."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    times: np.ndarray
    log_norms: np.ndarray
    directions: np.ndarray
    dirichlet: np.ndarray
    method: str = METHOD
    tol_abs: float = DEFAULT_TOL_ABS
    tol_rel: float = DEFAULT_TOL_REL
    horizon: float = DEFAULT_HORIZON
    accepted: int = 0
    rejected: int = 0
    evaluations: int = 0
    termination: str = TERMINATION_HORIZON
    non_decay: bool = False
    log_phase_start: Optional[float] = None

    @property
    def dimension(self) -> int:
        return self.directions.shape[1]

    @property
    def norms(self) -> np.ndarray:
        return np.exp(self.log_norms)

    @property
    def states(self) -> np.ndarray:
        return self.norms[:, None] * self.directions

    def __len__(self) -> int:
        return len(self.times)

    def scaled(self, rate: float) -> np.ndarray:
        """exp(rate t) y(t) without forming y(t)."""
        return np.exp(float(rate) * self.times + self.log_norms)[:, None] * self.directions

    def tail(self, fraction: float) -> slice:
        """Samples of the last `fraction` of the time span."""
        start = self.times[-1] - fraction * (self.times[-1] - self.times[0])
        return slice(int(np.searchsorted(self.times, start)), len(self.times))


def dirichlet_quotient(sd: SpectralData, y: Sequence[float]) -> np.ndarray:
    """(A y . y) / |y|^2, for one state or a stack of states."""
    y = np.asarray(y, dtype=float)
    return np.sum((y @ sd.matrix.T) * y, axis=-1) / np.sum(y * y, axis=-1)


class TrajectoryIntegrator:
    """Adaptive DOPRI5 integration of y' + A y = F(y) on a uniform output grid.

    Steps are clipped to land on grid points. Once |y| drops below the log
    phase threshold the state becomes (log |y|, y / |y|) and F is evaluated
    through homogeneity.
    """

    def __init__(self, sd: SpectralData, spec: NonlinearitySpec, tolerances: Tolerances = None):
        self.sd = sd
        self.spec = spec
        self.tolerances = tolerances if tolerances else Tolerances()
        self.A = np.asarray(sd.matrix, dtype=float)

        self.logger = logging.getLogger('TrajectoryIntegrator')

    def linear_rhs(self, t: float, y: np.ndarray) -> np.ndarray:
        return -self.A @ y + evaluate_model(self.spec, y)

    def linear_scale(self, y_old: np.ndarray, y_new: np.ndarray) -> np.ndarray:
        magnitude = max(float(np.linalg.norm(y_old)), float(np.linalg.norm(y_new)))
        return self.tolerances.tol_abs * magnitude + self.tolerances.tol_rel * np.maximum(np.abs(y_old), np.abs(y_new))

    def log_rhs(self, t: float, z: np.ndarray) -> np.ndarray:
        log_r, u = z[0], z[1:]
        g = -self.A @ u + evaluate_scaled(self.spec, u, log_r)
        rate = float(u @ g) / float(u @ u)
        return np.concatenate([[rate], g - rate * u])

    def log_scale(self, z_old: np.ndarray, z_new: np.ndarray) -> np.ndarray:
        tol = self.tolerances
        scale = tol.tol_abs + tol.tol_rel * np.maximum(np.abs(z_old), np.abs(z_new))
        scale[0] = tol.tol_rel
        return scale

    def run(self, y0: Sequence[float], horizon: float = DEFAULT_HORIZON, samples: int = DEFAULT_SAMPLES) -> Trajectory:
        y = np.asarray(y0, dtype=float)
        norm0 = float(np.linalg.norm(y))
        if norm0 == 0 or not math.isfinite(norm0):
            raise ZeroInitialCondition([f'initial condition must be a finite nonzero vector, got {list(y)}'])
        if samples < 2 or horizon <= 0:
            raise ValueError('need a positive horizon and at least two samples')

        grid = np.linspace(0.0, float(horizon), samples)
        times = [0.0]
        log_norms = [math.log(norm0)]
        directions = [y / norm0]

        stepper = DormandPrince(self.linear_rhs, self.linear_scale, h_min=self.tolerances.h_min)
        log_phase = False
        log_phase_start = None
        state = y
        t = 0.0
        h = 1e-3 / max(1.0, float(max(self.sd.distinct_float)))
        termination = TERMINATION_HORIZON
        non_decay = False
        counters = [0, 0, 0]

        try:
            for target in grid[1:]:
                while target - t > 1e-12 * max(1.0, target):
                    remaining = target - t
                    clipped = h > remaining
                    t, state, taken, h_next = stepper.step(t, state, h, remaining)
                    # a step shortened to hit the grid does not shrink the next one
                    h = max(h, h_next) if clipped and taken == remaining else h_next
                    if not log_phase and float(np.linalg.norm(state)) < math.exp(LOG_PHASE_LOG):
                        counters = [c + s for c, s in zip(counters, (stepper.accepted, stepper.rejected, stepper.evaluations))]
                        norm = float(np.linalg.norm(state))
                        state = np.concatenate([[math.log(norm)], state / norm])
                        stepper = DormandPrince(self.log_rhs, self.log_scale, h_min=self.tolerances.h_min)
                        log_phase = True
                        log_phase_start = t
                        self.logger.debug(f'Switched to log magnitude phase at t={t:.6g}')
                    elif log_phase:
                        length = float(np.linalg.norm(state[1:]))
                        if abs(length - 1.0) > DIRECTION_DRIFT:
                            state = np.concatenate([[state[0] + math.log(length)], state[1:] / length])
                            stepper.reset()
                t = float(target)

                if log_phase:
                    log_norm, direction = float(state[0]), state[1:] / np.linalg.norm(state[1:])
                else:
                    norm = float(np.linalg.norm(state))
                    log_norm, direction = math.log(norm), state / norm
                times.append(t)
                log_norms.append(log_norm)
                directions.append(direction)

                if log_norm > log_norms[0] + math.log(NON_DECAY_FACTOR) and not non_decay:
                    non_decay = True
                    self.logger.warning(f'|y| grew beyond {NON_DECAY_FACTOR:g} |y0| at t={t:.6g}')
                if log_norm > log_norms[0] + math.log(GROWTH_LIMIT):
                    termination = TERMINATION_GROWTH
                    break
                if log_norm < MAGNITUDE_FLOOR_LOG:
                    termination = TERMINATION_FLOOR
                    break
        except StepSizeUnderflow as e:
            self.logger.error(f'Integration failed at t={t:.6g}', exc_info=True)
            raise StepFailure(t) from e
        except (FloatingPointError, OverflowError, ValueError) as e:
            self.logger.error(f'Integration failed at t={t:.6g}', exc_info=True)
            raise DynamicsError(f'integration failed at t={t:.6g}: {e}') from e

        counters = [c + s for c, s in zip(counters, (stepper.accepted, stepper.rejected, stepper.evaluations))]
        directions = np.array(directions)
        trajectory = Trajectory(
            times=np.array(times), log_norms=np.array(log_norms), directions=directions,
            dirichlet=dirichlet_quotient(self.sd, directions), tol_abs=self.tolerances.tol_abs,
            tol_rel=self.tolerances.tol_rel, horizon=float(horizon), accepted=counters[0], rejected=counters[1],
            evaluations=counters[2], termination=termination, non_decay=non_decay, log_phase_start=log_phase_start,
        )
        self.logger.debug(f'Integrated to t={t:.6g} ({termination}): {counters[0]} steps, {counters[1]} rejected, '
                          f'|y| from {norm0:.3e} to exp({log_norms[-1]:.6g})')
        return trajectory


def integrate(sd: SpectralData, spec: NonlinearitySpec, y0: Sequence[float], horizon: float = DEFAULT_HORIZON,
              tolerances: Tolerances = None, samples: int = DEFAULT_SAMPLES) -> Trajectory:
    return TrajectoryIntegrator(sd, spec, tolerances).run(y0, horizon, samples)


async def integrate_many(sd: SpectralData, spec: NonlinearitySpec, y0s: Sequence[Sequence[float]],
                         horizon: float = DEFAULT_HORIZON, tolerances: Tolerances = None,
                         samples: int = DEFAULT_SAMPLES) -> List[Trajectory]:
    """Integrate several initial conditions concurrently; results follow the input order."""
    loop = asyncio.get_running_loop()
    workers = worker_count()
    semaphore = asyncio.Semaphore(workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        async def one(y0):
            async with semaphore:
                job = functools.partial(integrate, sd, spec, y0, horizon, tolerances, samples)
                return await loop.run_in_executor(pool, job)
        return list(await asyncio.gather(*(one(y0) for y0 in y0s)))


def to_csv(traj: Trajectory) -> str:
    """Columns t, y_1..y_d, |y|, dirichlet_quotient after '#' metadata lines."""
    out = io.StringIO()
    out.write(f'# method={traj.method} tol_abs={traj.tol_abs!r} tol_rel={traj.tol_rel!r} horizon={traj.horizon!r} '
              f'termination={traj.termination} non_decay={traj.non_decay}\n')
    log_phase = 'none' if traj.log_phase_start is None else repr(traj.log_phase_start)
    out.write(f'# accepted={traj.accepted} rejected={traj.rejected} evaluations={traj.evaluations} '
              f'log_phase_start={log_phase}\n')
    header = ['t'] + [f'y_{i + 1}' for i in range(traj.dimension)] + ['norm', 'dirichlet_quotient']
    out.write(','.join(header) + '\n')
    states = traj.states
    norms = traj.norms
    for i, t in enumerate(traj.times):
        row = [repr(float(t))] + [repr(float(v)) for v in states[i]] + [repr(float(norms[i])), repr(float(traj.dirichlet[i]))]
        out.write(','.join(row) + '\n')
    return out.getvalue()


def _metadata(line: str) -> dict:
    fields = {}
    for item in line.lstrip('#').split():
        key, _, value = item.partition('=')
        fields[key] = value
    return fields


def from_csv(text: str) -> Trajectory:
    """Inverse of to_csv."""
    lines = [line for line in text.splitlines() if line.strip()]
    meta = {}
    while lines and lines[0].startswith('#'):
        meta.update(_metadata(lines.pop(0)))
    if not lines:
        raise ValueError('trajectory csv has no header')
    header = lines[0].split(',')
    d = len(header) - 3
    rows = np.array([[float(v) for v in line.split(',')] for line in lines[1:]])
    if rows.ndim != 2 or rows.shape[1] != d + 3 or d < 1:
        raise ValueError('trajectory csv rows do not match its header')
    log_phase = meta.get('log_phase_start', 'none')
    log_phase_start = None if log_phase == 'none' else float(log_phase)
    states = rows[:, 1:1 + d]
    norms = np.linalg.norm(states, axis=1)
    return Trajectory(
        times=rows[:, 0], log_norms=np.log(norms), directions=states / norms[:, None], dirichlet=rows[:, -1],
        method=meta.get('method', METHOD), tol_abs=float(meta.get('tol_abs', DEFAULT_TOL_ABS)),
        tol_rel=float(meta.get('tol_rel', DEFAULT_TOL_REL)), horizon=float(meta.get('horizon', rows[-1, 0])),
        accepted=int(meta.get('accepted', 0)), rejected=int(meta.get('rejected', 0)),
        evaluations=int(meta.get('evaluations', 0)), log_phase_start=log_phase_start,
        termination=meta.get('termination', TERMINATION_HORIZON), non_decay=meta.get('non_decay') == 'True',
    )
