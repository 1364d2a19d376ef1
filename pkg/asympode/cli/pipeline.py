from pathlib import Path
from typing import Optional, Tuple, Union
import json
import logging

from ..base.exceptions import AsympodeError, InapplicableError, InputError, VerificationError
from ..dynamics.first_approx import FirstApproximation, decay_bounds_check, first_approximation
from ..dynamics.trajectory import Trajectory, from_csv, integrate, to_csv
from ..expansion.series import ExpansionSeries, expand, series_from_json, series_to_json
from ..exponents.lattice import ExponentLattice, build_lattice, format_table
from ..report.emitter import emit
from ..report.verification import VerificationReport, verify
from ..spectral.decomposition import SpectralData, eigen_table
from ..tensors.derivative import dump
from ..tensors.provider import TensorProvider
from ..termlang.components import NonlinearitySpec
from ..termlang.smoothness import classify
from .constants import (ARTIFACTS, CLASSIFICATION_FILE, CONFIG_FILE, DECAY_FILE, ERROR_FILE, EXIT_INAPPLICABLE,
                        EXIT_INPUT, EXIT_OK, EXIT_VERIFICATION, FIRST_APPROX_FILE, LATTICE_FILE, REPORT_FILE,
                        RESIDUALS_FILE, SERIES_FILE, SPECTRAL_FILE, TENSORS_FILE, TRAJECTORY_FILE)
from .exceptions import MissingArtifact
from .problem import ProblemFile


def exit_code(error: Exception) -> int:
    if isinstance(error, InapplicableError):
        return EXIT_INAPPLICABLE
    if isinstance(error, VerificationError):
        return EXIT_VERIFICATION
    return EXIT_INPUT


def record_error(out: Path, stage: str, error: Exception) -> int:
    """Write error.json into out and return the exit code for error."""
    code = exit_code(error)
    out.mkdir(parents=True, exist_ok=True)
    text = json.dumps({'stage': stage, 'type': type(error).__name__, 'message': str(error), 'exit_code': code},
                      indent=2, sort_keys=True)
    (out / ERROR_FILE).write_text(text + '\n', encoding='utf-8')
    return code


class Pipeline:
    """The stages of one problem, each reading earlier artifacts from the run directory and writing its own."""

    def __init__(self, problem: ProblemFile, out: Union[str, Path] = None, dump_tensors: bool = False):
        self.problem = problem
        self.out = Path(out if out is not None else problem.output)
        self.dump_tensors = dump_tensors
        self.stage = 'setup'
        self._sd: Optional[SpectralData] = None
        self._spec: Optional[NonlinearitySpec] = None

        self.logger = logging.getLogger('Pipeline')

    # -- run directory ---------------------------------------------------------

    def prepare(self, clean: bool = False) -> None:
        self.out.mkdir(parents=True, exist_ok=True)
        if clean:
            for name in ARTIFACTS:
                (self.out / name).unlink(missing_ok=True)
        else:
            (self.out / ERROR_FILE).unlink(missing_ok=True)
        self.write(CONFIG_FILE, self.problem.resolved())

    def write(self, name: str, text: str) -> Path:
        path = self.out / name
        path.write_text(text, encoding='utf-8')
        self.logger.debug(f'Wrote {path}')
        return path

    def read(self, name: str, producer: str) -> str:
        path = self.out / name
        if not path.exists():
            raise MissingArtifact(name, producer)
        return path.read_text(encoding='utf-8')

    def write_json(self, name: str, data) -> Path:
        return self.write(name, json.dumps(data, indent=2, sort_keys=True) + '\n')

    def record_error(self, error: Exception) -> int:
        return record_error(self.out, self.stage, error)

    # -- inputs ----------------------------------------------------------------

    @property
    def sd(self) -> SpectralData:
        if self._sd is None:
            self._sd = self.problem.spectral()
        return self._sd

    @property
    def spec(self) -> NonlinearitySpec:
        if self._spec is None:
            self._spec = self.problem.spec()
        return self._spec

    # -- stages ----------------------------------------------------------------

    def spectral(self) -> SpectralData:
        self.stage = 'spectral'
        sd = self.sd
        self.write_json(SPECTRAL_FILE, {'c0': sd.c0, 'exact': sd.exact, 'eigenvalues': eigen_table(sd)})
        return sd

    def simulate(self) -> Trajectory:
        self.stage = 'simulate'
        problem = self.problem
        traj = integrate(self.sd, self.spec, problem.y0, problem.horizon, problem.tolerances.integrator(),
                         problem.samples)
        self.write(TRAJECTORY_FILE, to_csv(traj))
        return traj

    def load(self, name: str, producer: str, parser):
        """Parse an artifact, reporting a corrupt file as an input error."""
        text = self.read(name, producer)
        try:
            return parser(text)
        except ValueError as e:
            raise InputError([f'{name}: {e}'], msg='Corrupt artifact') from e

    def trajectory(self) -> Trajectory:
        return self.load(TRAJECTORY_FILE, 'simulate', from_csv)

    def first_approx(self, traj: Trajectory = None) -> FirstApproximation:
        self.stage = 'first-approx'
        traj = traj if traj is not None else self.trajectory()
        window = self.problem.tolerances.window
        first = first_approximation(self.sd, traj, window)
        self.write(FIRST_APPROX_FILE, first.model_dump_json(indent=2) + '\n')
        self.write(DECAY_FILE, decay_bounds_check(self.sd, traj, window).model_dump_json(indent=2) + '\n')
        return first

    def first(self) -> FirstApproximation:
        return self.load(FIRST_APPROX_FILE, 'first-approx', FirstApproximation.model_validate_json)

    def exponents(self, count: int = None, fmt: str = 'text') -> Tuple[ExponentLattice, str]:
        """Lattice at lam* when a first approximation exists, at the smallest eigenvalue otherwise."""
        self.stage = 'exponents'
        path = self.out / FIRST_APPROX_FILE
        lam = self.first().lam_star if path.exists() else self.sd.distinct[0]
        spec = self.spec
        degrees = spec.alphas() if spec.finite else (lambda j: spec.alphas(j))
        lattice = build_lattice(self.sd, lam, degrees, count or self.problem.count)
        self.write(LATTICE_FILE, emit(lattice, 'json'))
        return lattice, format_table(lattice, fmt)

    def expand(self, first: FirstApproximation = None, traj: Trajectory = None) -> ExpansionSeries:
        self.stage = 'expand'
        first = first if first is not None else self.first()
        problem = self.problem
        if traj is None and problem.resonance == 'fit':
            traj = self.trajectory()
        self.write_json(CLASSIFICATION_FILE, classify(self.spec).model_dump(mode='json'))
        series = expand(self.sd, self.spec, first, problem.n_terms, problem.resonance, traj, problem.max_order)
        self.write(SERIES_FILE, series_to_json(series))
        self.write(LATTICE_FILE, emit(series.lattice, 'json'))
        if self.dump_tensors:
            self.write_json(TENSORS_FILE, self.tensors(first))
        return series

    def tensors(self, first: FirstApproximation) -> list:
        provider = TensorProvider(self.spec, first.xi, self.problem.max_order)
        blocks = provider.block_count if provider.block_count is not None else self.problem.n_terms
        out = []
        for r in range(1, blocks + 1):
            orders = [provider.tensor(r, m) for m in range(0, min(3, self.problem.max_order) + 1)]
            out.append({'block': r, 'degree': str(provider.block(r).degree), 'tensors': dump(orders)})
        return out

    def verify(self, traj: Trajectory = None, series: ExpansionSeries = None) -> VerificationReport:
        self.stage = 'verify'
        traj = traj if traj is not None else self.trajectory()
        series = series if series is not None else self.load(SERIES_FILE, 'expand', series_from_json)
        report = verify(traj, series, window=self.problem.tolerances.fit_window)
        emit(report, 'json', self.out / REPORT_FILE)
        emit(report, 'csv', self.out / RESIDUALS_FILE)
        return report

    def run(self) -> VerificationReport:
        self.prepare(clean=True)
        self.spectral()
        traj = self.simulate()
        first = self.first_approx(traj)
        series = self.expand(first, traj)
        return self.verify(traj, series)


def run_pipeline(problem: ProblemFile, out: Union[str, Path] = None, dump_tensors: bool = False) -> Tuple[int, Path]:
    """All stages end to end; returns the exit code and the run directory."""
    pipeline = Pipeline(problem, out, dump_tensors)
    logger = pipeline.logger
    try:
        report = pipeline.run()
    except AsympodeError as e:
        logger.error(f'Stage {pipeline.stage} failed: {e}')
        return pipeline.record_error(e), pipeline.out
    if not report.passed:
        error = VerificationError(report.failure())
        logger.error(str(error))
        return pipeline.record_error(error), pipeline.out
    logger.info(f'All checks passed; artifacts in {pipeline.out}')
    return EXIT_OK, pipeline.out
