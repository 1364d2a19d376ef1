from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Union
import json
import math

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from ..base.rational import Number, Rational
from ..dynamics.constants import DEFAULT_HORIZON, DEFAULT_SAMPLES, DEFAULT_TOL_ABS, DEFAULT_TOL_REL, DEFAULT_WINDOW_FRACTION
from ..dynamics.trajectory import Tolerances as IntegratorTolerances
from ..expansion.constants import RESONANCE_FIT
from ..report.constants import DEFAULT_FIT_WINDOW
from ..spectral.constants import DEFAULT_SNAP_TOL
from ..spectral.decomposition import SpectralData, decompose
from ..tensors.constants import DEFAULT_MAX_ORDER
from ..termlang.components import NonlinearitySpec
from ..termlang.grammar import parse, parse_structured
from .constants import DEFAULT_N_TERMS, DEFAULT_OUTPUT, DEFAULT_TABLE_COUNT, MAX_TERMS
from .exceptions import ProblemFileError


class Tolerances(BaseModel):
    """Integrator, eigenvalue snapping and fitting tolerances."""
    model_config = ConfigDict(frozen=True, extra='forbid')

    tol_abs: float = Field(DEFAULT_TOL_ABS, gt=0, lt=1)
    tol_rel: float = Field(DEFAULT_TOL_REL, gt=0, lt=1)
    snap: float = Field(DEFAULT_SNAP_TOL, gt=0, lt=1)
    window: float = Field(DEFAULT_WINDOW_FRACTION, gt=0, le=1)
    fit_window: float = Field(DEFAULT_FIT_WINDOW, gt=0, le=1)

    def integrator(self) -> IntegratorTolerances:
        return IntegratorTolerances(tol_abs=self.tol_abs, tol_rel=self.tol_rel)


class NonlinearityConfig(BaseModel):
    """Grammar text (one string or a list in increasing degree) or a structured spec dump."""
    model_config = ConfigDict(frozen=True, extra='forbid')

    terms: Optional[Union[str, List[str]]] = None
    spec: Optional[Dict[str, Any]] = None
    mode: Optional[Literal['h1', 'h2', 'remainder']] = None
    epsilon_bar: Optional[Rational] = None
    parameters: Dict[str, Rational] = {}
    require_even_norms: bool = False

    @model_validator(mode='after')
    def check_source(self) -> 'NonlinearityConfig':
        if (self.terms is None) == (self.spec is None):
            raise ValueError('give exactly one of "terms" and "spec"')
        return self

    def build(self, dimension: int) -> NonlinearitySpec:
        if self.spec is not None:
            return parse_structured(self.spec, dimension, self.parameters, self.require_even_norms)
        return parse(self.terms, dimension, self.parameters, mode=self.mode, epsilon_bar=self.epsilon_bar,
                     require_even_norms=self.require_even_norms)


class ProblemFile(BaseModel):
    model_config = ConfigDict(frozen=True, extra='forbid')

    matrix: List[List[Rational]]
    nonlinearity: NonlinearityConfig
    y0: List[float]
    horizon: float = Field(DEFAULT_HORIZON, gt=0, le=1e4)
    samples: int = Field(DEFAULT_SAMPLES, ge=100, le=10**6)
    n_terms: int = Field(DEFAULT_N_TERMS, ge=1, le=MAX_TERMS)
    count: int = Field(DEFAULT_TABLE_COUNT, ge=1, le=10**4)
    tolerances: Tolerances = Tolerances()
    resonance: Literal['zero', 'fit'] = RESONANCE_FIT
    max_order: int = Field(DEFAULT_MAX_ORDER, ge=1, le=32)
    output: str = DEFAULT_OUTPUT

    @field_validator('nonlinearity', mode='before')
    @classmethod
    def wrap_text(cls, value):
        if isinstance(value, (str, list)):
            return {'terms': value}
        return value

    @field_validator('y0')
    @classmethod
    def check_y0(cls, value: List[float]) -> List[float]:
        if not all(math.isfinite(v) for v in value):
            raise ValueError('initial condition entries must be finite')
        return value

    @model_validator(mode='after')
    def check_shapes(self) -> 'ProblemFile':
        d = len(self.matrix)
        if d == 0 or any(len(row) != d for row in self.matrix):
            raise ValueError(f'matrix must be square, got {d} rows of widths {sorted({len(r) for r in self.matrix})}')
        if len(self.y0) != d:
            raise ValueError(f'y0 has {len(self.y0)} entries, the matrix is {d}x{d}')
        return self

    @property
    def dimension(self) -> int:
        return len(self.matrix)

    def spectral(self) -> SpectralData:
        return decompose([list(row) for row in self.matrix], self.tolerances.snap)

    def spec(self) -> NonlinearitySpec:
        return self.nonlinearity.build(self.dimension)

    def resolved(self) -> str:
        """Every field, defaults included, as stable JSON."""
        return json.dumps(self.model_dump(mode='json'), indent=2, sort_keys=True) + '\n'


def _messages(error: ValidationError) -> List[str]:
    return [f'{".".join(str(part) for part in item["loc"]) or "problem"}: {item["msg"]}' for item in error.errors()]


def validate_problem(data: Any) -> ProblemFile:
    try:
        return ProblemFile.model_validate(data)
    except ValidationError as e:
        raise ProblemFileError(_messages(e)) from e


def load_problem(path: Union[str, Path]) -> ProblemFile:
    try:
        text = Path(path).read_text(encoding='utf-8')
    except OSError as e:
        raise ProblemFileError([f'{path}: {e.strerror}']) from e
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ProblemFileError([f'{path}: line {e.lineno}, column {e.colno}: {e.msg}']) from e
    return validate_problem(data)


def with_overrides(problem: ProblemFile, **overrides: Optional[Number]) -> ProblemFile:
    """Problem with command line values replacing file values; None leaves a field as it is.

    tol_abs, tol_rel and snap_tol address the tolerances section.
    """
    data = problem.model_dump(mode='json')
    nested = {'tol_abs': 'tol_abs', 'tol_rel': 'tol_rel', 'snap_tol': 'snap'}
    for key, value in overrides.items():
        if value is None:
            continue
        if key in nested:
            data['tolerances'][nested[key]] = value
        else:
            data[key] = value
    return validate_problem(data)
