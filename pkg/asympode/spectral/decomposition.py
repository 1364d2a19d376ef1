from fractions import Fraction
from typing import Any, Dict, List, Sequence, Tuple
import logging
import numpy as np
from pydantic import BaseModel, ConfigDict

from ..base.rational import Number, format_fraction, snap, to_fraction
from .constants import (CLUSTER_TOL, COMPLEX_TOL, DEFAULT_SNAP_TOL, NORM_INFLATION,
                        NORM_PROBES, PROBE_SEED, RANK_TOL)
from .exceptions import (ComplexSpectrum, IndexOutOfRange, MalformedMatrix, NonPositiveSpectrum,
                         NotAnEigenvalue, NotDiagonalizable)

logger = logging.getLogger('SpectralDecomposition')

INVARIANT_TOL = 1e-10


class SpectralData(BaseModel):
    """Eigen-structure of a diagonalizable matrix A with positive real spectrum.

    Distinct eigenvalues are exact rationals whenever snapping succeeded; the
    `snapped` flags mark the ones that are carried as the exact value of their
    float instead.
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    dimension: int
    matrix: np.ndarray
    eigenvalues: Tuple[Fraction, ...]
    eigenvalues_float: Tuple[float, ...]
    distinct: Tuple[Fraction, ...]
    distinct_float: Tuple[float, ...]
    multiplicities: Tuple[int, ...]
    projections: Tuple[np.ndarray, ...]
    bases: Tuple[np.ndarray, ...]
    c0: float
    snapped: Tuple[bool, ...]

    @property
    def distinct_count(self) -> int:
        return len(self.distinct)

    @property
    def exact(self) -> bool:
        return all(self.snapped)

    def index_of(self, value: Fraction) -> int:
        """1-based position of value among the distinct eigenvalues."""
        for j, eigenvalue in enumerate(self.distinct, start=1):
            if eigenvalue == value:
                return j
        if not self.exact:
            for j, eigenvalue in enumerate(self.distinct_float, start=1):
                if abs(eigenvalue - float(value)) <= DEFAULT_SNAP_TOL * max(1.0, abs(eigenvalue)):
                    return j
        raise NotAnEigenvalue(f'{format_fraction(Fraction(value))} is not an eigenvalue of A')

    def projection(self, j: int) -> np.ndarray:
        if not 1 <= j <= self.distinct_count:
            raise IndexOutOfRange(f'Spectral block {j} outside 1..{self.distinct_count}')
        return self.projections[j - 1]


def parse_matrix(rows: Sequence[Sequence[Number]]) -> np.ndarray:
    errors = []
    try:
        height = len(rows)
        widths = {len(row) for row in rows}
    except TypeError as e:
        raise MalformedMatrix(['matrix must be a list of rows']) from e
    if height == 0 or widths != {height}:
        raise MalformedMatrix([f'matrix must be square, got {height} rows of widths {sorted(widths)}'])
    values = np.zeros((height, height))
    for i, row in enumerate(rows):
        for j, entry in enumerate(row):
            try:
                values[i, j] = float(to_fraction(entry))
            except ValueError as e:
                errors.append(f'matrix[{i}][{j}]: {e}')
    if errors:
        raise MalformedMatrix(errors)
    return values


def _clusters(values: np.ndarray, tol: float) -> List[List[int]]:
    order = np.argsort(values)
    groups: List[List[int]] = []
    for index in order:
        if groups and abs(values[index] - values[groups[-1][-1]]) <= tol:
            groups[-1].append(int(index))
        else:
            groups.append([int(index)])
    return groups


def norm_equivalence_constant(projections: Sequence[np.ndarray], probes: int = NORM_PROBES,
                              seed: int = PROBE_SEED) -> float:
    """c0 >= 1 with c0^-1 |x|^2 <= sum_j |R_j x|^2 <= c0 |x|^2 on random unit probes, inflated by 10%."""
    dimension = projections[0].shape[0]
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((probes, dimension))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    total = sum(np.sum((x @ R.T) ** 2, axis=1) for R in projections)
    worst = max(1.0, float(np.max(total)), float(np.max(1.0 / total)))
    return NORM_INFLATION * worst


def decompose(matrix: Any, snap_tol: float = DEFAULT_SNAP_TOL) -> SpectralData:
    """Eigenvalues, distinct eigenvalues and spectral projections of A."""
    A = matrix if isinstance(matrix, np.ndarray) else parse_matrix(matrix)
    A = np.array(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] == 0:
        raise MalformedMatrix([f'matrix must be square, got shape {A.shape}'])
    if not np.all(np.isfinite(A)):
        raise MalformedMatrix(['matrix entries must be finite'])
    d = A.shape[0]

    raw = np.linalg.eigvals(A)
    scale = max(1.0, float(np.max(np.abs(raw))))
    if np.any(np.abs(raw.imag) > COMPLEX_TOL * scale):
        raise ComplexSpectrum(f'A has nonreal eigenvalues: {raw}')
    values = raw.real

    distinct: List[Fraction] = []
    distinct_float: List[float] = []
    multiplicities: List[int] = []
    bases: List[np.ndarray] = []
    snapped: List[bool] = []
    for group in _clusters(values, CLUSTER_TOL * scale):
        estimate = float(np.mean(values[group]))
        if estimate <= snap_tol:
            raise NonPositiveSpectrum(f'A has a non-positive eigenvalue {estimate:.6g}')
        exact = snap(estimate, snap_tol)
        if exact is None:
            logger.warning(f'Eigenvalue {estimate!r} has no rational within {snap_tol}; carrying its float value')
            exact = Fraction(estimate)
        eigenvalue = float(exact)

        _, singular, vh = np.linalg.svd(A - eigenvalue * np.eye(d))
        null_dim = int(np.sum(singular <= RANK_TOL * scale))
        if null_dim < len(group):
            raise NotDiagonalizable(
                f'Eigenvalue {format_fraction(exact)} has multiplicity {len(group)} but only {null_dim} eigenvectors')
        basis = vh[d - len(group):]

        distinct.append(exact)
        distinct_float.append(eigenvalue)
        multiplicities.append(len(group))
        bases.append(basis)
        snapped.append(exact.denominator <= 10**6 and abs(float(exact) - estimate) <= snap_tol)

    S = np.vstack(bases).T
    if np.linalg.matrix_rank(S) < d:
        raise NotDiagonalizable('Eigenvectors of A do not span R^d')
    S_inv = np.linalg.inv(S)
    projections = []
    column = 0
    for basis in bases:
        width = basis.shape[0]
        projections.append(S[:, column:column + width] @ S_inv[column:column + width, :])
        column += width

    _check_projections(A, projections, distinct_float)

    eigenvalues: List[Fraction] = []
    for exact, count in zip(distinct, multiplicities):
        eigenvalues.extend([exact] * count)

    for projection in projections:
        projection.setflags(write=False)
    for basis in bases:
        basis.setflags(write=False)
    A.setflags(write=False)

    sd = SpectralData(
        dimension=d,
        matrix=A,
        eigenvalues=tuple(eigenvalues),
        eigenvalues_float=tuple(float(value) for value in eigenvalues),
        distinct=tuple(distinct),
        distinct_float=tuple(distinct_float),
        multiplicities=tuple(multiplicities),
        projections=tuple(projections),
        bases=tuple(bases),
        c0=norm_equivalence_constant(projections),
        snapped=tuple(snapped),
    )
    logger.debug(f'Decomposed {d}x{d} matrix: eigenvalues {[format_fraction(v) for v in distinct]}, c0={sd.c0:.4g}')
    return sd


def _check_projections(A: np.ndarray, projections: List[np.ndarray], eigenvalues: List[float]) -> None:
    d = A.shape[0]
    tol = INVARIANT_TOL * max(1.0, float(np.max(np.abs(A))))
    deviations = [float(np.max(np.abs(sum(projections) - np.eye(d))))]
    for i, R_i in enumerate(projections):
        deviations.append(float(np.max(np.abs(A @ R_i - eigenvalues[i] * R_i))))
        deviations.append(float(np.max(np.abs(R_i @ A - eigenvalues[i] * R_i))))
        for j, R_j in enumerate(projections):
            expected = R_j if i == j else np.zeros_like(R_j)
            deviations.append(float(np.max(np.abs(R_i @ R_j - expected))))
    worst = max(deviations)
    if worst > 1e-6 * max(1.0, float(np.max(np.abs(A)))):
        raise NotDiagonalizable(f'Spectral projections are inconsistent (deviation {worst:.3e}); A is too close to defective')
    if worst > tol:
        logger.warning(f'Spectral projections deviate by {worst:.3e} from their identities')


def project(sd: SpectralData, j: int, x: Sequence[float]) -> np.ndarray:
    """R_{lambda_j} x for the 1-based block index j."""
    return sd.projection(j) @ np.asarray(x, dtype=float)


def eigen_table(sd: SpectralData) -> List[Dict[str, Any]]:
    rows = []
    for j, (value, count, basis, exact) in enumerate(
            zip(sd.distinct, sd.multiplicities, sd.bases, sd.snapped), start=1):
        rows.append({
            'j': j,
            'eigenvalue': format_fraction(value) if exact else repr(float(value)),
            'multiplicity': count,
            'snapped': exact,
            'basis': [[float(entry) for entry in vector] for vector in basis],
        })
    return rows
