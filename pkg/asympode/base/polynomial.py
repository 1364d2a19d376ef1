import numpy as np
from typing import Iterable, List, Sequence, Union


class VectorPolynomial:
    """R^d valued polynomial q(t) = sum_j c_j t^j.

    Coefficients are stored as a (D+1, d) float array, lowest power first. The
    trailing row is nonzero unless the polynomial is identically zero, in which
    case a single zero row is kept.
    """

    __slots__ = ('coefficients',)

    def __init__(self, coefficients: Union[np.ndarray, Sequence[Sequence[float]]]):
        array = np.array(coefficients, dtype=float)
        if array.ndim == 1:
            array = array.reshape(1, -1)
        if array.ndim != 2 or array.shape[0] == 0:
            raise ValueError(f'Expected a (degree+1, d) coefficient array, got shape {array.shape}')
        last = array.shape[0]
        while last > 1 and not np.any(array[last - 1]):
            last -= 1
        array = array[:last].copy()
        array.setflags(write=False)
        object.__setattr__(self, 'coefficients', array)

    def __setattr__(self, name, value):
        raise AttributeError('VectorPolynomial is immutable')

    @classmethod
    def zero(cls, dimension: int) -> 'VectorPolynomial':
        return cls(np.zeros((1, dimension)))

    @classmethod
    def constant(cls, vector: Iterable[float]) -> 'VectorPolynomial':
        return cls(np.asarray(list(vector), dtype=float).reshape(1, -1))

    @property
    def dimension(self) -> int:
        return self.coefficients.shape[1]

    @property
    def degree(self) -> int:
        return self.coefficients.shape[0] - 1

    def is_zero(self) -> bool:
        return not np.any(self.coefficients)

    def __call__(self, t):
        """Evaluate at a scalar t (returns a d-vector) or an array of times (returns (n, d))."""
        t_array = np.asarray(t, dtype=float)
        result = np.zeros(t_array.shape + (self.dimension,))
        for row in self.coefficients[::-1]:
            result = result * t_array[..., None] + row
        return result

    def __add__(self, other: 'VectorPolynomial') -> 'VectorPolynomial':
        size = max(self.coefficients.shape[0], other.coefficients.shape[0])
        out = np.zeros((size, self.dimension))
        out[:self.coefficients.shape[0]] += self.coefficients
        out[:other.coefficients.shape[0]] += other.coefficients
        return VectorPolynomial(out)

    def __sub__(self, other: 'VectorPolynomial') -> 'VectorPolynomial':
        return self + other.scale(-1.0)

    def __neg__(self) -> 'VectorPolynomial':
        return self.scale(-1.0)

    def scale(self, factor: float) -> 'VectorPolynomial':
        return VectorPolynomial(self.coefficients * float(factor))

    def __mul__(self, factor: float) -> 'VectorPolynomial':
        return self.scale(factor)

    __rmul__ = __mul__

    def transform(self, matrix: np.ndarray) -> 'VectorPolynomial':
        """Apply a d x d matrix to every coefficient."""
        return VectorPolynomial(self.coefficients @ np.asarray(matrix, dtype=float).T)

    def derivative(self) -> 'VectorPolynomial':
        if self.degree == 0:
            return VectorPolynomial.zero(self.dimension)
        powers = np.arange(1, self.degree + 1, dtype=float)[:, None]
        return VectorPolynomial(self.coefficients[1:] * powers)

    def antiderivative(self, constant: Iterable[float] = None) -> 'VectorPolynomial':
        """Antiderivative vanishing at 0, plus an optional constant vector."""
        out = np.zeros((self.degree + 2, self.dimension))
        powers = np.arange(1, self.degree + 2, dtype=float)[:, None]
        out[1:] = self.coefficients / powers
        if constant is not None:
            out[0] = np.asarray(list(constant), dtype=float)
        return VectorPolynomial(out)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.coefficients)))

    def to_list(self) -> List[List[float]]:
        return [[float(value) for value in row] for row in self.coefficients]

    @classmethod
    def from_list(cls, rows: Sequence[Sequence[float]]) -> 'VectorPolynomial':
        return cls(np.array(rows, dtype=float))

    def __eq__(self, other):
        if not isinstance(other, VectorPolynomial):
            return NotImplemented
        return self.coefficients.shape == other.coefficients.shape and bool(np.array_equal(self.coefficients, other.coefficients))

    def __hash__(self):
        return hash(self.coefficients.tobytes())

    def __repr__(self):
        return f'VectorPolynomial({self.to_list()})'


def polynomial_product(left: np.ndarray, right: np.ndarray) -> np.ndarray:
    """Convolve two coefficient stacks along their leading (power) axis.

    left has shape (a, ...) and right (b, ...) with broadcast-compatible tails;
    the result has shape (a + b - 1, ...).
    """
    size = left.shape[0] + right.shape[0] - 1
    tail = np.broadcast_shapes(left.shape[1:], right.shape[1:])
    out = np.zeros((size,) + tail)
    for i in range(left.shape[0]):
        out[i:i + right.shape[0]] += left[i] * right
    return out
