"""Taylor derivative tensors D^m F_r(xi) / m! of homogeneous components.

A symmetric m-linear tensor is stored by its canonical entries T_I, one per
sorted index tuple I = (i_1 <= ... <= i_m), each a d-vector. With a the
exponent tuple counting the occurrences in I and c_a the Taylor coefficient
of h^a,

    T_I = c_a * a! / m!

so that T(h, ..., h) = sum_a c_a h^a.
"""
from concurrent.futures import ThreadPoolExecutor
from functools import lru_cache
from typing import Any, Dict, List, Sequence, Tuple, Union
import itertools
import logging
import math
import numpy as np
from pydantic import BaseModel, ConfigDict, PrivateAttr

from ..base.jet import Jet, factorial_ratio
from ..base.polynomial import VectorPolynomial
from ..base.workers import worker_count
from ..termlang.components import HomogeneousComponent, HomogeneousSum
from .constants import DEFAULT_MAX_ORDER
from .exceptions import ArityMismatch, OrderOverflow, SingularBasePoint

logger = logging.getLogger(__name__)

Block = Union[HomogeneousComponent, HomogeneousSum]


@lru_cache(maxsize=128)
def canonical_indices(dimension: int, order: int) -> Tuple[Tuple[int, ...], ...]:
    """Sorted index tuples of an order-m symmetric tensor, lexicographic."""
    return tuple(itertools.combinations_with_replacement(range(dimension), order))


def exponent_of(index: Sequence[int], dimension: int) -> Tuple[int, ...]:
    counts = [0] * dimension
    for i in index:
        counts[i] += 1
    return tuple(counts)


@lru_cache(maxsize=128)
def _permutation_counts(dimension: int, order: int) -> np.ndarray:
    """m! / a! for every canonical index."""
    counts = np.array([1.0 / float(factorial_ratio(exponent_of(index, dimension)))
                       for index in canonical_indices(dimension, order)])
    counts.setflags(write=False)
    return counts


@lru_cache(maxsize=64)
def _dense_positions(dimension: int, order: int) -> np.ndarray:
    """Position of the canonical entry for every full index, in C order."""
    if order == 0:
        return np.zeros(1, dtype=np.int64)
    weights = dimension ** np.arange(order - 1, -1, -1)
    canonical = np.array(canonical_indices(dimension, order), dtype=np.int64).reshape(-1, order)
    full = np.array(list(itertools.product(range(dimension), repeat=order)), dtype=np.int64).reshape(-1, order)
    positions = np.searchsorted(canonical @ weights, np.sort(full, axis=1) @ weights)
    positions.setflags(write=False)
    return positions


class DerivativeTensor(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    order: int
    base: Tuple[float, ...]
    values: np.ndarray
    norm_bound: float

    _dense: Any = PrivateAttr(default=None)

    @property
    def dimension(self) -> int:
        return len(self.base)

    @property
    def indices(self) -> Tuple[Tuple[int, ...], ...]:
        return canonical_indices(self.dimension, self.order)

    def entry(self, index: Sequence[int]) -> np.ndarray:
        """Entry at any (unsorted) index tuple."""
        key = tuple(sorted(index))
        return self.values[self.indices.index(key)]

    def dense(self) -> np.ndarray:
        """Full array of shape (d,) * m + (d,)."""
        if self._dense is None:
            d = self.dimension
            dense = self.values[_dense_positions(d, self.order)].reshape((d,) * self.order + (d,))
            dense.setflags(write=False)
            self._dense = dense
        return self._dense

    def __add__(self, other: 'DerivativeTensor') -> 'DerivativeTensor':
        return from_values(self.order, self.base, self.values + other.values)


def from_values(order: int, base: Sequence[float], values: np.ndarray) -> DerivativeTensor:
    counts = _permutation_counts(len(base), order)
    values = np.array(values, dtype=float)
    values.setflags(write=False)
    norm = math.sqrt(float(np.sum(counts * np.sum(values * values, axis=1))))
    return DerivativeTensor(order=order, base=tuple(float(v) for v in base), values=values, norm_bound=norm)


def check_base_point(block: Block, xi: Sequence[float]) -> None:
    components = block.components if isinstance(block, HomogeneousSum) else (block,)
    for component in components:
        factor = component.offending_factor(xi)
        if factor is not None:
            raise SingularBasePoint(factor.render())


def block_jets(block: Block, xi: Sequence[float], order: int) -> List[Jet]:
    """Per output coordinate Taylor jets of a component or a block at xi."""
    if isinstance(block, HomogeneousComponent):
        return block.jets(xi, order)
    components = block.components
    if len(components) == 1:
        return components[0].jets(xi, order)
    with ThreadPoolExecutor(max_workers=min(worker_count(), len(components))) as pool:
        per_component = list(pool.map(lambda component: component.jets(xi, order), components))
    total = per_component[0]
    for jets in per_component[1:]:
        total = [a + b for a, b in zip(total, jets)]
    return total


def tensor_from_jets(jets: Sequence[Jet], xi: Sequence[float], order: int) -> DerivativeTensor:
    d = len(xi)
    rows = []
    for index in canonical_indices(d, order):
        exponent = exponent_of(index, d)
        ratio = float(factorial_ratio(exponent))
        rows.append([float(jet.coefficients[exponent]) * ratio for jet in jets])
    return from_values(order, xi, np.array(rows, dtype=float).reshape(-1, d))


def taylor_tensors(component: Block, xi: Sequence[float], max_order: int,
                   cap: int = DEFAULT_MAX_ORDER) -> List[DerivativeTensor]:
    """Tensors of orders 0..max_order at xi.

    Truncation contract: F(xi + h) - sum_m T_m(h, ..., h) = O(|h| ** (max_order + 1)).
    """
    if max_order < 0:
        raise ValueError('max_order must be nonnegative')
    if max_order > cap:
        raise OrderOverflow(f'order {max_order} exceeds the cap {cap}')
    xi = tuple(float(v) for v in xi)
    check_base_point(component, xi)
    jets = block_jets(component, xi, max_order)
    return [tensor_from_jets(jets, xi, m) for m in range(max_order + 1)]


def tensors_for_sum(block: HomogeneousSum, xi: Sequence[float], max_order: int,
                    cap: int = DEFAULT_MAX_ORDER) -> List[DerivativeTensor]:
    """Tensors of the sum of all components of one degree."""
    return taylor_tensors(block, xi, max_order, cap)


def apply_to_polynomials(tensor: DerivativeTensor, arguments: Sequence[VectorPolynomial]) -> VectorPolynomial:
    """T(q_1(t), ..., q_m(t)) expanded over the polynomial coefficients."""
    if len(arguments) != tensor.order:
        raise ArityMismatch(f'tensor of order {tensor.order} applied to {len(arguments)} arguments')
    current = tensor.dense()[None, ...]
    for argument in arguments:
        coefficients = argument.coefficients
        size = current.shape[0]
        out = np.zeros((size + coefficients.shape[0] - 1,) + current.shape[2:])
        for q, row in enumerate(coefficients):
            out[q:q + size] += np.tensordot(current, row, axes=([1], [0]))
        current = out
    return VectorPolynomial(current)


def contract(tensor: DerivativeTensor, vectors: Sequence[Sequence[float]]) -> np.ndarray:
    """T(y_1, ..., y_m) for constant vectors."""
    if len(vectors) != tensor.order:
        raise ArityMismatch(f'tensor of order {tensor.order} applied to {len(vectors)} arguments')
    current = tensor.dense()
    for vector in vectors:
        current = np.tensordot(np.asarray(vector, dtype=float), current, axes=([0], [0]))
    return np.asarray(current)


def contract_diagonal(tensor: DerivativeTensor, v: Sequence[float]) -> np.ndarray:
    """T(v, ..., v) = sum over a of c_a v^a."""
    v = np.asarray(v, dtype=float)
    d = tensor.dimension
    monomials = np.array([np.prod(v ** np.array(exponent_of(index, d)))
                          for index in tensor.indices])
    weights = _permutation_counts(d, tensor.order) * monomials
    return weights @ tensor.values


def dump(tensors: Sequence[DerivativeTensor]) -> List[Dict[str, Any]]:
    """JSON-able form: order, base point, canonical 1-based index tuples, norm bound."""
    out = []
    for tensor in tensors:
        out.append({
            'order': tensor.order,
            'base': list(tensor.base),
            'norm_bound': tensor.norm_bound,
            'entries': [
                {'index': [i + 1 for i in index], 'value': [float(v) for v in row]}
                for index, row in zip(tensor.indices, tensor.values)
            ],
        })
    return out
