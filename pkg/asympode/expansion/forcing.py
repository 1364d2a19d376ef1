"""The forcing polynomial J_n of the n-th expansion term.

J_n collects, over blocks r and orders m, the tensors D^m F_r(xi*) / m!
applied to q_{k_1}, ..., q_{k_m} with 2 <= k_j <= n - 1 and

    mu~_{k_1} + ... + mu~_{k_m} + alpha_r lam* = mu~_n.

For m = 0 this is F_r(xi*) when alpha_r lam* = mu~_n.
"""
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from itertools import product
from typing import Iterator, List, Sequence, Tuple
import logging
import math

from ..base.polynomial import VectorPolynomial
from ..base.workers import worker_count
from ..exponents.lattice import ExponentLattice
from ..tensors.derivative import DerivativeTensor, apply_to_polynomials
from ..tensors.provider import TensorProvider
from .exceptions import MissingPredecessor

logger = logging.getLogger(__name__)

# (weight, tensor, 1-based term indices)
Contribution = Tuple[int, DerivativeTensor, Tuple[int, ...]]


def _close(a: Fraction, b: Fraction, tol: float) -> bool:
    return a == b if tol == 0 else abs(a - b) <= tol


def active_blocks(lattice: ExponentLattice, provider: TensorProvider, target: Fraction, tol: float = 0) -> Iterator[int]:
    """Blocks r with alpha_r lam* <= target, in increasing r."""
    lam = lattice.base_rate
    limit = provider.block_count
    r = 1
    while limit is None or r <= limit:
        if provider.alpha(r) * lam > target + Fraction(tol):
            return
        yield r
        r += 1


def multisets(lattice: ExponentLattice, n: int, target: Fraction, tol: float = 0) -> Iterator[Tuple[int, ...]]:
    """Nondecreasing tuples of indices in [2, n - 1] whose mu~ sum to target, in lexicographic order."""
    def extend(start: int, remaining: Fraction, prefix: Tuple[int, ...]):
        if prefix and _close(remaining, Fraction(0), tol):
            yield prefix
        for k in range(start, n):
            value = lattice.tilde_of(k)
            if value > remaining + Fraction(tol):
                break
            yield from extend(k, remaining - value, prefix + (k,))

    if target > 0:
        yield from extend(2, target, ())


def multinomial(indices: Sequence[int]) -> int:
    """m! / prod(multiplicity!) for a sorted index tuple."""
    weight = math.factorial(len(indices))
    for k in set(indices):
        weight //= math.factorial(indices.count(k))
    return weight


def contributions(lattice: ExponentLattice, provider: TensorProvider, n: int, tol: float = 0) -> List[Contribution]:
    """Every (weight, tensor, indices) entering J_n, blocks ascending, multisets lexicographic."""
    target = lattice.tilde_of(n)
    lam = lattice.base_rate
    found: List[Contribution] = []
    constant_blocks = []
    for r in active_blocks(lattice, provider, target, tol):
        rest = target - provider.alpha(r) * lam
        if _close(rest, Fraction(0), tol):
            constant_blocks.append(r)
            found.append((1, provider.tensor(r, 0), ()))
            continue
        for indices in multisets(lattice, n, rest, tol):
            found.append((multinomial(indices), provider.tensor(r, len(indices)), indices))
    # degrees strictly increase with r, so at most one block matches mu~_n exactly
    assert len(constant_blocks) <= 1, f'blocks {constant_blocks} share the degree of mu~_{n}'
    return found


def _check_predecessors(polynomials: Sequence[VectorPolynomial], n: int) -> None:
    if n < 1:
        raise ValueError('n must be at least 1')
    if len(polynomials) < n - 1:
        raise MissingPredecessor(f'J_{n} needs q_1 .. q_{n - 1}, only {len(polynomials)} are known')


def build_Jn(polynomials: Sequence[VectorPolynomial], lattice: ExponentLattice, provider: TensorProvider, n: int,
             tol: float = 0) -> VectorPolynomial:
    """J_n from q_1 .. q_{n-1} (polynomials[k - 1] is q_k)."""
    _check_predecessors(polynomials, n)
    dimension = len(provider.xi)
    if n == 1:
        return VectorPolynomial.zero(dimension)
    found = contributions(lattice, provider, n, tol)

    def term(contribution: Contribution) -> VectorPolynomial:
        weight, tensor, indices = contribution
        return apply_to_polynomials(tensor, [polynomials[k - 1] for k in indices]).scale(weight)

    if len(found) > 1:
        with ThreadPoolExecutor(max_workers=min(worker_count(), len(found))) as pool:
            terms = list(pool.map(term, found))
    else:
        terms = [term(contribution) for contribution in found]

    total = VectorPolynomial.zero(dimension)
    for value in terms:
        total = total + value
    logger.debug(f'J_{n}: {len(found)} contributions, degree {total.degree}')
    return total


def brute_force_Jn(polynomials: Sequence[VectorPolynomial], lattice: ExponentLattice, provider: TensorProvider,
                   n: int, tol: float = 0) -> VectorPolynomial:
    """J_n summed over ordered index tuples, one tensor application per tuple."""
    _check_predecessors(polynomials, n)
    dimension = len(provider.xi)
    total = VectorPolynomial.zero(dimension)
    if n <= 1:
        return total
    target = lattice.tilde_of(n)
    lam = lattice.base_rate
    for r in active_blocks(lattice, provider, target, tol):
        rest = target - provider.alpha(r) * lam
        if _close(rest, Fraction(0), tol):
            total = total + VectorPolynomial.constant(provider.tensor(r, 0).values[0])
            continue
        if n < 3:
            continue
        smallest = lattice.tilde_of(2)
        for m in range(1, int((rest + Fraction(tol)) / smallest) + 1):
            for indices in product(range(2, n), repeat=m):
                if _close(sum((lattice.tilde_of(k) for k in indices), Fraction(0)), rest, tol):
                    arguments = [polynomials[k - 1] for k in indices]
                    total = total + apply_to_polynomials(provider.tensor(r, m), arguments)
    return total
