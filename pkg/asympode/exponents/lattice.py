"""Rate lattices generated by eigenvalue gaps and homogeneity degrees.

With base rate lam (an eigenvalue, the n0-th distinct one), eigenvalue gaps
lam_k - lam for k > n0 and degree generators alpha_j * lam, the lattice is
the set of all finite sums of generators, enumerated in increasing order.
Rates are the lattice values shifted by lam.
"""
from fractions import Fraction
from heapq import heappop, heappush
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple, Union
import json
import logging

from pydantic import BaseModel, ConfigDict

from ..base.rational import Rational, format_fraction, to_fraction
from ..spectral.decomposition import SpectralData
from .constants import FLOAT_GROUPING_TOL, TABLE_FORMATS
from .exceptions import EmptyDegreeList, RateNotInLattice

logger = logging.getLogger(__name__)

EIGEN = 'eigen'
DEGREE = 'degree'

DegreeRule = Callable[[int], Sequence[Fraction]]


class Generator(BaseModel):
    """One generator: an eigenvalue gap (kind eigen, index k) or alpha_j * lam (kind degree, index j)."""
    model_config = ConfigDict(frozen=True)

    kind: str
    index: int
    value: Rational


class Decomposition(BaseModel):
    """Multiplicities of the generators summing to one lattice value."""
    model_config = ConfigDict(frozen=True)

    eigen: Tuple[Tuple[int, int], ...] = ()
    degrees: Tuple[Tuple[int, int], ...] = ()

    def render(self) -> str:
        pieces = [f'm_{k}={count}' for k, count in self.eigen] + [f'z_{j}={count}' for j, count in self.degrees]
        return ', '.join(pieces) if pieces else '0'


class LatticeElement(BaseModel):
    model_config = ConfigDict(frozen=True)

    n: int
    tilde: Rational
    rate: Rational
    decompositions: Tuple[Decomposition, ...]


class ExponentLattice(BaseModel):
    model_config = ConfigDict(frozen=True)

    base_rate: Rational
    base_index: int
    generators: Tuple[Generator, ...]
    degrees: Tuple[Rational, ...]
    finite: bool
    elements: Tuple[LatticeElement, ...]

    def __len__(self) -> int:
        return len(self.elements)

    @property
    def tilde(self) -> List[Fraction]:
        return [element.tilde for element in self.elements]

    @property
    def rates(self) -> List[Fraction]:
        return [element.rate for element in self.elements]

    @property
    def window(self) -> Fraction:
        return self.elements[-1].tilde

    def tilde_of(self, n: int) -> Fraction:
        """mu~_n for 1-based n."""
        return self.elements[n - 1].tilde

    def rate_of(self, n: int) -> Fraction:
        return self.elements[n - 1].rate


def _ordered_generators(gaps: Sequence[Generator], degree_generators: Iterator[Generator]) -> Iterator[Generator]:
    """Merge eigen gaps with the (increasing) degree generators in increasing value."""
    pending = list(gaps)
    for generator in degree_generators:
        while pending and pending[0].value <= generator.value:
            yield pending.pop(0)
        yield generator
    yield from pending


def enumerate_sums(generators: Iterator[Generator]) -> Iterator[Tuple[Fraction, Tuple[int, ...]]]:
    """All finite sums of generators in nondecreasing order, each multiset exactly once.

    Generators must come in nondecreasing value. A sum is a nondecreasing tuple
    of generator positions; its parent drops the last position when it is
    repeated and lowers it by one otherwise, so the sums form a tree whose
    children are never smaller than their parent. Generators are drawn from
    the iterator only when first needed.
    """
    materialized: List[Generator] = []

    def generator_at(i: int) -> Optional[Generator]:
        while len(materialized) <= i:
            try:
                materialized.append(next(generators))
            except StopIteration:
                return None
        return materialized[i]

    yield Fraction(0), ()
    first = generator_at(0)
    if first is None:
        return
    heap = [(first.value, (0,))]
    while heap:
        value, combo = heappop(heap)
        yield value, combo
        last = combo[-1]
        heappush(heap, (value + materialized[last].value, combo + (last,)))
        following = generator_at(last + 1)
        if following is not None:
            heappush(heap, (value - materialized[last].value + following.value, combo[:-1] + (last + 1,)))


def _decomposition(combo: Tuple[int, ...], generators: Sequence[Generator]) -> Decomposition:
    eigen: Dict[int, int] = {}
    degrees: Dict[int, int] = {}
    for position in combo:
        generator = generators[position]
        target = eigen if generator.kind == EIGEN else degrees
        target[generator.index] = target.get(generator.index, 0) + 1
    return Decomposition(eigen=tuple(sorted(eigen.items())), degrees=tuple(sorted(degrees.items())))


class _DegreeSource:
    """Degree generators alpha_j * lam, from a finite list or a rule giving the first j alphas."""

    def __init__(self, degrees: Union[Sequence, DegreeRule], lam: Fraction):
        self.rule = degrees if callable(degrees) else None
        self.fixed = None if callable(degrees) else [to_fraction(alpha) for alpha in degrees]
        self.lam = lam
        self.seen: List[Fraction] = []

    def alpha(self, j: int) -> Optional[Fraction]:
        """1-based alpha_j, None past the end of a finite list."""
        if self.fixed is not None:
            return self.fixed[j - 1] if j <= len(self.fixed) else None
        return to_fraction(self.rule(j)[j - 1])

    def __iter__(self) -> Iterator[Generator]:
        j = 1
        previous = None
        while True:
            alpha = self.alpha(j)
            if alpha is None:
                return
            if alpha <= 0 or (previous is not None and alpha <= previous):
                raise ValueError(f'degree generators must be positive and strictly increasing, '
                                 f'got alpha_{j} = {format_fraction(alpha)}')
            self.seen.append(alpha)
            previous = alpha
            yield Generator(kind=DEGREE, index=j, value=alpha * self.lam)
            j += 1


def build_lattice(sd: SpectralData, base_rate, degrees: Union[Sequence, DegreeRule], count: int) -> ExponentLattice:
    """The `count` smallest lattice values with all their decompositions.

    degrees is a finite list of alpha_j or, for infinitely many blocks, a
    callable returning the first j alphas.
    """
    if count < 1:
        raise ValueError('count must be at least 1')
    lam = to_fraction(base_rate)
    n0 = sd.index_of(lam)
    lam = sd.distinct[n0 - 1]
    gaps = [Generator(kind=EIGEN, index=k, value=sd.distinct[k - 1] - lam)
            for k in range(n0 + 1, sd.distinct_count + 1)]
    source = _DegreeSource(degrees, lam)
    generators: List[Generator] = []

    def recorded() -> Iterator[Generator]:
        for generator in _ordered_generators(gaps, iter(source)):
            generators.append(generator)
            yield generator

    tol = 0 if sd.exact else FLOAT_GROUPING_TOL
    values: List[Fraction] = []
    combos: List[List[Tuple[int, ...]]] = []
    sums = enumerate_sums(recorded())
    for value, combo in sums:
        if values and value - values[-1] <= tol:
            if value != values[-1]:
                logger.warning(f'Grouping lattice values {float(values[-1])!r} and {float(value)!r} within {tol}')
            combos[-1].append(combo)
            continue
        if len(values) == count:
            break
        values.append(value)
        combos.append([combo])
    if len(values) < count:
        raise EmptyDegreeList(f'the lattice has only {len(values)} elements; {count} were requested')

    elements = []
    for n, (value, group) in enumerate(zip(values, combos), start=1):
        decompositions = tuple(_decomposition(combo, generators) for combo in group)
        elements.append(LatticeElement(n=n, tilde=value, rate=value + lam, decompositions=decompositions))
        logger.debug(f'mu~_{n} = {format_fraction(value)}: {[d.render() for d in decompositions]}')
    return ExponentLattice(base_rate=lam, base_index=n0, generators=tuple(generators), degrees=tuple(source.seen),
                           finite=source.fixed is not None, elements=tuple(elements))


def candidate_rates(sd: SpectralData, alpha_1, count: int) -> List[Fraction]:
    """The first `count` sums of at least one eigenvalue plus a multiple of alpha_1 * lam_1."""
    if count < 1:
        return []
    alpha_1 = to_fraction(alpha_1)
    if alpha_1 <= 0:
        raise ValueError('alpha_1 must be positive')
    lam_1 = sd.distinct[0]
    generators = sorted([Generator(kind=DEGREE, index=1, value=alpha_1 * lam_1)] +
                        [Generator(kind=EIGEN, index=k, value=value)
                         for k, value in enumerate(sd.distinct, start=1)], key=lambda g: g.value)
    # the count-th candidate is at most lam_1 * count, so smaller sums suffice
    limit = lam_1 * count
    shifts = []
    for value, _ in enumerate_sums(iter(generators)):
        if value > limit:
            break
        shifts.append(value)
    candidates = sorted({eigenvalue + shift for eigenvalue in sd.distinct for shift in shifts
                         if eigenvalue + shift <= limit})
    return candidates[:count]


def index_of(lattice: ExponentLattice, rate) -> int:
    """1-based position of an exact rate mu_n."""
    rate = to_fraction(rate)
    for element in lattice.elements:
        if element.rate == rate:
            return element.n
    raise RateNotInLattice(f'{format_fraction(rate)} is not among the first {len(lattice)} rates')


def extend_lattice(sd: SpectralData, lattice: ExponentLattice, count: int) -> ExponentLattice:
    """The same finite lattice enumerated to `count` elements."""
    if not lattice.finite:
        raise ValueError('only lattices with a finite degree list can be rebuilt from their generators')
    return build_lattice(sd, lattice.base_rate, list(lattice.degrees), count)


def finite_mode_limit(sd: SpectralData, lattice: ExponentLattice, beta_last, epsilon_bar) -> Tuple[int, ExponentLattice]:
    """Largest N with lam * (beta_last + epsilon_bar) > mu_N, and the lattice extended to cover it."""
    bound = lattice.base_rate * (to_fraction(beta_last) + to_fraction(epsilon_bar))
    while lattice.elements[-1].rate < bound:
        try:
            lattice = extend_lattice(sd, lattice, 2 * len(lattice))
        except EmptyDegreeList:
            break
    n_bar = sum(1 for element in lattice.elements if element.rate < bound)
    return n_bar, lattice


def table_rows(lattice: ExponentLattice) -> List[Dict[str, object]]:
    return [{
        'n': element.n,
        'mu_tilde': format_fraction(element.tilde),
        'mu': format_fraction(element.rate),
        'decompositions': [decomposition.render() for decomposition in element.decompositions],
    } for element in lattice.elements]


def format_table(lattice: ExponentLattice, fmt: str = 'text') -> str:
    if fmt not in TABLE_FORMATS:
        raise ValueError(f'format must be one of {TABLE_FORMATS}, got {fmt!r}')
    rows = table_rows(lattice)
    if fmt == 'json':
        return json.dumps({'base_rate': format_fraction(lattice.base_rate), 'rows': rows}, indent=2, sort_keys=True)
    lines = [f'{"n":>4}  {"mu_tilde":>12}  {"mu":>12}  decompositions']
    for row in rows:
        lines.append(f'{row["n"]:>4}  {row["mu_tilde"]:>12}  {row["mu"]:>12}  {"; ".join(row["decompositions"])}')
    return '\n'.join(lines) + '\n'
