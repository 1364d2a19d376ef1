from typing import Dict, List, Optional, Sequence, Tuple
import logging

from ..base.jet import Jet
from ..termlang.components import HomogeneousSum, NonlinearitySpec
from .constants import DEFAULT_MAX_ORDER, MIN_JET_ORDER
from .derivative import DerivativeTensor, block_jets, check_base_point, tensor_from_jets
from .exceptions import OrderOverflow


class TensorProvider:
    """Derivative tensors of the blocks F_r of a nonlinearity at a fixed base point.

    Jets are computed per block on first use and recomputed at a higher order
    (doubling, up to the cap) when a higher derivative is requested. Tensors
    are cached per (r, m).
    """

    def __init__(self, spec: NonlinearitySpec, xi: Sequence[float], max_order: int = DEFAULT_MAX_ORDER):
        self.logger = logging.getLogger('TensorProvider')
        self.spec = spec
        self.xi = tuple(float(v) for v in xi)
        self.max_order = max_order
        self._jets: Dict[int, Tuple[int, List[Jet]]] = {}
        self._tensors: Dict[Tuple[int, int], DerivativeTensor] = {}

    @property
    def block_count(self) -> Optional[int]:
        """Number of blocks, None when there are infinitely many."""
        return self.spec.n_star

    def block(self, r: int) -> HomogeneousSum:
        """The 1-based block F_r."""
        blocks = self.spec.blocks(None if self.spec.finite else r)
        if not 1 <= r <= len(blocks):
            raise IndexError(f'block {r} outside 1..{len(blocks)}')
        return blocks[r - 1]

    def alpha(self, r: int):
        return self.block(r).alpha

    def tensor(self, r: int, m: int) -> DerivativeTensor:
        """D^m F_r(xi) / m!."""
        if m > self.max_order:
            raise OrderOverflow(f'order {m} exceeds the cap {self.max_order}')
        key = (r, m)
        if key not in self._tensors:
            self._tensors[key] = tensor_from_jets(self._block_jets(r, m), self.xi, m)
        return self._tensors[key]

    def _block_jets(self, r: int, m: int) -> List[Jet]:
        order, jets = self._jets.get(r, (-1, None))
        if order < m:
            block = self.block(r)
            if order < 0:
                check_base_point(block, self.xi)
            order = min(self.max_order, max(m, MIN_JET_ORDER, 2 * order))
            self.logger.debug(f'Computing jets of block {r} (degree {block.degree}) to order {order}')
            jets = block_jets(block, self.xi, order)
            self._jets[r] = (order, jets)
        return jets
