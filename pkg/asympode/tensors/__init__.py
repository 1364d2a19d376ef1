from .derivative import (DerivativeTensor, taylor_tensors, tensors_for_sum, apply_to_polynomials, contract,
                         contract_diagonal, dump, canonical_indices)
from .provider import TensorProvider
from .constants import DEFAULT_MAX_ORDER
from .exceptions import *
