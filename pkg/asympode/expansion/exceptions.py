from ..base.exceptions import AsympodeError, InapplicableError, InputError

class ExpansionError(AsympodeError):
    """Raised when the expansion recursion cannot proceed"""
    pass

class MissingPredecessor(ExpansionError):
    """Raised when J_n is requested before q_2 .. q_{n-1} are known"""
    pass

class InapplicableAtXi(InapplicableError):
    """Raised when some factor of F is not smooth near xi*

    Attributes:
        factor -- text of the offending factor
        xi -- the base point
    """

    def __init__(self, factor: str, xi: list = None, msg: str = "Expansion does not apply at xi*"):
        self.factor = factor
        self.xi = xi
        self.msg = f'{msg}: factor {factor} is not smooth near xi* = {xi}'
        super().__init__(self.msg)

class FiniteModeExceeded(InputError):
    """Raised when more terms are requested than the finite approximation supports

    Attributes:
        requested -- number of terms asked for
        n_bar -- largest admissible number of terms
    """

    def __init__(self, requested: int, n_bar: int):
        self.requested = requested
        self.n_bar = n_bar
        super().__init__([f'{requested} terms requested, the remainder order allows at most {n_bar}'],
                         msg='Too many terms')

class UnknownPolicy(InputError):
    """Raised when the resonance policy is not one of zero, fit"""

    def __init__(self, policy: str):
        super().__init__([f'unknown resonance policy {policy!r}'], msg='Invalid resonance policy')

class MissingTrajectory(ExpansionError):
    """Raised when the fit policy meets a resonance without a trajectory to fit against"""
    pass
