from ..base.exceptions import AsympodeError, InputError

class DynamicsError(AsympodeError):
    """Raised when a trajectory cannot be computed or analysed"""
    pass

class StepFailure(DynamicsError):
    """Raised when the integrator step size falls below its minimum

    Attributes:
        t -- time at which the step failed
    """

    def __init__(self, t: float = None, msg: str = "Integrator step size underflow"):
        self.t = t
        self.msg = msg if t is None else f'{msg} at t={t:.6g}'
        super().__init__(self.msg)

class NonDecay(DynamicsError):
    """Raised when a trajectory grows instead of decaying toward zero"""
    pass

class AmbiguousRate(DynamicsError):
    """Raised when the Dirichlet quotient tail is far from every eigenvalue"""
    pass

class ZeroLimit(DynamicsError):
    """Raised when the fitted limit of exp(lam t) y(t) vanishes"""
    pass

class InsufficientDecay(DynamicsError):
    """Raised when a trajectory has not decayed enough for a first approximation"""
    pass

class ZeroInitialCondition(InputError):
    """Raised when the initial condition is the zero vector"""
    pass

class NotAnEigenvector(DynamicsError):
    """Raised when the fitted limit of exp(lam* t) y(t) is not an eigenvector of A

    Attributes:
        residual -- |A xi - lam* xi| / |xi| of the fitted limit
    """

    def __init__(self, residual: float, lam_star: str, msg: str = "Fitted limit is not an eigenvector"):
        self.residual = residual
        self.msg = f'{msg} of {lam_star}: eigen-residual {residual:.3e}'
        super().__init__(self.msg)
