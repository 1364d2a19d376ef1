from ..base.exceptions import AsympodeError, InapplicableError

class TensorError(AsympodeError):
    """Raised when derivative tensors cannot be formed or applied"""
    pass

class SingularBasePoint(InapplicableError):
    """Raised when a factor is not smooth at the base point

    Attributes:
        factor -- text of the offending factor
    """

    def __init__(self, factor: str, msg: str = "Factor is not smooth at the base point"):
        self.factor = factor
        self.msg = f'{msg}: {factor}'
        super().__init__(self.msg)

class OrderOverflow(TensorError):
    """Raised when a derivative order beyond the configured cap is requested"""
    pass

class ArityMismatch(TensorError):
    """Raised when a tensor is applied to the wrong number of arguments"""
    pass
