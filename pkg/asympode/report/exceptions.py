from ..base.exceptions import AsympodeError, VerificationError

class ReportError(AsympodeError):
    """Raised when a report cannot be produced"""
    pass

class ResidualUnderflow(VerificationError):
    """Raised when a residual stream sinks into integrator noise before enough samples are collected

    Attributes:
        samples -- number of informative samples found
    """

    def __init__(self, samples: int, msg: str = "Residual below the noise floor"):
        self.samples = samples
        self.msg = f'{msg}: {samples} informative samples'
        super().__init__(self.msg)

class IoFailure(ReportError):
    """Raised when an output file cannot be written"""

    def __init__(self, path: str = None, msg: str = "Failed to write output"):
        self.path = path
        self.msg = msg if path is None else f'{msg} {path}'
        super().__init__(self.msg)

class UnsupportedFormat(ReportError):
    """Raised when an object cannot be emitted in the requested format"""
    pass
