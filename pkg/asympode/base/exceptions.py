class AsympodeError(Exception):
    """Base class for every error raised by asympode"""
    pass

class InputError(AsympodeError):
    """Raised when user supplied data is malformed

    Attributes:
        errors -- list of precise messages
    """

    def __init__(self, errors: list = None, msg: str = "Invalid input"):
        self.errors = errors if errors else []
        self.msg = msg if not self.errors else f'{msg}: ' + '; '.join(self.errors)
        super().__init__(self.msg)

class InapplicableError(AsympodeError):
    """Raised when the theory does not cover the given problem"""
    pass

class VerificationError(AsympodeError):
    """Raised when a computed expansion disagrees with the trajectory"""
    pass
