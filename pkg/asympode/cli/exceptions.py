from ..base.exceptions import InputError

class ProblemFileError(InputError):
    """Raised when the problem file cannot be read or fails validation"""

    def __init__(self, errors: list = None, msg: str = "Invalid problem file"):
        super().__init__(errors, msg)

class MissingArtifact(InputError):
    """Raised when a stage needs an artifact an earlier stage has not written

    Attributes:
        artifact -- file name inside the run directory
    """

    def __init__(self, artifact: str, stage: str = None):
        self.artifact = artifact
        hint = f'; run {stage} first' if stage else ''
        super().__init__([f'{artifact} not found in the run directory{hint}'], msg='Missing artifact')
