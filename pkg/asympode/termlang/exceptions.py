from ..base.exceptions import InputError

class TermError(InputError):
    """Raised when a nonlinearity description is invalid"""
    pass

class GrammarError(TermError):
    """Raised when the nonlinearity text does not follow the grammar

    Attributes:
        line -- 1-based line of the offending token
        column -- 1-based column of the offending token
    """

    def __init__(self, message: str, line: int = 1, column: int = 1):
        self.line = line
        self.column = column
        super().__init__([f'line {line}, column {column}: {message}'], msg='Syntax error')

class DegreeError(TermError):
    """Raised when a homogeneous degree is at most one or the degree list is not strictly increasing"""

    def __init__(self, message: str):
        super().__init__([message], msg='Degree error')

class UnsupportedNorm(TermError):
    """Raised when a norm index cannot be used where smoothness is required"""

    def __init__(self, message: str):
        super().__init__([message], msg='Unsupported norm')
