from ..base.exceptions import AsympodeError, InputError

class SpectralError(AsympodeError):
    """Raised when the matrix A violates the spectral assumptions"""
    pass

class NotDiagonalizable(SpectralError):
    """Raised when an eigenvalue has fewer independent eigenvectors than its multiplicity"""
    pass

class NonPositiveSpectrum(SpectralError):
    """Raised when some eigenvalue of A is not positive"""
    pass

class ComplexSpectrum(SpectralError):
    """Raised when A has an eigenvalue with a nonzero imaginary part"""
    pass

class IndexOutOfRange(SpectralError):
    """Raised when a spectral block index is outside 1..d*"""
    pass

class NotAnEigenvalue(SpectralError):
    """Raised when a rate is not an eigenvalue of A"""
    pass

class MalformedMatrix(InputError):
    """Raised when A is not a square matrix of finite numbers"""
    pass
