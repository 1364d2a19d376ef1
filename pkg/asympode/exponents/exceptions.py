from ..base.exceptions import AsympodeError

class ExponentError(AsympodeError):
    """Raised when a rate lattice cannot be built or queried"""
    pass

class EmptyDegreeList(ExponentError):
    """Raised when more than one rate is requested but the lattice has no generators"""
    pass

class RateNotInLattice(ExponentError):
    """Raised when a rate is not among the enumerated lattice elements"""
    pass
