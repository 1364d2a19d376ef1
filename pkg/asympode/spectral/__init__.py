from .decomposition import SpectralData, decompose, project, norm_equivalence_constant, eigen_table
from .exceptions import *
