from .polynomials import ScalarPolynomial
from .factors import NormPower, CoordPower, PolyNormPower, ScalarFactor, merge_factors, power_of
from .components import (HomogeneousComponent, HomogeneousSum, ScalarTerm, Composite, NonlinearitySpec,
                         make_components, combine, group_by_degree, evaluate, evaluate_model, evaluate_scaled,
                         expand_composite)
from .grammar import TermParser, parse, parse_structured, render
from .smoothness import (SmoothnessReport, Classification, NondegeneracyReport, smoothness_domain_check,
                         classify, check_nondegenerate, homogeneous_norm, sphere_samples, LIPSCHITZ, CONTINUOUS)
from .constants import MODE_INFINITE, MODE_FINITE, MODE_REMAINDER
from .exceptions import *
