from .solver import solve_polynomial_ode, ode_residual, resonant_blocks
from .forcing import build_Jn, brute_force_Jn, multisets, multinomial
from .series import (ExpansionSeries, ExpansionTerm, Resonance, expand, evaluate_series, partial_sums,
                     fit_resonant_constant, series_to_json, series_from_json)
from .constants import RESONANCE_ZERO, RESONANCE_FIT, RESONANCE_POLICIES
from .exceptions import *
