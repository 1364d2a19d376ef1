from .trajectory import (Trajectory, TrajectoryIntegrator, Tolerances, integrate, integrate_many, dirichlet_quotient,
                         to_csv, from_csv)
from .first_approx import FirstApproximation, DecayReport, first_approximation, decay_bounds_check
from .exceptions import *
