import math

DEFAULT_TOL_ABS = 1e-12
DEFAULT_TOL_REL = 1e-12
DEFAULT_HORIZON = 40.0
DEFAULT_SAMPLES = 4001
DEFAULT_H_MIN = 1e-14

# below this magnitude the state is carried as (log |y|, y / |y|)
LOG_PHASE_THRESHOLD = 1e-200
LOG_PHASE_LOG = math.log(LOG_PHASE_THRESHOLD)

# integration stops once |y| drops below this
MAGNITUDE_FLOOR = 1e-280
MAGNITUDE_FLOOR_LOG = math.log(MAGNITUDE_FLOOR)

# |y| beyond this multiple of |y0| is reported as non-decay
NON_DECAY_FACTOR = 10.0

DEFAULT_WINDOW_FRACTION = 0.2

# decades of decay needed before a first approximation is trusted
MIN_DECAY_DECADES = 6

EIGEN_RESIDUAL_TOL = 1e-6
ZERO_LIMIT_TOL = 1e-10

# half-width of the accepted slope band as a fraction of the largest eigenvalue
DECAY_MARGIN = 0.05

TERMINATION_HORIZON = 'horizon'
TERMINATION_FLOOR = 'magnitude_floor'
TERMINATION_GROWTH = 'growth'

# integration stops once |y| exceeds this multiple of |y0|
GROWTH_LIMIT = 1e100

# samples of |exp(lam* t) y - xi*| under this multiple of max(tol_rel, eps) |xi*| are integrator noise
APPROACH_NOISE_FACTOR = 1e3
APPROACH_MIN_SAMPLES = 20
