RESONANCE_ZERO = 'zero'
RESONANCE_FIT = 'fit'
RESONANCE_POLICIES = (RESONANCE_ZERO, RESONANCE_FIT)

# samples with |u| below NOISE_FACTOR * max(tol_rel, eps) * |y| carry no information
NOISE_FACTOR = 1e3
MIN_FIT_SAMPLES = 20

# the resonant constant is fitted on the later part of the informative samples
FIT_WINDOW_FRACTION = 0.5

# exp(mu t) is only formed while mu t stays below this
EXPONENT_LIMIT = 700.0

# coefficients of q' + (A - mu) q - J, relative to max(1, |J|)
ODE_RESIDUAL_TOL = 1e-12

SCHEMA_VERSION = 1
