MODE_INFINITE = 'h1'
MODE_FINITE = 'h2'
MODE_REMAINDER = 'remainder'
MODES = (MODE_INFINITE, MODE_FINITE, MODE_REMAINDER)

PLAIN = 'plain'
ABS = 'abs'
SIGNED = 'signed'

RESERVED_NAMES = {'x', 'abs', 'sgnpow', 'comp', 'inf', 'norm', 'polynorm'}

# sampling used by homogeneous_norm and check_nondegenerate
SPHERE_SAMPLES = 2000
SPHERE_SEED = 7


# check_nondegenerate treats a sampled minimum of |P(x)|_p below this as a zero of P
NONDEGENERATE_TOL = 1e-8
