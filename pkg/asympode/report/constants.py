# share of the informative residual samples, counted from their end, used for slope fits
DEFAULT_FIT_WINDOW = 0.5

# residuals are fitted only where |u_N| lies in [BAND_LOW, BAND_HIGH] * |y0|
BAND_LOW = 1e-250
BAND_HIGH = 1e-4

# samples with |u_N| below NOISE_FACTOR * max(tol_rel, eps) * |y| are integrator noise
NOISE_FACTOR = 1e3
MIN_FIT_SAMPLES = 20

# accepted deviation of the fitted slope from -mu_{N+1}, relative to mu_{N+1}
SLOPE_TOLERANCE = 0.05

VERDICT_PASS = 'pass'
VERDICT_FAIL = 'fail'
VERDICT_VACUOUS = 'vacuous'

EMIT_FORMATS = ('json', 'csv', 'gnuplot', 'text')

REPORT_SCHEMA_VERSION = 1
