EXIT_OK = 0
EXIT_INPUT = 1
EXIT_VERIFICATION = 2
EXIT_INAPPLICABLE = 3

DEFAULT_N_TERMS = 3
DEFAULT_OUTPUT = 'run'
DEFAULT_TABLE_COUNT = 10
MAX_TERMS = 64

CONFIG_FILE = 'resolved-config.json'
SPECTRAL_FILE = 'spectral.json'
TRAJECTORY_FILE = 'trajectory.csv'
FIRST_APPROX_FILE = 'first_approx.json'
DECAY_FILE = 'decay.json'
CLASSIFICATION_FILE = 'classification.json'
LATTICE_FILE = 'lattice.json'
SERIES_FILE = 'series.json'
TENSORS_FILE = 'tensors.json'
REPORT_FILE = 'report.json'
RESIDUALS_FILE = 'residuals.csv'
ERROR_FILE = 'error.json'

ARTIFACTS = (CONFIG_FILE, SPECTRAL_FILE, TRAJECTORY_FILE, FIRST_APPROX_FILE, DECAY_FILE, CLASSIFICATION_FILE,
             LATTICE_FILE, SERIES_FILE, TENSORS_FILE, REPORT_FILE, RESIDUALS_FILE, ERROR_FILE)
