DEFAULT_SNAP_TOL = 1e-9

# imaginary parts above this (relative to the spectral radius) are a complex spectrum
COMPLEX_TOL = 1e-8

# eigenvalues closer than this (relative) are treated as one repeated eigenvalue
CLUSTER_TOL = 1e-6

# singular values below this (relative) span the eigenspace
RANK_TOL = 1e-7

NORM_PROBES = 1000
NORM_INFLATION = 1.1
PROBE_SEED = 20240601
