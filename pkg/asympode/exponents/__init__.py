from .lattice import (ExponentLattice, LatticeElement, Decomposition, Generator, build_lattice, candidate_rates,
                      enumerate_sums, extend_lattice, finite_mode_limit, format_table, index_of, table_rows)
from .exceptions import *
