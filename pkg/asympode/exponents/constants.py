# grouping tolerance for lattice values when the spectrum could not be snapped to rationals
FLOAT_GROUPING_TOL = 1e-9

TABLE_FORMATS = ('text', 'json')
