import pytest
import numpy as np
from fractions import Fraction
from asympode.spectral.decomposition import decompose, project, eigen_table, parse_matrix
from asympode.spectral.exceptions import *

def test_diagonal(diag12):
    assert diag12.distinct == (Fraction(1), Fraction(2))
    assert diag12.multiplicities == (1, 1)
    assert diag12.exact
    assert np.allclose(diag12.projection(1), np.diag([1.0, 0.0]))
    assert np.allclose(diag12.projection(2), np.diag([0.0, 1.0]))
    assert np.allclose(project(diag12, 1, [3, 4]), [3, 0])

def test_symmetric(symmetric21):
    assert symmetric21.distinct == (Fraction(1), Fraction(3))
    basis = symmetric21.bases[0][0]
    assert abs(basis[0] + basis[1]) < 1e-12
    assert np.allclose(symmetric21.projection(1) @ [-1.0, 1.0], [-1.0, 1.0])
    assert np.allclose(symmetric21.projection(2) @ [-1.0, 1.0], [0.0, 0.0])
    assert symmetric21.c0 >= 1

def test_repeated_eigenvalue():
    sd = decompose([[2, 0, 0], [0, 2, 0], [0, 0, 5]])
    assert sd.distinct == (Fraction(2), Fraction(5))
    assert sd.multiplicities == (2, 1)
    assert sd.eigenvalues == (Fraction(2), Fraction(2), Fraction(5))

def test_rational_snapping():
    sd = decompose([['1/3', 0], [0, '7/4']])
    assert sd.distinct == (Fraction(1, 3), Fraction(7, 4))
    assert sd.index_of(Fraction(7, 4)) == 2

def test_unsnapped_eigenvalue_carried_as_float():
    sd = decompose([[2 ** 0.5, 0], [0, 3]], snap_tol=1e-15)
    assert not sd.exact
    assert sd.distinct_float[0] == pytest.approx(2 ** 0.5)

def test_eigen_table(symmetric21):
    rows = eigen_table(symmetric21)
    assert [row['eigenvalue'] for row in rows] == ['1', '3']
    assert [row['multiplicity'] for row in rows] == [1, 1]

@pytest.mark.parametrize('matrix,error', [
    ([[0, 1], [0, 0]], NonPositiveSpectrum),
    ([[1, 1], [0, 1]], NotDiagonalizable),
    ([[0, -1], [1, 0]], ComplexSpectrum),
    ([[-1, 0], [0, 2]], NonPositiveSpectrum),
    ([[1, 2, 3], [4, 5]], MalformedMatrix),
    ([[1, 'x'], [0, 1]], MalformedMatrix),
])
def test_rejected_matrices(matrix, error):
    with pytest.raises(error):
        decompose(matrix)

def test_index_errors(diag12):
    with pytest.raises(IndexOutOfRange):
        diag12.projection(3)
    with pytest.raises(NotAnEigenvalue):
        diag12.index_of(Fraction(3, 2))

def test_parse_matrix_reports_every_entry():
    with pytest.raises(MalformedMatrix) as e:
        parse_matrix([['a', 1], [1, 'b']])
    assert len(e.value.errors) == 2
