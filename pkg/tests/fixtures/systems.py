import pytest
from asympode.spectral.decomposition import decompose
from asympode.termlang.grammar import parse

CUBE_ROOT = '[0, 3/2 * x_1^2 * sgnpow(x_2, 1/3)]'

@pytest.fixture
def scalar_one():
    return decompose([[1]])

@pytest.fixture
def diag12():
    return decompose([[1, 0], [0, 2]])

@pytest.fixture
def diag13():
    return decompose([[1, 0], [0, 3]])

@pytest.fixture
def two_block():
    return decompose([[1, 0], [0, '3/2']])

@pytest.fixture
def symmetric21():
    return decompose([[2, 1], [1, 2]])

@pytest.fixture
def cubic_spec():
    return parse('[-x_1^3]', 1)

@pytest.fixture
def zero_spec():
    return parse('[0, 0]', 2)

@pytest.fixture
def cube_root_spec():
    return parse(CUBE_ROOT, 2)

@pytest.fixture
def abs_coupling_spec():
    return parse('[-abs(x_2) * x_1, 0]', 2)

@pytest.fixture
def quadratic_cubic_spec():
    return parse('[x_1^2 + x_1 * x_2^2, x_1 * x_2 - x_2^3]', 2)

@pytest.fixture
def composite_spec():
    return parse('comp(norm2(x)^{a} * x; norm2(x)^{b}; 6)', 2, {'a': '1/2', 'b': '1/3'})

@pytest.fixture
def mixed_norm_spec():
    return parse('norm2(x_1, x_2)^{2/3} * polynorm2(x_2^3, x_3^3)^{2/5} * x', 3)
