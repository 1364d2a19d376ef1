import pytest
import math
import numpy as np
from asympode.base.polynomial import VectorPolynomial
from asympode.termlang.grammar import parse
from asympode.tensors.derivative import (taylor_tensors, apply_to_polynomials, contract, contract_diagonal, dump,
                                         canonical_indices)
from asympode.tensors.provider import TensorProvider
from asympode.tensors.exceptions import *

DELTA = 1e-2

def central_difference(g, m, delta):
    if m == 1:
        return (g(delta) - g(-delta)) / (2 * delta)
    if m == 2:
        return (g(delta) - 2 * g(0.0) + g(-delta)) / delta ** 2
    return (g(2 * delta) - 2 * g(delta) + 2 * g(-delta) - g(-2 * delta)) / (2 * delta ** 3)

def richardson(g, m, delta=DELTA):
    def level1(h):
        return (4 * central_difference(g, m, h / 2) - central_difference(g, m, h)) / 3
    return (16 * level1(delta / 2) - level1(delta)) / 15

def check_against_differences(block, xi, h, orders=(1, 2, 3)):
    xi = np.asarray(xi, dtype=float)
    h = np.asarray(h, dtype=float)
    tensors = taylor_tensors(block, xi, max(orders))
    assert np.allclose(contract_diagonal(tensors[0], h), block(xi))

    def g(s):
        return np.asarray(block(xi + s * h), dtype=float)

    for m in orders:
        expected = richardson(g, m) / math.factorial(m)
        assert np.allclose(contract_diagonal(tensors[m], h), expected, rtol=1e-6, atol=1e-8), f'order {m}'

def test_norm_power_against_differences():
    spec = parse('norm2(x)^{5/2} * x', 2)
    check_against_differences(spec.blocks()[0], [0.6, -0.8], [0.3, 0.5])

def test_composite_blocks_against_differences(composite_spec):
    for block in composite_spec.blocks():
        check_against_differences(block, [0.6, -0.8], [0.3, 0.5])

def test_mixed_norms_against_differences(mixed_norm_spec):
    check_against_differences(mixed_norm_spec.blocks()[0], [1.0, 0.0, 1.0], [0.2, -0.4, 0.3])

def test_polynomial_tensors_are_exact(quadratic_cubic_spec):
    a, b = 0.7, -1.3
    provider = TensorProvider(quadratic_cubic_spec, [a, b])
    jacobian = provider.tensor(1, 1).dense()
    assert np.allclose(jacobian, [[2 * a, b], [0.0, a]])
    assert np.allclose(contract(provider.tensor(1, 1), [[1.0, 2.0]]), [2 * a, b + 2 * a])
    assert np.allclose(provider.tensor(1, 3).values, 0.0)
    assert np.allclose(provider.tensor(2, 0).values[0], [a * b ** 2, -b ** 3])

def test_dense_is_symmetric(mixed_norm_spec):
    tensor = taylor_tensors(mixed_norm_spec.blocks()[0], [1.0, 0.0, 1.0], 2)[2]
    dense = tensor.dense()
    assert dense.shape == (3, 3, 3)
    assert np.allclose(dense, np.swapaxes(dense, 0, 1))
    assert np.allclose(tensor.entry((2, 0)), dense[0, 2])

def test_canonical_indices():
    assert canonical_indices(2, 2) == ((0, 0), (0, 1), (1, 1))
    assert len(canonical_indices(3, 4)) == math.comb(6, 4)

def test_apply_to_polynomials(quadratic_cubic_spec):
    tensor = TensorProvider(quadratic_cubic_spec, [0.4, 0.9]).tensor(2, 2)
    q = VectorPolynomial([[1.0, -2.0], [0.5, 0.25]])
    applied = apply_to_polynomials(tensor, [q, q])
    assert applied.degree == 2
    for t in (0.0, 0.7, 3.0):
        assert np.allclose(applied(t), contract(tensor, [q(t), q(t)]))

def test_arity_mismatch(quadratic_cubic_spec):
    tensor = TensorProvider(quadratic_cubic_spec, [0.4, 0.9]).tensor(1, 2)
    with pytest.raises(ArityMismatch):
        apply_to_polynomials(tensor, [VectorPolynomial.constant([1.0, 0.0])])
    with pytest.raises(ArityMismatch):
        contract(tensor, [[1.0, 0.0]])

def test_provider_caches(mocker, quadratic_cubic_spec):
    provider = TensorProvider(quadratic_cubic_spec, [0.4, 0.9], max_order=6)
    spy = mocker.spy(provider, '_block_jets')
    first = provider.tensor(1, 2)
    assert provider.tensor(1, 2) is first
    assert spy.call_count == 1
    assert provider.block_count == 2

def test_order_overflow(cubic_spec):
    provider = TensorProvider(cubic_spec, [0.5], max_order=3)
    with pytest.raises(OrderOverflow):
        provider.tensor(1, 4)
    with pytest.raises(OrderOverflow):
        taylor_tensors(cubic_spec.blocks()[0], [0.5], 13)

def test_singular_base_point(cube_root_spec):
    provider = TensorProvider(cube_root_spec, [1.0, 0.0])
    with pytest.raises(SingularBasePoint) as info:
        provider.tensor(1, 0)
    assert info.value.factor == 'sgnpow(x_2, 1/3)'

def test_infinite_provider():
    spec = parse('comp(norm2(x) * x; norm2(x); inf)', 2)
    provider = TensorProvider(spec, [0.6, 0.8])
    assert provider.block_count is None
    assert provider.block(3).degree == 4
    assert np.allclose(provider.tensor(3, 0).values[0], [0.6, 0.8])

def test_dump(quadratic_cubic_spec):
    tensors = taylor_tensors(quadratic_cubic_spec.blocks()[0], [0.4, 0.9], 2)
    data = dump(tensors)
    assert [item['order'] for item in data] == [0, 1, 2]
    assert [entry['index'] for entry in data[2]['entries']] == [[1, 1], [1, 2], [2, 2]]
    assert data[1]['norm_bound'] == pytest.approx(np.linalg.norm(tensors[1].dense()))
