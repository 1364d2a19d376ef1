import pytest
import numpy as np
from fractions import Fraction
from asympode.termlang.grammar import parse, parse_structured, render
from asympode.termlang.components import evaluate, evaluate_model, evaluate_scaled, expand_composite
from asympode.termlang.smoothness import smoothness_domain_check, classify, check_nondegenerate, homogeneous_norm
from asympode.termlang.constants import MODE_FINITE, MODE_INFINITE, MODE_REMAINDER
from asympode.termlang.exceptions import *

def test_norm_power_times_x():
    spec = parse('norm2(x)^{1/3} * x', 3)
    assert spec.degrees() == [Fraction(4, 3)]
    assert len(spec.blocks()[0].components) == 1

def test_abs_coupling_degree(abs_coupling_spec):
    assert abs_coupling_spec.degrees() == [Fraction(2)]
    spec = parse('[-abs(x_2)^{a} * x_1, 0]', 2, {'a': '5/2'})
    assert spec.degrees() == [Fraction(7, 2)]

def test_mixed_norm_degree(mixed_norm_spec):
    assert mixed_norm_spec.degrees() == [Fraction(2, 3) + Fraction(6, 5) + 1]

def test_polynomial_split_by_degree(quadratic_cubic_spec):
    assert quadratic_cubic_spec.degrees() == [Fraction(2), Fraction(3)]
    assert quadratic_cubic_spec.alphas() == [Fraction(1), Fraction(2)]
    assert quadratic_cubic_spec.n_star == 2
    assert quadratic_cubic_spec.mode == MODE_FINITE

def test_evaluate_cubic_norm():
    spec = parse('norm2(x)^2 * x', 3)
    assert np.allclose(evaluate(spec, [0.0, 0.0, 0.0], 1), 0.0)
    assert np.allclose(evaluate(spec, [1.0, 0.0, 0.0], 1), [1.0, 0.0, 0.0])

def test_homogeneity():
    spec = parse('[norm{3}(x)^{1/2} * x_1 * abs(x_2), sgnpow(x_1, 5/2)]', 2)
    x = np.array([0.3, -0.7])
    for block in spec.blocks():
        assert np.allclose(block(2.5 * x), 2.5 ** float(block.degree) * block(x))

def test_evaluate_scaled(quadratic_cubic_spec):
    u = np.array([0.6, -0.8])
    log_r = -3.0
    expected = evaluate_model(quadratic_cubic_spec, np.exp(log_r) * u) / np.exp(log_r)
    assert np.allclose(evaluate_scaled(quadratic_cubic_spec, u, log_r), expected)

def test_composite_degree_and_sign_pattern(composite_spec):
    blocks = composite_spec.blocks()
    assert len(blocks) == 6
    a, b = Fraction(1, 2), Fraction(1, 3)
    assert [block.degree for block in blocks] == [1 + a + (k - 1) * b for k in range(1, 7)]
    for k, block in enumerate(blocks, start=1):
        assert np.allclose(block([1.0, 0.0]), [(-1) ** (k - 1), 0.0])

def test_expand_composite(composite_spec):
    composite = composite_spec.composites[0]
    spec = expand_composite(composite.numerator, composite.denominator, 6)
    assert spec.degrees() == composite_spec.degrees()

def test_composite_truncation_error(composite_spec):
    composite = composite_spec.composites[0]
    direction = np.array([0.6, 0.8])
    for r in (1e-1, 1e-2):
        x = r * direction
        error = np.linalg.norm(evaluate(composite_spec, x, 6) - composite.direct(x))
        # the tail of the geometric series is |x|^(a + 6b) x / (1 + |x|^b)
        assert error / r ** (1 + 1 / 2 + 6 / 3) == pytest.approx(1 / (1 + r ** (1 / 3)), rel=1e-6)

def test_infinite_composite():
    spec = parse('comp(norm2(x) * x; norm2(x); inf)', 2)
    assert spec.mode == MODE_INFINITE
    assert spec.n_star is None
    assert spec.degrees(4) == [2, 3, 4, 5]
    x = np.array([0.01, 0.02])
    assert np.allclose(evaluate_model(spec, x), x * np.linalg.norm(x) / (1 + np.linalg.norm(x)))

def test_remainder_mode():
    spec = parse('[-x_1^3]', 1, epsilon_bar='1/2')
    assert spec.mode == MODE_REMAINDER
    assert spec.epsilon_bar == Fraction(1, 2)

def test_zero_nonlinearity(zero_spec):
    assert zero_spec.is_zero()
    assert zero_spec.degrees() == []
    assert render(zero_spec) == '0'

def test_render_round_trip(cube_root_spec):
    text = render(cube_root_spec)
    assert 'sgnpow(x_2, 1/3)' in text
    assert parse(text, 2).degrees() == cube_root_spec.degrees()

def test_structured_round_trip(abs_coupling_spec):
    data = abs_coupling_spec.model_dump(mode='json')
    spec = parse_structured(data, 2)
    assert spec.degrees() == abs_coupling_spec.degrees()
    assert parse_structured({'terms': ['[x_1^2, 0]', '[0, x_2^3]']}, 2).degrees() == [2, 3]

@pytest.mark.parametrize('source', [
    '[x_1^2, x_3]',
    '[x_1^2',
    '[x_1^{1/2} * x_1, 0]',
    '[x_1, 0]',
    '[1, 0]',
    '[unknown * x_1^2, 0]',
])
def test_grammar_errors(source):
    with pytest.raises(TermError):
        parse(source, 2)

def test_degrees_must_increase():
    with pytest.raises(DegreeError):
        parse(['[0, x_2^3]', '[x_1^2, 0]'], 2)

def test_even_norms_required():
    with pytest.raises(UnsupportedNorm):
        parse('norm3(x) * x', 2, require_even_norms=True)

def test_cube_root_not_smooth(cube_root_spec):
    report = smoothness_domain_check(cube_root_spec, [1.0, 0.0])
    assert not report.applicable
    assert report.offending_factor == 'sgnpow(x_2, 1/3)'
    assert smoothness_domain_check(cube_root_spec, [1.0, 0.5]).applicable

def test_polynomial_always_smooth():
    spec = parse('[0, -x_1^2 * x_2]', 2)
    assert smoothness_domain_check(spec, [1.0, 0.0]).applicable
    assert smoothness_domain_check(spec, [0.0, 1.0]).applicable

def test_mixed_norm_smooth(mixed_norm_spec):
    assert smoothness_domain_check(mixed_norm_spec, [1.0, 0.0, 1.0]).applicable
    assert not smoothness_domain_check(mixed_norm_spec, [0.0, 0.0, 1.0]).applicable

def test_smoothness_needs_nonzero_xi(cube_root_spec):
    with pytest.raises(ValueError):
        smoothness_domain_check(cube_root_spec, [0.0, 0.0])

def test_classify(abs_coupling_spec):
    assert classify(abs_coupling_spec).lipschitz
    assert not classify(parse('[-abs(x_2)^{1/2} * x_1, 0]', 2)).lipschitz

def test_nondegenerate():
    spec = parse('polynorm2(x_1^2, x_2^2) * x', 2)
    factor = spec.blocks()[0].components[0].factors[0]
    assert check_nondegenerate(factor).nondegenerate
    degenerate = parse('polynorm2(x_1 * x_2) * x', 2).blocks()[0].components[0].factors[0]
    assert not check_nondegenerate(degenerate).nondegenerate

def test_homogeneous_norm():
    spec = parse('norm2(x)^2 * x', 2)
    assert homogeneous_norm(spec.blocks()[0]) == pytest.approx(1.0, rel=1e-6)
