import pytest
import json
from fractions import Fraction
from asympode.spectral.decomposition import decompose
from asympode.exponents.lattice import (build_lattice, candidate_rates, enumerate_sums, extend_lattice,
                                        finite_mode_limit, format_table, index_of, Generator)
from asympode.exponents.exceptions import *

def staggered_degrees(j):
    return [Fraction(1, 3) + Fraction(k - 1, 4) for k in range(1, j + 1)]

def brute_force_sums(generators, bound):
    """Every sum of generators not above bound, by exhaustive recursion."""
    found = {Fraction(0)}

    def extend(start, total):
        for i in range(start, len(generators)):
            value = total + generators[i]
            if value > bound:
                break
            found.add(value)
            extend(i, value)

    extend(0, Fraction(0))
    return sorted(found)

def test_staggered_degree_rule(scalar_one):
    lattice = build_lattice(scalar_one, 1, staggered_degrees, 25)
    assert lattice.tilde[:7] == [0, Fraction(1, 3), Fraction(7, 12), Fraction(2, 3), Fraction(5, 6),
                                 Fraction(11, 12), Fraction(1)]
    assert not lattice.finite
    bound = lattice.window
    generators = [alpha for alpha in staggered_degrees(4 * int(bound) + 8) if alpha <= bound]
    assert lattice.tilde == brute_force_sums(generators, bound)
    assert lattice.rates == [value + 1 for value in lattice.tilde]

def test_cubic_rates(scalar_one, cubic_spec):
    lattice = build_lattice(scalar_one, 1, cubic_spec.alphas(), 5)
    assert lattice.rates == [1, 3, 5, 7, 9]
    assert lattice.elements[2].decompositions[0].render() == 'z_1=2'
    assert index_of(lattice, 5) == 3

def test_eigen_gaps_and_degrees(diag13):
    lattice = build_lattice(diag13, 1, [2], 6)
    # gap 2 and alpha_1 = 2 coincide, so mu~ = 2 has two decompositions
    assert lattice.tilde[:3] == [0, 2, 4]
    assert len(lattice.elements[1].decompositions) == 2
    assert {d.render() for d in lattice.elements[1].decompositions} == {'m_2=1', 'z_1=1'}

def test_base_rate_above_smallest_eigenvalue(diag13):
    lattice = build_lattice(diag13, 3, [2], 3)
    assert lattice.base_index == 2
    assert lattice.rates == [3, 9, 15]
    assert all(generator.kind == 'degree' for generator in lattice.generators)

def test_repeated_degrees_rejected(scalar_one):
    with pytest.raises(ValueError):
        build_lattice(scalar_one, 1, [2, 2], 3)

def test_empty_degree_list(scalar_one):
    with pytest.raises(EmptyDegreeList):
        build_lattice(scalar_one, 1, [], 2)
    assert build_lattice(scalar_one, 1, [], 1).rates == [1]

def test_zero_nonlinearity_lattice(diag12):
    lattice = build_lattice(diag12, 1, [], 4)
    assert lattice.rates == [1, 2, 3, 4]

def test_enumerate_sums_each_multiset_once():
    generators = iter([Generator(kind='degree', index=1, value=1), Generator(kind='degree', index=2, value=1)])
    sums = []
    for value, combo in enumerate_sums(generators):
        if value > 2:
            break
        sums.append((value, combo))
    assert sums == [(0, ()), (1, (0,)), (1, (1,)), (2, (0, 0)), (2, (0, 1)), (2, (1, 1))]

def test_float_spectrum_groups_values():
    sd = decompose([[2 ** 0.5, 0], [0, 2 * 2 ** 0.5]], snap_tol=1e-15)
    assert not sd.exact
    lattice = build_lattice(sd, sd.distinct[0], [1], 3)
    # the gap equals alpha_1 * lam up to rounding
    assert len(lattice.elements[1].decompositions) == 2
    assert float(lattice.rate_of(2)) == pytest.approx(2 * 2 ** 0.5)

def test_rate_not_in_lattice(scalar_one, cubic_spec):
    lattice = build_lattice(scalar_one, 1, cubic_spec.alphas(), 3)
    with pytest.raises(RateNotInLattice):
        index_of(lattice, 2)

def test_extend_lattice(scalar_one):
    lattice = build_lattice(scalar_one, 1, [2, 3], 3)
    extended = extend_lattice(scalar_one, lattice, 6)
    assert extended.rates[:3] == lattice.rates
    assert len(extended) == 6
    with pytest.raises(ValueError):
        extend_lattice(scalar_one, build_lattice(scalar_one, 1, staggered_degrees, 3), 6)

def test_finite_mode_limit(scalar_one):
    lattice = build_lattice(scalar_one, 1, [2], 2)
    n_bar, extended = finite_mode_limit(scalar_one, lattice, 3, Fraction(1, 2))
    # rates 1, 3 lie below 7/2, rate 5 does not
    assert n_bar == 2
    n_bar, extended = finite_mode_limit(scalar_one, lattice, 3, Fraction(9, 2))
    assert n_bar == 4
    assert len(extended) >= 5

def test_candidate_rates(diag12):
    assert candidate_rates(diag12, Fraction(1, 2), 5) == [1, Fraction(3, 2), 2, Fraction(5, 2), 3]
    assert candidate_rates(diag12, 1, 0) == []

def test_format_table(scalar_one, cubic_spec):
    lattice = build_lattice(scalar_one, 1, cubic_spec.alphas(), 3)
    text = format_table(lattice)
    assert text.splitlines()[0].split()[:3] == ['n', 'mu_tilde', 'mu']
    assert text.splitlines()[3].split()[:3] == ['3', '4', '5']
    data = json.loads(format_table(lattice, 'json'))
    assert data['base_rate'] == '1'
    assert [row['mu'] for row in data['rows']] == ['1', '3', '5']
    with pytest.raises(ValueError):
        format_table(lattice, 'xml')
