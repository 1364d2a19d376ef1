import pytest
import json
import numpy as np
from asympode.expansion.series import expand
from asympode.report.verification import verify, fit_log_slope, slope_tolerance
from asympode.report.emitter import emit, render
from asympode.report.exceptions import *

@pytest.fixture
def cubic_series(scalar_one, cubic_spec, cubic_first):
    return expand(scalar_one, cubic_spec, cubic_first, 3)

def test_cubic_residual_slopes(cubic_exact, cubic_series):
    report = verify(cubic_exact, cubic_series)
    assert report.passed
    assert [fit.verdict for fit in report.fits] == ['pass', 'pass', 'pass']
    assert [fit.slope for fit in report.fits] == [pytest.approx(-3, abs=0.05), pytest.approx(-5, abs=0.05),
                                                   pytest.approx(-7, abs=0.1)]
    assert report.caveat is None
    assert len(report.residual_norms) == 3
    assert len(report.residual_norms[0]) == len(cubic_exact)
    assert report.fits[1].improved

def test_n_max(cubic_exact, cubic_series):
    report = verify(cubic_exact, cubic_series, n_max=1)
    assert [fit.n for fit in report.fits] == [1]

def test_wrong_term_fails(cubic_exact, cubic_series):
    terms = list(cubic_series.terms)
    terms[1] = terms[1].model_copy(update={'q': [[1.1 * terms[1].q[0][0]]]})
    report = verify(cubic_exact, cubic_series.model_copy(update={'terms': terms}))
    assert not report.passed
    assert report.fits[1].verdict == 'fail'
    assert report.fits[1].slope == pytest.approx(-3, abs=0.05)

def test_exhausted_residual_is_vacuous(diag12, zero_spec, linear_first, linear_exact):
    series = expand(diag12, zero_spec, linear_first, 2, policy='fit', trajectory=linear_exact)
    report = verify(linear_exact, series)
    assert report.fits[0].slope == pytest.approx(-2, abs=1e-3)
    assert report.vacuous == [2]
    assert report.passed

def test_zero_policy_caveat(diag12, zero_spec, linear_first, linear_exact):
    series = expand(diag12, zero_spec, linear_first, 2, policy='zero')
    report = verify(linear_exact, series)
    assert report.caveat is not None
    # q_2 is zero, so u_1 only has to decay at least as fast as the next rate
    assert report.fits[0].next_zero
    assert report.fits[0].verdict == 'pass'
    assert report.fits[1].verdict == 'fail'

def test_slope_tolerance(cubic_series):
    # rates 1, 3, 5, 7: half gaps of 1 dominate 5% of the rate
    assert slope_tolerance(cubic_series, 1) == pytest.approx(1.0)
    assert slope_tolerance(cubic_series, 3) == pytest.approx(1.0)
    assert slope_tolerance(cubic_series, 4) is None

def test_fit_log_slope():
    t = np.linspace(0.0, 1.0, 50)
    line = fit_log_slope(t, np.stack([3 * np.exp(-2 * t), 4 * np.exp(-2 * t)], axis=1))
    assert line.slope == pytest.approx(-2.0)
    assert line.intercept == pytest.approx(np.log(5.0))

def test_emit_report(tmp_path, cubic_exact, cubic_series):
    report = verify(cubic_exact, cubic_series)
    data = json.loads(emit(report, 'json', tmp_path / 'report.json'))
    assert data['passed']
    assert 'times' not in data
    assert json.loads((tmp_path / 'report.json').read_text()) == data
    csv = render(report, 'csv').splitlines()
    assert csv[0] == 't,norm_u_1,norm_u_2,norm_u_3'
    assert len(csv) == len(cubic_exact) + 1
    assert render(report, 'gnuplot').startswith('# t norm_u_1')
    with pytest.raises(UnsupportedFormat):
        render(report, 'text')

def test_emit_series_and_lattice(cubic_series):
    rows = render(cubic_series, 'csv').splitlines()
    assert rows[0] == 'n,mu,power,c_1'
    assert rows[2].startswith('2,3,0,')
    assert json.loads(render(cubic_series, 'json'))['policy'] == 'zero'
    table = render(cubic_series.lattice, 'text')
    assert table.splitlines()[2].split()[:3] == ['2', '2', '3']
    assert render(cubic_series.lattice, 'csv').splitlines()[0] == 'n,mu_tilde,mu,mu_float'
    with pytest.raises(UnsupportedFormat):
        render(cubic_series, 'text')
    with pytest.raises(UnsupportedFormat):
        render(cubic_series, 'xml')

def test_emit_io_failure(tmp_path, cubic_series):
    with pytest.raises(IoFailure) as info:
        emit(cubic_series, 'json', tmp_path / 'missing' / 'series.json')
    assert 'series.json' in info.value.path

def test_emit_write_error(mocker, tmp_path, cubic_series):
    mocker.patch('pathlib.Path.write_text', side_effect=PermissionError('denied'))
    with pytest.raises(IoFailure):
        emit(cubic_series, 'csv', tmp_path / 'series.csv')

def test_unsolved_term_fails_report(tmp_path, cubic_exact, cubic_series):
    terms = list(cubic_series.terms)
    terms[1] = terms[1].model_copy(update={'solved': False})
    report = verify(cubic_exact, cubic_series.model_copy(update={'terms': terms}))
    assert all(fit.passed for fit in report.fits)
    assert report.unsolved == [2]
    assert not report.passed
    assert 'n = [2]' in report.failure()
    data = json.loads(emit(report, 'json', tmp_path / 'report.json'))
    assert data['unsolved'] == [2]
    assert not data['passed']
    assert verify(cubic_exact, cubic_series.model_copy(update={'terms': terms}), n_max=1).passed
