from pathlib import Path
from typing import List, Sequence, Union
import json
import logging

from ..base.rational import format_fraction
from ..exponents.lattice import ExponentLattice, format_table
from ..expansion.series import ExpansionSeries, series_to_json
from .constants import EMIT_FORMATS
from .exceptions import IoFailure, UnsupportedFormat
from .verification import VerificationReport

logger = logging.getLogger(__name__)

Emittable = Union[VerificationReport, ExpansionSeries, ExponentLattice]


def _table(header: Sequence[str], rows: Sequence[Sequence[object]], gnuplot: bool) -> str:
    if gnuplot:
        lines = ['# ' + ' '.join(header)] + [' '.join(str(value) for value in row) for row in rows]
    else:
        lines = [','.join(header)] + [','.join(str(value) for value in row) for row in rows]
    return '\n'.join(lines) + '\n'


def _report_rows(report: VerificationReport) -> List[List[str]]:
    rows = []
    for i, t in enumerate(report.times):
        rows.append([repr(t)] + [repr(stream[i]) for stream in report.residual_norms])
    return rows


def _series_rows(series: ExpansionSeries) -> List[List[str]]:
    rows = []
    for term in series.terms:
        mu = format_fraction(term.mu)
        for power, coefficients in enumerate(term.q):
            rows.append([str(term.n), mu, str(power)] + [repr(value) for value in coefficients])
    return rows


def render(obj: Emittable, fmt: str) -> str:
    """Text of obj in one of json, csv, gnuplot (whitespace columns) or text (lattices only)."""
    if fmt not in EMIT_FORMATS:
        raise UnsupportedFormat(f'format must be one of {EMIT_FORMATS}, got {fmt!r}')
    if isinstance(obj, ExponentLattice):
        if fmt in ('json', 'text'):
            return format_table(obj, fmt) + ('\n' if fmt == 'json' else '')
        rows = [[str(element.n), format_fraction(element.tilde), format_fraction(element.rate),
                 repr(float(element.rate))] for element in obj.elements]
        return _table(['n', 'mu_tilde', 'mu', 'mu_float'], rows, fmt == 'gnuplot')
    if isinstance(obj, ExpansionSeries):
        if fmt == 'json':
            return series_to_json(obj)
        if fmt == 'text':
            raise UnsupportedFormat('series have no text form, use json, csv or gnuplot')
        header = ['n', 'mu', 'power'] + [f'c_{i + 1}' for i in range(len(obj.xi))]
        return _table(header, _series_rows(obj), fmt == 'gnuplot')
    if isinstance(obj, VerificationReport):
        if fmt == 'json':
            summary = obj.model_dump(mode='json', exclude={'times', 'residual_norms'})
            summary['passed'] = obj.passed
            return json.dumps(summary, indent=2, sort_keys=True) + '\n'
        if fmt == 'text':
            raise UnsupportedFormat('reports have no text form, use json, csv or gnuplot')
        header = ['t'] + [f'norm_u_{n}' for n in range(1, len(obj.residual_norms) + 1)]
        return _table(header, _report_rows(obj), fmt == 'gnuplot')
    raise UnsupportedFormat(f'cannot emit {type(obj).__name__}')


def emit(obj: Emittable, fmt: str, path: Union[str, Path] = None) -> str:
    """Render obj and write it to path when one is given; returns the text."""
    text = render(obj, fmt)
    if path is not None:
        try:
            Path(path).write_text(text, encoding='utf-8')
        except OSError as e:
            logger.error(f'Failed to write {path}', exc_info=True)
            raise IoFailure(str(path)) from e
        logger.debug(f'Wrote {path}')
    return text
