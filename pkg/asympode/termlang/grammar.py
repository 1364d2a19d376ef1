"""Text grammar of the nonlinearity language.

    spec      := term (('+' | '-') term)*
    term      := power (('*' | '/') power)*
    power     := atom ('^' exponent)?
    atom      := 'x' | 'x_' i | '[' expr, ... ']' | '[[' row '], ...]'
               | 'norm' P '(' args ')' | 'polynorm' P '(' poly, ... ')'
               | 'abs(x_' i ')' | 'sgnpow(x_' i ',' rational ')'
               | 'comp(' expr ';' expr ';' (int | 'inf') ')'
               | number | parameter | '(' expr ')'
    exponent  := int | parameter | '{' rational '}' | '(' rational ')'
    rational  := arithmetic over numbers and parameters with + - * /

Values are typed while parsing: scalars, vectors, matrices and composites.
Vector valued terms become homogeneous components; a top level scalar is
accepted only in dimension one.
"""
from fractions import Fraction
from typing import Dict, List, Optional, Tuple
import logging
import re
import numpy as np
from pyparsing import (Forward, Keyword, OpAssoc, Optional as Opt, ParseBaseException,
                       ParseFatalException, ParserElement, Regex, StringEnd, Suppress, ZeroOrMore,
                       infix_notation, one_of)

from ..base.rational import Number, to_fraction
from .components import Composite, HomogeneousComponent, NonlinearitySpec, ScalarTerm, combine, make_components
from .constants import MODE_FINITE, MODE_INFINITE, MODE_REMAINDER, RESERVED_NAMES
from .exceptions import DegreeError, GrammarError, UnsupportedNorm
from .factors import CoordPower, NormPower, PolyNormPower, ScalarFactor, power_of
from .polynomials import ScalarPolynomial

logger = logging.getLogger(__name__)

COORDINATE = r'x_(?:\{(\d+)\}|(\d+))'

# identifiers that start a function call or name the state vector are never parameters
PARAMETER = r'(?!(?:poly)?norm\d|(?:x|abs|sgnpow|comp|inf|norm)\b)[A-Za-z][A-Za-z0-9]*'


def _coordinate_number(match) -> int:
    return int(match.group(1) or match.group(2))


class ScalarValue:
    """Sum of (factors, polynomial) products."""

    def __init__(self, terms: List[Tuple[Tuple[ScalarFactor, ...], ScalarPolynomial]]):
        self.terms = terms

    def is_constant(self) -> bool:
        return all(not factors and polynomial.is_constant() for factors, polynomial in self.terms)

    def constant(self) -> float:
        return sum(polynomial.constant_value() for _, polynomial in self.terms)

    def single_factor(self) -> Optional[ScalarFactor]:
        if len(self.terms) == 1:
            factors, polynomial = self.terms[0]
            if len(factors) == 1 and polynomial.is_constant() and polynomial.constant_value() == 1.0:
                return factors[0]
        return None

    def polynomial(self) -> Optional[ScalarPolynomial]:
        """The value as a plain polynomial, None if some term carries a factor."""
        if any(factors for factors, _ in self.terms):
            return None
        total = None
        for _, polynomial in self.terms:
            total = polynomial if total is None else total + polynomial
        return total

    def scale(self, factor: float) -> 'ScalarValue':
        return ScalarValue([(factors, polynomial.scale(factor)) for factors, polynomial in self.terms])


class VectorValue:
    """Sum of (factors, tail) products plus composites."""

    def __init__(self, terms: List[Tuple[Tuple[ScalarFactor, ...], Tuple[ScalarPolynomial, ...]]],
                 composites: List[Composite] = None):
        self.terms = terms
        self.composites = composites or []

    def scale(self, factor: float) -> 'VectorValue':
        terms = [(factors, tuple(entry.scale(factor) for entry in tail)) for factors, tail in self.terms]
        composites = [Composite(numerator=tuple(component.scale(factor) for component in composite.numerator),
                                denominator=composite.denominator, depth=composite.depth)
                      for composite in self.composites]
        return VectorValue(terms, composites)


class MatrixValue:

    def __init__(self, rows: np.ndarray):
        self.rows = rows


class TermParser:
    """Parser for one dimension and one set of named rational parameters."""

    def __init__(self, dimension: int, parameters: Dict[str, Number] = None, require_even_norms: bool = False):
        self.dimension = dimension
        self.parameters = {name: to_fraction(value) for name, value in (parameters or {}).items()}
        for name in self.parameters:
            if name in RESERVED_NAMES or re.fullmatch(r'(poly)?norm\d*', name) or not re.fullmatch(r'[A-Za-z]\w*', name):
                raise GrammarError(f'{name!r} cannot be used as a parameter name')
        self.require_even_norms = require_even_norms
        self.bnf = self._build()

    # -- grammar -------------------------------------------------------------

    def _build(self) -> ParserElement:
        LPAR, RPAR = Suppress('('), Suppress(')')
        LBRACK, RBRACK = Suppress('['), Suppress(']')
        LBRACE, RBRACE = Suppress('{'), Suppress('}')
        COMMA, SEMI, CARET = Suppress(','), Suppress(';'), Suppress('^')

        number = Regex(r'(\d+\.\d*|\.\d+|\d+)([eE][+-]?\d+)?').set_name('number')
        number.set_parse_action(lambda t: to_fraction(t[0]))
        name = Regex(PARAMETER).set_name('parameter')
        name.set_parse_action(self._parameter)

        rational_operand = number | name
        rational = infix_notation(rational_operand, [
            (one_of('+ -'), 1, OpAssoc.RIGHT, self._rational_sign),
            (one_of('* /'), 2, OpAssoc.LEFT, self._rational_chain),
            (one_of('+ -'), 2, OpAssoc.LEFT, self._rational_chain),
        ]).set_name('rational')
        integer = Regex(r'\d+').set_parse_action(lambda t: Fraction(int(t[0])))
        exponent = (LBRACE + rational + RBRACE) | (LPAR + rational + RPAR) | integer | name

        coordinate = Regex(COORDINATE).set_name('coordinate')
        coordinate.set_parse_action(self._coordinate)

        expr = Forward()
        vector_x = Keyword('x').set_parse_action(self._vector_x)
        row = LBRACK + expr + ZeroOrMore(COMMA + expr) + RBRACK
        matrix = (LBRACK + row + ZeroOrMore(COMMA + row) + RBRACK).set_name('matrix')
        matrix.set_parse_action(self._matrix)
        row.set_parse_action(self._row)
        vector_literal = (LBRACK + expr + ZeroOrMore(COMMA + expr) + RBRACK).set_name('vector')
        vector_literal.set_parse_action(self._vector_literal)

        norm_index = Regex(r'norm(\d+)').set_parse_action(lambda t: Fraction(int(t[0][4:]))) | \
            (Suppress(Keyword('norm')) + LBRACE + rational + RBRACE)
        norm_call = (norm_index + LPAR + expr + ZeroOrMore(COMMA + expr) + RPAR).set_name('norm')
        norm_call.set_parse_action(self._norm)
        polynorm_call = (Regex(r'polynorm(\d+)').set_parse_action(lambda t: Fraction(int(t[0][8:]))) +
                         LPAR + expr + ZeroOrMore(COMMA + expr) + RPAR).set_name('polynorm')
        polynorm_call.set_parse_action(self._polynorm)
        abs_call = (Suppress(Keyword('abs')) + LPAR + coordinate + RPAR).set_parse_action(self._abs)
        sgnpow_call = (Suppress(Keyword('sgnpow')) + LPAR + coordinate + COMMA + rational + RPAR)
        sgnpow_call.set_parse_action(self._sgnpow)
        depth = Regex(r'\d+').set_parse_action(lambda t: int(t[0])) | Keyword('inf')
        comp_call = (Suppress(Keyword('comp')) + LPAR + expr + SEMI + expr + SEMI + depth + RPAR).set_name('comp')
        comp_call.set_parse_action(self._composite)
        group = LPAR + expr + RPAR

        atom = (comp_call | polynorm_call | norm_call | abs_call | sgnpow_call | coordinate | vector_x
                | matrix | vector_literal | number.copy().add_parse_action(self._constant)
                | name.copy().add_parse_action(self._constant) | group)
        power = (atom + Opt(CARET + exponent)).set_parse_action(self._power)
        product = (power + ZeroOrMore(one_of('* /') + power)).set_parse_action(self._product)
        total = (Opt(one_of('+ -')) + product + ZeroOrMore(one_of('+ -') + product)).set_parse_action(self._sum)
        expr <<= total
        return expr + StringEnd()

    # -- rational arithmetic -------------------------------------------------

    def _parameter(self, s, loc, t):
        value = t[0]
        if value in ('x', 'inf') or value in RESERVED_NAMES:
            raise ParseFatalException(s, loc, f'{value!r} is not a parameter')
        if value not in self.parameters:
            raise ParseFatalException(s, loc, f'unknown parameter {value!r}')
        return self.parameters[value]

    @staticmethod
    def _rational_sign(t):
        sign, value = t[0]
        return -value if sign == '-' else value

    @staticmethod
    def _rational_chain(s, loc, t):
        items = t[0]
        value = items[0]
        for op, operand in zip(items[1::2], items[2::2]):
            if op == '/' and operand == 0:
                raise ParseFatalException(s, loc, 'division by zero')
            if op == '+':
                value = value + operand
            elif op == '-':
                value = value - operand
            elif op == '*':
                value = value * operand
            else:
                value = value / operand
        return value

    # -- atoms ---------------------------------------------------------------

    def _coordinate(self, s, loc, t):
        index = (_coordinate_number(re.fullmatch(COORDINATE, t[0])))
        if not 1 <= index <= self.dimension:
            raise ParseFatalException(s, loc, f'coordinate x_{index} outside 1..{self.dimension}')
        return ScalarValue([((), ScalarPolynomial.variable(self.dimension, index - 1))])

    def _vector_x(self):
        d = self.dimension
        return VectorValue([((), tuple(ScalarPolynomial.variable(d, i) for i in range(d)))])

    def _constant(self, t):
        return ScalarValue([((), ScalarPolynomial.constant(self.dimension, float(t[0])))])

    def _row(self, s, loc, t):
        entries = []
        for value in t:
            if not isinstance(value, ScalarValue) or not value.is_constant():
                raise ParseFatalException(s, loc, 'matrix entries must be numbers')
            entries.append(value.constant())
        return [tuple(entries)]

    def _matrix(self, s, loc, t):
        rows = list(t)
        if len({len(row) for row in rows}) != 1 or len(rows[0]) != self.dimension:
            raise ParseFatalException(s, loc, f'matrix rows must all have {self.dimension} entries')
        return MatrixValue(np.array(rows, dtype=float))

    def _vector_literal(self, s, loc, t):
        entries = list(t)
        if len(entries) != self.dimension:
            raise ParseFatalException(s, loc, f'vector has {len(entries)} entries, expected {self.dimension}')
        terms = []
        zero = ScalarPolynomial.zero(self.dimension)
        for i, entry in enumerate(entries):
            if not isinstance(entry, ScalarValue):
                raise ParseFatalException(s, loc, 'vector entries must be scalar')
            for factors, polynomial in entry.terms:
                tail = tuple(polynomial if j == i else zero for j in range(self.dimension))
                terms.append((factors, tail))
        return VectorValue(terms)

    def _linear_rows(self, s, loc, arguments) -> np.ndarray:
        if len(arguments) == 1 and isinstance(arguments[0], VectorValue):
            value = arguments[0]
            if value.composites or any(factors for factors, _ in value.terms):
                raise ParseFatalException(s, loc, 'norm argument must be linear in x')
            entries = list(value.terms[0][1])
            for _, tail in value.terms[1:]:
                entries = [a + b for a, b in zip(entries, tail)]
        else:
            entries = []
            for argument in arguments:
                polynomial = argument.polynomial() if isinstance(argument, ScalarValue) else None
                if polynomial is None:
                    raise ParseFatalException(s, loc, 'norm arguments must be linear forms')
                entries.append(polynomial)
        try:
            return np.vstack([entry.linear_row() for entry in entries])
        except ValueError:
            raise ParseFatalException(s, loc, 'norm arguments must be linear forms')

    def _norm(self, s, loc, t):
        p, arguments = t[0], list(t[1:])
        if self.require_even_norms and (p.denominator != 1 or p.numerator % 2):
            raise UnsupportedNorm(f'norm index {p} is not an even integer and smoothness is required')
        rows = self._linear_rows(s, loc, arguments)
        try:
            factor = NormPower(matrix=tuple(tuple(float(v) for v in row) for row in rows), p=p, nu=1)
        except ValueError as e:
            raise ParseFatalException(s, loc, str(e))
        return ScalarValue([((factor,), ScalarPolynomial.constant(self.dimension, 1.0))])

    def _polynorm(self, s, loc, t):
        p, arguments = t[0], list(t[1:])
        if p.numerator % 2:
            raise UnsupportedNorm(f'polynorm index {p} is not even')
        polynomials = []
        for argument in arguments:
            polynomial = argument.polynomial() if isinstance(argument, ScalarValue) else None
            if polynomial is None:
                raise ParseFatalException(s, loc, 'polynorm arguments must be polynomials')
            polynomials.append(polynomial)
        try:
            factor = PolyNormPower(polynomials=tuple(polynomials), p=p, nu=1)
        except ValueError as e:
            raise ParseFatalException(s, loc, str(e))
        return ScalarValue([((factor,), ScalarPolynomial.constant(self.dimension, 1.0))])

    def _coordinate_index(self, s, loc, value: ScalarValue) -> int:
        polynomial = value.polynomial()
        return polynomial.terms[0][0].index(1)

    def _abs(self, s, loc, t):
        factor = CoordPower(index=self._coordinate_index(s, loc, t[0]), sign_type='abs', gamma=1)
        return ScalarValue([((factor,), ScalarPolynomial.constant(self.dimension, 1.0))])

    def _sgnpow(self, s, loc, t):
        gamma = t[1]
        if gamma < 0:
            raise ParseFatalException(s, loc, 'sgnpow exponent must be nonnegative')
        factor = CoordPower(index=self._coordinate_index(s, loc, t[0]), sign_type='signed', gamma=gamma)
        return ScalarValue([((factor,), ScalarPolynomial.constant(self.dimension, 1.0))])

    def _composite(self, s, loc, t):
        numerator, denominator = t[0], t[1]
        depth = None if t[2] == 'inf' else t[2]
        if isinstance(numerator, ScalarValue) and self.dimension == 1:
            numerator = self._promote(numerator)
        if not isinstance(numerator, VectorValue) or numerator.composites:
            raise ParseFatalException(s, loc, 'composite numerator must be a vector expression')
        if not isinstance(denominator, ScalarValue) or len(denominator.terms) != 1:
            raise ParseFatalException(s, loc, 'composite denominator must be a single scalar product')
        factors, polynomial = denominator.terms[0]
        components = self._components(numerator)
        if not components:
            raise ParseFatalException(s, loc, 'composite numerator is zero')
        try:
            term = ScalarTerm(dimension=self.dimension, factors=factors, polynomial=polynomial)
            composite = Composite(numerator=tuple(components), denominator=term, depth=depth)
        except ValueError as e:
            raise ParseFatalException(s, loc, str(e))
        return VectorValue([], [composite])

    # -- operators -----------------------------------------------------------

    def _power(self, s, loc, t):
        base = t[0]
        if len(t) == 1:
            return base
        q = t[1]
        if isinstance(base, (VectorValue, MatrixValue)):
            raise ParseFatalException(s, loc, 'only scalars can be raised to a power')
        if q < 0:
            raise ParseFatalException(s, loc, 'exponents must be nonnegative')
        factor = base.single_factor()
        if factor is not None:
            if isinstance(factor, CoordPower) and factor.sign_type == 'signed':
                if q.denominator != 1:
                    raise ParseFatalException(s, loc, 'sgnpow can only be raised to an integer power')
                factor = power_of(factor, int(q))
            else:
                factor = factor.with_exponent(factor.degree * q if isinstance(factor, CoordPower) else factor.nu * q)
            return ScalarValue([((factor,), ScalarPolynomial.constant(self.dimension, 1.0))])
        if base.is_constant():
            value = base.constant()
            if value < 0 and q.denominator != 1:
                raise ParseFatalException(s, loc, 'negative number raised to a fractional power')
            return ScalarValue([((), ScalarPolynomial.constant(self.dimension, value ** float(q)))])
        if q.denominator != 1:
            raise ParseFatalException(s, loc, 'a plain coordinate or sum needs an integer exponent; '
                                              'use abs(x_i)^{q} or sgnpow(x_i, q)')
        result = ScalarValue([((), ScalarPolynomial.constant(self.dimension, 1.0))])
        for _ in range(int(q)):
            result = self._multiply(s, loc, result, base)
        return result

    def _multiply(self, s, loc, left, right):
        if isinstance(left, ScalarValue) and isinstance(right, ScalarValue):
            return ScalarValue([(lf + rf, lp * rp) for lf, lp in left.terms for rf, rp in right.terms])
        if isinstance(left, VectorValue) and isinstance(right, ScalarValue):
            left, right = right, left
        if isinstance(left, ScalarValue) and isinstance(right, VectorValue):
            if right.composites:
                if not left.is_constant():
                    raise ParseFatalException(s, loc, 'a composite can only be scaled by a number')
                return right.scale(left.constant())
            return VectorValue([(lf + rf, tuple(lp * entry for entry in tail))
                                for lf, lp in left.terms for rf, tail in right.terms])
        if isinstance(left, MatrixValue) and isinstance(right, VectorValue) and not right.composites:
            terms = []
            for factors, tail in right.terms:
                mixed = []
                for row in left.rows:
                    entry = ScalarPolynomial.zero(self.dimension)
                    for weight, polynomial in zip(row, tail):
                        if weight:
                            entry = entry + polynomial.scale(weight)
                    mixed.append(entry)
                terms.append((factors, tuple(mixed)))
            return VectorValue(terms)
        raise ParseFatalException(s, loc, f'cannot multiply {type(left).__name__} by {type(right).__name__}')

    def _product(self, s, loc, t):
        items = list(t)
        value = items[0]
        for op, operand in zip(items[1::2], items[2::2]):
            if op == '/':
                if not isinstance(operand, ScalarValue) or not operand.is_constant() or operand.constant() == 0:
                    raise ParseFatalException(s, loc, 'can only divide by a nonzero number')
                operand = ScalarValue([((), ScalarPolynomial.constant(self.dimension, 1.0 / operand.constant()))])
            value = self._multiply(s, loc, value, operand)
        return value

    def _promote(self, value: ScalarValue) -> VectorValue:
        return VectorValue([(factors, (polynomial,)) for factors, polynomial in value.terms])

    def _add(self, s, loc, left, right):
        if self.dimension == 1:
            left = self._promote(left) if isinstance(left, ScalarValue) else left
            right = self._promote(right) if isinstance(right, ScalarValue) else right
        if isinstance(left, ScalarValue) and isinstance(right, ScalarValue):
            return ScalarValue(left.terms + right.terms)
        if isinstance(left, VectorValue) and isinstance(right, VectorValue):
            return VectorValue(left.terms + right.terms, left.composites + right.composites)
        raise ParseFatalException(s, loc, f'cannot add {type(left).__name__} and {type(right).__name__}')

    def _sum(self, s, loc, t):
        items = list(t)
        if items[0] in ('+', '-'):
            sign = items.pop(0)
        else:
            sign = '+'
        value = items[0]
        if sign == '-':
            value = self._negate(s, loc, value)
        for op, operand in zip(items[1::2], items[2::2]):
            if op == '-':
                operand = self._negate(s, loc, operand)
            value = self._add(s, loc, value, operand)
        return value

    def _negate(self, s, loc, value):
        if isinstance(value, MatrixValue):
            return MatrixValue(-value.rows)
        return value.scale(-1.0)

    # -- results -------------------------------------------------------------

    def _components(self, value: VectorValue) -> List[HomogeneousComponent]:
        components = []
        for factors, tail in value.terms:
            components.extend(make_components(self.dimension, factors, tail))
        return combine(components)

    def parse_value(self, source: str):
        try:
            return self.bnf.parse_string(source, parse_all=True)[0]
        except ParseBaseException as e:
            raise GrammarError(e.msg, e.lineno, e.col) from e
        except ValueError as e:
            raise GrammarError(str(e)) from e

    def parse_vector(self, source: str) -> Tuple[List[HomogeneousComponent], List[Composite]]:
        value = self.parse_value(source)
        if isinstance(value, ScalarValue):
            if self.dimension != 1:
                raise GrammarError(f'nonlinearity must be a vector of dimension {self.dimension}, got a scalar')
            value = self._promote(value)
        if not isinstance(value, VectorValue):
            raise GrammarError('nonlinearity must be a vector expression')
        if any(len(tail) != self.dimension for _, tail in value.terms):
            raise GrammarError(f'nonlinearity must have {self.dimension} entries')
        return self._components(value), value.composites


def infer_dimension(source: str) -> int:
    """Largest coordinate index mentioned in the text."""
    indices = [_coordinate_number(match) for match in re.finditer(COORDINATE, source)]
    return max(indices) if indices else 1


def parse(source, dimension: int = None, parameters: Dict[str, Number] = None, mode: str = None,
          epsilon_bar: Number = None, require_even_norms: bool = False) -> NonlinearitySpec:
    """Parse grammar text, or a list of texts given in increasing degree, into a NonlinearitySpec.

    The mode defaults to h1 when some composite has infinite depth, to the
    remainder mode when epsilon_bar is given and to h2 otherwise.
    """
    sources = [source] if isinstance(source, str) else list(source)
    if dimension is None:
        dimension = max(infer_dimension(text) for text in sources) if sources else 1
    parser = TermParser(dimension, parameters, require_even_norms)

    components: List[HomogeneousComponent] = []
    composites: List[Composite] = []
    previous: Optional[Fraction] = None
    for text in sources:
        parsed, nested = parser.parse_vector(text)
        if len(sources) > 1:
            degrees = sorted({component.degree for component in parsed} |
                             {component.degree for composite in nested for component in composite.numerator})
            if previous is not None and degrees and degrees[0] <= previous:
                raise DegreeError(f'degrees must increase strictly, {text!r} starts at degree {degrees[0]}')
            if degrees:
                previous = degrees[-1]
        components.extend(parsed)
        composites.extend(nested)

    if mode is None:
        if any(composite.depth is None for composite in composites):
            mode = MODE_INFINITE
        elif epsilon_bar is not None:
            mode = MODE_REMAINDER
        else:
            mode = MODE_FINITE
    try:
        spec = NonlinearitySpec(dimension=dimension, mode=mode, components=tuple(combine(components)),
                                composites=tuple(composites),
                                epsilon_bar=None if epsilon_bar is None else to_fraction(epsilon_bar))
    except ValueError as e:
        raise GrammarError(str(e)) from e
    logger.debug(f'Parsed nonlinearity in mode {spec.mode}: {spec.render()}')
    return spec


def render(spec: NonlinearitySpec) -> str:
    return spec.render()


def parse_structured(data: dict, dimension: int = None, parameters: Dict[str, Number] = None,
                     require_even_norms: bool = False) -> NonlinearitySpec:
    """Nonlinearity given as JSON: {"terms": [text, ...], "mode": ..., "epsilon_bar": ...} or a spec dump."""
    if 'terms' in data:
        terms = data['terms']
        if isinstance(terms, str) or not terms:
            raise GrammarError('"terms" must be a nonempty list of grammar texts')
        return parse(terms, dimension, parameters, mode=data.get('mode'), epsilon_bar=data.get('epsilon_bar'),
                     require_even_norms=require_even_norms)
    try:
        spec = NonlinearitySpec.model_validate(data)
    except ValueError as e:
        raise GrammarError(str(e)) from e
    if dimension is not None and spec.dimension != dimension:
        raise GrammarError(f'nonlinearity has dimension {spec.dimension}, expected {dimension}')
    return spec
