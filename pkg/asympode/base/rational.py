from fractions import Fraction
from typing import Annotated, Optional, Union
from pydantic import PlainSerializer, PlainValidator
import math

Number = Union[int, float, str, Fraction]

# continued fraction reconstruction gives up past this denominator
MAX_DENOMINATOR = 10**6
MAX_CONVERGENTS = 64


def to_fraction(value: Number) -> Fraction:
    """Convert an int, Fraction, decimal string, rational string "a/b" or float to an exact Fraction.

    Floats are converted through their shortest repr so 0.1 becomes 1/10.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ValueError(f'Not a number: {value!r}')
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f'Not a finite number: {value!r}')
        return Fraction(repr(value))
    if isinstance(value, str):
        text = value.strip().replace(' ', '')
        if not text:
            raise ValueError('Empty number')
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError) as e:
            raise ValueError(f'Not a rational number: {value!r}') from e
    raise ValueError(f'Unsupported number type: {type(value).__name__}')


def format_fraction(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f'{value.numerator}/{value.denominator}'


def snap(value: float, tol: float) -> Optional[Fraction]:
    """Rational reconstruction of a float by continued fraction convergents.

    Returns the first convergent within tol of value, or None when no convergent
    with denominator up to MAX_DENOMINATOR is close enough.
    """
    if not math.isfinite(value):
        return None
    sign = -1 if value < 0 else 1
    x = abs(value)
    h_prev, h = 0, 1
    k_prev, k = 1, 0
    rest = x
    for _ in range(MAX_CONVERGENTS):
        a = math.floor(rest)
        h_prev, h = h, a * h + h_prev
        k_prev, k = k, a * k + k_prev
        if k > MAX_DENOMINATOR:
            return None
        candidate = Fraction(h, k)
        if abs(float(candidate) - x) <= tol:
            return sign * candidate
        frac = rest - a
        if frac <= 0:
            return None
        rest = 1 / frac
    return None


def binomial(nu: Fraction, k: int) -> Fraction:
    """Generalized binomial coefficient nu choose k for rational nu."""
    result = Fraction(1)
    for i in range(k):
        result = result * (nu - i) / (i + 1)
    return result


def _serialize_fraction(value: Fraction) -> str:
    return format_fraction(value)


# pydantic field type for exact rationals given as ints, "a/b" strings, decimals or Fractions
Rational = Annotated[Fraction, PlainValidator(to_fraction), PlainSerializer(_serialize_fraction, return_type=str)]
