"""
Parsers for command-line tokens.
"""
import logging
from fractions import Fraction

import numexpr

from entprod.errors import ValidationError
from entprod.gibbs_register import GridRange
from entprod.hilbert import Partition

# Set up logging
logger = logging.getLogger(__name__)


def parse_partition(text: str) -> Partition:
    """
    Parses the canonical partition syntax ``"0,1|2,3"``.

    Blocks are separated by ``|`` and indices by ``,``. Whitespace is rejected.

    Args:
        text (str): Partition string.

    Returns:
        Partition: The parsed blocks.
    """
    if any(ch.isspace() for ch in text):
        raise ValidationError(f"partition string must not contain whitespace: {text!r}", invariant="partition")
    try:
        blocks = [tuple(int(index) for index in block.split(",")) for block in text.split("|")]
    except ValueError:
        raise ValidationError(f"malformed partition string: {text!r}", invariant="partition")
    return Partition(tuple(blocks))


def parse_range(text: str) -> GridRange:
    """Parses ``"start:stop:steps"``; steps counts intervals, so the grid has steps + 1 points."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ValidationError(f"range must look like start:stop:steps, got {text!r}", invariant="range")
    try:
        start, stop, steps = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ValidationError(f"malformed range: {text!r}", invariant="range")
    return GridRange(start, stop, steps)


def parse_number(token: str) -> complex:
    """
    Parses one numeric token.

    Plain literals (``0.5``, ``1+2j``) are read directly; anything else is
    evaluated with numexpr, e.g. ``1/sqrt(2)``.
    """
    token = token.strip()
    try:
        return complex(token)
    except ValueError:
        pass
    try:
        result = numexpr.evaluate(token)
        return complex(result.item() if hasattr(result, "item") else result)
    except Exception as e:
        raise ValidationError(f"could not evaluate numeric token {token!r}: {e}", invariant="number")


def parse_numbers(text: str) -> list[complex]:
    return [parse_number(token) for token in text.split(",") if token.strip()]


def parse_reals(text: str) -> list[float]:
    values = parse_numbers(text)
    if any(v.imag != 0 for v in values):
        raise ValidationError(f"expected real numbers, got {text!r}", invariant="number")
    return [v.real for v in values]


def parse_fraction(text: str) -> Fraction:
    """Reads a (half-)integer quantum number such as ``1``, ``1/2`` or ``0.5``."""
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ValidationError(f"malformed quantum number: {text!r}", invariant="quantum_numbers")
