"""Extended-precision real/complex substrate backed by MPFR (via gmpy2).

Values are plain ``gmpy2.mpfr`` / ``gmpy2.mpc`` objects. Each carries its own
precision in bits; arithmetic rounds to the precision of the active context,
which callers set with :func:`working_precision`.
"""

from __future__ import annotations

import math
from contextlib import contextmanager
from fractions import Fraction
from typing import Iterator, Sequence, Union

import gmpy2
from gmpy2 import mpc, mpfr

from .exceptions import PrecisionError

MIN_PRECISION = 53

BigReal = mpfr
BigComplex = mpc

Number = Union[int, float, Fraction, mpfr]


def check_precision(p: int) -> int:
    if int(p) != p or p < MIN_PRECISION:
        raise PrecisionError(f"precision must be an integer >= {MIN_PRECISION} bits, got {p!r}")
    return int(p)


@contextmanager
def working_precision(p: int) -> Iterator[gmpy2.context]:
    """Run the enclosed block with MPFR precision ``p`` and overflow trapping."""
    p = check_precision(p)
    ctx = gmpy2.context(
        gmpy2.get_context(),
        precision=p,
        real_prec=p,
        imag_prec=p,
        trap_overflow=True,
    )
    with ctx:
        yield ctx


def real(x: Number, p: int) -> mpfr:
    """Round an int, float, Fraction or mpfr to a BigReal of precision ``p``."""
    p = check_precision(p)
    if isinstance(x, Fraction):
        return mpfr(gmpy2.mpq(x.numerator, x.denominator), p)
    return mpfr(x, p)


def const_pi(p: int) -> mpfr:
    with working_precision(p):
        return gmpy2.const_pi()


def const_e(p: int) -> mpfr:
    with working_precision(p):
        return gmpy2.exp(1)


def cexp(z: mpc) -> mpc:
    """exp(z) = exp(Re z) * (cos Im z + i sin Im z) at the active precision.

    Raises ``gmpy2.OverflowResultError`` if exp(Re z) overflows the exponent
    range (only under :func:`working_precision`, which traps overflow).
    """
    z = mpc(z)
    s, c = gmpy2.sin_cos(z.imag)
    r = gmpy2.exp(z.real)
    return mpc(r * c, r * s)


def expi(theta: mpfr) -> mpc:
    """e^{i theta} via DeMoivre."""
    s, c = gmpy2.sin_cos(theta)
    return mpc(c, s)


def pairwise_sum(values: Sequence[mpfr]) -> mpfr:
    """Sum in a fixed balanced-tree order.

    The result depends only on the sequence, never on how it was produced, so
    parallel producers give bit-identical totals.
    """
    n = len(values)
    if n == 0:
        return mpfr(0)
    if n <= 8:
        acc = values[0]
        for v in values[1:]:
            acc = acc + v
        return acc
    mid = n // 2
    return pairwise_sum(values[:mid]) + pairwise_sum(values[mid:])


def log2_ceil(x: int) -> int:
    """ceil(log2(x)) for a positive integer, exactly."""
    if x <= 0:
        raise ValueError("log2_ceil needs a positive integer")
    return (x - 1).bit_length()


def decimal_digits_for(p: int) -> int:
    """Significant decimal digits needed for a p-bit value to round-trip."""
    return int(math.ceil(p * math.log10(2))) + 1


def to_decimal(x: mpfr, digits: int | None = None) -> str:
    """Render ``x`` as ``[-]d.ddd...e[+-]XX``.

    With ``digits=None`` enough significant digits are used to round-trip at
    the value's own precision.
    """
    if digits is None:
        digits = decimal_digits_for(x.precision)
    if not gmpy2.is_finite(x):
        return str(x)
    if x == 0:
        return ("-" if gmpy2.is_signed(x) else "") + "0." + "0" * (digits - 1) + "e+00"
    mantissa, exp, _ = x.digits(10, digits)
    sign = ""
    if mantissa.startswith("-"):
        sign, mantissa = "-", mantissa[1:]
    # digits() gives 0.mantissa * 10^exp
    e10 = exp - 1
    body = mantissa[0] + "." + mantissa[1:] if len(mantissa) > 1 else mantissa
    return f"{sign}{body}e{'+' if e10 >= 0 else '-'}{abs(e10):02d}"


def from_decimal(s: str, p: int) -> mpfr:
    return mpfr(s, check_precision(p))
