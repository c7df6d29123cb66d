"""The five integrand families on [0, pi].

``CesaroReal`` and ``CesaroComplex`` are the same function written two ways
(an all-real trig expression and the imaginary part of a triple exponential).
They share no code, so comparing them checks the equivalence rather than
assuming it.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial
from typing import Union

import gmpy2
from gmpy2 import mpc, mpfr

from . import mpreal
from .exceptions import DomainError


def _nonneg(name, value, minimum=0):
    if isinstance(value, bool) or int(value) != value or value < minimum:
        raise DomainError(f"{name} must be an integer >= {minimum}, got {value!r}")


@dataclass(frozen=True)
class CesaroReal:
    """exp(e^{cos t} cos(sin t)) * sin(e^{cos t} sin(sin t)) * sin(n t)"""

    n: int

    def __post_init__(self):
        _nonneg("n", self.n, 1)


@dataclass(frozen=True)
class CesaroComplex:
    """Im(exp(exp(e^{i t}))) * sin(n t)"""

    n: int

    def __post_init__(self):
        _nonneg("n", self.n, 1)


@dataclass(frozen=True)
class PowerKernel:
    """Im(exp(j e^{i t})) * sin(n t)"""

    j: int
    n: int

    def __post_init__(self):
        _nonneg("j", self.j)
        _nonneg("n", self.n)


@dataclass(frozen=True)
class BlockKernel:
    """Im((exp(e^{i t}) - 1)^k) / k! * sin(n t)"""

    k: int
    n: int

    def __post_init__(self):
        _nonneg("k", self.k)
        _nonneg("n", self.n)


@dataclass(frozen=True)
class SineProduct:
    """sin(m t) * sin(n t)"""

    m: int
    n: int

    def __post_init__(self):
        _nonneg("m", self.m)
        _nonneg("n", self.n)


IntegrandKind = Union[CesaroReal, CesaroComplex, PowerKernel, BlockKernel, SineProduct]


def _cpow(base: mpc, k: int) -> mpc:
    # square-and-multiply; k == 0 gives exactly 1
    result = mpc(1)
    while k:
        if k & 1:
            result = result * base
        k >>= 1
        if k:
            base = base * base
    return result


def _cesaro_real(n, t):
    c = gmpy2.cos(t)
    s = gmpy2.sin(t)
    ec = gmpy2.exp(c)
    return gmpy2.exp(ec * gmpy2.cos(s)) * gmpy2.sin(ec * gmpy2.sin(s)) * gmpy2.sin(n * t)


def _cesaro_complex(n, t):
    inner = mpreal.expi(t)
    value = mpreal.cexp(mpreal.cexp(inner))
    return value.imag * gmpy2.sin(n * t)


def _power_kernel(j, n, t):
    if j == 0:
        return mpfr(0)
    value = mpreal.cexp(j * mpreal.expi(t))
    return value.imag * gmpy2.sin(n * t)


def _block_kernel(k, n, t):
    base = mpreal.cexp(mpreal.expi(t)) - 1
    value = _cpow(base, k)
    return value.imag / factorial(k) * gmpy2.sin(n * t)


def evaluate_at(kind: IntegrandKind, theta: mpfr) -> mpfr:
    """Evaluate at the active MPFR precision (no context switch)."""
    if isinstance(kind, CesaroComplex):
        return _cesaro_complex(kind.n, theta)
    if isinstance(kind, CesaroReal):
        return _cesaro_real(kind.n, theta)
    if isinstance(kind, PowerKernel):
        return _power_kernel(kind.j, kind.n, theta)
    if isinstance(kind, BlockKernel):
        return _block_kernel(kind.k, kind.n, theta)
    if isinstance(kind, SineProduct):
        return gmpy2.sin(kind.m * theta) * gmpy2.sin(kind.n * theta)
    raise TypeError(f"unknown integrand kind {kind!r}")


def evaluate(kind: IntegrandKind, theta, p: int) -> mpfr:
    """Integrand value at ``theta`` computed with ``p`` bits of working precision.

    ``theta`` may be anything :func:`mpreal.real` accepts. Values outside
    [0, pi] are allowed.
    """
    with mpreal.working_precision(p):
        return evaluate_at(kind, mpreal.real(theta, p))


def magnitude_bound(kind: IntegrandKind, p: int = mpreal.MIN_PRECISION) -> mpfr:
    """Upper bound on |integrand| over a full period.

    * Cesaro forms: |Im exp(exp(e^{it}))| <= exp(Re exp(e^{it})) <= e^e.
    * PowerKernel(j, n): |exp(j e^{it})| = e^{j cos t} <= e^j.
    * BlockKernel(k, n): |exp(e^{it}) - 1| <= e^{cos t} + 1 <= 1 + e.
    * SineProduct: 1.

    Rounded upward so the bound stays a bound.
    """
    with mpreal.working_precision(p), gmpy2.context(gmpy2.get_context(), round=gmpy2.RoundUp):
        if isinstance(kind, (CesaroReal, CesaroComplex)):
            return gmpy2.exp(gmpy2.exp(1))
        if isinstance(kind, PowerKernel):
            return gmpy2.exp(kind.j)
        if isinstance(kind, BlockKernel):
            return (1 + gmpy2.exp(1)) ** kind.k / factorial(kind.k)
        if isinstance(kind, SineProduct):
            return mpfr(1)
    raise TypeError(f"unknown integrand kind {kind!r}")
