"""Bell numbers and the supporting integral identities as computable checks."""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from math import comb, factorial

import gmpy2
from gmpy2 import mpfr

from . import exact, mpreal
from .exceptions import DomainError
from .integrand import BlockKernel, CesaroComplex, CesaroReal, PowerKernel, SineProduct
from .quadrature import (
    DEFAULT_GUARD_BITS,
    QuadratureResult,
    integrate,
    plan_for_bell,
    plan_for_precision,
)

#: Working precision for identity checks when the caller gives none.
DEFAULT_IDENTITY_BITS = 128
#: Floor on the precision used for the uncorrected (B_n / n!) formula.
UNCORRECTED_MIN_BITS = 96
DEFAULT_DOBINSKI_BITS = 113


@dataclass(frozen=True)
class IdentityResidual:
    lhs: mpfr
    rhs: mpfr
    abs_residual: mpfr
    tolerance: mpfr
    passed: bool
    quadrature: QuadratureResult | None = None

    @classmethod
    def compare(cls, lhs, rhs, tolerance, quadrature=None):
        with mpreal.working_precision(max(lhs.precision, rhs.precision)):
            residual = abs(lhs - rhs)
        return cls(lhs, rhs, residual, tolerance, bool(residual <= tolerance), quadrature)


@dataclass(frozen=True)
class CesaroEstimate:
    estimate: mpfr
    rounded: int
    certified: bool
    quadrature: QuadratureResult


@dataclass(frozen=True)
class DobinskiEstimate:
    estimate: mpfr
    terms_used: int
    tail_bound: mpfr


def _require_n(n, minimum=1):
    if isinstance(n, bool) or int(n) != n or n < minimum:
        raise DomainError(f"n must be an integer >= {minimum}, got {n!r}")


def bell_cesaro(
    n: int,
    guard_bits: int = DEFAULT_GUARD_BITS,
    real_form: bool = False,
    min_bits: int | None = None,
) -> CesaroEstimate:
    """B_n as 2 n!/(pi e) times the integral of the Cesaro integrand.

    ``real_form`` switches from the Im-of-exponential integrand to the all-real
    trig form. ``min_bits`` raises the planned working precision.
    """
    _require_n(n)
    plan = plan_for_bell(n, guard_bits)
    if min_bits is not None and min_bits > plan.working_bits:
        plan = replace(plan, working_bits=mpreal.check_precision(min_bits))
    kind = CesaroReal(n) if real_form else CesaroComplex(n)
    quad = integrate(kind, plan)
    with mpreal.working_precision(plan.working_bits):
        scale = 2 * factorial(n) / (gmpy2.const_pi() * gmpy2.exp(1))
        estimate = quad.value * scale
        rounded = int(gmpy2.rint(estimate))
        certified = quad.converged and abs(estimate - rounded) < mpfr(1) / 4
    return CesaroEstimate(estimate, rounded, bool(certified), quad)


def bell_cesaro_uncorrected(n: int, p: int | None = None) -> mpfr:
    """The integral scaled by 2/(pi e) alone, i.e. without the n! factor.

    Evaluates to B_n / n!, which equals B_n only for n = 1.
    """
    _require_n(n)
    kind = CesaroComplex(n)
    if p is None:
        p = max(plan_for_bell(n).working_bits, UNCORRECTED_MIN_BITS)
    quad = integrate(kind, plan_for_precision(kind, p))
    with mpreal.working_precision(p):
        return quad.value * 2 / (gmpy2.const_pi() * gmpy2.exp(1))


def _residual_from_integral(kind, rhs_fraction: Fraction, p: int | None) -> IdentityResidual:
    # rhs = rhs_fraction * pi, rounded once from the exact rational
    p = DEFAULT_IDENTITY_BITS if p is None else mpreal.check_precision(p)
    plan = plan_for_precision(kind, p)
    quad = integrate(kind, plan)
    with mpreal.working_precision(p):
        rhs = mpreal.real(rhs_fraction, p) * gmpy2.const_pi()
        tolerance = 2 * plan.target_abs_error
    return IdentityResidual.compare(quad.value, rhs, tolerance, quad)


def power_kernel_residual(j: int, n: int, p: int | None = None) -> IdentityResidual:
    """Im int_0^pi exp(j e^{it}) sin(nt) dt  against  j^n pi / (2 n!)."""
    _require_n(n)
    if j < 0:
        raise DomainError("j must be >= 0")
    rhs = Fraction(j**n, 2 * factorial(n))
    return _residual_from_integral(PowerKernel(j, n), rhs, p)


def block_kernel_residual(k: int, n: int, p: int | None = None) -> IdentityResidual:
    """Im int_0^pi (exp(e^{it}) - 1)^k / k! sin(nt) dt  against  S(n, k) pi / (2 n!)."""
    _require_n(n)
    if k < 0:
        raise DomainError("k must be >= 0")
    rhs = Fraction(exact.stirling(n, k), 2 * factorial(n))
    return _residual_from_integral(BlockKernel(k, n), rhs, p)


def orthogonality_check(m: int, n: int, p: int | None = None) -> IdentityResidual:
    """int_0^pi sin(mt) sin(nt) dt  against  pi/2 if m == n >= 1 else 0."""
    if m < 0 or n < 0:
        raise DomainError("m and n must be >= 0")
    rhs = Fraction(1, 2) if (m == n and n >= 1) else Fraction(0)
    return _residual_from_integral(SineProduct(m, n), rhs, p)


def bell_dobinski(n: int, rel_tol=1e-10, p: int | None = None) -> DobinskiEstimate:
    """B_n from (1/e) sum_k k^n / k!, truncated with a proven tail bound.

    For k >= max(2n, 4) successive terms shrink by at least half, so the tail
    after term K is at most twice term K+1. Summation stops once that bound is
    below ``rel_tol`` times the partial sum.
    """
    _require_n(n, 0)
    p = DEFAULT_DOBINSKI_BITS if p is None else mpreal.check_precision(p)
    with mpreal.working_precision(p):
        rel_tol = mpfr(rel_tol)
        if not rel_tol > 0:
            raise DomainError("rel_tol must be positive")
        ratio_from = max(2 * n, 4)
        partial = mpfr(0)
        k = 0
        fact = 1
        while True:
            partial += mpfr(k**n) / fact
            k += 1
            fact *= k
            nxt = mpfr(k**n) / fact
            if k >= ratio_from and 2 * nxt <= rel_tol * partial:
                break
        e = gmpy2.exp(1)
        return DobinskiEstimate(partial / e, k, 2 * nxt / e)


def binomial_combination(k: int, values) -> mpfr:
    """(1/k!) sum_j (-1)^(k-j) C(k, j) values[j] at the active precision."""
    terms = []
    for j in range(k + 1):
        c = comb(k, j)
        terms.append(values[j] * (-c if (k - j) & 1 else c))
    return mpreal.pairwise_sum(terms) / factorial(k)
