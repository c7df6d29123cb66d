import math

import gmpy2
import pytest
from gmpy2 import mpfr

from cesaro_bell import mpreal
from cesaro_bell.exceptions import ConvergenceError, DomainError
from cesaro_bell import quadrature
from cesaro_bell.integrand import (
    BlockKernel,
    CesaroComplex,
    CesaroReal,
    PowerKernel,
    SineProduct,
)
from cesaro_bell.quadrature import (
    PrecisionPlan,
    gauss_legendre,
    integrate,
    integrate_periodic_check,
    plan_for_bell,
    plan_for_precision,
)


def _half_pi(p):
    with mpreal.working_precision(p):
        return mpreal.const_pi(p) / 2


def _close(a, b, tol, p):
    with mpreal.working_precision(p):
        return abs(a - b) <= tol


def test_plan_examples():
    assert plan_for_bell(1).working_bits == 53  # 0 + 32 + 4 clamped
    assert plan_for_bell(10).working_bits == 58
    # ceil(log2(100!)) = 525, from the exact integer
    assert (math.factorial(100) - 1).bit_length() == 525
    assert plan_for_bell(100).working_bits == 561


@pytest.mark.parametrize("n", [1, 5, 20, 60, 100])
def test_plan_invariants(n):
    plan = plan_for_bell(n)
    nf = math.factorial(n)
    assert plan.working_bits >= (nf - 1).bit_length() + 32
    with mpreal.working_precision(plan.working_bits):
        assert plan.target_abs_error <= gmpy2.const_pi() * gmpy2.exp(1) / (4 * nf)
    assert plan.initial_nodes == max(32, 2 * n)


def test_plan_rejects_n0():
    with pytest.raises(DomainError):
        plan_for_bell(0)


@pytest.mark.parametrize("count", [1, 2, 5, 16, 33])
def test_gauss_legendre_exact_for_polynomials(count):
    p = 128
    xs, ws = gauss_legendre(count, p)
    # full symmetric rule integrates x^(2d) exactly up to degree 2 count - 1
    with mpreal.working_precision(p):
        for d in range(0, count):
            total = mpfr(0)
            for x, w in zip(xs, ws):
                mult = 1 if x == 0 else 2
                total += mult * w * x ** (2 * d)
            assert abs(total - mpfr(2) / (2 * d + 1)) <= gmpy2.exp2(16 - p)


def test_gauss_legendre_against_mpmath_nodes():
    import mpmath

    xs, _ = gauss_legendre(10, 128)
    with mpmath.workprec(200):
        for x in xs:
            assert abs(mpmath.legendre(10, mpmath.mpf(x.as_integer_ratio()[0]) / x.as_integer_ratio()[1])) < mpmath.mpf(2) ** -110


def test_examples_gauss_legendre():
    p = 128
    half_pi = _half_pi(p)
    for kind, expected in [
        (SineProduct(3, 3), half_pi),
        (SineProduct(2, 5), mpfr(0)),
        (PowerKernel(1, 1), half_pi),
    ]:
        plan = plan_for_precision(kind, p)
        res = integrate(kind, plan)
        assert res.converged
        assert res.error_estimate <= plan.target_abs_error
        assert _close(res.value, expected, plan.target_abs_error, p)


def test_examples_trapezoid():
    p = 128
    for kind, expected in [(SineProduct(4, 4), _half_pi(p)), (SineProduct(0, 3), mpfr(0))]:
        plan = plan_for_precision(kind, p)
        res = integrate_periodic_check(kind, plan)
        assert _close(res.value, expected, plan.target_abs_error, p)


def test_engines_agree_cesaro5():
    plan = plan_for_bell(5)
    a = integrate(CesaroComplex(5), plan)
    b = integrate_periodic_check(CesaroComplex(5), plan)
    assert _close(a.value, b.value, 2 * plan.target_abs_error, plan.working_bits)


@pytest.mark.parametrize("n", [1, 7, 18, 30])
@pytest.mark.parametrize(
    "make", [CesaroReal, CesaroComplex, lambda n: PowerKernel(3, n), lambda n: BlockKernel(2, n),
             lambda n: SineProduct(n, n)]
)
def test_engines_agree_within_estimates(make, n):
    kind = make(n)
    plan = plan_for_precision(kind, 96)
    a = integrate(kind, plan)
    b = integrate_periodic_check(kind, plan)
    assert _close(a.value, b.value, a.error_estimate + b.error_estimate + 2 * gmpy2.exp2(-80), 96)


def test_halving_target_stays_within_old_estimate():
    kind = CesaroComplex(8)
    plan = plan_for_bell(8)
    first = integrate(kind, plan)
    with mpreal.working_precision(plan.working_bits):
        tighter = PrecisionPlan(plan.n, plan.target_abs_error / 2, plan.working_bits, plan.initial_nodes)
    second = integrate(kind, tighter)
    assert _close(first.value, second.value, first.error_estimate, plan.working_bits)


def test_doubling_gaps_shrink_geometrically():
    kind = CesaroComplex(12)
    p = 256
    gaps = []
    with mpreal.working_precision(p):
        estimates = [quadrature._gl_estimate(kind, 24 * 2**i, p) for i in range(4)]
        truth = quadrature._gl_estimate(kind, 24 * 2**6, p)
        gaps = [abs(e - truth) for e in estimates]
        for before, after in zip(gaps[1:], gaps[2:]):
            assert after < 0.9 * before or after <= gmpy2.exp2(40 - p)


def test_non_convergence_reported(monkeypatch):
    monkeypatch.setattr(quadrature, "MAX_DOUBLINGS", 1)
    plan = plan_for_bell(40)
    plan = PrecisionPlan(plan.n, plan.target_abs_error, plan.working_bits, 4)
    with pytest.raises(ConvergenceError) as info:
        integrate(CesaroComplex(40), plan)
    assert info.value.previous is not None and info.value.last is not None


def test_bit_reproducible():
    plan = plan_for_bell(15)
    a = integrate(CesaroComplex(15), plan)
    quadrature._GL_CACHE.clear()
    b = integrate(CesaroComplex(15), plan)
    assert a.value == b.value and a.nodes_used == b.nodes_used


@pytest.mark.parametrize("m", range(0, 17, 4))
@pytest.mark.parametrize("n", range(0, 17, 3))
def test_orthogonality_both_engines(m, n):
    p = 96
    kind = SineProduct(m, n)
    plan = plan_for_precision(kind, p)
    expected = _half_pi(p) if (m == n and n) else mpfr(0)
    for engine in (integrate, integrate_periodic_check):
        assert _close(engine(kind, plan).value, expected, plan.target_abs_error, p)
