"""Quadrature over [0, pi] with successive-doubling error estimates.

Two engines with different error behaviour:

* :func:`integrate` - Gauss-Legendre, nodes from Newton's method on the
  Legendre recurrence at working precision.
* :func:`integrate_periodic_check` - trapezoid rule over a full period,
  halved using evenness of the integrand. Spectrally accurate for periodic
  entire integrands.

Both double the node count until two successive estimates agree within half
the plan's target. The error estimate is ``|last - previous|``, floored at a
bound on the rounding accumulated at the working precision.
"""

from __future__ import annotations

import logging
import math
import threading
from dataclasses import dataclass
from math import factorial
from typing import Callable, Dict, List, Tuple

import gmpy2
from gmpy2 import mpfr

from . import mpreal
from .exceptions import ConvergenceError, DomainError
from .integrand import IntegrandKind, evaluate_at, magnitude_bound

logger = logging.getLogger(__name__)

DEFAULT_GUARD_BITS = 32
MAX_DOUBLINGS = 20
MIN_INITIAL_NODES = 32

# log2 of the Cesaro magnitude bound e^e (~15.15), rounded up
_CESARO_BOUND_BITS = 4


@dataclass(frozen=True)
class PrecisionPlan:
    n: int
    target_abs_error: mpfr
    working_bits: int
    initial_nodes: int


@dataclass(frozen=True)
class QuadratureResult:
    value: mpfr
    error_estimate: mpfr
    nodes_used: int
    working_bits: int
    converged: bool
    previous: mpfr | None = None


def default_initial_nodes(n: int) -> int:
    return max(MIN_INITIAL_NODES, 2 * n)


def plan_for_bell(n: int, guard_bits: int = DEFAULT_GUARD_BITS) -> PrecisionPlan:
    """Plan that lets ``2 n!/(pi e) * integral`` be rounded to B_n.

    Working bits are ceil(log2 n!) + guard + 4 (clamped to 53) and the target
    on the integral is pi e / (8 n!), i.e. 1/4 after rescaling.
    """
    if int(n) != n or n < 1:
        raise DomainError(f"n must be an integer >= 1, got {n!r}")
    if guard_bits < 0:
        raise DomainError("guard_bits must be >= 0")
    nf = factorial(n)
    bits = mpreal.log2_ceil(nf) + guard_bits + _CESARO_BOUND_BITS
    bits = max(bits, mpreal.MIN_PRECISION)
    with mpreal.working_precision(bits):
        target = gmpy2.const_pi() * gmpy2.exp(1) / (8 * nf)
    return PrecisionPlan(n, target, bits, default_initial_nodes(n))


def plan_for_precision(
    kind: IntegrandKind, p: int, guard_bits: int = DEFAULT_GUARD_BITS
) -> PrecisionPlan:
    """Plan at a caller-chosen precision ``p``.

    The target is ``M * 2^(guard - p)`` with ``M`` the integrand's magnitude
    bound, which leaves ``guard`` bits for accumulated rounding.
    """
    p = mpreal.check_precision(p)
    if guard_bits >= p - 8:
        raise DomainError("guard_bits leaves no significant bits at this precision")
    bound = magnitude_bound(kind, p)
    with mpreal.working_precision(p):
        target = max(bound, mpfr(1)) * gmpy2.exp2(guard_bits - p)
    n = max(getattr(kind, "n", 0), getattr(kind, "m", 0))
    return PrecisionPlan(n, target, p, default_initial_nodes(n))


# -- Gauss-Legendre nodes ---------------------------------------------------

_GL_CACHE: Dict[Tuple[int, int], Tuple[List[mpfr], List[mpfr]]] = {}
_GL_LOCK = threading.Lock()

# nodes are built at precision rounded up to this step so nearby plans share them
_PRECISION_STEP = 64


def _legendre_and_derivative(n: int, x: mpfr) -> Tuple[mpfr, mpfr]:
    p0 = mpfr(1)
    p1 = x
    for k in range(2, n + 1):
        p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
    dp = n * (x * p1 - p0) / (x * x - 1)
    return p1, dp


def _build_gauss_legendre(n: int, p: int) -> Tuple[List[mpfr], List[mpfr]]:
    """Nonnegative nodes of P_n on [-1, 1] and their weights, descending order.

    Newton from Tricomi's asymptotic guess: a few steps in doubles, then steps
    at doubling precision, then full-precision steps until the update drops
    below 2^(8 - p).
    """
    nodes: List[mpfr] = []
    weights: List[mpfr] = []
    half = (n + 1) // 2
    ladder = []
    q = p
    while q > 2 * mpreal.MIN_PRECISION:
        q = (q + 1) // 2 + 16
        ladder.append(q)
    ladder.reverse()
    for i in range(1, half + 1):
        xf = math.cos(math.pi * (4 * i - 1) / (4 * n + 2)) * (1 - (1 - 1 / n) / (8 * n * n))
        for _ in range(3):
            a, b = 1.0, xf
            for k in range(2, n + 1):
                a, b = b, ((2 * k - 1) * xf * b - (k - 1) * a) / k
            d = n * (xf * b - a) / (xf * xf - 1) if n > 1 else 1.0
            xf -= b / d
        x = mpfr(xf)
        for q in ladder:
            with mpreal.working_precision(q):
                x = mpfr(x)
                val, der = _legendre_and_derivative(n, x)
                x = x - val / der
        with mpreal.working_precision(p):
            tol = gmpy2.exp2(8 - p)
            x = mpfr(x)
            for _ in range(64):
                val, der = _legendre_and_derivative(n, x)
                step = val / der
                x -= step
                if abs(step) <= tol:
                    break
            else:
                raise ConvergenceError(f"Newton failed for Gauss-Legendre node {i} of {n}")
            # derivative at the converged node for the weight
            _, der = _legendre_and_derivative(n, x)
            nodes.append(x)
            weights.append(2 / ((1 - x * x) * der * der))
    return nodes, weights


def gauss_legendre(n: int, p: int) -> Tuple[List[mpfr], List[mpfr]]:
    """Half set of ``n``-point Gauss-Legendre nodes/weights on [-1, 1].

    Returned nodes are the nonnegative ones; the full rule is symmetric. Built
    at ``p`` rounded up to a multiple of 64 bits and cached per
    (count, build precision), so a given ``p`` always sees the same nodes.
    """
    p = mpreal.check_precision(p)
    key = (n, -(-p // _PRECISION_STEP) * _PRECISION_STEP)
    cached = _GL_CACHE.get(key)
    if cached is not None:
        return cached
    with _GL_LOCK:
        cached = _GL_CACHE.get(key)
        if cached is None:
            cached = _build_gauss_legendre(n, key[1])
            _GL_CACHE[key] = cached
        return cached


def _gl_estimate(kind: IntegrandKind, nodes: int, p: int) -> mpfr:
    xs, ws = gauss_legendre(nodes, p)
    with mpreal.working_precision(p):
        half_pi = gmpy2.const_pi() / 2
        terms: List[mpfr] = []
        for x, w in zip(xs, ws):
            x = +x  # round cached high-precision node to p
            if x == 0:
                terms.append(w * evaluate_at(kind, half_pi))
            else:
                f = evaluate_at(kind, half_pi * (1 + x)) + evaluate_at(kind, half_pi * (1 - x))
                terms.append(w * f)
        return half_pi * mpreal.pairwise_sum(terms)


def _trapezoid_estimate(kind: IntegrandKind, nodes: int, p: int) -> mpfr:
    # Full-period rule on [-pi, pi) with `nodes` points; evenness folds it onto
    # [0, pi]: (pi / N) * (f(0) + f(pi) + 2 * sum_{0<t<pi} f(t)) / 2 ... halved.
    if nodes % 2:
        raise DomainError("periodic rule needs an even node count")
    half = nodes // 2
    with mpreal.working_precision(p):
        pi = gmpy2.const_pi()
        h = 2 * pi / nodes
        terms = [evaluate_at(kind, mpfr(0)), evaluate_at(kind, pi)]
        terms.extend(2 * evaluate_at(kind, h * i) for i in range(1, half))
        return h * mpreal.pairwise_sum(terms) / 2


def rounding_floor(kind: IntegrandKind, nodes: int, p: int) -> mpfr:
    """Bound on the accumulated rounding in one p-bit estimate with ``nodes`` nodes.

    pi * M * 2^-p * (32 + log2 nodes): a couple of dozen correctly rounded
    operations per integrand value plus the depth of the summation tree.
    """
    with mpreal.working_precision(p):
        bound = magnitude_bound(kind, p)
        return gmpy2.const_pi() * bound * gmpy2.exp2(-p) * (32 + nodes.bit_length())


def _refine(
    estimator: Callable[[IntegrandKind, int, int], mpfr],
    kind: IntegrandKind,
    plan: PrecisionPlan,
    engine: str,
) -> QuadratureResult:
    p = plan.working_bits
    with mpreal.working_precision(p):
        threshold = plan.target_abs_error / 2
    nodes = plan.initial_nodes
    if rounding_floor(kind, nodes << MAX_DOUBLINGS, p) > plan.target_abs_error:
        raise ConvergenceError(
            f"target {plan.target_abs_error} is below the rounding floor at {p} bits for {kind!r}"
        )
    previous = estimator(kind, nodes, p)
    for _ in range(MAX_DOUBLINGS):
        nodes *= 2
        last = estimator(kind, nodes, p)
        with mpreal.working_precision(p):
            gap = abs(last - previous)
        logger.debug("%s %r nodes=%d gap=%s", engine, kind, nodes, gap)
        if gap <= threshold:
            estimate = max(gap, rounding_floor(kind, nodes, p))
            return QuadratureResult(last, estimate, nodes, p, True, previous)
        previous = last
    raise ConvergenceError(
        f"{engine} did not converge for {kind!r} after {MAX_DOUBLINGS} doublings "
        f"(last two estimates {previous} and {last})",
        previous=previous,
        last=last,
        nodes=nodes,
    )


def integrate(kind: IntegrandKind, plan: PrecisionPlan) -> QuadratureResult:
    """Integral of ``kind`` over [0, pi] by Gauss-Legendre with node doubling."""
    return _refine(_gl_estimate, kind, plan, "gauss-legendre")


def integrate_periodic_check(kind: IntegrandKind, plan: PrecisionPlan) -> QuadratureResult:
    """Same integral by the periodic trapezoid rule (independent engine)."""
    plan_even = plan
    if plan.initial_nodes % 2:
        plan_even = PrecisionPlan(
            plan.n, plan.target_abs_error, plan.working_bits, plan.initial_nodes + 1
        )
    return _refine(_trapezoid_estimate, kind, plan_even, "trapezoid")
