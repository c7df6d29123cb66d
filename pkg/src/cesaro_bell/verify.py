"""Run every identity over fixed parameter grids and collect reports.

Failures never abort the run: a check that raises becomes a failed report
carrying the reason.
"""

from __future__ import annotations

import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from fractions import Fraction
from math import comb, factorial
from typing import Callable, Dict, Iterable, List, Sequence, Tuple

import gmpy2
from gmpy2 import mpfr

from . import exact, formulas, mpreal
from .exceptions import BellError, DomainError
from .integrand import BlockKernel, CesaroComplex, PowerKernel
from .quadrature import integrate, plan_for_precision

logger = logging.getLogger(__name__)

#: Dobinski relative tolerance used by the harness.
DOBINSKI_REL_TOL = 1e-10
#: Largest allowed |B_1/1! - B_1| in the typo check.
TYPO_N1_TOLERANCE = 1e-6
#: Smallest gap |B_n/n! - B_n| demanded for n >= 2.
TYPO_MIN_GAP = 0.4


@dataclass
class VerificationReport:
    identity: str
    parameters: Tuple[int, ...]
    lhs: str
    rhs: str
    abs_residual: str
    tolerance: str
    passed: bool
    working_bits: int = 0
    nodes_used: int = 0
    wall_time: float = 0.0
    reason: str = ""

    def to_dict(self, timings: bool = False) -> dict:
        out = asdict(self)
        out["parameters"] = list(self.parameters)
        out["pass"] = out.pop("passed")
        if not timings:
            out.pop("wall_time")
        return out


def _dec(x) -> str:
    if isinstance(x, int):
        return str(x)
    return mpreal.to_decimal(x)


def _from_residual(name, params, res: formulas.IdentityResidual) -> VerificationReport:
    q = res.quadrature
    return VerificationReport(
        identity=name,
        parameters=tuple(params),
        lhs=_dec(res.lhs),
        rhs=_dec(res.rhs),
        abs_residual=_dec(res.abs_residual),
        tolerance=_dec(res.tolerance),
        passed=res.passed,
        working_bits=q.working_bits if q else 0,
        nodes_used=q.nodes_used if q else 0,
    )


# -- individual checks -------------------------------------------------------


def orthogonality_report(m: int, n: int, p: int | None = None) -> VerificationReport:
    return _from_residual("orthogonality", (m, n), formulas.orthogonality_check(m, n, p))


def incl_excl_report(n: int, k: int) -> VerificationReport:
    lhs = exact.stirling_incl_excl(n, k)
    rhs = exact.stirling_row(n)[k]
    return VerificationReport(
        "incl-excl", (n, k), str(lhs), str(rhs), str(abs(lhs - rhs)), "0", lhs == rhs
    )


def power_kernel_report(j: int, n: int, p: int | None = None) -> VerificationReport:
    return _from_residual("power-kernel", (j, n), formulas.power_kernel_residual(j, n, p))


def block_kernel_report(k: int, n: int, p: int | None = None) -> VerificationReport:
    return _from_residual("block-kernel", (k, n), formulas.block_kernel_residual(k, n, p))


def binomial_mirror_report(k: int, n: int, p: int | None = None) -> VerificationReport:
    """Block-kernel integral two ways: directly, and as the binomial combination
    of power-kernel integrals. Both must also hit S(n, k) pi / (2 n!)."""
    if k < 0 or n < 1:
        raise DomainError("need k >= 0 and n >= 1")
    p = formulas.DEFAULT_IDENTITY_BITS if p is None else mpreal.check_precision(p)
    block = BlockKernel(k, n)
    plan_a = plan_for_precision(block, p)
    direct = integrate(block, plan_a)
    powers = []
    targets = []
    nodes = direct.nodes_used
    for j in range(k + 1):
        kind = PowerKernel(j, n)
        plan = plan_for_precision(kind, p)
        res = integrate(kind, plan)
        powers.append(res.value)
        targets.append(plan.target_abs_error)
        nodes += res.nodes_used
    with mpreal.working_precision(p):
        via_binomial = formulas.binomial_combination(k, powers)
        tol_a = 2 * plan_a.target_abs_error
        tol_b = 2 * mpreal.pairwise_sum(
            [t * comb(k, j) for j, t in enumerate(targets)]
        ) / factorial(k)
        exact_rhs = mpreal.real(Fraction(exact.stirling(n, k), 2 * factorial(n)), p) * gmpy2.const_pi()
        gap = abs(direct.value - via_binomial)
        ok_routes = gap <= tol_a + tol_b
        ok_a = abs(direct.value - exact_rhs) <= tol_a
        ok_b = abs(via_binomial - exact_rhs) <= tol_b
    reasons = []
    if not ok_routes:
        reasons.append("routes disagree")
    if not ok_a:
        reasons.append("direct route misses exact value")
    if not ok_b:
        reasons.append("binomial route misses exact value")
    return VerificationReport(
        "binomial-mirror",
        (k, n),
        _dec(direct.value),
        _dec(via_binomial),
        _dec(gap),
        _dec(tol_a + tol_b),
        bool(ok_routes and ok_a and ok_b),
        p,
        nodes,
        reason="; ".join(reasons),
    )


def block_sum_report(n: int, p: int | None = None) -> VerificationReport:
    """Sum of block-kernel integrals over k = 0..n+3 against the Cesaro
    integral divided by e; terms with k > n must vanish individually."""
    if n < 1:
        raise DomainError("n must be >= 1")
    p = formulas.DEFAULT_IDENTITY_BITS if p is None else mpreal.check_precision(p)
    values = []
    tol_sum = []
    nodes = 0
    reasons = []
    for k in range(n + 4):
        kind = BlockKernel(k, n)
        plan = plan_for_precision(kind, p)
        res = integrate(kind, plan)
        nodes += res.nodes_used
        values.append(res.value)
        tol_sum.append(2 * plan.target_abs_error)
        if k > n and abs(res.value) > 2 * plan.target_abs_error:
            reasons.append(f"term k={k} not negligible")
    cesaro_kind = CesaroComplex(n)
    cesaro_plan = plan_for_precision(cesaro_kind, p)
    cesaro = integrate(cesaro_kind, cesaro_plan)
    nodes += cesaro.nodes_used
    with mpreal.working_precision(p):
        total = mpreal.pairwise_sum(values)
        e = gmpy2.exp(1)
        target = cesaro.value / e
        tolerance = mpreal.pairwise_sum(tol_sum) + 2 * cesaro_plan.target_abs_error / e
        gap = abs(total - target)
    if not gap <= tolerance:
        reasons.insert(0, "sum differs from Cesaro integral / e")
    return VerificationReport(
        "block-sum", (n,), _dec(total), _dec(target), _dec(gap), _dec(tolerance),
        not reasons, p, nodes, reason="; ".join(reasons),
    )


def cesaro_report(n: int, guard_bits: int = 32) -> VerificationReport:
    est = formulas.bell_cesaro(n, guard_bits)
    b = exact.bell_exact(n)
    q = est.quadrature
    with mpreal.working_precision(q.working_bits):
        gap = abs(est.estimate - b)
    ok = est.certified and est.rounded == b
    reason = "" if ok else f"rounded={est.rounded} certified={est.certified}"
    return VerificationReport(
        "cesaro", (n,), _dec(est.estimate), str(b), _dec(gap), "0.25", ok,
        q.working_bits, q.nodes_used, reason=reason,
    )


def dobinski_report(n: int, rel_tol=DOBINSKI_REL_TOL) -> VerificationReport:
    est = formulas.bell_dobinski(n, rel_tol)
    b = exact.bell_exact(n)
    p = est.estimate.precision
    with mpreal.working_precision(p):
        gap = abs(est.estimate - b)
        tolerance = mpfr(rel_tol) * b + est.tail_bound
    return VerificationReport(
        "dobinski", (n,), _dec(est.estimate), str(b), _dec(gap), _dec(tolerance),
        bool(gap <= tolerance), p, est.terms_used,
    )


def typo_report(n: int) -> VerificationReport:
    """Uncorrected formula (no n! factor) against B_n. The two must agree at
    n = 1 and be at least 0.4 apart for every n >= 2."""
    value = formulas.bell_cesaro_uncorrected(n)
    b = exact.bell_exact(n)
    p = value.precision
    with mpreal.working_precision(p):
        gap = abs(value - b)
    if n == 1:
        ok = gap <= TYPO_N1_TOLERANCE
        tol, reason = TYPO_N1_TOLERANCE, "" if ok else "gap above tolerance at n=1"
    else:
        ok = gap >= TYPO_MIN_GAP
        tol, reason = TYPO_MIN_GAP, "" if ok else "uncorrected value too close to B_n"
    return VerificationReport(
        "typo", (n,), _dec(value), str(b), _dec(gap), repr(tol), bool(ok), p, 0, reason=reason
    )


def typo_demonstration(n_max: int) -> List[VerificationReport]:
    if n_max < 2:
        raise DomainError("n_max must be >= 2")
    return run_tasks([("typo", (n,)) for n in range(1, n_max + 1)])


# -- harness -----------------------------------------------------------------

_CHECKS: Dict[str, Callable[..., VerificationReport]] = {
    "orthogonality": orthogonality_report,
    "incl-excl": incl_excl_report,
    "power-kernel": power_kernel_report,
    "block-kernel": block_kernel_report,
    "binomial-mirror": binomial_mirror_report,
    "block-sum": block_sum_report,
    "cesaro": cesaro_report,
    "dobinski": dobinski_report,
    "typo": typo_report,
}

IDENTITIES: Tuple[str, ...] = tuple(_CHECKS)

Task = Tuple[str, Tuple[int, ...]]


def build_tasks(max_n: int, only: Iterable[str] | None = None) -> List[Task]:
    """Fixed, ordered list of (identity, parameters) instances for ``max_n``."""
    if int(max_n) != max_n or max_n < 1:
        raise DomainError(f"max_n must be an integer >= 1, got {max_n!r}")
    selected = set(IDENTITIES if only is None else only)
    unknown = selected - set(IDENTITIES)
    if unknown:
        raise DomainError(f"unknown identity: {', '.join(sorted(unknown))}")
    grids: Dict[str, List[Tuple[int, ...]]] = {
        "orthogonality": [
            (m, n) for m in range(min(max_n, 16) + 1) for n in range(min(max_n, 16) + 1)
        ],
        "incl-excl": [(n, k) for n in range(max_n + 1) for k in range(n + 1)],
        "power-kernel": [(j, n) for j in range(7) for n in range(1, min(max_n, 12) + 1)],
        "block-kernel": [(k, n) for n in range(1, min(max_n, 10) + 1) for k in range(n + 3)],
        "binomial-mirror": [(k, n) for n in range(1, min(max_n, 8) + 1) for k in range(n + 1)],
        "block-sum": [(n,) for n in range(1, min(max_n, 10) + 1)],
        "cesaro": [(n,) for n in range(1, max_n + 1)],
        "dobinski": [(n,) for n in range(min(max_n, 30) + 1)],
        "typo": [(n,) for n in range(1, min(max_n, 20) + 1)],
    }
    return [(name, params) for name in IDENTITIES if name in selected for params in grids[name]]


def run_task(task: Task) -> VerificationReport:
    name, params = task
    start = time.perf_counter()
    try:
        report = _CHECKS[name](*params)
    except (BellError, ArithmeticError, ValueError) as exc:
        logger.warning("%s%s failed: %s", name, params, exc)
        report = VerificationReport(
            name, tuple(params), "", "", "", "", False, reason=f"{type(exc).__name__}: {exc}"
        )
    report.wall_time = time.perf_counter() - start
    return report


def run_tasks(tasks: Sequence[Task], jobs: int = 1) -> List[VerificationReport]:
    """Run tasks, returning reports in task order whatever ``jobs`` is."""
    if jobs is None or jobs < 1:
        jobs = os.cpu_count() or 1
    if jobs == 1 or len(tasks) < 2:
        return [run_task(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(run_task, tasks, chunksize=1))


def verify_all(
    max_n: int, jobs: int = 1, only: Iterable[str] | None = None
) -> List[VerificationReport]:
    return run_tasks(build_tasks(max_n, only), jobs)


def all_passed(reports: Sequence[VerificationReport]) -> bool:
    return all(r.passed for r in reports)
