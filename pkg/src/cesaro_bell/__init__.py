"""Bell numbers by exact combinatorics, inclusion-exclusion, Dobinski's series
and error-checked quadrature of Cesaro's corrected integral formula."""

from .exact import (
    SOFT_CAP,
    StirlingRow,
    bell_exact,
    stirling,
    stirling_incl_excl,
    stirling_row,
    surjections_incl_excl,
)
from .exceptions import (
    BellError,
    ConvergenceError,
    DomainError,
    InvariantError,
    PrecisionError,
)
from .formulas import (
    CesaroEstimate,
    DobinskiEstimate,
    IdentityResidual,
    bell_cesaro,
    bell_cesaro_uncorrected,
    bell_dobinski,
    block_kernel_residual,
    orthogonality_check,
    power_kernel_residual,
)
from .integrand import (
    BlockKernel,
    CesaroComplex,
    CesaroReal,
    PowerKernel,
    SineProduct,
    evaluate,
    magnitude_bound,
)
from .quadrature import (
    PrecisionPlan,
    QuadratureResult,
    integrate,
    integrate_periodic_check,
    plan_for_bell,
    plan_for_precision,
)
from .verify import VerificationReport, verify_all

__version__ = "0.1.0"
