"""Exact symbolic evaluation of two spectral (0,4)-tensor functionals of the Dirac operator.

The pipeline runs exact coefficients, then tensor canonicalization, then the
Clifford trace, sphere moments and symbol calculus, and finally assembles the
functionals.  A numeric oracle cross-checks it independently.
"""

from .coefficients import Qm
from .functionals import (
    FunctionalResult,
    compute,
    compute_P,
    compute_Q,
    discrepancy_report,
    wres_assemble,
)
from .tensor import BASIS, InvariantVector

__all__ = [
    "Qm",
    "BASIS",
    "InvariantVector",
    "FunctionalResult",
    "compute",
    "compute_P",
    "compute_Q",
    "discrepancy_report",
    "wres_assemble",
]

__version__ = "0.1.0"
