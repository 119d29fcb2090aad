__version__ = "0.1.0"

from .bell_optimizer import chsh_paper_form, chsh_value, lhv_identity_check, optimal_J, optimize_quadruplet
from .config import config
from .fock_oracle import build_nopa_state, convergence_report, displacement_matrix, oracle_correlation, parity_matrix
from .gaussian_core import log_parity_correlation, parity_correlation, wigner
from .models import BellResult, PhasePoint, Quadruplet, SqueezeParam

__all__ = [
    "config",
    "BellResult",
    "PhasePoint",
    "Quadruplet",
    "SqueezeParam",
    "parity_correlation",
    "log_parity_correlation",
    "wigner",
    "chsh_value",
    "chsh_paper_form",
    "optimal_J",
    "optimize_quadruplet",
    "lhv_identity_check",
    "build_nopa_state",
    "displacement_matrix",
    "parity_matrix",
    "oracle_correlation",
    "convergence_report",
]
