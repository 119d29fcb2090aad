import logging
import os
from dataclasses import dataclass
from pathlib import Path

from dotenv import load_dotenv

# Load .env from project root (directory containing src/), so env is found regardless of cwd.
_project_root = Path(__file__).resolve().parent.parent
_env_file = _project_root / ".env"
load_dotenv(_env_file)
if not _env_file.exists():
    # Fallback: try cwd (e.g. when run as "python -m src.cli" from another checkout)
    load_dotenv()

_OUTPUT_FORMATS = ("csv", "json")


@dataclass
class Config:
    """Environment-driven defaults for the library and the CLI"""

    # Logging
    log_level: str = os.getenv("NOPA_LOG_LEVEL", "INFO").upper()
    debug: bool = os.getenv("NOPA_DEBUG", "false").lower() == "true"

    # Reproducibility and parallelism
    seed: int = int(os.getenv("NOPA_SEED", "12345"))
    workers: int = int(os.getenv("NOPA_WORKERS", "4"))

    # Quadruplet search
    restarts: int = int(os.getenv("NOPA_RESTARTS", "8"))

    # Fock-space oracle
    # Max |closed form - oracle| accepted by validate-oracle runs
    oracle_tolerance: float = float(os.getenv("NOPA_ORACLE_TOLERANCE", "1e-6"))
    # Max discarded probability tanh^(2N+2) r when picking a cutoff
    tail_tolerance: float = float(os.getenv("NOPA_TAIL_TOLERANCE", "1e-10"))

    # Output
    output_format: str = os.getenv("NOPA_OUTPUT_FORMAT", "csv").lower()

    @property
    def effective_log_level(self) -> int:
        if self.debug:
            return logging.DEBUG
        return logging.getLevelNamesMapping().get(self.log_level, logging.INFO)

    def validate(self) -> list[str]:
        """
        Validate configuration

        Returns:
            List of validation errors (empty if valid)
        """
        errors = []

        if self.log_level not in logging.getLevelNamesMapping():
            errors.append(f"NOPA_LOG_LEVEL '{self.log_level}' is not a logging level")

        if self.workers < 1:
            errors.append("NOPA_WORKERS must be >= 1")

        if self.restarts < 1:
            errors.append("NOPA_RESTARTS must be >= 1")

        if not self.oracle_tolerance > 0:
            errors.append("NOPA_ORACLE_TOLERANCE must be positive")

        if not 0 < self.tail_tolerance < 1:
            errors.append("NOPA_TAIL_TOLERANCE must lie in (0, 1)")

        if self.output_format not in _OUTPUT_FORMATS:
            errors.append(f"NOPA_OUTPUT_FORMAT must be one of {', '.join(_OUTPUT_FORMATS)}")

        return errors


# Global config instance
config = Config()
