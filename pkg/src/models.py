import math
from enum import StrEnum
from typing import Annotated, Any, Self

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .errors import TsirelsonBoundError

LOCAL_BOUND = 2.0
TSIRELSON_BOUND = 2.0 * math.sqrt(2.0)
TSIRELSON_SLACK = 1e-9

# Expectation of a product of two +-1 valued observables
CorrelationValue = Annotated[float, Field(ge=-1.0, le=1.0)]


class PhasePoint(BaseModel):
    """Complex coherent-state amplitude used as a measurement setting (dimensionless)"""

    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    re: float = 0.0
    im: float = 0.0

    @classmethod
    def from_complex(cls, value: complex) -> Self:
        value = complex(value)
        return cls(re=value.real, im=value.imag)

    def to_complex(self) -> complex:
        return complex(self.re, self.im)

    def __complex__(self) -> complex:
        return self.to_complex()

    @property
    def abs2(self) -> float:
        """Squared modulus |alpha|^2"""
        return self.re * self.re + self.im * self.im


class SqueezeParam(BaseModel):
    """Squeezing parameter r of the two-mode squeezed vacuum"""

    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    r: float = Field(ge=0.0)


class DisplacementMagnitude(BaseModel):
    """Squared displacement scale J of the one-parameter family of settings"""

    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    J: float = Field(ge=0.0)


class Quadruplet(BaseModel):
    """Two settings per side (alpha1, alpha2; beta1, beta2) defining one CHSH experiment"""

    model_config = ConfigDict(frozen=True)

    alpha1: PhasePoint = Field(default_factory=PhasePoint)
    alpha2: PhasePoint = Field(default_factory=PhasePoint)
    beta1: PhasePoint = Field(default_factory=PhasePoint)
    beta2: PhasePoint = Field(default_factory=PhasePoint)

    @classmethod
    def one_parameter(cls, j: float) -> Self:
        """The settings alpha in {0, sqrt(J)} and beta in {0, -sqrt(J)}"""
        root = math.sqrt(j)
        return cls(alpha2=PhasePoint(re=root), beta2=PhasePoint(re=-root))

    @classmethod
    def from_array(cls, params: np.ndarray) -> Self:
        """
        Build from 8 reals laid out as (Re, Im) pairs of alpha1, alpha2, beta1, beta2
        """
        values = [float(v) for v in np.asarray(params, dtype=float).reshape(8)]
        points = [PhasePoint(re=values[i], im=values[i + 1]) for i in range(0, 8, 2)]
        return cls(alpha1=points[0], alpha2=points[1], beta1=points[2], beta2=points[3])

    def to_array(self) -> np.ndarray:
        return np.array([coord for point in self.points() for coord in (point.re, point.im)], dtype=float)

    def points(self) -> tuple[PhasePoint, PhasePoint, PhasePoint, PhasePoint]:
        return (self.alpha1, self.alpha2, self.beta1, self.beta2)

    def total_norm(self) -> float:
        """Euclidean norm of all eight coordinates, used to break ties between equal CHSH values"""
        return float(np.linalg.norm(self.to_array()))


class BellResult(BaseModel):
    """A CHSH value together with the settings and squeezing that produced it"""

    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    B: float
    quadruplet: Quadruplet
    r: float = Field(ge=0.0)
    violates_local_bound: bool
    J: float | None = None
    converged: bool = True

    @model_validator(mode="before")
    @classmethod
    def _derive_violation_flag(cls, data: Any) -> Any:
        if isinstance(data, dict) and "violates_local_bound" not in data and "B" in data:
            data = {**data, "violates_local_bound": abs(float(data["B"])) > LOCAL_BOUND}
        return data

    @model_validator(mode="after")
    def _check_bounds(self) -> Self:
        if abs(self.B) > TSIRELSON_BOUND + TSIRELSON_SLACK:
            raise TsirelsonBoundError(f"|B| = {abs(self.B)!r} exceeds the Tsirelson bound 2*sqrt(2)")
        if self.violates_local_bound != (abs(self.B) > LOCAL_BOUND):
            raise ValueError("violates_local_bound must equal |B| > 2")
        return self


class SweepMode(StrEnum):
    SURFACE = "surface"
    OPTIMUM_CURVE = "optimum-curve"
    VALIDATE_ORACLE = "validate-oracle"
    QUADRUPLET_SEARCH = "quadruplet-search"
    CONVERGENCE_REPORT = "convergence-report"


class OutputFormat(StrEnum):
    CSV = "csv"
    JSON = "json"


# Beyond this the oracle cutoff grows like e^{2r} and only the closed form is practical
ORACLE_MAX_R = 3.0


class SweepConfig(BaseModel):
    """Grid and run settings for one CLI invocation"""

    model_config = ConfigDict(extra="forbid", allow_inf_nan=False)

    mode: SweepMode = SweepMode.SURFACE
    r_min: float = Field(default=0.0, ge=0.0)
    r_max: float = Field(default=3.0, ge=0.0)
    r_steps: int = Field(default=61, ge=1)
    j_min: float = Field(default=1e-5, ge=0.0)
    j_max: float = Field(default=0.5, ge=0.0)
    j_steps: int = Field(default=81, ge=1)
    log_j: bool = True
    threshold: float | None = None
    output_format: OutputFormat = OutputFormat.CSV
    seed: int = 12345
    tolerance: float = Field(default=1e-6, gt=0.0)
    tail_tolerance: float = Field(default=1e-10, gt=0.0, lt=1.0)
    restarts: int = Field(default=8, ge=1)
    workers: int = Field(default=4, ge=1)
    samples: int = Field(default=20, ge=1)
    max_displacement: float = Field(default=1.5, gt=0.0)
    alpha: PhasePoint = Field(default_factory=PhasePoint)
    beta: PhasePoint = Field(default_factory=PhasePoint)
    cutoffs: list[int] = Field(default_factory=lambda: [10, 20, 40])

    @field_validator("cutoffs")
    @classmethod
    def _cutoffs_increasing(cls, value: list[int]) -> list[int]:
        if not value:
            raise ValueError("at least one cutoff is required")
        if any(c < 1 for c in value):
            raise ValueError("cutoffs must be >= 1")
        if any(b <= a for a, b in zip(value, value[1:], strict=False)):
            raise ValueError("cutoffs must be strictly increasing")
        return value

    @model_validator(mode="after")
    def _check_grid(self) -> Self:
        if self.r_min > self.r_max:
            raise ValueError(f"r_min ({self.r_min}) must not exceed r_max ({self.r_max})")
        if self.j_min > self.j_max:
            raise ValueError(f"j_min ({self.j_min}) must not exceed j_max ({self.j_max})")
        if self.log_j and self.j_min <= 0.0:
            raise ValueError("j_min must be positive when log_j is set")
        if self.mode is SweepMode.VALIDATE_ORACLE and self.r_max > ORACLE_MAX_R:
            raise ValueError(f"validate-oracle mode supports r_max <= {ORACLE_MAX_R}, got {self.r_max}")
        if self.mode is SweepMode.SURFACE and "threshold" not in self.model_fields_set:
            # Figure convention: only values above the local bound are shown
            self.threshold = LOCAL_BOUND
        return self


class SweepRecord(BaseModel):
    """One (r, J) point of the one-parameter CHSH surface"""

    r: float
    J: float
    B: float
    violates: bool


class OptimumRecord(SweepRecord):
    """Optimal displacement for one r; the asymptote J*e^{2r} -> ln2/3 is carried explicitly"""

    J_star: float
    B_star: float
    J_star_times_e2r: float


class OracleRecord(BaseModel):
    """Closed form versus Fock-space oracle at one (r, alpha, beta)"""

    r: float
    alpha_re: float
    alpha_im: float
    beta_re: float
    beta_im: float
    cutoff: int | None
    closed_form: CorrelationValue
    oracle: float | None
    abs_diff: float | None
    within_tolerance: bool
    error: str | None = None


class QuadrupletRecord(BaseModel):
    """Flat view of a BellResult for tabular output"""

    r: float
    B: float
    violates: bool
    converged: bool
    alpha1_re: float
    alpha1_im: float
    alpha2_re: float
    alpha2_im: float
    beta1_re: float
    beta1_im: float
    beta2_re: float
    beta2_im: float

    @classmethod
    def from_result(cls, result: BellResult) -> Self:
        q = result.quadruplet
        return cls(
            r=result.r,
            B=result.B,
            violates=result.violates_local_bound,
            converged=result.converged,
            alpha1_re=q.alpha1.re,
            alpha1_im=q.alpha1.im,
            alpha2_re=q.alpha2.re,
            alpha2_im=q.alpha2.im,
            beta1_re=q.beta1.re,
            beta1_im=q.beta1.im,
            beta2_re=q.beta2.re,
            beta2_im=q.beta2.im,
        )


class ConvergenceRow(BaseModel):
    """Oracle value at one cutoff and its change from the previous cutoff"""

    cutoff: int
    value: float
    delta: float | None = None
    tail_weight: float
