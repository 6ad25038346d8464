"""Pydantic v2 configuration schemas for label estimation and benchmarks."""

from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .config import DGM_DEFAULTS, SYNTH_DEFAULTS


# ---------------------------------------------------------------------------
# Helper: format ValidationError for end users
# ---------------------------------------------------------------------------

def format_validation_error(exc) -> str:
    """Format a Pydantic ValidationError into a readable message.

    Args:
        exc: A pydantic.ValidationError instance.

    Returns:
        A human-friendly multi-line string.
    """
    lines = []
    for err in exc.errors():
        loc = " -> ".join(str(part) for part in err["loc"]) if err["loc"] else "(root)"
        lines.append(f"  {loc}: {err['msg']}")
    return "Validation errors:\n" + "\n".join(lines)


# ---------------------------------------------------------------------------
# Label estimation
# ---------------------------------------------------------------------------

class DummyCostSpec(BaseModel):
    """How the cost of a dummy assignment is derived from the cost matrix.

    ``mean`` uses the mean cost c_m, ``fixed`` uses ``value`` verbatim and
    ``percentile`` uses the ``value``-th percentile (0-100) of all entries.
    """

    model_config = ConfigDict(frozen=True)

    mode: Literal["mean", "fixed", "percentile"] = "mean"
    value: Optional[float] = None

    @model_validator(mode="after")
    def _value_matches_mode(self):
        if self.mode == "mean":
            if self.value is not None:
                raise ValueError("dummy cost mode 'mean' takes no value")
        elif self.value is None:
            raise ValueError(f"dummy cost mode '{self.mode}' requires a value")
        elif self.mode == "percentile" and not 0.0 <= self.value <= 100.0:
            raise ValueError(f"percentile must be within [0, 100], got {self.value}")
        return self

    @classmethod
    def parse(cls, text: str) -> "DummyCostSpec":
        """Parse the CLI spelling: ``mean``, ``fixed:VALUE`` or ``percentile:P``."""
        mode, _, raw = text.partition(":")
        mode = mode.strip().lower()
        if not raw:
            return cls(mode=mode)
        try:
            value = float(raw)
        except ValueError:
            raise ValueError(f"dummy cost value must be a number, got '{raw}'")
        return cls(mode=mode, value=value)

    def __str__(self) -> str:
        return self.mode if self.value is None else f"{self.mode}:{self.value!r}"


class DgmConfig(BaseModel):
    """Parameters of one dynamic graph matching run."""

    model_config = ConfigDict(frozen=True, populate_by_name=True, extra="forbid")

    lambda_: float = Field(default=DGM_DEFAULTS["LAMBDA"], ge=0.0, alias="lambda")
    k: int = Field(default=DGM_DEFAULTS["K"], ge=1)
    max_iter: int = Field(default=DGM_DEFAULTS["MAX_ITER"], ge=1)
    pca_dim: int = Field(default=DGM_DEFAULTS["PCA_DIM"], ge=1)
    pool_window: int = Field(default=DGM_DEFAULTS["POOL_WINDOW"], ge=1)
    dummy_cost_mode: DummyCostSpec = Field(default_factory=DummyCostSpec)
    rng_seed: Optional[int] = None
    label_mode: Literal["soft", "hard"] = "soft"
    update_metric: bool = True
    normalize_metric: bool = True
    apg_max_steps: int = Field(default=DGM_DEFAULTS["APG_MAX_STEPS"], ge=1)
    apg_tol: float = Field(default=DGM_DEFAULTS["APG_TOL"], gt=0.0)
    converge_tol: float = Field(default=DGM_DEFAULTS["CONVERGE_TOL"], gt=0.0)
    stable_iterations: int = Field(default=DGM_DEFAULTS["STABLE_ITERATIONS"], ge=1)

    @field_validator("dummy_cost_mode", mode="before")
    @classmethod
    def _parse_dummy_mode(cls, v):
        if isinstance(v, str):
            return DummyCostSpec.parse(v)
        return v


# ---------------------------------------------------------------------------
# Synthetic benchmarks
# ---------------------------------------------------------------------------

class SynthConfig(BaseModel):
    """Two-camera synthetic benchmark definition."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    num_identities: int = Field(default=SYNTH_DEFAULTS["NUM_IDENTITIES"], ge=2)
    latent_dim: int = Field(default=SYNTH_DEFAULTS["LATENT_DIM"], ge=1)
    feature_dim: int = Field(default=SYNTH_DEFAULTS["FEATURE_DIM"], ge=1)
    min_frames: int = Field(default=SYNTH_DEFAULTS["MIN_FRAMES"], ge=1)
    max_frames: int = Field(default=SYNTH_DEFAULTS["MAX_FRAMES"], ge=1)
    identity_scale: float = Field(default=SYNTH_DEFAULTS["IDENTITY_SCALE"], gt=0.0)
    camera_noise: float = Field(default=SYNTH_DEFAULTS["CAMERA_NOISE"], ge=0.0)
    nuisance_scale: float = Field(default=SYNTH_DEFAULTS["NUISANCE_SCALE"], ge=0.0)
    camera_shift: float = Field(default=SYNTH_DEFAULTS["CAMERA_SHIFT"], ge=0.0)
    distractor_frac: float = Field(default=0.0, ge=0.0, le=1.0)
    segment_frac: float = Field(default=0.0, ge=0.0, le=1.0)
    test_identities: int = Field(default=SYNTH_DEFAULTS["TEST_IDENTITIES"], ge=0)
    rng_seed: int = 0

    @model_validator(mode="after")
    def _check_shapes(self):
        if self.min_frames > self.max_frames:
            raise ValueError(
                f"min_frames ({self.min_frames}) must be <= max_frames ({self.max_frames})"
            )
        if self.latent_dim > self.feature_dim:
            raise ValueError(
                f"latent_dim ({self.latent_dim}) must be <= feature_dim ({self.feature_dim})"
            )
        if self.segment_frac > 0 and self.min_frames < 2:
            raise ValueError("segment splitting needs min_frames >= 2")
        return self


# ---------------------------------------------------------------------------
# Top-level schemas
# ---------------------------------------------------------------------------

class PresetSchema(BaseModel):
    """Top-level schema for a built-in benchmark preset file."""

    model_config = ConfigDict(extra="forbid")

    name: str
    description: Optional[str] = None
    synth: SynthConfig = Field(default_factory=SynthConfig)
    dgm: Optional[DgmConfig] = None


class RunConfigSchema(BaseModel):
    """Top-level schema for a user configuration file (YAML or JSON).

    Either section may be omitted; missing sections fall back to defaults.
    """

    model_config = ConfigDict(extra="forbid")

    version: str = Field(default="1")
    dgm: DgmConfig = Field(default_factory=DgmConfig)
    synth: SynthConfig = Field(default_factory=SynthConfig)
