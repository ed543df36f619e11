"""Strict JSON run configuration.

Numbers are Gaussian-CGS unless given as ``{"value": x, "unit": "<name>"}``
with a unit from :data:`patchrad.units.UNITS` of the matching dimension.
Unknown keys are rejected everywhere.
"""

from __future__ import annotations

import hashlib
import json
from typing import Annotated, Literal, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from . import units
from .correlation import (
    Constant,
    CorrelationModel,
    GaussianQuasilocal,
    Instantaneous,
    Lorentzian,
    SharpCutoff,
    Tabulated,
    TimeCorrelationModel,
)
from .motion import EnvelopedHarmonic, GaussianPulse, Sampled, Trajectory


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class UnitValue(_Strict):
    value: float
    unit: str

    @field_validator("unit")
    @classmethod
    def _known(cls, v):
        if v not in units.UNITS:
            raise ValueError(f"unknown unit {v!r}; known: {sorted(units.UNITS)}")
        return v


Number = Union[float, UnitValue]


class FieldError(ValueError):
    """Value error tied to a dotted config path."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


def _gauss(x: Number, dim: units.Dimension, what: str) -> float:
    if isinstance(x, UnitValue):
        if units.dimension_of(x.unit) != dim:
            raise FieldError(what, f"unit {x.unit!r} has the wrong dimension")
        return units.to_gaussian(x.value, x.unit)
    return float(x)


class GaussianPulseConfig(_Strict):
    kind: Literal["gaussian_pulse"]
    q0: Number
    tau: Number

    def build(self) -> Trajectory:
        return GaussianPulse(_gauss(self.q0, units.LENGTH, "trajectory.q0"),
                             _gauss(self.tau, units.TIME, "trajectory.tau"))


class EnvelopedHarmonicConfig(_Strict):
    kind: Literal["enveloped_harmonic"]
    q0: Number
    omega0: float = Field(gt=0, description="rad/s")
    tau: Number

    def build(self) -> Trajectory:
        return EnvelopedHarmonic(_gauss(self.q0, units.LENGTH, "trajectory.q0"), self.omega0,
                                 _gauss(self.tau, units.TIME, "trajectory.tau"))


class SampledConfig(_Strict):
    kind: Literal["sampled"]
    path: str = Field(description="CSV with header t_seconds,q_centimeters")
    window: Literal["hann", "tukey", "none"] = "hann"

    def build(self) -> Trajectory:
        return Sampled.from_csv(self.path, self.window)


TrajectoryConfig = Annotated[
    Union[GaussianPulseConfig, EnvelopedHarmonicConfig, SampledConfig],
    Field(discriminator="kind"),
]


class GaussianModelConfig(_Strict):
    kind: Literal["gaussian"]
    V_rms: Number
    ell: Number
    image: bool = False

    def build(self) -> CorrelationModel:
        return GaussianQuasilocal(_gauss(self.V_rms, units.POTENTIAL, "correlation.V_rms"),
                                  _gauss(self.ell, units.LENGTH, "correlation.ell"), self.image)


class SharpCutoffConfig(_Strict):
    kind: Literal["sharp_cutoff"]
    V_rms: Number
    k_min: float = Field(ge=0, description="1/cm")
    k_max: float = Field(gt=0, description="1/cm")
    image: bool = False

    @field_validator("k_max")
    @classmethod
    def _band(cls, v, info):
        kmin = info.data.get("k_min")
        if kmin is not None and not kmin < v:
            raise ValueError(f"k_min ({kmin}) must be smaller than k_max ({v})")
        return v

    def build(self) -> CorrelationModel:
        return SharpCutoff(_gauss(self.V_rms, units.POTENTIAL, "correlation.V_rms"),
                           self.k_min, self.k_max, self.image)


class ConstantModelConfig(_Strict):
    kind: Literal["constant"]
    omega_tilde0: float = Field(ge=0, description="erg cm")
    image: bool = False

    def build(self) -> CorrelationModel:
        return Constant(self.omega_tilde0, self.image)


class TabulatedModelConfig(_Strict):
    kind: Literal["tabulated"]
    path: str = Field(description="CSV with header k_per_cm,omega_tilde_erg_cm")
    image: bool = False

    def build(self) -> CorrelationModel:
        return Tabulated.from_csv(self.path, self.image)


CorrelationConfig = Annotated[
    Union[GaussianModelConfig, SharpCutoffConfig, ConstantModelConfig, TabulatedModelConfig],
    Field(discriminator="kind"),
]


class LorentzianConfig(_Strict):
    kind: Literal["lorentzian"]
    gamma: float = Field(gt=0, description="1/s")


class InstantaneousConfig(_Strict):
    kind: Literal["instantaneous"]


TemporalConfig = Annotated[Union[LorentzianConfig, InstantaneousConfig],
                           Field(discriminator="kind")]


class OmegaGrid(_Strict):
    min: float = Field(ge=0, description="rad/s")
    max: float = Field(gt=0, description="rad/s")
    count: int = Field(ge=2)
    spacing: Literal["linear", "log"] = "linear"

    @field_validator("max")
    @classmethod
    def _order(cls, v, info):
        lo = info.data.get("min")
        if lo is not None and not lo < v:
            raise ValueError(f"min ({lo}) must be smaller than max ({v})")
        return v

    @field_validator("spacing")
    @classmethod
    def _log_needs_positive(cls, v, info):
        if v == "log" and info.data.get("min", 1.0) <= 0:
            raise ValueError("log spacing requires min > 0")
        return v

    def values(self) -> np.ndarray:
        if self.spacing == "log":
            return np.geomspace(self.min, self.max, self.count)
        return np.linspace(self.min, self.max, self.count)


class OutputConfig(_Strict):
    dir: str = "."
    stem: str | None = None


class ToleranceConfig(_Strict):
    rel: float = Field(default=1e-10, gt=0, lt=1)


class SweepConfig(_Strict):
    ell_min: Number
    ell_max: Number
    count: int = Field(default=25, ge=3)


class EnsembleConfig(_Strict):
    N: int = Field(default=256, ge=16)
    cell: Number
    realizations: int = Field(default=200, ge=2)

    @field_validator("N")
    @classmethod
    def _pow2(cls, v):
        if v & (v - 1):
            raise ValueError(f"N must be a power of two, got {v}")
        return v


class XiConfig(_Strict):
    V_rms: Number
    ell: Number


class ValidateConfig(_Strict):
    ensemble_realizations: int = Field(default=200, ge=2)
    ensemble_N: int = Field(default=256, ge=16)


class RunConfig(_Strict):
    trajectory: TrajectoryConfig | None = None
    correlation: CorrelationConfig | None = None
    temporal: TemporalConfig | None = None
    omega_grid: OmegaGrid | None = None
    output: OutputConfig = OutputConfig()
    tolerance: ToleranceConfig = ToleranceConfig()
    seed: int = Field(default=0, ge=0, lt=2**64)
    units: Literal["gauss", "si"] = "gauss"
    sweep: SweepConfig | None = None
    ensemble: EnsembleConfig | None = None
    xi: XiConfig | None = None
    validate_: ValidateConfig | None = Field(default=None, alias="validate")

    model_config = ConfigDict(extra="forbid", frozen=True, populate_by_name=True)

    def digest(self) -> str:
        blob = json.dumps(self.model_dump(mode="json", by_alias=True), sort_keys=True,
                          separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    def temporal_model(self, spatial: CorrelationModel) -> TimeCorrelationModel:
        if self.temporal is None or self.temporal.kind == "instantaneous":
            return TimeCorrelationModel(spatial, Instantaneous())
        return TimeCorrelationModel(spatial, Lorentzian(self.temporal.gamma))


REQUIRED_SECTIONS = {
    "spectrum": ("trajectory", "correlation", "omega_grid"),
    "energy": ("trajectory", "correlation"),
    "compare-dce": ("trajectory", "correlation", "omega_grid"),
    "xi": ("xi",),
    "sweep": ("trajectory", "correlation", "sweep"),
    "ensemble": ("trajectory", "correlation", "omega_grid", "ensemble"),
    "validate": (),
}


class MissingSection(ValueError):
    def __init__(self, section: str, subcommand: str):
        super().__init__(f"subcommand {subcommand!r} requires the {section!r} section")
        self.field = section


def require(cfg: RunConfig, subcommand: str) -> None:
    for name in REQUIRED_SECTIONS[subcommand]:
        if getattr(cfg, name) is None:
            # xi may borrow V_rms and ell from a gaussian correlation section
            if name == "xi" and cfg.correlation is not None and cfg.correlation.kind == "gaussian":
                continue
            raise MissingSection(name, subcommand)


def gaussian_length(x: Number, what: str) -> float:
    return _gauss(x, units.LENGTH, what)


def gaussian_potential(x: Number, what: str) -> float:
    return _gauss(x, units.POTENTIAL, what)


def schema(subcommand: str) -> dict:
    return {
        "subcommand": subcommand,
        "required_sections": list(REQUIRED_SECTIONS[subcommand]),
        "unit_conventions": {
            "internal": "gaussian-cgs (g, cm, s; statvolt)",
            "bare_numbers": "gaussian-cgs",
            "unit_tagged": "{'value': x, 'unit': name}",
            "units": sorted(units.UNITS),
            "frequencies": "angular, rad/s",
            "wavenumbers": "1/cm",
        },
        "schema": RunConfig.model_json_schema(by_alias=True),
    }
