"""
Parameter and result records for the microstrip-SQUID amplifier simulator

All records are immutable; SI units unless the field says otherwise.
"""
import math
from typing import List, Literal, Optional

from pydantic import BaseModel, Field, computed_field, model_validator

from SquidSim.constants import FLUX_QUANTUM


FROZEN = {"frozen": True, "allow_inf_nan": False}


# ============== Input Parameters ==============

class SquidParams(BaseModel):
    """Junction and loop parameters plus the bias point"""
    critical_current: float = Field(..., gt=0, description="I_c per junction (A)")
    junction_resistance: float = Field(..., gt=0, description="R_J (Ohm)")
    junction_capacitance: float = Field(..., ge=0, description="C_J (F)")
    loop_inductance: float = Field(..., gt=0, description="L_J (H)")
    bias_current: float = Field(..., description="I (A)")
    external_flux: float = Field(0.0, description="Phi (Wb)")

    model_config = FROZEN

    @computed_field
    @property
    def beta_L(self) -> float:
        return 2 * math.pi * self.loop_inductance * self.critical_current / FLUX_QUANTUM

    @computed_field
    @property
    def beta_c(self) -> float:
        return (
            2 * math.pi * self.critical_current
            * self.junction_resistance ** 2 * self.junction_capacitance / FLUX_QUANTUM
        )


class StriplineParams(BaseModel):
    """Open-ended superconducting microstrip used as the input coil"""
    inductance_per_length: float = Field(..., gt=0, description="l (H/m)")
    capacitance_per_length: float = Field(..., gt=0, description="c (F/m)")
    length: float = Field(..., gt=0, description="Lambda (m)")
    fundamental_mutual: float = Field(..., ge=0, description="M_1 (H)")

    model_config = FROZEN

    @computed_field
    @property
    def fundamental_inductance(self) -> float:
        """L_1 = (Lambda/pi) l"""
        return self.length / math.pi * self.inductance_per_length

    @computed_field
    @property
    def fundamental_capacitance(self) -> float:
        """C_1 = (Lambda/pi) c"""
        return self.length / math.pi * self.capacitance_per_length

    @computed_field
    @property
    def fundamental_frequency(self) -> float:
        """omega_1 = (pi/Lambda) (l c)^(-1/2)"""
        return math.pi / self.length / math.sqrt(
            self.inductance_per_length * self.capacitance_per_length
        )


class InputCircuitParams(BaseModel):
    """Source, shunt and coupling elements of the input network"""
    source_resistance: float = Field(0.0, ge=0, description="R_i (Ohm)")
    shunt_resistance: float = Field(
        ..., gt=0, allow_inf_nan=True, description="R (Ohm); inf removes the shunt"
    )
    coupling_capacitance: float = Field(..., gt=0, description="C_i (F)")
    input_amplitude: float = Field(1e-6, ge=0, description="V_i (V)")

    model_config = FROZEN

    @property
    def shunt_conductance(self) -> float:
        return 0.0 if math.isinf(self.shunt_resistance) else 1.0 / self.shunt_resistance


class SimConfig(BaseModel):
    """Integrator and post-processing settings (times in units of tau_0)"""
    step: float = Field(0.005, gt=0)
    transient_skip: float = Field(200.0, ge=0)
    averaging_window: float = Field(1000.0, gt=0)
    flux_fd_step: float = Field(0.01, gt=0, le=0.05, description="Delta Phi / Phi_0")
    ac_amplitude: float = Field(0.005, gt=0, le=0.01, description="A / Phi_0")
    seed: int = Field(0, ge=0)
    initial_delta1: float = 0.0
    initial_delta2: float = 0.0
    initial_jitter: float = Field(0.0, ge=0, description="rad, uniform +/- jitter")

    model_config = FROZEN

    @model_validator(mode="after")
    def _window_holds_enough_steps(self):
        if self.averaging_window < 100 * self.step:
            raise ValueError("averaging_window must be >= 100*step")
        return self


class DimensionlessSquid(BaseModel):
    """Normalized SQUID groups together with the SI scale factors"""
    beta_L: float = Field(..., ge=0)
    beta_c: float = Field(..., ge=0)
    i: float
    phi_e: float
    time_unit: float = Field(..., gt=0, description="tau_0 = Phi_0 / (2 pi I_c R_J) (s)")
    voltage_unit: float = Field(..., gt=0, description="I_c R_J (V)")
    current_unit: float = Field(..., gt=0, description="I_c (A)")

    model_config = FROZEN


# ============== Transmission Line ==============

class Mode(BaseModel):
    """Lumped equivalent of one standing-wave mode"""
    index: int = Field(..., ge=1)
    length: float = Field(..., gt=0)
    wavenumber: float
    frequency: float
    inductance: float
    capacitance: float
    mutual: float

    model_config = FROZEN


class ImpedancePoint(BaseModel):
    frequency: float = Field(..., gt=0)
    z: complex
    warn: bool = False

    model_config = FROZEN


# ============== SQUID Dynamics ==============

class SquidState(BaseModel):
    """Phases (unwrapped) and their rates in units of 1/tau_0"""
    delta1: float = 0.0
    delta2: float = 0.0
    ddelta1: float = 0.0
    ddelta2: float = 0.0

    model_config = FROZEN


class OperatingPoint(BaseModel):
    """Time-averaged characteristics of the unperturbed SQUID"""
    bias_current: float
    external_flux: float
    mean_voltage: float
    circulating_current: float
    converged: bool

    model_config = FROZEN

    @computed_field
    @property
    def josephson_frequency(self) -> float:
        return 2 * math.pi * abs(self.mean_voltage) / FLUX_QUANTUM


class TransferFunctions(BaseModel):
    v_phi: float = Field(..., description="dV/dPhi (V/Wb)")
    j_phi: float = Field(..., description="dJ/dPhi (A/Wb)")

    model_config = FROZEN


# ============== Gain Analysis ==============

class GainPoint(BaseModel):
    """One frequency sample of the amplifier response"""
    frequency: float = Field(..., gt=0)
    z: complex
    z_loaded: complex
    gain: complex
    delta_flux_per_volt: complex
    screening_ratio: float = Field(..., allow_inf_nan=True)
    warn: bool = False
    gain_renormalized: Optional[complex] = None

    model_config = FROZEN


class LinearResponseReport(BaseModel):
    """Static-transfer gain against the dynamically measured one"""
    frequency: float
    gain_static: float
    gain_dynamic: float
    deviation: float = Field(..., allow_inf_nan=True)

    model_config = FROZEN


# ============== Run Configuration ==============

class SweepSpec(BaseModel):
    start: float = Field(..., gt=0, description="rad/s")
    stop: float = Field(..., gt=0, description="rad/s")
    points: int = Field(201, ge=2)
    spacing: Literal["linear", "log"] = "linear"

    model_config = FROZEN

    @model_validator(mode="after")
    def _ordered(self):
        if not self.start < self.stop:
            raise ValueError("sweep_start must be < sweep_stop")
        return self


class RunConfig(BaseModel):
    squid: SquidParams
    line: StriplineParams
    input: InputCircuitParams
    sim: SimConfig
    sweep: SweepSpec

    model_config = {"frozen": True}


# Column orders of the CSV outputs
MODES_COLUMNS: List[str] = [
    "index", "wavenumber_per_m", "omega_rad_s", "inductance_h", "capacitance_f", "mutual_h",
]
IMPEDANCE_COLUMNS: List[str] = ["omega_rad_s", "re_z_ohm", "im_z_ohm", "abs_z_ohm", "warn_flag"]
IV_COLUMNS: List[str] = [
    "bias_current_a", "mean_voltage_v", "circulating_current_a",
    "josephson_frequency_rad_s", "converged",
]
TRANSFER_COLUMNS: List[str] = [
    "external_flux_wb", "mean_voltage_v", "circulating_current_a",
    "v_phi_v_per_wb", "j_phi_a_per_wb",
]
GAIN_COLUMNS: List[str] = [
    "omega_rad_s", "re_gain", "im_gain", "abs_gain", "re_z", "im_z",
    "abs_z_loaded", "screening_ratio", "warn_flag",
]
GAIN_RENORMALIZED_COLUMNS: List[str] = [
    "re_gain_renormalized", "im_gain_renormalized", "abs_gain_renormalized",
]
SCREENING_COLUMNS: List[str] = [
    "bias_current_a", "mean_voltage_v", "josephson_frequency_rad_s",
    "omega_1_rad_s", "screening_ratio", "gain_bound_rad_s",
]
VALIDATE_COLUMNS: List[str] = ["omega_rad_s", "abs_gain_static", "abs_gain_dynamic", "deviation"]
