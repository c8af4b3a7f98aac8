"""
Configuration for SquidSim

Environment settings (worker count, log level) come from pydantic-settings; run
parameters come from a flat `key = value` file whose keys map 1:1 to the model symbols.
"""
from pathlib import Path
from typing import Dict, List, Literal, NamedTuple, Optional

from pydantic import BaseModel, Field, ValidationError, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from SquidSim import __version__
from SquidSim.exceptions import ConfigError
from SquidSim.schemas import (
    InputCircuitParams,
    RunConfig,
    SimConfig,
    SquidParams,
    StriplineParams,
    SweepSpec,
)
from SquidSim.utils import format_number


class Settings(BaseSettings):
    """Application settings"""

    app_name: str = "SquidSim"
    app_version: str = __version__

    # Worker pool size for sweeps (0 = one per CPU, 1 = serial)
    threads: int = Field(0, ge=0)
    log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"] = "WARNING"

    model_config = SettingsConfigDict(
        env_prefix="SQUIDSIM_",
        env_file=".env",
        case_sensitive=False,
        extra="ignore",
    )

    @field_validator("log_level", mode="before")
    @classmethod
    def upper_log_level(cls, v):
        return v.upper() if isinstance(v, str) else v


def get_settings() -> Settings:
    """Read settings fresh from the environment"""
    return Settings()


# ============== Run Configuration Schema ==============

class Key(NamedTuple):
    section: str
    field: str
    kind: type
    invariant: str
    required: bool = False


REQUIRED = True

KEYS: Dict[str, Key] = {
    # SQUID
    "critical_current": Key("squid", "critical_current", float, "I_c > 0", REQUIRED),
    "junction_resistance": Key("squid", "junction_resistance", float, "R_J > 0", REQUIRED),
    "junction_capacitance": Key("squid", "junction_capacitance", float, "C_J ≥ 0", REQUIRED),
    "loop_inductance": Key("squid", "loop_inductance", float, "L_J > 0", REQUIRED),
    "bias_current": Key("squid", "bias_current", float, "I finite", REQUIRED),
    "external_flux": Key("squid", "external_flux", float, "Φ finite"),
    # Stripline
    "inductance_per_length": Key("line", "inductance_per_length", float, "l > 0", REQUIRED),
    "capacitance_per_length": Key("line", "capacitance_per_length", float, "c > 0", REQUIRED),
    "length": Key("line", "length", float, "Λ > 0", REQUIRED),
    "fundamental_mutual": Key("line", "fundamental_mutual", float, "M_1 ≥ 0", REQUIRED),
    # Input circuit
    "source_resistance": Key("input", "source_resistance", float, "R_i ≥ 0"),
    "shunt_resistance": Key("input", "shunt_resistance", float, "R > 0", REQUIRED),
    "coupling_capacitance": Key("input", "coupling_capacitance", float, "C_i > 0", REQUIRED),
    "input_amplitude": Key("input", "input_amplitude", float, "V_i ≥ 0"),
    # Simulation
    "step": Key("sim", "step", float, "step > 0"),
    "transient_skip": Key("sim", "transient_skip", float, "transient_skip ≥ 0"),
    "averaging_window": Key("sim", "averaging_window", float, "averaging_window ≥ 100·step"),
    "flux_fd_step": Key("sim", "flux_fd_step", float, "0 < flux_fd_step ≤ 0.05"),
    "ac_amplitude": Key("sim", "ac_amplitude", float, "0 < ac_amplitude ≤ 0.01"),
    "seed": Key("sim", "seed", int, "seed ≥ 0"),
    "initial_delta1": Key("sim", "initial_delta1", float, "δ_1(0) finite"),
    "initial_delta2": Key("sim", "initial_delta2", float, "δ_2(0) finite"),
    "initial_jitter": Key("sim", "initial_jitter", float, "initial_jitter ≥ 0"),
    # Sweep
    "sweep_start": Key("sweep", "start", float, "0 < sweep_start < sweep_stop"),
    "sweep_stop": Key("sweep", "stop", float, "sweep_stop > sweep_start"),
    "sweep_points": Key("sweep", "points", int, "sweep_points ≥ 2"),
    "sweep_spacing": Key("sweep", "spacing", str, "sweep_spacing ∈ {linear, log}"),
}

SECTIONS = {
    "squid": SquidParams,
    "line": StriplineParams,
    "input": InputCircuitParams,
    "sim": SimConfig,
    "sweep": SweepSpec,
}

# Model-level invariants that span several keys
CROSS_FIELD = {
    "sim": "averaging_window ≥ 100·step",
    "sweep": "sweep_start < sweep_stop",
}

# Default sweep band around the fundamental, matching the lumped-model window
DEFAULT_SWEEP_LOW = 0.5
DEFAULT_SWEEP_HIGH = 1.5


def _key_for(section: str, field: str) -> Optional[str]:
    for name, key in KEYS.items():
        if key.section == section and key.field == field:
            return name
    return None


def _read_pairs(text: str, problems: List[str]) -> Dict[str, str]:
    pairs: Dict[str, str] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            problems.append(f"line {number}: expected 'key = value', got {raw.strip()!r}")
            continue
        name, value = (part.strip() for part in line.split("=", 1))
        name = name.lower()
        if name not in KEYS:
            problems.append(f"{name}: unknown key")
        elif name in pairs:
            problems.append(f"{name}: duplicate key (line {number})")
        else:
            pairs[name] = value
    return pairs


def _convert(name: str, value: str, problems: List[str]):
    kind = KEYS[name].kind
    try:
        if kind is int:
            return int(value)
        if kind is float:
            return float(value)
        return value
    except ValueError:
        problems.append(f"{name} = {value!r}: not a valid {kind.__name__}")
        return None


def _build(section: str, values: dict, problems: List[str]) -> Optional[BaseModel]:
    try:
        return SECTIONS[section](**values)
    except ValidationError as exc:
        for error in exc.errors():
            loc = error.get("loc") or ()
            name = _key_for(section, str(loc[0])) if loc else None
            if name is None:
                problems.append(f"{section}: violates {CROSS_FIELD.get(section, error['msg'])}")
            else:
                problems.append(
                    f"{name} = {values.get(KEYS[name].field)!r}: violates {KEYS[name].invariant}"
                )
        return None


def parse_config(text: str) -> RunConfig:
    """Parse and validate a flat key-value run configuration"""
    problems: List[str] = []
    pairs = _read_pairs(text, problems)

    values: Dict[str, dict] = {section: {} for section in SECTIONS}
    for name, raw in pairs.items():
        converted = _convert(name, raw, problems)
        if converted is not None:
            key = KEYS[name]
            values[key.section][key.field] = converted

    for name, key in KEYS.items():
        if key.required and name not in pairs:
            problems.append(f"{name}: missing required key ({key.invariant})")
    if problems:
        raise ConfigError(problems)

    built = {
        section: _build(section, values[section], problems)
        for section in ("squid", "line", "input", "sim")
    }
    line = built["line"]
    if line is not None:
        sweep_values = dict(values["sweep"])
        sweep_values.setdefault("start", DEFAULT_SWEEP_LOW * line.fundamental_frequency)
        sweep_values.setdefault("stop", DEFAULT_SWEEP_HIGH * line.fundamental_frequency)
        built["sweep"] = _build("sweep", sweep_values, problems)
    if problems:
        raise ConfigError(problems)
    return RunConfig(**built)


def load_config(path) -> RunConfig:
    """Read and parse a configuration file"""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}")
    return parse_config(text)


def emit_config(cfg: RunConfig) -> str:
    """Write every key of a run configuration explicitly"""
    lines = []
    current = None
    for name, key in KEYS.items():
        if key.section != current:
            if current is not None:
                lines.append("")
            lines.append(f"# {key.section}")
            current = key.section
        value = getattr(getattr(cfg, key.section), key.field)
        text = value if isinstance(value, str) else format_number(value)
        lines.append(f"{name} = {text}")
    return "\n".join(lines) + "\n"
