"""
Utility functions for the simulator: normalization, grids and number formatting
"""
import math
from typing import List, Sequence

import numpy as np

from SquidSim.constants import FLUX_QUANTUM
from SquidSim.schemas import DimensionlessSquid, SquidParams, SweepSpec


def normalize(p: SquidParams) -> DimensionlessSquid:
    """Reduce SI SQUID parameters to the RCSJ dimensionless groups"""
    return DimensionlessSquid(
        beta_L=p.beta_L,
        beta_c=p.beta_c,
        i=p.bias_current / p.critical_current,
        phi_e=p.external_flux / FLUX_QUANTUM,
        time_unit=FLUX_QUANTUM / (2 * math.pi * p.critical_current * p.junction_resistance),
        voltage_unit=p.critical_current * p.junction_resistance,
        current_unit=p.critical_current,
    )


def denormalize(
    d: DimensionlessSquid, critical_current: float, junction_resistance: float
) -> SquidParams:
    """Rebuild SI parameters from dimensionless groups at a given (I_c, R_J)"""
    return SquidParams(
        critical_current=critical_current,
        junction_resistance=junction_resistance,
        junction_capacitance=d.beta_c * FLUX_QUANTUM
        / (2 * math.pi * critical_current * junction_resistance ** 2),
        loop_inductance=d.beta_L * FLUX_QUANTUM / (2 * math.pi * critical_current),
        bias_current=d.i * critical_current,
        external_flux=d.phi_e * FLUX_QUANTUM,
    )


def squid_from_groups(
    beta_L: float,
    beta_c: float,
    i: float,
    phi_e: float,
    critical_current: float = 10e-6,
    junction_resistance: float = 10.0,
) -> SquidParams:
    """Build SI parameters directly from (beta_L, beta_c, I/I_c, Phi/Phi_0)"""
    time_unit = FLUX_QUANTUM / (2 * math.pi * critical_current * junction_resistance)
    return denormalize(
        DimensionlessSquid(
            beta_L=beta_L,
            beta_c=beta_c,
            i=i,
            phi_e=phi_e,
            time_unit=time_unit,
            voltage_unit=critical_current * junction_resistance,
            current_unit=critical_current,
        ),
        critical_current,
        junction_resistance,
    )


def frequency_grid(sweep: SweepSpec) -> np.ndarray:
    """Angular frequencies of a sweep, ascending"""
    if sweep.spacing == "log":
        return np.geomspace(sweep.start, sweep.stop, sweep.points)
    return np.linspace(sweep.start, sweep.stop, sweep.points)


def format_number(value) -> str:
    """Format a value for CSV output with 17 significant digits"""
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    value = float(value)
    if math.isnan(value):
        return "nan"
    return f"{value:.17g}"


def format_row(values: Sequence) -> str:
    return ",".join(format_number(v) for v in values)


def json_value(value):
    """Convert a value to something json.dumps emits as standard JSON"""
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    value = float(value)
    if math.isnan(value) or math.isinf(value):
        return None
    return value


def relative_deviation(value: float, reference: float) -> float:
    """Relative difference |value - reference| / |reference|, zero when both vanish"""
    if reference == 0:
        return 0.0 if value == 0 else math.inf
    return abs(value - reference) / abs(reference)


def linspace_list(start: float, stop: float, points: int) -> List[float]:
    return [float(x) for x in np.linspace(start, stop, points)]
