"""
Small-signal gain of the microstrip-coupled SQUID amplifier

    V / V_i = M_1 V_Phi / (Z + i omega M_1^2 (C_1/C_i) J_Phi)

V_Phi and J_Phi are always those of the bare SQUID (unreduced L_J). The optional
renormalized comparison reduces L_J by the screening factor of the input coil.
"""
import logging
import math
from functools import partial
from typing import Callable, Iterable, List, Optional, Sequence

import numpy as np

from SquidSim.constants import FLUX_QUANTUM
from SquidSim.exceptions import InvalidParameterError, SingularGainError, ZeroVoltageError
from SquidSim.input_circuit import forward_impedance, in_validity_window, loaded_impedance
from SquidSim.schemas import (
    GainPoint,
    InputCircuitParams,
    LinearResponseReport,
    OperatingPoint,
    SimConfig,
    SquidParams,
    StriplineParams,
    TransferFunctions,
)
from SquidSim.squid_dynamics import (
    LOW_FREQUENCY_FACTOR,
    ac_response,
    flux_offsets,
    run_to_steady,
    transfer_from_points,
)
from SquidSim.utils import relative_deviation

logger = logging.getLogger(__name__)

SINGULAR_DENOMINATOR = 1e-12  # Ohm
# Sweeps should stay this far below R_J/L_J
GAIN_BOUND_FRACTION = 0.2

RENORMALIZED_CONVENTION = (
    "renormalized gain uses L_J' = L_J (1 - M_1^2/(L_J L_1)), "
    "an external screening convention not derived here"
)


def gain_at(
    tf: TransferFunctions,
    line: StriplineParams,
    ic: InputCircuitParams,
    omega: float,
    screening: float = math.nan,
) -> GainPoint:
    """Amplifier gain at one frequency with back-action folded into the denominator"""
    if not omega > 0:
        raise InvalidParameterError("omega", omega, "omega > 0 rad/s")
    if not (math.isfinite(tf.v_phi) and math.isfinite(tf.j_phi)):
        raise InvalidParameterError("transfer functions", tf, "finite V_Phi and J_Phi")

    m1 = line.fundamental_mutual
    z = forward_impedance(line, ic, omega)
    z_loaded = loaded_impedance(
        z, tf.j_phi, omega, m1, line.fundamental_capacitance, ic.coupling_capacitance
    )
    if abs(z_loaded) < SINGULAR_DENOMINATOR:
        raise SingularGainError(omega, z_loaded)

    return GainPoint(
        frequency=omega,
        z=z,
        z_loaded=z_loaded,
        gain=m1 * tf.v_phi / z_loaded,
        delta_flux_per_volt=m1 / z_loaded,
        screening_ratio=screening,
        warn=not in_validity_window(line, omega),
    )


def screening_ratio(op: OperatingPoint, line: StriplineParams) -> float:
    """Suppression (omega_1/omega_J)^2 of the coupling at the Josephson frequency"""
    omega_j = op.josephson_frequency
    if omega_j <= 0:
        raise ZeroVoltageError()
    return min(1.0, (line.fundamental_frequency / omega_j) ** 2)


def gain_bandwidth_limit(params: SquidParams) -> float:
    """Characteristic frequency R_J/L_J bounding the achievable amplification"""
    return params.junction_resistance / params.loop_inductance


def renormalized_params(params: SquidParams, line: StriplineParams) -> SquidParams:
    """SQUID parameters with the loop inductance reduced by the input-coil screening"""
    alpha_sq = line.fundamental_mutual ** 2 / (params.loop_inductance * line.fundamental_inductance)
    if alpha_sq >= 1:
        raise InvalidParameterError("coupling alpha^2 = M_1^2/(L_J L_1)", alpha_sq, "alpha^2 < 1")
    return params.model_copy(update={"loop_inductance": params.loop_inductance * (1 - alpha_sq)})


def evaluate_gain(
    tf: TransferFunctions,
    line: StriplineParams,
    ic: InputCircuitParams,
    omegas: Iterable[float],
    screening: float = math.nan,
    renormalized: Optional[TransferFunctions] = None,
) -> List[GainPoint]:
    """Per-frequency gain for fixed transfer functions"""
    points = []
    for omega in omegas:
        point = gain_at(tf, line, ic, float(omega), screening)
        if renormalized is not None:
            point = point.model_copy(
                update={"gain_renormalized": gain_at(renormalized, line, ic, float(omega)).gain}
            )
        points.append(point)
    return points


def _check_sweep(omegas: Sequence[float]) -> np.ndarray:
    grid = np.asarray(omegas, dtype=float)
    if grid.size == 0 or np.any(~(grid > 0)):
        raise InvalidParameterError("sweep frequencies", list(grid), "all omega > 0")
    if np.any(np.diff(grid) < 0):
        raise InvalidParameterError("sweep frequencies", list(grid), "ascending order")
    return grid


def gain_sweep(
    params: SquidParams,
    line: StriplineParams,
    ic: InputCircuitParams,
    cfg: SimConfig,
    omegas: Sequence[float],
    renormalized: bool = False,
    map_fn: Callable = map,
) -> List[GainPoint]:
    """
    Gain over a frequency grid from one transfer-function extraction at the bias point.

    The independent integrations are dispatched through `map_fn`, so a worker pool's
    ordered map can stand in for the builtin.
    """
    grid = _check_sweep(omegas)
    delta = cfg.flux_fd_step * FLUX_QUANTUM
    jobs = [*flux_offsets(params, cfg), params]
    if renormalized:
        logger.warning("Renormalized comparison: %s", RENORMALIZED_CONVENTION)
        jobs += list(flux_offsets(renormalized_params(params, line), cfg))
    points = list(map_fn(partial(run_to_steady, cfg=cfg), jobs))

    tf = transfer_from_points(points[0], points[1], delta)
    bias = points[2]
    tf_renormalized = transfer_from_points(points[3], points[4], delta) if renormalized else None

    if bias.josephson_frequency > 0:
        screening = screening_ratio(bias, line)
    else:
        logger.warning("Bias point is superconducting; screening ratio reported as nan")
        screening = math.nan

    omega_1 = line.fundamental_frequency
    if grid[0] < omega_1:
        logger.info("M(omega) clamped to M_1 below omega_1 = %.9g rad/s", omega_1)
    bound = gain_bandwidth_limit(params)
    if grid[-1] >= GAIN_BOUND_FRACTION * bound:
        logger.warning(
            "Sweep reaches %.6g rad/s, not well below R_J/L_J = %.6g rad/s", grid[-1], bound
        )
    flagged = int(sum(not in_validity_window(line, float(w)) for w in grid))
    if flagged:
        logger.info("%d sweep points outside the lumped input-circuit window", flagged)

    return evaluate_gain(tf, line, ic, grid, screening, tf_renormalized)


def validate_linear_response(
    params: SquidParams,
    line: StriplineParams,
    ic: InputCircuitParams,
    cfg: SimConfig,
    omega: float,
    transfer: Optional[TransferFunctions] = None,
    operating_point: Optional[OperatingPoint] = None,
) -> LinearResponseReport:
    """Compare the static-transfer gain with one built from the simulated AC response"""
    op = operating_point or run_to_steady(params, cfg)
    if not omega * LOW_FREQUENCY_FACTOR < op.josephson_frequency:
        raise InvalidParameterError(
            "omega", omega, f"omega < omega_J/{LOW_FREQUENCY_FACTOR:g} at the bias point"
        )
    if transfer is None:
        lower, upper = flux_offsets(params, cfg)
        transfer = transfer_from_points(
            run_to_steady(lower, cfg), run_to_steady(upper, cfg), cfg.flux_fd_step * FLUX_QUANTUM
        )

    point = gain_at(transfer, line, ic, omega)
    response = ac_response(params, cfg, omega, operating_point=op)
    static = abs(point.gain)
    dynamic = line.fundamental_mutual * abs(response) / abs(point.z_loaded)
    return LinearResponseReport(
        frequency=omega,
        gain_static=static,
        gain_dynamic=dynamic,
        deviation=relative_deviation(dynamic, static),
    )
