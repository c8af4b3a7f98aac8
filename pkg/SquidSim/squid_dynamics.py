"""
Time-domain integration of the symmetric two-junction SQUID

In units of tau_0 = Phi_0 / (2 pi I_c R_J), with i = I/I_c and phi_e = Phi/Phi_0:

    beta_c d1'' + d1' = i/2 - j - sin d1
    beta_c d2'' + d2' = i/2 + j - sin d2
    j = (d1 - d2 - 2 pi phi_e) / beta_L

The SQUID voltage is v = (d1' + d2')/2 in units of I_c R_J, i.e. the rate of the
mean phase gamma = (d1 + d2)/2. beta_c = 0 uses the first-order system directly.
"""
import logging
import math
from typing import Iterable, List, NamedTuple, Optional, Tuple

import numpy as np
from scipy.signal.windows import hann

from SquidSim.constants import FLUX_QUANTUM
from SquidSim.exceptions import (
    ConfigError,
    ConvergenceError,
    DivergenceError,
    InvalidParameterError,
)
from SquidSim.schemas import (
    DimensionlessSquid,
    OperatingPoint,
    SimConfig,
    SquidParams,
    SquidState,
    TransferFunctions,
)
from SquidSim.utils import normalize

logger = logging.getLogger(__name__)

TWO_PI = 2 * math.pi

# Half-window mean voltages must agree to this (units of I_c R_J)
CONVERGENCE_TOLERANCE = 1e-3
# Mean-phase advance over the window below which the SQUID is superconducting (rad)
ZERO_VOLTAGE_ADVANCE = 0.1
# Lock-in needs at least this many whole drive periods
MIN_DRIVE_PERIODS = 8
# Drive must stay this far below the Josephson frequency
LOW_FREQUENCY_FACTOR = 5.0


class Trace(NamedTuple):
    """Sampled window of one integration (dimensionless)"""
    time: np.ndarray
    phase: np.ndarray        # gamma = (d1 + d2) / 2
    circulating: np.ndarray  # j


def _require_inductance(d: DimensionlessSquid) -> None:
    if not d.beta_L > 0:
        raise InvalidParameterError("beta_L", d.beta_L, "beta_L > 0 (use >= 1e-4 for the zero-inductance limit)")


def derivatives(state: SquidState, dimless: DimensionlessSquid) -> Tuple[float, float, float, float]:
    """
    Time derivative (d1', d2', d1'', d2'') of the state.

    For beta_c = 0 the phases obey the first-order system; the rates are returned
    from the right-hand side and the second derivatives are reported as zero.
    """
    _require_inductance(dimless)
    d1, d2 = state.delta1, state.delta2
    half_i = 0.5 * dimless.i
    j = (d1 - d2 - TWO_PI * dimless.phi_e) / dimless.beta_L
    rhs1 = half_i - j - math.sin(d1)
    rhs2 = half_i + j - math.sin(d2)
    if dimless.beta_c == 0:
        return rhs1, rhs2, 0.0, 0.0
    return (
        state.ddelta1,
        state.ddelta2,
        (rhs1 - state.ddelta1) / dimless.beta_c,
        (rhs2 - state.ddelta2) / dimless.beta_c,
    )


def mean_voltage_rate(state: SquidState, dimless: DimensionlessSquid) -> float:
    """Instantaneous dimensionless voltage v = (d1' + d2') / 2"""
    rates = derivatives(state, dimless)
    return 0.5 * (rates[0] + rates[1])


def _initial_phases(cfg: SimConfig) -> Tuple[float, float]:
    d1, d2 = cfg.initial_delta1, cfg.initial_delta2
    if cfg.initial_jitter > 0:
        rng = np.random.default_rng(cfg.seed)
        k1, k2 = rng.uniform(-cfg.initial_jitter, cfg.initial_jitter, size=2)
        d1, d2 = d1 + float(k1), d2 + float(k2)
    return d1, d2


def _integrate(
    d: DimensionlessSquid,
    cfg: SimConfig,
    n_skip: int,
    n_window: int,
    drive_amplitude: float = 0.0,
    drive_omega: float = 0.0,
) -> Trace:
    """
    Fixed-step RK4 from the configured initial condition.

    The external flux is phi_e + drive_amplitude*cos(drive_omega*t). Samples of the mean
    phase and circulating current are kept for the last n_window steps.
    """
    _require_inductance(d)
    h = cfg.step
    half_h = 0.5 * h
    sixth_h = h / 6.0
    half_i = 0.5 * d.i
    inv_bl = 1.0 / d.beta_L
    flux0 = TWO_PI * d.phi_e
    flux_amp = TWO_PI * drive_amplitude
    sin = math.sin
    cos = math.cos
    isfinite = math.isfinite

    if flux_amp:
        def flux(t):
            return flux0 + flux_amp * cos(drive_omega * t)
    else:
        def flux(t):
            return flux0

    d1, d2 = _initial_phases(cfg)
    v1 = v2 = 0.0
    total = n_skip + n_window
    phase = np.empty(n_window + 1)
    circ = np.empty(n_window + 1)

    try:
        if d.beta_c > 0:
            inv_bc = 1.0 / d.beta_c

            for k in range(total):
                t = k * h
                f0 = flux(t)
                if k >= n_skip:
                    phase[k - n_skip] = 0.5 * (d1 + d2)
                    circ[k - n_skip] = (d1 - d2 - f0) * inv_bl
                fm = flux(t + half_h)
                f1 = flux(t + h)

                j = (d1 - d2 - f0) * inv_bl
                a1 = (half_i - j - sin(d1) - v1) * inv_bc
                b1 = (half_i + j - sin(d2) - v2) * inv_bc

                x1, x2, y1, y2 = d1 + half_h * v1, d2 + half_h * v2, v1 + half_h * a1, v2 + half_h * b1
                j = (x1 - x2 - fm) * inv_bl
                a2 = (half_i - j - sin(x1) - y1) * inv_bc
                b2 = (half_i + j - sin(x2) - y2) * inv_bc

                z1, z2, w1, w2 = d1 + half_h * y1, d2 + half_h * y2, v1 + half_h * a2, v2 + half_h * b2
                j = (z1 - z2 - fm) * inv_bl
                a3 = (half_i - j - sin(z1) - w1) * inv_bc
                b3 = (half_i + j - sin(z2) - w2) * inv_bc

                p1, p2, q1, q2 = d1 + h * w1, d2 + h * w2, v1 + h * a3, v2 + h * b3
                j = (p1 - p2 - f1) * inv_bl
                a4 = (half_i - j - sin(p1) - q1) * inv_bc
                b4 = (half_i + j - sin(p2) - q2) * inv_bc

                d1 += sixth_h * (v1 + 2 * y1 + 2 * w1 + q1)
                d2 += sixth_h * (v2 + 2 * y2 + 2 * w2 + q2)
                v1 += sixth_h * (a1 + 2 * a2 + 2 * a3 + a4)
                v2 += sixth_h * (b1 + 2 * b2 + 2 * b3 + b4)
                if not isfinite(d1 + d2 + v1 + v2):
                    raise DivergenceError((k + 1) * h)
        else:
            for k in range(total):
                t = k * h
                f0 = flux(t)
                if k >= n_skip:
                    phase[k - n_skip] = 0.5 * (d1 + d2)
                    circ[k - n_skip] = (d1 - d2 - f0) * inv_bl
                fm = flux(t + half_h)
                f1 = flux(t + h)

                j = (d1 - d2 - f0) * inv_bl
                k11 = half_i - j - sin(d1)
                k12 = half_i + j - sin(d2)

                x1, x2 = d1 + half_h * k11, d2 + half_h * k12
                j = (x1 - x2 - fm) * inv_bl
                k21 = half_i - j - sin(x1)
                k22 = half_i + j - sin(x2)

                x1, x2 = d1 + half_h * k21, d2 + half_h * k22
                j = (x1 - x2 - fm) * inv_bl
                k31 = half_i - j - sin(x1)
                k32 = half_i + j - sin(x2)

                x1, x2 = d1 + h * k31, d2 + h * k32
                j = (x1 - x2 - f1) * inv_bl
                k41 = half_i - j - sin(x1)
                k42 = half_i + j - sin(x2)

                d1 += sixth_h * (k11 + 2 * k21 + 2 * k31 + k41)
                d2 += sixth_h * (k12 + 2 * k22 + 2 * k32 + k42)
                if not isfinite(d1 + d2):
                    raise DivergenceError((k + 1) * h)
    except ValueError:
        # sin() of an overflowed stage value
        raise DivergenceError((k + 1) * h) from None

    t_end = total * h
    phase[n_window] = 0.5 * (d1 + d2)
    circ[n_window] = (d1 - d2 - flux(t_end)) * inv_bl
    time = (n_skip + np.arange(n_window + 1)) * h
    return Trace(time=time, phase=phase, circulating=circ)


def _period_average(trace: Trace) -> Tuple[float, float]:
    """
    Mean voltage and circulating current over whole Josephson periods.

    Averages between the first and last times the mean phase advances by a full
    2 pi; falls back to the plain window average when fewer than two periods fit.
    """
    t, gamma, j = trace
    advance = gamma[-1] - gamma[0]
    if abs(advance) < ZERO_VOLTAGE_ADVANCE:
        return 0.0, float(np.mean(j))

    sign = 1.0 if advance > 0 else -1.0
    u = sign * (gamma - gamma[0])
    reach = np.maximum.accumulate(u)
    levels = TWO_PI * np.arange(1, int(reach[-1] // TWO_PI) + 1)
    if len(levels) < 2:
        return advance / (t[-1] - t[0]), float(np.mean(j))

    idx = np.searchsorted(reach, levels, side="left")
    frac = (levels - u[idx - 1]) / (u[idx] - u[idx - 1])
    crossings = t[idx - 1] + frac * (t[idx] - t[idx - 1])
    v = sign * (levels[-1] - levels[0]) / (crossings[-1] - crossings[0])
    return float(v), float(np.mean(j[idx[0]:idx[-1]]))


def _split_halves(trace: Trace) -> Tuple[Trace, Trace]:
    mid = (len(trace.time) - 1) // 2
    first = Trace(trace.time[: mid + 1], trace.phase[: mid + 1], trace.circulating[: mid + 1])
    second = Trace(trace.time[mid:], trace.phase[mid:], trace.circulating[mid:])
    return first, second


def _steps(duration: float, step: float) -> int:
    return int(round(duration / step))


def trace(params: SquidParams, cfg: SimConfig) -> Trace:
    """Raw averaging-window samples of an undriven run"""
    d = normalize(params)
    return _integrate(d, cfg, _steps(cfg.transient_skip, cfg.step), _steps(cfg.averaging_window, cfg.step))


def run_to_steady(params: SquidParams, cfg: SimConfig) -> OperatingPoint:
    """Integrate past the transient and time-average the voltage and circulating current"""
    d = normalize(params)
    if d.beta_c > 1:
        logger.warning(
            "beta_c = %.3g > 1: hysteretic regime, characteristics depend on the initial condition",
            d.beta_c,
        )
    window = trace(params, cfg)
    v, j = _period_average(window)
    first, second = _split_halves(window)
    mismatch = abs(_period_average(first)[0] - _period_average(second)[0])
    converged = mismatch < CONVERGENCE_TOLERANCE
    if not converged:
        logger.warning(
            "Operating point I=%.6g A, Phi=%.6g Wb not converged (half-window mismatch %.3g)",
            params.bias_current, params.external_flux, mismatch,
        )
    return OperatingPoint(
        bias_current=params.bias_current,
        external_flux=params.external_flux,
        mean_voltage=v * d.voltage_unit,
        circulating_current=j * d.current_unit,
        converged=converged,
    )


def iv_curve(params: SquidParams, cfg: SimConfig, bias_currents: Iterable[float]) -> List[OperatingPoint]:
    """Operating points along a list of bias currents (A)"""
    return [
        run_to_steady(params.model_copy(update={"bias_current": float(bias)}), cfg)
        for bias in bias_currents
    ]


def flux_offsets(params: SquidParams, cfg: SimConfig) -> Tuple[SquidParams, SquidParams]:
    """Bias points at Phi -/+ Delta Phi used for the central differences"""
    delta = cfg.flux_fd_step * FLUX_QUANTUM
    return (
        params.model_copy(update={"external_flux": params.external_flux - delta}),
        params.model_copy(update={"external_flux": params.external_flux + delta}),
    )


def transfer_from_points(
    lower: OperatingPoint, upper: OperatingPoint, delta_flux: float
) -> TransferFunctions:
    """Central differences of V and J across two operating points 2*delta_flux apart"""
    for point in (lower, upper):
        if not point.converged:
            raise ConvergenceError(point.external_flux)
    return TransferFunctions(
        v_phi=(upper.mean_voltage - lower.mean_voltage) / (2 * delta_flux),
        j_phi=(upper.circulating_current - lower.circulating_current) / (2 * delta_flux),
    )


def transfer_functions(params: SquidParams, cfg: SimConfig) -> TransferFunctions:
    """Bare-SQUID V_Phi and J_Phi at the bias point"""
    lower, upper = flux_offsets(params, cfg)
    return transfer_from_points(
        run_to_steady(lower, cfg),
        run_to_steady(upper, cfg),
        cfg.flux_fd_step * FLUX_QUANTUM,
    )


def ac_response(
    params: SquidParams,
    cfg: SimConfig,
    omega: float,
    operating_point: Optional[OperatingPoint] = None,
) -> complex:
    """
    Complex voltage response V(omega)/A to a small flux drive A cos(omega t), in V/Wb.

    The drive period is rounded to a whole number of integrator steps; the amplitude
    is extracted by a Hann-windowed lock-in over whole drive periods.
    """
    if not omega > 0:
        raise InvalidParameterError("omega", omega, "omega > 0 rad/s")
    op = operating_point or run_to_steady(params, cfg)
    if not omega * LOW_FREQUENCY_FACTOR < op.josephson_frequency:
        raise InvalidParameterError(
            "omega", omega,
            f"omega < omega_J/{LOW_FREQUENCY_FACTOR:g} = {op.josephson_frequency / LOW_FREQUENCY_FACTOR:.6g} rad/s",
        )

    d = normalize(params)
    h = cfg.step
    steps_per_period = _steps(TWO_PI / (omega * d.time_unit), h)
    periods = int(cfg.averaging_window // (steps_per_period * h))
    if periods < MIN_DRIVE_PERIODS:
        raise ConfigError(
            f"averaging_window = {cfg.averaging_window:g} holds {periods} drive periods "
            f"at omega = {omega:.6g} rad/s; at least {MIN_DRIVE_PERIODS} are required"
        )
    drive_omega = TWO_PI / (steps_per_period * h)
    if abs(drive_omega - omega * d.time_unit) > 1e-3 * drive_omega:
        logger.debug("Drive frequency snapped to %.9g (dimensionless)", drive_omega)
    n_skip = steps_per_period * math.ceil(cfg.transient_skip / (steps_per_period * h))
    n_window = steps_per_period * periods

    window = _integrate(d, cfg, n_skip, n_window, cfg.ac_amplitude, drive_omega)
    increments = np.diff(window.phase)
    midpoints = window.time[:-1] + 0.5 * h
    weights = hann(n_window, sym=False)
    amplitude = 2.0 * np.sum(weights * np.exp(-1j * drive_omega * midpoints) * increments) / (
        np.sum(weights) * h
    )
    return complex(amplitude * d.voltage_unit / (cfg.ac_amplitude * FLUX_QUANTUM))
