"""
Forward impedance of the input network and its back-action loading

Complex time convention: e^{+i omega t}, so inductive reactance is +i omega L.
"""
import logging
from typing import Iterable, List, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from SquidSim.exceptions import BracketError, InvalidParameterError
from SquidSim.schemas import ImpedancePoint, InputCircuitParams, StriplineParams
from SquidSim.transmission_line import mode

logger = logging.getLogger(__name__)

# The lumped pair is a near-resonance reduction; outside this band around omega_n points are flagged
VALIDITY_LOW = 0.5
VALIDITY_HIGH = 1.5

RESONANCE_XTOL = 1e-10
COARSE_POINTS = 257


def forward_impedance(
    line: StriplineParams,
    ic: InputCircuitParams,
    omega,
    mode_index: int = 1,
):
    """
    Forward impedance Z = V_i / I_i of the input circuit with the SQUID decoupled.

    The line is represented by the lumped pair (L_n, C_n) of resonance `mode_index`.
    Accepts a scalar or a numpy array of angular frequencies.
    """
    w = np.asarray(omega, dtype=float)
    if np.any(~(w > 0)):
        raise InvalidParameterError("omega", omega, "omega > 0 rad/s")
    lumped = mode(line, mode_index)
    L, C = lumped.inductance, lumped.capacitance
    ci, ri, g = ic.coupling_capacitance, ic.source_resistance, ic.shunt_conductance

    reactive = w * (C + ci + ci * ri * g) - 1.0 / (w * L)
    resistive = g - ri * ci * (w ** 2 * C - 1.0 / L)
    z = (L / ci) * (1j * reactive + resistive)
    if np.ndim(z) == 0:
        return complex(z)
    return z


def in_validity_window(line: StriplineParams, omega: float, mode_index: int = 1) -> bool:
    """Whether omega lies where the lumped near-resonance reduction is trusted"""
    omega_n = mode(line, mode_index).frequency
    return VALIDITY_LOW * omega_n <= omega <= VALIDITY_HIGH * omega_n


def loaded_impedance(
    z: complex, j_phi: float, omega: float, m1: float, c1: float, ci: float
) -> complex:
    """Input impedance including SQUID back-action, Z + i omega M_1^2 (C_1/C_i) J_Phi"""
    if not ci > 0:
        raise InvalidParameterError("coupling capacitance", ci, "C_i > 0")
    return z + 1j * omega * m1 ** 2 * (c1 / ci) * j_phi


def impedance_sweep(
    line: StriplineParams,
    ic: InputCircuitParams,
    omegas: Iterable[float],
    mode_index: int = 1,
) -> List[ImpedancePoint]:
    """Evaluate the forward impedance over a frequency grid"""
    omegas = np.asarray(list(omegas), dtype=float)
    values = np.atleast_1d(forward_impedance(line, ic, omegas, mode_index))
    points = [
        ImpedancePoint(
            frequency=float(w),
            z=complex(z),
            warn=not in_validity_window(line, float(w), mode_index),
        )
        for w, z in zip(omegas, values)
    ]
    flagged = sum(p.warn for p in points)
    if flagged:
        logger.info(
            "%d of %d impedance points lie outside the lumped-model window [%.2f, %.2f]*omega_%d",
            flagged, len(points), VALIDITY_LOW, VALIDITY_HIGH, mode_index,
        )
    return points


def find_resonance(
    line: StriplineParams,
    ic: InputCircuitParams,
    bracket: Tuple[float, float],
    mode_index: int = 1,
) -> float:
    """Angular frequency minimizing |Z| inside the bracket (golden-section search)"""
    lo, hi = bracket
    if not 0 < lo < hi:
        raise InvalidParameterError("bracket", bracket, "0 < lo < hi")

    def objective(w):
        return abs(forward_impedance(line, ic, w, mode_index))

    grid = np.geomspace(lo, hi, COARSE_POINTS)
    magnitude = np.abs(forward_impedance(line, ic, grid, mode_index))
    k = int(np.argmin(magnitude))
    if 0 < k < len(grid) - 1:
        a, b, middle = grid[k - 1], grid[k + 1], grid[k]
    else:
        # Coarse argmin on an end point: the minimum may still lie inside the end cell
        a, b = (grid[0], grid[1]) if k == 0 else (grid[-2], grid[-1])
        edge = grid[k]
        cell = minimize_scalar(
            objective, bounds=(a, b), method="bounded",
            options={"xatol": RESONANCE_XTOL * a},
        )
        if not (cell.fun < objective(a) and cell.fun < objective(b)):
            raise BracketError(lo, hi, float(edge))
        middle = cell.x

    result = minimize_scalar(
        objective,
        bracket=(a, middle, b),
        method="golden",
        options={"xtol": RESONANCE_XTOL},
    )
    logger.debug("Resonance at %.12g rad/s, |Z| = %.6g Ohm", result.x, result.fun)
    return float(result.x)
