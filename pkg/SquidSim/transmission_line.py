"""
Mode spectrum and lumped equivalents of the open-ended microstrip resonator

Mode n has k_n = pi n / Lambda, omega_n = k_n / sqrt(l c) and lumped pair
L_n = L_1 / n, C_n = C_1 / n, so that L_n C_n omega_n^2 = 1.
"""
import logging
import math
from typing import List, Tuple

import numpy as np
from scipy.integrate import simpson

from SquidSim.exceptions import InvalidParameterError
from SquidSim.schemas import Mode, StriplineParams

logger = logging.getLogger(__name__)

# Simpson panels used for profile quadrature
OVERLAP_PANELS = 2 ** 12


def mode(line: StriplineParams, n: int) -> Mode:
    """Lumped equivalent of the nth standing-wave mode"""
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise InvalidParameterError("mode index n", n, "integer n >= 1")
    n = int(n)
    wavenumber = math.pi * n / line.length
    return Mode(
        index=n,
        length=line.length,
        wavenumber=wavenumber,
        frequency=wavenumber / math.sqrt(line.inductance_per_length * line.capacitance_per_length),
        inductance=line.fundamental_inductance / n,
        capacitance=line.fundamental_capacitance / n,
        mutual=line.fundamental_mutual / n,
    )


def modes(line: StriplineParams, count: int) -> List[Mode]:
    """The first `count` modes"""
    if count < 1:
        raise InvalidParameterError("mode count", count, "count >= 1")
    return [mode(line, n) for n in range(1, count + 1)]


def _check_position(mode_: Mode, x: float) -> None:
    if not 0 <= x <= mode_.length:
        raise InvalidParameterError("position x", x, f"0 <= x <= {mode_.length:.9g} m")


def current_profile(mode_: Mode, x: float) -> float:
    """Relative line current sin(n pi x / Lambda) of a mode"""
    _check_position(mode_, x)
    return math.sin(mode_.wavenumber * x)


def voltage_profile(mode_: Mode, x: float) -> float:
    """Relative line voltage cos(n pi x / Lambda) of a mode"""
    _check_position(mode_, x)
    return math.cos(mode_.wavenumber * x)


def current_nodes(mode_: Mode) -> List[float]:
    """Interior positions where the mode current changes direction"""
    return [mode_.length * m / mode_.index for m in range(1, mode_.index)]


def profile_overlap(line: StriplineParams, n: int, m: int) -> float:
    """Integral of the product of two current profiles over the line"""
    mode_n, mode_m = mode(line, n), mode(line, m)
    x = np.linspace(0.0, line.length, OVERLAP_PANELS + 1)
    return float(simpson(np.sin(mode_n.wavenumber * x) * np.sin(mode_m.wavenumber * x), x=x))


def _check_omega(omega: float) -> None:
    if not omega > 0:
        raise InvalidParameterError("omega", omega, "omega > 0 rad/s")


def mutual_at(line: StriplineParams, omega: float) -> float:
    """
    Frequency-dependent mutual inductance M(omega) = M_1 omega_1 / omega.

    Clamped to M_1 below the fundamental, where the interpolation has no support.
    """
    _check_omega(omega)
    omega_1 = line.fundamental_frequency
    if omega <= omega_1:
        return line.fundamental_mutual
    return line.fundamental_mutual * omega_1 / omega


def effective_lc_at(line: StriplineParams, omega: float) -> Tuple[float, float]:
    """Effective (L(omega), C(omega)) with the same 1/omega scaling and clamp as M"""
    _check_omega(omega)
    omega_1 = line.fundamental_frequency
    scale = 1.0 if omega <= omega_1 else omega_1 / omega
    return line.fundamental_inductance * scale, line.fundamental_capacitance * scale
