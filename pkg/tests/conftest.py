"""
Shared fixtures: small unit-valued circuits and fast integrator settings
"""
import math

import pytest

from SquidSim.config import emit_config
from SquidSim.schemas import (
    InputCircuitParams,
    RunConfig,
    SimConfig,
    StriplineParams,
    SweepSpec,
)
from SquidSim.utils import squid_from_groups


@pytest.fixture
def unit_line():
    """l = c = 1, Lambda = pi: L_1 = C_1 = omega_1 = 1"""
    return StriplineParams(
        inductance_per_length=1.0,
        capacitance_per_length=1.0,
        length=math.pi,
        fundamental_mutual=1e-9,
    )


@pytest.fixture
def lossy_input():
    return InputCircuitParams(shunt_resistance=1.0, coupling_capacitance=1.0)


@pytest.fixture
def lossless_input():
    return InputCircuitParams(shunt_resistance=math.inf, coupling_capacitance=1.0)


@pytest.fixture
def reference_squid():
    """beta_L = 1, beta_c = 0.5, I = 2 I_c, Phi = Phi_0/4"""
    return squid_from_groups(beta_L=1.0, beta_c=0.5, i=2.0, phi_e=0.25)


@pytest.fixture
def fast_sim():
    """Short runs for beta_L ~ 1; too coarse for beta_L << 1"""
    return SimConfig(step=0.02, transient_skip=100.0, averaging_window=300.0)


@pytest.fixture
def stiff_sim():
    """Step small enough for the fast difference mode at beta_L = 0.01"""
    return SimConfig(step=0.005, transient_skip=60.0, averaging_window=300.0)


@pytest.fixture
def write_config(tmp_path):
    """Write a complete configuration file built from the given records"""

    def _write(squid, line, input_, sim, sweep=None, name="run.cfg"):
        if sweep is None:
            omega_1 = line.fundamental_frequency
            sweep = SweepSpec(start=0.5 * omega_1, stop=1.5 * omega_1, points=11)
        cfg = RunConfig(squid=squid, line=line, input=input_, sim=sim, sweep=sweep)
        path = tmp_path / name
        path.write_text(emit_config(cfg), encoding="utf-8")
        return path

    return _write
