"""
Exception handling and custom exceptions for SquidSim
"""
from typing import Optional


# Exit codes reported by the command line
EXIT_OK = 0
EXIT_ANALYSIS = 1
EXIT_CONFIG = 2
EXIT_CONVERGENCE = 3


class SquidSimError(Exception):
    """Base class for every error raised by the simulator"""
    exit_code: int = EXIT_ANALYSIS

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail

    def __reduce__(self):
        return _restore, (type(self), self.detail, dict(self.__dict__))


def _restore(cls, detail, state):
    error = cls.__new__(cls)
    Exception.__init__(error, detail)
    error.__dict__.update(state)
    return error


class InvalidParameterError(SquidSimError, ValueError):
    """Exception raised for an argument outside its physical domain"""
    exit_code = EXIT_CONFIG

    def __init__(self, name: str, value: object, bound: str):
        super().__init__(f"Invalid {name} = {value!r}: requires {bound}")
        self.name = name
        self.value = value
        self.bound = bound


class ConfigError(SquidSimError):
    """Exception raised for an unusable run configuration"""
    exit_code = EXIT_CONFIG

    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("Invalid configuration:\n  " + "\n  ".join(self.problems))


class DivergenceError(SquidSimError):
    """Exception raised when the integrated state stops being finite"""
    exit_code = EXIT_CONVERGENCE

    def __init__(self, time: float):
        super().__init__(f"Integration diverged at dimensionless time {time:.6g}")
        self.time = time


class ConvergenceError(SquidSimError):
    """Exception raised when a mean voltage did not settle"""
    exit_code = EXIT_CONVERGENCE

    def __init__(self, flux: float, mismatch: Optional[float] = None):
        detail = f"Operating point at external flux {flux:.9g} Wb did not converge"
        if mismatch is not None:
            detail += f" (half-window voltage mismatch {mismatch:.3g})"
        super().__init__(detail)
        self.flux = flux
        self.mismatch = mismatch


class BracketError(SquidSimError):
    """Exception raised when a search bracket holds no interior minimum"""

    def __init__(self, lo: float, hi: float, argmin: float):
        super().__init__(
            f"No interior minimum of |Z| in [{lo:.9g}, {hi:.9g}] rad/s; "
            f"boundary argmin at {argmin:.9g} rad/s"
        )
        self.argmin = argmin


class SingularGainError(SquidSimError):
    """Exception raised when the loaded impedance vanishes"""

    def __init__(self, omega: float, denominator: complex):
        super().__init__(
            f"Gain is singular at {omega:.9g} rad/s: |z_loaded| = {abs(denominator):.3g} Ohm "
            "(undamped input resonance)"
        )
        self.omega = omega
        self.denominator = denominator


class ZeroVoltageError(SquidSimError):
    """Exception raised when a Josephson frequency is required but V = 0"""

    def __init__(self):
        super().__init__(
            "Operating point is on the superconducting branch (V = 0); "
            "no Josephson oscillation, screening ratio undefined"
        )
