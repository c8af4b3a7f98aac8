"""
Physical constants used throughout the simulator
"""
from scipy.constants import e, h, physical_constants


class Constants:
    """Constants for flux quantization"""
    FLUX_QUANTUM = physical_constants["mag. flux quantum"][0]  # Wb, h/2e
    ELEMENTARY_CHARGE = e
    PLANCK = h


FLUX_QUANTUM = Constants.FLUX_QUANTUM
