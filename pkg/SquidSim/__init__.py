"""
SquidSim - microstrip-coupled DC SQUID amplifier simulator
"""
__version__ = "1.0.0"
