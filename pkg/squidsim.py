#!/usr/bin/env python3
"""
SquidSim command line entry point
Simulates the microstrip-coupled DC SQUID amplifier; see README.md for the subcommands
"""
import os
import sys

# Add the package to path
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from SquidSim.main import main


if __name__ == "__main__":
    sys.exit(main())
