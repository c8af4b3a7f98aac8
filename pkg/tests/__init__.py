"""
Tests for SquidSim
"""
