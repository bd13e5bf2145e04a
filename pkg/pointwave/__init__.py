"""
Finite-energy wave dynamics with a point interaction at the origin.
"""
from pointwave.radial import ChargedField, Coupling, PhaseState, RadialGrid, make_coupling

__all__ = ["ChargedField", "Coupling", "PhaseState", "RadialGrid", "make_coupling"]
