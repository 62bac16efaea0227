"""Lotka-Volterra competition on time scales."""

from .model import (EquilibriumSet, ModelParams, Regime, State, classify_regime, equilibria,
                    step_map, vector_field)
from .simulator import Budget, Trajectory, detect_convergence, simulate
from .timescale import Lattice, PatternUnion, Quantum, Reals, timescale_from_dict

__version__ = "0.1.0"
