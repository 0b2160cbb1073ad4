"""Spectral evolution of gradient flows for optimization.

Finds critical points of minimization and min-max problems by evolving
the associated gradient-flow dynamics through a sparse spectral
discretization of the flow's generator, alongside classical first-order
baselines and a seeded benchmark harness.
"""

__version__ = "0.1.0"
