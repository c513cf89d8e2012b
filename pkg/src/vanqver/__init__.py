"""Variational adiabatic annealing simulator for molecular ground states."""

__version__ = "0.1.0"
