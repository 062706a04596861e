"""spinstein: Glauber dynamics, couplings and exact oracles for the Potts model."""

__version__ = "0.1.0"
