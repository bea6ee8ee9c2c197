"""Sub-circuit compilation and analysis toolkit for encoded Fermi-Hubbard
Hamiltonian simulation: pulse-level gate synthesis, Trotter product-formula
error bounds, circuit cost models, stochastic-noise Monte Carlo and exact
small-instance simulation."""

__version__ = "0.1.0"
