"""hamflow: deterministic planar Hamiltonian vector-field dataset toolkit."""

__version__ = "0.1.0"
