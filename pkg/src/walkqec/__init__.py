"""walkqec: exact simulation and verification of quantum-walk error correction."""

__version__ = "0.1.0"
