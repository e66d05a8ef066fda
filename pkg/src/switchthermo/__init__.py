"""Ideal-theory simulator of quantum-switched thermalizing qubit channels."""

from .errors import ContractError, SizeError

__all__ = ["ContractError", "SizeError"]
__version__ = "0.1.0"
