"""Finite de Finetti approximation for coherent power states."""
from .errors import InvalidInputError, ResourceError, TruncationError
from .kernels import BACKEND

__version__ = "0.1.0"
