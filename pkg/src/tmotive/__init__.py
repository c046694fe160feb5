"""Anderson t-motives of rank 3, dimension 2: periods, Siegel matrices, isomorphisms."""
from .errors import (ContractionFailure, DivisionByZeroAtPrecision, InsufficientPrecision,
                     NoSuchSlope, OutsideLogDomain, OutsideNeighborhood, PrecisionError, ShapeError,
                     SingularHead, TailNotConvergent, ZeroParameter)
from .puiseux import PuiseuxNumber, parse, precision, working_precision
from .scalars import FF, FieldTower, tower

__version__ = "0.1.0"

__all__ = [
    "ContractionFailure", "DivisionByZeroAtPrecision", "InsufficientPrecision", "NoSuchSlope",
    "OutsideLogDomain", "OutsideNeighborhood", "PrecisionError", "ShapeError", "SingularHead",
    "TailNotConvergent", "ZeroParameter",
    "FF", "FieldTower", "PuiseuxNumber", "parse", "precision", "tower", "working_precision",
]
