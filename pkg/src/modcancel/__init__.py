"""Exact q-series and characteristic-form engine for checking anomaly
cancellation formulas built from level-2 modular forms."""

__version__ = "0.1.0"

from .errors import (
    CapError,
    ConfigError,
    DomainError,
    EngineError,
    NoSolution,
    NotInvertible,
    NotNilpotent,
    ShapeError,
    SpecError,
    StructureError,
    ZeroFunction,
)
from .series import FormPoly, FormQSeries, QSeries, Registry
from .charforms import GeometrySpec

__all__ = [
    "__version__",
    "CapError",
    "ConfigError",
    "DomainError",
    "EngineError",
    "NoSolution",
    "NotInvertible",
    "NotNilpotent",
    "ShapeError",
    "SpecError",
    "StructureError",
    "ZeroFunction",
    "FormPoly",
    "FormQSeries",
    "QSeries",
    "Registry",
    "GeometrySpec",
]
