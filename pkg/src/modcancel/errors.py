"""Exception hierarchy shared by every layer of the engine."""


class EngineError(Exception):
    """Base class for all errors raised by modcancel."""


class StructureError(EngineError):
    """Operands live in different form registries (variables or caps differ)."""


class NotInvertible(EngineError):
    pass


class NotNilpotent(EngineError):
    pass


class DomainError(EngineError, ValueError):
    """Numeric evaluation requested outside the upper half plane."""


class ZeroFunction(EngineError):
    pass


class SpecError(EngineError, ValueError):
    pass


class CapError(EngineError):
    pass


class ShapeError(EngineError):
    pass


class ConfigError(EngineError):
    """A numeric check cannot meet its a-priori truncation tail bound."""


class NoSolution(EngineError):
    pass
