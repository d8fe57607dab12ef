"""Exception hierarchy shared by every orbitrel module."""


class OrbitRelError(Exception):
    """Base class for all library errors."""


class PrecisionExhausted(OrbitRelError):
    """A decision needed digits that the finite precision window does not hold."""


class DivisionByZero(OrbitRelError, ZeroDivisionError):
    pass


class EmptyInput(OrbitRelError, ValueError):
    pass


class ConstantTermNonzero(OrbitRelError, ValueError):
    pass


class OutsideConvergenceControl(OrbitRelError, ValueError):
    """Evaluation point too large for the truncation tail bound to apply."""


class DomainViolation(OrbitRelError, ValueError):
    """Input outside the region where the orbit results hold (e.g. |a| >= |lambda|)."""


class NotAttracting(DomainViolation):
    pass


class ZeroMap(DomainViolation):
    pass


class CharacteristicNotZero(OrbitRelError):
    pass


class SchemaError(OrbitRelError, ValueError):
    """Malformed JSON input."""
