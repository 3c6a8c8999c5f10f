"""Exception hierarchy shared by every module."""


class HilbertKitError(Exception):
    """Base class for all library errors."""


class GeometryError(HilbertKitError):
    pass


class NotInterior(GeometryError):
    pass


class OutsideClosure(GeometryError):
    pass


class DegenerateChord(GeometryError):
    pass


class NotCollinear(GeometryError):
    pass


class ChartViolation(GeometryError):
    pass


class SingularTransform(GeometryError):
    pass


class UnboundedBody(GeometryError):
    pass


class ExtremalAnchor(GeometryError):
    """A face-based check was requested at an extremal point."""


class BadRadii(GeometryError):
    pass


class EmptySegment(GeometryError):
    pass


class NotProximal(GeometryError):
    pass


class BudgetExceeded(HilbertKitError):
    pass


class NotPreserving(HilbertKitError):
    pass


class EmptyLimitSet(HilbertKitError):
    pass


class HypothesisViolated(HilbertKitError):
    pass


class NotHyperbolicType(HilbertKitError):
    pass


class BadSpec(HilbertKitError):
    pass


class OutsideFace(GeometryError):
    pass


class ConfigError(HilbertKitError):
    pass
