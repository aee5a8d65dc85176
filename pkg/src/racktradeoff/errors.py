"""Exception types shared across the package."""


class SchemaError(ValueError):
    """A config document is missing a field or has a wrongly typed field."""


class InvalidConfig(ValueError):
    """A config document violates a system invariant (names the invariant)."""


class NotTwoRack(ValueError):
    """A two-rack-only operation was called on a different rack count."""


class EmptyIncome(ValueError):
    """An income sequence required to be nonempty was empty."""


class EmptyCoeffList(ValueError):
    """A coefficient list required to be nonempty was empty."""


class BelowMBR(ValueError):
    """Requested a threshold value below the curve's feasible domain."""


class InvalidModelParams(ValueError):
    """Reference-model parameters are out of range."""


class PreconditionUnmet(ValueError):
    """A closed-form special case was requested outside its preconditions."""


class InvalidScenario(ValueError):
    """A failure/wiring scenario is inconsistent with the configuration."""


class Disconnected(ValueError):
    """The flow graph has no source-to-collector path."""


class EnumerationTooLarge(ValueError):
    """Exhaustive scenario enumeration exceeds the desk-scale guards."""
