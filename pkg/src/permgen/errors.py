"""Exception hierarchy shared by the library and the CLI."""


class PermgenError(Exception):
    """Base class for all errors raised by permgen."""


class DegreeMismatchError(PermgenError, ValueError):
    pass


class CycleTypeError(PermgenError, ValueError):
    """Malformed or inconsistent cycle type."""


class InfeasibleConfigError(PermgenError, ValueError):
    """Requested scaled cycle type does not fit in the given degree."""


class CapacityError(PermgenError):
    """An exact computation exceeds its enumeration cap."""


class BudgetError(PermgenError):
    """Exact group recognition was required beyond the configured degree budget."""


class DegenerateDegreeError(PermgenError, ValueError):
    pass


class IndeterminateLimitError(PermgenError, ValueError):
    """The limit is not determined by (x, y, x', y') alone.

    Raised for (x, x') in {(0, inf), (inf, 0)} with y*y' < 1, where the
    generation probability can be close to 0 or to 1 depending on the
    finer structure of the classes.
    """


class NumericError(PermgenError, ArithmeticError):
    pass
