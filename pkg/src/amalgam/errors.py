"""Exception hierarchy shared by every layer of the package."""


class AmalgamError(Exception):
    """Base class for all errors raised by this package."""


class RankError(AmalgamError):
    pass


class ShapeError(AmalgamError):
    pass


class DefinitenessError(AmalgamError):
    pass


class DomainError(AmalgamError):
    pass


class HypothesisError(AmalgamError):
    """The level n has more than one prime above 2 in the real subfield.

    ``subgroup`` holds the sorted subgroup generated by 2 and -1 in (Z/dZ)^x.
    """

    def __init__(self, message, subgroup=None):
        super().__init__(message)
        self.subgroup = subgroup


class ConstructionError(AmalgamError):
    pass


class StructureError(AmalgamError):
    pass


class InternalError(AmalgamError):
    pass


class ClassificationError(AmalgamError):
    pass


class BudgetError(AmalgamError):
    """Raised when the tree exploration exceeds its vertex budget."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class OpenCaseError(AmalgamError):
    pass
