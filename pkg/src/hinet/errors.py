"""Exception hierarchy shared by every pipeline stage."""


class HinError(Exception):
    """Base class for all data errors raised by hinet."""


class ParseError(HinError):
    pass


class DuplicateToken(HinError):
    pass


class IndexOutOfRange(HinError, IndexError):
    pass


class DegenerateDocument(HinError):
    """A text unit has no in-vocabulary token and cannot take part in WMD."""


class InfeasibleMass(HinError):
    """Supply and demand totals disagree; points at an upstream normalization bug."""


class WidthMismatch(HinError):
    pass


class NoLabeledNeighbors(HinError):
    pass


class GraphIntegrityError(HinError):
    def __init__(self, message, offending=()):
        self.offending = list(offending)
        if self.offending:
            shown = ", ".join(map(str, self.offending[:10]))
            more = "" if len(self.offending) <= 10 else f" (+{len(self.offending) - 10} more)"
            message = f"{message}: {shown}{more}"
        super().__init__(message)


class TypingViolation(GraphIntegrityError):
    pass


class OrphanEndpoint(GraphIntegrityError):
    pass


class MultiParentItem(GraphIntegrityError):
    pass


class ParentlessItem(GraphIntegrityError):
    pass


class SchemaVersionMismatch(HinError):
    pass


class SizeMismatch(HinError):
    pass


class DegenerateZero(HinError):
    pass


class MissingPredecessor(HinError):
    pass


class ConfigViolation(HinError):
    pass
