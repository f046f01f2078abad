"""Exception hierarchy shared by all modules."""


class RieszError(Exception):
    pass


class ParseError(RieszError, ValueError):
    def __init__(self, message, position=None, expected=None):
        self.position = position
        self.expected = expected
        where = f" at {position}" if position is not None else ""
        super().__init__(f"{message}{where}")


class TermSyntaxError(ParseError):
    pass


class NonPositiveScalar(ParseError):
    pass


class EmptyHypersequent(ParseError):
    pass


class EvalError(RieszError):
    pass


class UnboundVariable(EvalError):
    pass


class DimensionMismatch(EvalError):
    pass


class SymbolicCoefficient(EvalError):
    pass


class InvalidModel(RieszError, ValueError):
    pass


class LeafMismatch(RieszError):
    pass


class InvalidWitness(RieszError):
    pass


class TransformError(RieszError):
    pass


class NotHR(TransformError):
    pass


class NotRational(TransformError):
    pass


class NotCanFree(TransformError):
    pass


class ShapeViolation(TransformError):
    pass


class SideConditionViolated(TransformError):
    pass


class ShadowedBinder(RieszError):
    pass


class SolverNotFound(RieszError):
    pass


class ProtocolError(RieszError):
    def __init__(self, message, raw=""):
        self.raw = raw
        super().__init__(message)
