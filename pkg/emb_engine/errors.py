class EmbEngineError(ValueError):
    """Base class for every domain error raised by emb_engine."""


class ParseError(EmbEngineError):
    def __init__(self, message, line=1, column=1):
        self.line = line
        self.column = column
        super().__init__(f"{message} (line {line}, column {column})")


class TermError(EmbEngineError):
    pass


class BadAddress(EmbEngineError):
    pass


class NotSingleLimit(EmbEngineError):
    pass


class GlueMismatch(EmbEngineError):
    pass


class NotContinuous(EmbEngineError):
    pass


class UnsupportedDomain(EmbEngineError):
    pass


class UnknownEmbedding(EmbEngineError):
    pass


class NotLocallyConstant(EmbEngineError):
    pass


class LabelMismatch(EmbEngineError):
    pass


class InvalidWitness(EmbEngineError):
    pass


class TooFewLimitPoints(EmbEngineError):
    pass


class NotDisjoint(EmbEngineError):
    pass


class UnsupportedFn(EmbEngineError):
    pass


class BoundExceeded(EmbEngineError):
    pass


class GraphError(EmbEngineError):
    pass
