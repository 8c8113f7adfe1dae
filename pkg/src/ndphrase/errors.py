"""Exception hierarchy shared by every module of the engine."""


class EngineError(Exception):
    pass


# formulas

class FormulaSyntaxError(EngineError):
    def __init__(self, message, pos=None, expected=None):
        self.pos = pos
        self.expected = expected
        where = f" at position {pos}" if pos is not None else ""
        want = f" (expected {expected})" if expected else ""
        super().__init__(f"{message}{where}{want}")


class SortError(EngineError):
    pass


class UnboundVariable(EngineError):
    pass


class NormalizationError(EngineError):
    pass


class NotBasic(EngineError):
    pass


# graphs

class UnknownVertex(EngineError):
    pass


class EmptyGraph(EngineError):
    pass


class NotNonUnified(EngineError):
    pass


# proving

class ProverLimit(EngineError):
    """Search was cut short. Callers treat this as truncation, not failure."""


class DepthExceeded(ProverLimit):
    pass


class BranchLimitExceeded(ProverLimit):
    def __init__(self, message, branches=()):
        super().__init__(message)
        self.branches = list(branches)


class ChainLimitExceeded(ProverLimit):
    pass


class TimeLimitExceeded(ProverLimit):
    pass


class OracleTooLarge(EngineError):
    pass


class NoAnchor(EngineError):
    pass


# knowledge and datasets

class FormatError(EngineError):
    def __init__(self, message, line=None):
        self.line = line
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}{message}")


class IdMismatch(EngineError):
    pass
