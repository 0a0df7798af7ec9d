"""Error taxonomy shared by the library and the CLI.

Every error carries a stable machine code and the CLI exit status it maps to
(1 domain error, 2 parse error, 3 internal invariant breach).
"""
from __future__ import annotations


class QfiError(Exception):
    code = "E_DOMAIN"
    exit_code = 1

    def __init__(self, message: str, **detail):
        super().__init__(message)
        self.message = message
        self.detail = detail

    def as_dict(self) -> dict:
        out = {"code": self.code, "message": self.message}
        if self.detail:
            out["detail"] = self.detail
        return out


class ParseError(QfiError):
    code = "E_PARSE_SYNTAX"
    exit_code = 2

    def __init__(self, message: str, position: int | None = None, **detail):
        if position is not None:
            detail["position"] = position
            message = f"{message} at position {position}"
        super().__init__(message, **detail)
        self.position = position


class UnknownGenerator(ParseError):
    code = "E_UNKNOWN_GENERATOR"


class DomainError(QfiError):
    code = "E_DOMAIN"


class ModelMismatch(DomainError):
    code = "E_MODEL_MISMATCH"


class GeneratorSpecError(DomainError):
    code = "E_GENERATORS"


class IndexRangeError(DomainError):
    code = "E_RANGE"


class PreconditionError(DomainError):
    code = "E_PRECONDITION"


class NotPureSymbol(DomainError):
    code = "E_NOT_PURE_SYMBOL"


class DependentSymbol(DomainError):
    code = "E_ZERO_SYMBOL"


class OddDimension(DomainError):
    code = "E_ODD_DIMENSION"


class UnsupportedShape(DomainError):
    code = "E_UNSUPPORTED_SHAPE"


class NotInImage(DomainError):
    code = "E_NOT_IN_IMAGE"


class MissingLabels(DomainError):
    code = "E_MISSING_LABELS"


class InvariantBreach(QfiError):
    code = "E_INVARIANT"
    exit_code = 3
