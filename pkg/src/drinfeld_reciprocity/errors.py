from typing import Any, Dict, List, Optional

from .types import ResponseEnvelope


class DrinfeldError(Exception):
    """Base exception for drinfeld-reciprocity errors."""

    code = "drinfeld_error"

    def __init__(self, message: str = "", details: Optional[Dict[str, Any]] = None) -> None:
        super().__init__(message)
        self.details: Dict[str, Any] = details or {}

    def to_response(self) -> Dict[str, Any]:
        return error_response(self.code, str(self), self.details)


class PrecisionExhausted(DrinfeldError):
    """Raised when a result has no coefficient left below its absolute precision."""

    code = "precision_exhausted"


class DivisionByZeroToPrecision(DrinfeldError):
    """Raised when a divisor is zero to its known precision."""

    code = "division_by_zero"


class NotInvertible(DrinfeldError):
    """Raised when a twisted series fails the precondition of the requested inversion."""

    code = "not_invertible"


class NotPreparable(DrinfeldError):
    """Raised when the reduction of a series vanishes, so it has no Weierstrass form."""

    code = "not_preparable"


class Divergent(DrinfeldError):
    code = "divergent"


class NotEisenstein(DrinfeldError):
    """Raised when a computed minimal polynomial is not Eisenstein."""

    code = "not_eisenstein"


class ConsistencyFailure(DrinfeldError):
    """Raised when a computed quantity contradicts a proven identity."""

    code = "consistency_failure"


class ZeroToPrecision(DrinfeldError):
    code = "zero_to_precision"


class NonIntegralUnitPart(DrinfeldError):
    code = "non_integral_unit_part"


class InvalidModule(DrinfeldError):
    """Raised when a field or module description violates a defining condition."""

    code = "invalid_module"


class NotTorsion(DrinfeldError):
    code = "not_torsion"


class AmbiguousDigit(DrinfeldError):
    """Raised when a torsion coordinate digit cannot be separated at the working precision."""

    code = "ambiguous_digit"


class NotSolvable(DrinfeldError):
    code = "not_solvable"


class ValuationTooSmall(DrinfeldError):
    """Raised when an argument is below the valuation needed by the pairing formula."""

    code = "valuation_too_small"


class ThresholdNotMet(DrinfeldError):
    code = "threshold_not_met"


class SingularSystem(DrinfeldError):
    """Raised when a linear system over the valuation ring has no unique solution."""

    code = "singular_system"


class SchemaError(DrinfeldError):
    """Raised when a configuration file is malformed; carries every violation found."""

    code = "schema_error"

    def __init__(self, violations: List[str]) -> None:
        super().__init__("; ".join(violations), {"violations": list(violations)})
        self.violations = list(violations)


class UnknownSuite(DrinfeldError):
    code = "unknown_suite"


def error_response(code: str, message: str, details: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    return ResponseEnvelope(
        ok=False, error={"code": code, "message": message, "details": details or {}}
    ).to_dict()
