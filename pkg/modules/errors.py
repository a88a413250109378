"""
Exception hierarchy shared by every module.

Each error carries the process exit code the CLI maps it to:
1 for input/validation problems, 2 for numerical breakdown.
"""

from config import EXIT_BREAKDOWN, EXIT_INPUT_ERROR


class TrigFitError(Exception):
    exit_code = EXIT_INPUT_ERROR


# ==================================================
# VALIDATION
# ==================================================

class ValidationError(TrigFitError):
    exit_code = EXIT_INPUT_ERROR


class NonMonotonePoints(ValidationError):
    pass


class OutOfDomain(ValidationError):
    pass


class NonPositiveWeight(ValidationError):
    pass


class DegenerateSet(ValidationError):
    pass


class DimensionMismatch(ValidationError):
    pass


class DegreeTooLarge(ValidationError):
    pass


class GridTooSmall(ValidationError):
    pass


class ZeroChord(ValidationError):
    pass


class InvalidNoiseLevel(ValidationError):
    pass


class MalformedInput(ValidationError):
    """Unreadable or malformed input file; `line` is 1-based when known."""

    def __init__(self, message: str, path: str = None, line: int = None):
        self.path = path
        self.line = line
        prefix = ""
        if path:
            prefix = f"{path}"
            if line is not None:
                prefix += f":{line}"
            prefix += ": "
        elif line is not None:
            prefix = f"line {line}: "
        super().__init__(prefix + message)


class ZeroData(TrigFitError):
    """All samples are zero, so the relative residual is undefined."""
    exit_code = EXIT_INPUT_ERROR


# ==================================================
# NUMERICAL
# ==================================================

class NumericalError(TrigFitError):
    exit_code = EXIT_BREAKDOWN


class Breakdown(NumericalError):
    """Levinson pivot lost positivity at `level`; `history` holds the levels reached."""

    def __init__(self, level: int, beta: float, alpha: complex, history=None):
        self.level = level
        self.beta = beta
        self.alpha = alpha
        self.history = list(history or [])
        super().__init__(
            f"Levinson recursion broke down at level {level} "
            f"(beta={beta:.3e}, |alpha|={abs(alpha):.15f})"
        )

    def with_history(self, history) -> "Breakdown":
        return Breakdown(self.level, self.beta, self.alpha, history)


class SingularSystem(NumericalError):
    pass


class ZeroPivot(NumericalError):
    pass


class RankDeficient(NumericalError):
    pass
