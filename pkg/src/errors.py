"""
Error types raised across the workbench
"""


class WorkbenchError(Exception):
    """Base class for every error the workbench raises on purpose"""


class DimensionError(WorkbenchError, ValueError):
    """Operand shapes do not conform"""

    def __init__(self, message: str, left_shape=None, right_shape=None):
        if left_shape is not None or right_shape is not None:
            message = f"{message}: {tuple(left_shape or ())} vs {tuple(right_shape or ())}"
        super().__init__(message)
        self.left_shape = left_shape
        self.right_shape = right_shape


class RangeError(WorkbenchError, IndexError):
    """An index lies outside the valid range"""


class EmptyInputError(WorkbenchError, ValueError):
    """A dataset, batch or chain that must be non-empty is empty"""


class ContractViolation(WorkbenchError, ValueError):
    """Input violates a numeric precondition (Hermitian, unitary, normalized)"""


class DegenerateInputError(WorkbenchError, ValueError):
    """Input has no direction (zero vector)"""


class NumericalFailure(WorkbenchError, ArithmeticError):
    """A decomposition did not converge or produced non-finite values"""


class ConfigError(WorkbenchError, ValueError):
    """Experiment configuration could not be parsed or validated"""


class DatasetError(WorkbenchError, ValueError):
    """Dataset file could not be parsed"""

    def __init__(self, message: str, line: int = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
