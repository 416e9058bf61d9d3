"""Exception types shared across the package.

The CLI maps these onto exit codes: configuration/usage problems exit 1,
file/parse problems exit 2, numerical failures exit 3.
"""


class QTamperError(Exception):
    """Base class for all package errors."""


class ConfigurationError(QTamperError):
    """Invalid parameter or configuration value."""


class CircuitError(QTamperError):
    """Malformed gate or circuit, or a qubit-count mismatch."""


class EncodingError(QTamperError):
    """Feature vector cannot be encoded into the feature map."""


class PreprocessingError(QTamperError):
    """Standardization, downsampling, or PCA precondition violated."""


class ExtractionError(QTamperError):
    """Feature extraction window too short or otherwise unusable."""


class AttackError(QTamperError):
    """Attack preconditions violated (missing class, bad routing, ...)."""


class TrainingError(QTamperError):
    """Model training could not proceed (infeasible or degenerate input)."""


class InferenceError(QTamperError):
    """Model evaluation called with inconsistent inputs."""


class EvaluationError(QTamperError):
    """Experiment protocol precondition violated."""


class OracleError(QTamperError):
    """Test-only oracle called outside its supported range."""


class ParseError(QTamperError):
    """Malformed input file.

    Carries the 1-based line number when one is known.
    """

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
