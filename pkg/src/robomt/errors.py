"""Exception hierarchy shared by all robomt modules."""


class RobomtError(Exception):
    """Base class for every error raised by this package."""


class EmptyInput(RobomtError):
    """Raised when text to tokenize contains no non-whitespace characters."""


class ParseError(RobomtError):
    """A corpus record does not match the expected line format."""

    def __init__(self, message, line_no=None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


class GrammarViolation(RobomtError):
    """A robot-language string does not validate against its task grammar."""


class ConfigError(RobomtError):
    """A grammar or run configuration is malformed."""


class UnknownConcept(RobomtError):
    """A robot command references a concept outside the inventory."""


class NoParse(RobomtError):
    """No realization frame matches the given sentence."""


class BankGap(RobomtError):
    """The paraphrase bank lacks variants for an inventory concept."""


class EmptyCorpus(RobomtError):
    """An operation requiring training data received none."""


class InvalidLambda(RobomtError):
    """Interpolation weights are negative or do not sum to one."""


class DimensionMismatch(RobomtError):
    """Two alignments do not describe the same sentence pair."""


class SpanOutOfBounds(RobomtError):
    """A (b, e) span does not satisfy 1 <= b <= e <= n."""


class FormatError(RobomtError):
    """A model file on disk is malformed."""

    def __init__(self, message, line_no=None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


class NoDerivation(RobomtError):
    """No derivation covers the source sentence under the current policy."""


class OracleLimitExceeded(RobomtError):
    """The sentence is too long for exhaustive enumeration."""


class LengthMismatch(RobomtError):
    """Hypothesis and reference lists differ in length."""


class ReferenceUnparseable(RobomtError):
    """An evaluation reference does not parse under the grammar."""
