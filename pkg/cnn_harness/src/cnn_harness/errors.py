class HarnessError(Exception):
    """Base class for harness failures."""


class FormatError(HarnessError):
    """Tensor file is malformed or has an unsupported header."""


class ShapeError(HarnessError):
    """Input tensor shape is incompatible with the model."""


class SplitError(HarnessError):
    """A class is missing from the training split."""
