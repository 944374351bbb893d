"""Exception hierarchy shared across the toolkit."""


class EegConnError(Exception):
    """Base class for all toolkit errors."""


class FormatError(EegConnError):
    """Malformed or truncated binary/CSV input."""


class LayoutError(EegConnError):
    """Unknown electrode label or inconsistent layout."""


class SpecError(EegConnError):
    """Invalid synthetic-recording specification."""


class EmptySegmentation(EegConnError):
    """Window longer than the recording; no segments produced."""


class SegmentTooShort(EegConnError):
    """Segment shorter than the FIR filter length."""


class PhaseUndefined(EegConnError):
    """Instantaneous phase requested for an all-zero signal."""


class DegenerateSignal(EegConnError):
    """Zero-variance input where a spread is required."""


class PartialFailure(EegConnError):
    """Some electrode pairs failed during matrix assembly.

    ``pairs`` lists the offending (i, k) index pairs.
    """

    def __init__(self, message, pairs):
        super().__init__(message)
        self.pairs = list(pairs)


class DimensionError(EegConnError):
    """Mismatched matrix / permutation dimensions."""


class BandOrderError(EegConnError):
    """Band list does not match the canonical bank order."""


class DegenerateDisparity(EegConnError):
    """All-zero disparity matrix; stress undefined."""


class EmptyIncidence(EegConnError):
    """No sliding window contains any marked cell."""


class NoDiscordance(EegConnError):
    """McNemar test with zero discordant pairs."""


class NoVariation(EegConnError):
    """Wilcoxon test with fewer than 5 nonzero differences."""


class LabelError(EegConnError):
    """Electrode labels in one input do not match another."""


class AlignmentError(EegConnError):
    """Prediction files do not share instance ids in order."""
