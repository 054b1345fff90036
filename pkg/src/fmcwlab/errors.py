"""Exception types raised by the library.

Every error is a subclass of FmcwLabError so callers can catch the whole
family with one clause.  Names describe the violated contract.
"""


class FmcwLabError(Exception):
    """Base class for all library errors."""


class GammaOutOfRange(FmcwLabError):
    """Decorrelation factor outside the supported (0.1, 10] interval."""


class ZeroSlopeDifference(FmcwLabError):
    """Victim and interferer chirp slopes are identical; the post-mix
    interference sweep is degenerate and has no finite duration."""


class InfeasibleGeometry(FmcwLabError):
    """A generated scatterer violates the unambiguous range bound."""


class InvalidProbability(FmcwLabError):
    """Probability argument outside [0, 1]."""


class AliasedTarget(FmcwLabError):
    """Target beat or Doppler frequency falls outside the unambiguous
    sampling interval of the victim frame."""


class DimensionMismatch(FmcwLabError):
    """Frames or matrices that must share a shape do not."""


class SignalTooShort(FmcwLabError):
    """Input shorter than one analysis window."""


class EmptyInput(FmcwLabError):
    """Empty vector where at least one sample is required."""


class InconsistentDimensions(FmcwLabError):
    """Time-frequency matrix shape disagrees with its own config."""


class DegenerateNoiseEstimate(FmcwLabError):
    """Too few non-target bins to estimate a noise floor."""


class EmptyDetectableSet(FmcwLabError):
    """Detection probability is undefined over zero detectable bins."""


class EmptyBinSet(FmcwLabError):
    """Metric requested over an empty bin set."""


class ConfigError(FmcwLabError):
    """Structured configuration file is missing keys or fails validation."""
