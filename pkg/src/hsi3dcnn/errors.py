"""Exception hierarchy shared by all engine modules.

Every domain error carries a short machine-greppable ``code`` that the CLI
prints as ``error[<code>]: <message>`` before exiting nonzero.
"""


class EngineError(Exception):
    """Base class for all errors raised by this package."""

    code = "engine"


class ShapeError(EngineError):
    """Invalid shape, extent mismatch, or dimension mismatch."""

    code = "invalid-shape"


class BoundsError(ShapeError):
    """Block slice reaches outside the tensor."""

    code = "bounds"


class FormatError(EngineError):
    """Malformed binary file. ``offset`` is the byte position of the problem."""

    code = "format"

    def __init__(self, message, offset=None):
        if offset is not None:
            message = f"{message} (byte offset {offset})"
        super().__init__(message)
        self.offset = offset


class SplitError(EngineError):
    """Train/val/test split cannot be built (e.g. a class has no pixels)."""

    code = "split"


class InsufficientDataError(EngineError):
    """Not enough samples to finalize a statistic."""

    code = "insufficient-data"


class WindowError(EngineError):
    """Patch window is even, non-positive, or larger than the scene."""

    code = "invalid-window"


class ArchitectureError(EngineError):
    """A layer's input extents underflow its kernel; names the layer."""

    code = "architecture"


class StateError(EngineError):
    """Operation called out of order (e.g. backward before forward)."""

    code = "state"


class TrainingError(EngineError):
    """Training cannot start or must abort (empty set, NaN gradients)."""

    code = "training"


class CheckpointError(EngineError):
    """Checkpoint file is corrupt or does not match the architecture."""

    code = "checkpoint"


class MetricsError(EngineError):
    """Confusion-matrix input is empty or inconsistent."""

    code = "metrics"


class ConfigError(EngineError):
    """Invalid run configuration value (rate, fraction, label id, ...)."""

    code = "config"
