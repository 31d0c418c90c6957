"""Benchmark-scene converter: MATLAB containers -> HSIC/HSIL binary files."""

from .convert import ConversionError, ConversionSummary, convert
from .descriptors import DATASETS, DatasetDescriptor

__version__ = "0.1.0"

__all__ = [
    "ConversionError",
    "ConversionSummary",
    "convert",
    "DATASETS",
    "DatasetDescriptor",
    "__version__",
]
