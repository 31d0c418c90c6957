"""Spectral-spatial 3D CNN engine for hyperspectral image classification.

Pipeline: incremental PCA band reduction -> overlapping 3D patch extraction
-> a fixed four-conv 3D CNN trained with Adam and softmax loss -> confusion
matrix evaluation (OA, AA, kappa, per-class P/R/F1).  Everything is seeded
and reproducible; file formats are small fixed binary layouts.
"""

from . import dimred, ingest, metrics, net, patches, rng, synth, tensor
from .errors import EngineError

__version__ = "0.1.0"

__all__ = [
    "dimred",
    "ingest",
    "metrics",
    "net",
    "patches",
    "rng",
    "synth",
    "tensor",
    "EngineError",
    "__version__",
]
