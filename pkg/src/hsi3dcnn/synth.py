"""Synthetic labeled scenes for desk-scale runs and tests.

Each class gets a fixed random spectral signature; every pixel of the class
emits that signature plus iid Gaussian noise with standard deviation
``noise_frac`` times the signature's norm.  Four classes are laid out as
spatial quadrants, other counts as vertical strips.
"""

import numpy as np

from .ingest import GroundTruth, HSICube
from .rng import STREAM_SYNTH, Stream, derive


def class_layout(m: int, n: int, classes: int) -> np.ndarray:
    """1-based label grid: quadrants for 4 classes, else vertical strips."""
    labels = np.zeros((m, n), dtype=np.int32)
    if classes == 4:
        labels[: m // 2, : n // 2] = 1
        labels[: m // 2, n // 2 :] = 2
        labels[m // 2 :, : n // 2] = 3
        labels[m // 2 :, n // 2 :] = 4
    else:
        edges = np.linspace(0, n, classes + 1).astype(int)
        for k in range(classes):
            labels[:, edges[k] : edges[k + 1]] = k + 1
    return labels


def make_scene(m=40, n=40, l=30, classes=4, noise_frac=0.1, seed=0):
    """Build (HSICube, GroundTruth) with per-class signatures + noise."""
    stream = Stream(derive(seed, STREAM_SYNTH))
    signatures = stream.normal(classes * l).reshape(classes, l)
    labels = class_layout(m, n, classes)
    sigma = noise_frac * np.linalg.norm(signatures, axis=1)  # per class

    spectra = signatures[labels - 1]                          # [m, n, l]
    noise = stream.normal(m * n * l).reshape(m, n, l)
    spectra = spectra + noise * sigma[labels - 1][..., None]

    cube = HSICube(m=m, n=n, l=l,
                   reflectance=np.ascontiguousarray(spectra.transpose(2, 0, 1), dtype=np.float32))
    gt = GroundTruth(m=m, n=n, c=classes, labels=labels)
    return cube, gt
