"""Overlapping S x S x B patch extraction around labeled center pixels.

Training and evaluation use valid-region patches only (centers at least
(s-1)/2 away from every border), which is where the candidate-count formula
(m-s+1)*(n-s+1) comes from.  Full-scene prediction instead zero-pads the
reduced cube so every pixel becomes a valid center.
"""

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import ShapeError, WindowError
from .ingest import GroundTruth


@dataclass
class PatchSet:
    """Patches [n, s, s, b, 1] with 0-based center labels and coordinates."""

    patches: np.ndarray  # [n_patches, s, s, b, 1]
    labels: np.ndarray   # [n_patches] int, 0-based class ids
    coords: np.ndarray   # [n_patches, 2] (row, col) centers
    s: int
    b: int
    n_skipped: int = 0   # requested centers outside the valid region

    def __len__(self) -> int:
        return self.patches.shape[0]


def _check_window(s: int, m: int = None, n: int = None) -> None:
    if s < 1 or s % 2 == 0:
        raise WindowError(f"window size must be odd and positive, got {s}")
    if m is not None and s > min(m, n):
        raise WindowError(f"window {s} exceeds scene extent {min(m, n)}")


def count_candidates(m: int, n: int, s: int) -> int:
    """Number of fully-interior window positions: (m-s+1)*(n-s+1)."""
    _check_window(s, m, n)
    return (m - s + 1) * (n - s + 1)


def extract_labeled(reduced: np.ndarray, gt: GroundTruth, s: int,
                    coords: np.ndarray) -> PatchSet:
    """Cut one patch around each in-region coordinate, labeled by its center.

    ``reduced`` is a [b, m, n] cube; ``coords`` is a [k, 2] array of (row,
    col) centers, typically one split from stratified_split.  Centers whose
    window would cross the border are skipped and counted in ``n_skipped``.
    Output ordering is row-major by center regardless of input order.
    """
    b, m, n = reduced.shape
    if (gt.m, gt.n) != (m, n):
        raise ShapeError(f"ground truth {gt.m}x{gt.n} does not match cube {m}x{n}")
    _check_window(s, m, n)
    half = (s - 1) // 2

    coords = np.asarray(coords, dtype=np.int64).reshape(-1, 2)
    in_region = (
        (coords[:, 0] >= half) & (coords[:, 0] <= m - 1 - half)
        & (coords[:, 1] >= half) & (coords[:, 1] <= n - 1 - half)
    )
    kept = coords[in_region]
    order = np.lexsort((kept[:, 1], kept[:, 0]))  # row-major center order
    kept = kept[order]

    # windows[r, c] is the s x s x b patch whose top-left corner is (r, c)
    windows = sliding_window_view(reduced, (s, s), axis=(1, 2))  # [b, m-s+1, n-s+1, s, s]
    sel = windows[:, kept[:, 0] - half, kept[:, 1] - half]       # [b, k, s, s]
    patches = np.ascontiguousarray(sel.transpose(1, 2, 3, 0))[..., None]

    labels = gt.labels[kept[:, 0], kept[:, 1]].astype(np.int64)
    if np.any(labels == 0):
        raise ShapeError("unlabeled pixel passed as a patch center")
    return PatchSet(
        patches=patches,
        labels=labels - 1,
        coords=kept.astype(np.int32),
        s=s,
        b=b,
        n_skipped=int(coords.shape[0] - kept.shape[0]),
    )


def pad_for_full_map(reduced: np.ndarray, s: int) -> np.ndarray:
    """Zero-pad the spatial axes by (s-1)/2 so every pixel is a valid center."""
    _check_window(s)
    half = (s - 1) // 2
    return np.pad(reduced, ((0, 0), (half, half), (half, half)))


def iter_full_map_batches(reduced: np.ndarray, s: int, batch: int):
    """Yield (coords, patches) batches covering every pixel of the scene.

    Patches come from the zero-padded cube, in row-major pixel order, shaped
    like PatchSet.patches; used for full-scene class maps.
    """
    b, m, n = reduced.shape
    padded = pad_for_full_map(reduced, s)
    windows = sliding_window_view(padded, (s, s), axis=(1, 2))  # [b, m, n, s, s]
    centers = np.stack(np.meshgrid(np.arange(m), np.arange(n), indexing="ij"), axis=-1)
    centers = centers.reshape(-1, 2)
    for start in range(0, centers.shape[0], batch):
        chunk = centers[start : start + batch]
        sel = windows[:, chunk[:, 0], chunk[:, 1]]
        yield chunk, np.ascontiguousarray(sel.transpose(1, 2, 3, 0))[..., None]
