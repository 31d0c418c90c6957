"""MATLAB-container scene -> HSIC cube + HSIL label grid.

The binary layouts match the engine's loader byte for byte (all integers
little-endian, floats IEEE-754 32-bit little-endian):

* cube:   ``HSIC``, version byte 1, uint32 m n l, then m*n*l floats in
  band-sequential order (band, then row, then column);
* labels: ``HSIL``, version byte 1, uint32 m n c, then m*n uint16
  row-major, 0 = unlabeled.

Cube values are cast to float32; label values are remapped to 1..C when the
source uses non-contiguous ids (Salinas-A ships 1, 10..14) and the mapping
is echoed in the summary.
"""

import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.io

from .descriptors import DATASETS, DatasetDescriptor


class ConversionError(Exception):
    code = "conversion"


@dataclass
class ConversionSummary:
    dataset: str
    m: int
    n: int
    l: int
    c: int
    class_counts: list
    label_mapping: dict = field(default_factory=dict)  # source id -> 1..C

    def lines(self):
        out = [
            f"dataset={self.dataset}",
            f"m={self.m} n={self.n} l={self.l} c={self.c}",
        ]
        if self.label_mapping and any(k != v for k, v in self.label_mapping.items()):
            pairs = ", ".join(f"{k}->{v}" for k, v in sorted(self.label_mapping.items()))
            out.append(f"label_mapping: {pairs}")
        out.append("class_counts: " + ", ".join(
            f"{k + 1}:{n}" for k, n in enumerate(self.class_counts)))
        return out


def _load_var(path, key):
    try:
        container = scipy.io.loadmat(path)
    except (OSError, ValueError, NotImplementedError) as e:
        raise ConversionError(f"{path}: not a readable MATLAB container: {e}") from e
    if key not in container:
        available = [k for k in container if not k.startswith("__")]
        raise ConversionError(
            f"{path}: variable {key!r} not found; container holds {available}"
        )
    arr = np.asarray(container[key])
    if not np.issubdtype(arr.dtype, np.number):
        raise ConversionError(f"{path}: variable {key!r} is not numeric ({arr.dtype})")
    return arr


def _match_descriptor(cube_path, dataset=None) -> DatasetDescriptor:
    if dataset is not None:
        if dataset not in DATASETS:
            raise ConversionError(
                f"unknown dataset {dataset!r}; supported: {sorted(DATASETS)}"
            )
        return DATASETS[dataset]
    try:
        container = scipy.io.loadmat(cube_path)
    except (OSError, ValueError, NotImplementedError) as e:
        raise ConversionError(f"{cube_path}: not a readable MATLAB container: {e}") from e
    for desc in DATASETS.values():
        if desc.cube_key in container:
            return desc
    raw_keys = {d.cube_key.replace("_corrected", ""): d for d in DATASETS.values()}
    for key, desc in raw_keys.items():
        if key in container:
            raise ConversionError(
                f"{cube_path}: found raw variable {key!r}; use the corrected "
                f"distribution ({desc.cube_key!r}): {desc.water_note}"
            )
    available = [k for k in container if not k.startswith("__")]
    raise ConversionError(
        f"{cube_path}: no known scene variable; container holds {available}; "
        f"pass --dataset to name one of {sorted(DATASETS)}"
    )


def _check_dims(desc: DatasetDescriptor, cube: np.ndarray):
    if cube.ndim != 3:
        raise ConversionError(f"cube must be rows x cols x bands, got shape {cube.shape}")
    m, n, l = cube.shape
    if l in desc.raw_band_counts:
        raise ConversionError(
            f"{desc.name}: {l} bands looks like the raw distribution; "
            f"use the corrected file ({desc.water_note})"
        )
    if desc.spatial is not None and (m, n) != desc.spatial:
        raise ConversionError(
            f"{desc.name}: spatial dims {m}x{n} do not match expected "
            f"{desc.spatial[0]}x{desc.spatial[1]}"
        )
    if desc.bands is not None and l != desc.bands:
        raise ConversionError(
            f"{desc.name}: {l} bands, expected {desc.bands} ({desc.water_note})"
        )
    return m, n, l


def write_cube(path, band_seq: np.ndarray):
    """Write a [l, m, n] float32 array in the HSIC layout."""
    l, m, n = band_seq.shape
    header = b"HSIC" + bytes([1]) + struct.pack("<III", m, n, l)
    Path(path).write_bytes(header + np.ascontiguousarray(band_seq, dtype="<f4").tobytes())


def write_labels(path, labels: np.ndarray, c: int):
    """Write an [m, n] label grid in the HSIL layout."""
    m, n = labels.shape
    header = b"HSIL" + bytes([1]) + struct.pack("<III", m, n, c)
    Path(path).write_bytes(header + np.ascontiguousarray(labels, dtype="<u2").tobytes())


def convert(in_cube, in_gt, out_cube, out_labels, dataset=None) -> ConversionSummary:
    """Convert one scene; returns a summary with dims, classes and counts."""
    desc = _match_descriptor(in_cube, dataset)
    cube = _load_var(in_cube, desc.cube_key)
    m, n, l = _check_dims(desc, cube)

    gt = np.asarray(_load_var(in_gt, desc.gt_key))
    gt = np.squeeze(gt)
    if gt.shape != (m, n):
        raise ConversionError(
            f"{desc.name}: ground truth {gt.shape} does not match cube {m}x{n}"
        )
    if np.any(gt < 0) or not np.all(gt == gt.astype(np.int64)):
        raise ConversionError(f"{desc.name}: ground truth must hold nonnegative integers")
    gt = gt.astype(np.int64)

    source_ids = sorted(int(v) for v in np.unique(gt) if v != 0)
    if not source_ids:
        raise ConversionError(f"{desc.name}: ground truth has no labeled pixels")
    mapping = {src: k + 1 for k, src in enumerate(source_ids)}
    labels = np.zeros_like(gt)
    for src, dst in mapping.items():
        labels[gt == src] = dst
    c = len(source_ids)

    band_seq = np.ascontiguousarray(cube.transpose(2, 0, 1)).astype(np.float32)
    if not np.isfinite(band_seq).all():
        raise ConversionError(f"{desc.name}: cube contains non-finite values")

    write_cube(out_cube, band_seq)
    write_labels(out_labels, labels, c)
    counts = [int((labels == k).sum()) for k in range(1, c + 1)]
    return ConversionSummary(
        dataset=desc.name, m=m, n=n, l=l, c=c,
        class_counts=counts, label_mapping=mapping,
    )
