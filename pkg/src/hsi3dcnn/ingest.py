"""Hyperspectral cube / label-grid binary IO and stratified splitting.

File formats (all integers little-endian):

* Cube ``.hsic``: magic ``HSIC``, 1-byte version (=1), uint32 m, n, l, then
  m*n*l IEEE-754 float32 values in band-sequential order (band-major, then
  row, then column) -- i.e. a row-major array of shape [l, m, n].
* Labels ``.hsil``: magic ``HSIL``, 1-byte version (=1), uint32 m, n, c,
  then m*n uint16 labels row-major; 0 means unlabeled, classes are 1..c.

Splits are stratified per class with round-half-up counts and a seeded
permutation from :mod:`hsi3dcnn.rng`, so the same seed reproduces the same
split on any platform.
"""

import math
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError, FormatError, ShapeError, SplitError
from .rng import STREAM_SPLIT, Stream, derive

_CUBE_MAGIC = b"HSIC"
_LABEL_MAGIC = b"HSIL"
_VERSION = 1


@dataclass
class HSICube:
    """An m x n scene with l spectral bands, stored band-sequential [l, m, n]."""

    m: int
    n: int
    l: int
    reflectance: np.ndarray

    def __post_init__(self):
        if self.m < 1 or self.n < 1 or self.l < 1:
            raise ShapeError(f"cube dims must be >= 1, got ({self.m}, {self.n}, {self.l})")
        if self.reflectance.shape != (self.l, self.m, self.n):
            raise ShapeError(
                f"reflectance shape {self.reflectance.shape} != ({self.l}, {self.m}, {self.n})"
            )
        if not np.isfinite(self.reflectance).all():
            raise ShapeError("cube contains non-finite values")


@dataclass
class GroundTruth:
    """Per-pixel class ids on the cube's spatial grid; 0 = unlabeled."""

    m: int
    n: int
    c: int
    labels: np.ndarray

    def __post_init__(self):
        if self.labels.shape != (self.m, self.n):
            raise ShapeError(f"label grid {self.labels.shape} != ({self.m}, {self.n})")
        bad = self.labels[(self.labels < 0) | (self.labels > self.c)]
        if bad.size:
            raise ShapeError(f"label {int(bad[0])} outside 0..{self.c}")

    def labeled_coords(self) -> np.ndarray:
        """(row, col) pairs of all labeled pixels, row-major order."""
        rows, cols = np.nonzero(self.labels)
        return np.stack([rows, cols], axis=1).astype(np.int32)

    def class_counts(self) -> np.ndarray:
        """Number of labeled pixels per class 1..c."""
        return np.bincount(self.labels.ravel(), minlength=self.c + 1)[1:]


@dataclass
class SplitIndices:
    """Disjoint (row, col) coordinate arrays covering all labeled pixels."""

    train: np.ndarray
    val: np.ndarray
    test: np.ndarray


def _parse_header(data: bytes, magic: bytes, path) -> tuple:
    if len(data) < 4 or data[:4] != magic:
        raise FormatError(f"{path}: bad magic {data[:4]!r}, expected {magic!r}", offset=0)
    if len(data) < 5:
        raise FormatError(f"{path}: truncated before version byte", offset=4)
    if data[4] != _VERSION:
        raise FormatError(f"{path}: unsupported version {data[4]}", offset=4)
    if len(data) < 17:
        raise FormatError(f"{path}: truncated header", offset=len(data))
    return struct.unpack_from("<III", data, 5)


def save_cube(cube: HSICube, path) -> None:
    """Write a cube in the HSIC format (values cast to float32)."""
    payload = np.ascontiguousarray(cube.reflectance, dtype="<f4").tobytes()
    header = _CUBE_MAGIC + bytes([_VERSION]) + struct.pack("<III", cube.m, cube.n, cube.l)
    Path(path).write_bytes(header + payload)


def load_cube(path) -> HSICube:
    """Read an HSIC cube; format problems raise FormatError with a byte offset."""
    data = Path(path).read_bytes()
    m, n, l = _parse_header(data, _CUBE_MAGIC, path)
    if min(m, n, l) < 1:
        raise FormatError(f"{path}: invalid dims ({m}, {n}, {l})", offset=5)
    expected = 17 + 4 * m * n * l
    if len(data) < expected:
        raise FormatError(f"{path}: truncated payload, need {expected} bytes", offset=len(data))
    if len(data) > expected:
        raise FormatError(f"{path}: {len(data) - expected} trailing bytes", offset=expected)
    flat = np.frombuffer(data, dtype="<f4", count=m * n * l, offset=17)
    bad = np.nonzero(~np.isfinite(flat))[0]
    if bad.size:
        raise FormatError(f"{path}: non-finite value", offset=17 + 4 * int(bad[0]))
    cube = flat.astype(np.float32).reshape(l, m, n)
    return HSICube(m=m, n=n, l=l, reflectance=cube)


def save_labels(gt: GroundTruth, path) -> None:
    """Write a label grid in the HSIL format (uint16 labels)."""
    if gt.c > 0xFFFF:
        raise FormatError(f"{gt.c} classes exceed uint16 label range")
    payload = np.ascontiguousarray(gt.labels, dtype="<u2").tobytes()
    header = _LABEL_MAGIC + bytes([_VERSION]) + struct.pack("<III", gt.m, gt.n, gt.c)
    Path(path).write_bytes(header + payload)


def load_labels(path) -> GroundTruth:
    """Read an HSIL label grid; labels above the declared class count fail."""
    data = Path(path).read_bytes()
    m, n, c = _parse_header(data, _LABEL_MAGIC, path)
    if min(m, n) < 1:
        raise FormatError(f"{path}: invalid dims ({m}, {n})", offset=5)
    expected = 17 + 2 * m * n
    if len(data) < expected:
        raise FormatError(f"{path}: truncated payload, need {expected} bytes", offset=len(data))
    if len(data) > expected:
        raise FormatError(f"{path}: {len(data) - expected} trailing bytes", offset=expected)
    flat = np.frombuffer(data, dtype="<u2", count=m * n, offset=17)
    bad = np.nonzero(flat > c)[0]
    if bad.size:
        raise FormatError(
            f"{path}: label {int(flat[bad[0]])} exceeds declared class count {c}",
            offset=17 + 2 * int(bad[0]),
        )
    labels = flat.astype(np.int32).reshape(m, n)
    return GroundTruth(m=m, n=n, c=c, labels=labels)


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def stratified_split(gt: GroundTruth, train_frac: float, val_frac: float, seed: int) -> SplitIndices:
    """Per-class split of labeled pixels into train/val/test.

    Class k with n_k pixels contributes round-half-up(train_frac*n_k) train
    and round-half-up(val_frac*n_k) val pixels; the remainder goes to test.
    Pixel order within a class is a seeded permutation of its row-major
    coordinate list (stream id = (STREAM_SPLIT, k)), so equal seeds give
    identical splits and different seeds reshuffle without changing counts.
    """
    if train_frac < 0 or val_frac < 0 or train_frac + val_frac >= 1.0:
        raise ConfigError(
            f"fractions must satisfy train, val >= 0 and train+val < 1, "
            f"got {train_frac}/{val_frac}"
        )
    train, val, test = [], [], []
    for k in range(1, gt.c + 1):
        rows, cols = np.nonzero(gt.labels == k)
        n_k = rows.size
        if n_k == 0:
            raise SplitError(f"class {k} has no labeled pixels")
        coords = np.stack([rows, cols], axis=1).astype(np.int32)
        t = _round_half_up(train_frac * n_k)
        v = _round_half_up(val_frac * n_k)
        perm = Stream(derive(seed, STREAM_SPLIT, k)).permutation(n_k)
        coords = coords[perm]
        train.append(coords[:t])
        val.append(coords[t : t + v])
        test.append(coords[t + v :])

    def _cat(parts):
        return np.concatenate(parts, axis=0) if parts else np.zeros((0, 2), np.int32)

    return SplitIndices(train=_cat(train), val=_cat(val), test=_cat(test))
