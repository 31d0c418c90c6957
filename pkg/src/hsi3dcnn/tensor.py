"""Dense n-dimensional arrays with checked shape bookkeeping.

Tensors are plain C-contiguous (row-major, last axis fastest) numpy arrays
in one of two element widths: float32 for the training pipeline, float64 for
gradient-check harnesses.  The helpers here enforce the contracts the rest
of the engine relies on; no broadcasting, views, or autograd.
"""

import numpy as np

from .errors import BoundsError, ShapeError

DTYPES = (np.float32, np.float64)


def _check_dtype(dtype):
    dt = np.dtype(dtype)
    if dt not in (np.dtype(np.float32), np.dtype(np.float64)):
        raise ShapeError(f"unsupported element width {dt}; use float32 or float64")
    return dt


def create(shape, fill: float = 0.0, dtype=np.float32) -> np.ndarray:
    """New row-major tensor of the given shape, every element set to fill."""
    shape = tuple(int(s) for s in shape)
    if len(shape) == 0 or any(s < 1 for s in shape):
        raise ShapeError(f"invalid shape {shape}: every extent must be >= 1")
    return np.full(shape, fill, dtype=_check_dtype(dtype))


def as_tensor(values, dtype=np.float32) -> np.ndarray:
    """Copy arbitrary nested values into a C-contiguous tensor."""
    arr = np.ascontiguousarray(values, dtype=_check_dtype(dtype))
    if arr.ndim == 0:
        arr = arr.reshape(1)
    return arr


def reshape(t: np.ndarray, new_shape) -> np.ndarray:
    """Same elements in the same linear order under a new shape."""
    new_shape = tuple(int(s) for s in new_shape)
    if len(new_shape) == 0 or any(s < 1 for s in new_shape):
        raise ShapeError(f"invalid shape {new_shape}: every extent must be >= 1")
    if int(np.prod(new_shape)) != t.size:
        raise ShapeError(
            f"cannot reshape {t.size} elements into shape {new_shape} "
            f"({int(np.prod(new_shape))} elements)"
        )
    return np.ascontiguousarray(t).reshape(new_shape)


def slice_block(t: np.ndarray, offsets, sizes) -> np.ndarray:
    """Copy of the hyper-rectangular sub-block at offsets with given sizes."""
    offsets = tuple(int(o) for o in offsets)
    sizes = tuple(int(s) for s in sizes)
    if len(offsets) != t.ndim or len(sizes) != t.ndim:
        raise ShapeError(
            f"offsets/sizes rank {len(offsets)}/{len(sizes)} does not match tensor rank {t.ndim}"
        )
    if any(s < 1 for s in sizes):
        raise ShapeError(f"invalid block sizes {sizes}: every extent must be >= 1")
    for axis, (off, size, extent) in enumerate(zip(offsets, sizes, t.shape)):
        if off < 0 or off + size > extent:
            raise BoundsError(
                f"block [{off}:{off + size}] exceeds extent {extent} on axis {axis}"
            )
    index = tuple(slice(o, o + s) for o, s in zip(offsets, sizes))
    return t[index].copy()


def strides_for(shape) -> tuple:
    """Row-major element strides: stride of the last axis is 1."""
    strides = [1] * len(shape)
    for axis in range(len(shape) - 2, -1, -1):
        strides[axis] = strides[axis + 1] * shape[axis + 1]
    return tuple(strides)


def linear_offset(shape, index) -> int:
    """Flat row-major offset of a multi-index: sum of index*stride per axis."""
    if len(index) != len(shape):
        raise ShapeError(f"index rank {len(index)} does not match shape rank {len(shape)}")
    for axis, (i, extent) in enumerate(zip(index, shape)):
        if i < 0 or i >= extent:
            raise BoundsError(f"index {i} out of range [0, {extent}) on axis {axis}")
    return int(sum(i * s for i, s in zip(index, strides_for(shape))))
