import itertools

import numpy as np
import pytest

from hsi3dcnn import tensor
from hsi3dcnn.errors import BoundsError, ShapeError


def test_create_fill():
    t = tensor.create([2, 2], 0.0)
    assert t.shape == (2, 2)
    assert np.all(t == 0.0)
    assert tensor.create([3], 1.5).tolist() == [1.5, 1.5, 1.5]


def test_create_degenerate_extent():
    with pytest.raises(ShapeError):
        tensor.create([2, 0], 0.0)
    with pytest.raises(ShapeError):
        tensor.create([-1, 3], 0.0)
    with pytest.raises(ShapeError):
        tensor.create([], 0.0)


def test_create_dtypes():
    assert tensor.create([2], dtype=np.float64).dtype == np.float64
    assert tensor.create([2]).dtype == np.float32
    with pytest.raises(ShapeError):
        tensor.create([2], dtype=np.int32)


def test_reshape_preserves_linear_order():
    t = tensor.as_tensor([[1, 2, 3], [4, 5, 6]])
    flat = tensor.reshape(t, [6])
    assert flat.tolist() == [1, 2, 3, 4, 5, 6]


def test_reshape_flatten_count_layer4_output():
    # the (3, 3, 6, 64) conv output flattens to 3456 features
    t = tensor.create([3, 3, 6, 64], 1.0)
    assert tensor.reshape(t, [3456]).shape == (3456,)


def test_reshape_count_mismatch():
    with pytest.raises(ShapeError):
        tensor.reshape(tensor.create([2, 3]), [4])


def test_reshape_roundtrip_identity():
    rng = np.random.default_rng(11)
    for _ in range(20):
        ndim = rng.integers(1, 5)
        shape = tuple(int(v) for v in rng.integers(1, 5, size=ndim))
        t = tensor.as_tensor(rng.standard_normal(shape))
        back = tensor.reshape(tensor.reshape(t, [t.size]), shape)
        np.testing.assert_array_equal(back, t)


def test_slice_block_hand_example():
    grid = tensor.as_tensor(np.arange(1, 10).reshape(3, 3))
    block = tensor.slice_block(grid, (1, 1), (2, 2))
    assert block.tolist() == [[5, 6], [8, 9]]


def test_slice_block_full_is_identity():
    rng = np.random.default_rng(3)
    t = tensor.as_tensor(rng.standard_normal((3, 4, 2)))
    np.testing.assert_array_equal(tensor.slice_block(t, (0, 0, 0), t.shape), t)


def test_slice_block_out_of_bounds():
    grid = tensor.create([3, 3])
    with pytest.raises(BoundsError):
        tensor.slice_block(grid, (2, 2), (2, 2))
    with pytest.raises(BoundsError):
        tensor.slice_block(grid, (-1, 0), (1, 1))


def test_slice_block_is_a_copy():
    grid = tensor.create([2, 2], 1.0)
    block = tensor.slice_block(grid, (0, 0), (1, 1))
    block[0, 0] = 99.0
    assert grid[0, 0] == 1.0


def test_linear_offset_matches_nested_loop_enumeration():
    # row-major offsets must enumerate 0..size-1 when the last axis runs fastest
    for shape in [(3,), (2, 3), (2, 3, 4), (2, 2, 2, 3)]:
        expected = 0
        for idx in itertools.product(*(range(e) for e in shape)):
            assert tensor.linear_offset(shape, idx) == expected
            expected += 1


def test_strides_last_axis_is_one():
    assert tensor.strides_for((5, 4, 3)) == (12, 3, 1)
    assert tensor.strides_for((7,)) == (1,)


def test_linear_offset_bounds():
    with pytest.raises(BoundsError):
        tensor.linear_offset((2, 2), (2, 0))
    with pytest.raises(ShapeError):
        tensor.linear_offset((2, 2), (0,))
