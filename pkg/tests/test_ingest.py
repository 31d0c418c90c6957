import struct

import numpy as np
import pytest

from hsi3dcnn import ingest
from hsi3dcnn.errors import ConfigError, FormatError, ShapeError, SplitError


def small_cube():
    data = np.arange(12, dtype=np.float32).reshape(3, 2, 2)
    return ingest.HSICube(m=2, n=2, l=3, reflectance=data)


def small_gt():
    labels = np.array([[0, 1], [2, 2]], dtype=np.int32)
    return ingest.GroundTruth(m=2, n=2, c=2, labels=labels)


# ---------------------------------------------------------------- cube files

def test_cube_header_echo(tmp_path):
    path = tmp_path / "c.hsic"
    ingest.save_cube(small_cube(), path)
    back = ingest.load_cube(path)
    assert (back.m, back.n, back.l) == (2, 2, 3)
    assert back.reflectance.shape == (3, 2, 2)
    np.testing.assert_array_equal(back.reflectance, small_cube().reflectance)


def test_cube_roundtrip_bit_identical(tmp_path):
    p1, p2 = tmp_path / "a.hsic", tmp_path / "b.hsic"
    ingest.save_cube(small_cube(), p1)
    ingest.save_cube(ingest.load_cube(p1), p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_cube_bad_magic(tmp_path):
    path = tmp_path / "bad.hsic"
    ingest.save_cube(small_cube(), path)
    raw = bytearray(path.read_bytes())
    raw[:4] = b"XXXX"
    path.write_bytes(bytes(raw))
    with pytest.raises(FormatError) as exc:
        ingest.load_cube(path)
    assert exc.value.offset == 0


def test_cube_truncated(tmp_path):
    path = tmp_path / "t.hsic"
    ingest.save_cube(small_cube(), path)
    raw = path.read_bytes()
    path.write_bytes(raw[:-5])
    with pytest.raises(FormatError, match="truncated"):
        ingest.load_cube(path)


def test_cube_trailing_bytes(tmp_path):
    path = tmp_path / "t.hsic"
    ingest.save_cube(small_cube(), path)
    path.write_bytes(path.read_bytes() + b"\x00")
    with pytest.raises(FormatError, match="trailing"):
        ingest.load_cube(path)


def test_cube_version_mismatch(tmp_path):
    path = tmp_path / "v.hsic"
    ingest.save_cube(small_cube(), path)
    raw = bytearray(path.read_bytes())
    raw[4] = 9
    path.write_bytes(bytes(raw))
    with pytest.raises(FormatError) as exc:
        ingest.load_cube(path)
    assert exc.value.offset == 4


def test_cube_nonfinite_rejected(tmp_path):
    path = tmp_path / "n.hsic"
    ingest.save_cube(small_cube(), path)
    raw = bytearray(path.read_bytes())
    # corrupt the 3rd float (flat index 2) with a NaN pattern
    raw[17 + 8 : 17 + 12] = struct.pack("<f", float("nan"))
    path.write_bytes(bytes(raw))
    with pytest.raises(FormatError) as exc:
        ingest.load_cube(path)
    assert exc.value.offset == 17 + 8


# --------------------------------------------------------------- label files

def test_labels_roundtrip_and_counts(tmp_path):
    path = tmp_path / "g.hsil"
    ingest.save_labels(small_gt(), path)
    back = ingest.load_labels(path)
    assert (back.m, back.n, back.c) == (2, 2, 2)
    assert back.labeled_coords().shape == (3, 2)
    assert back.class_counts().tolist() == [1, 2]

    p2 = tmp_path / "g2.hsil"
    ingest.save_labels(back, p2)
    assert path.read_bytes() == p2.read_bytes()


def test_labels_out_of_range(tmp_path):
    path = tmp_path / "bad.hsil"
    ingest.save_labels(small_gt(), path)
    raw = bytearray(path.read_bytes())
    struct.pack_into("<H", raw, 17, 5)  # first label := 5 with declared c=2
    path.write_bytes(bytes(raw))
    with pytest.raises(FormatError, match="exceeds"):
        ingest.load_labels(path)


def test_labels_constructor_validates():
    with pytest.raises(ShapeError):
        ingest.GroundTruth(m=2, n=2, c=1, labels=np.array([[0, 2], [0, 0]]))


# -------------------------------------------------------------------- splits

def one_class_gt(n_pixels, cols=10):
    rows = (n_pixels + cols - 1) // cols
    labels = np.zeros((rows, cols), dtype=np.int32)
    flat = labels.ravel()
    flat[:n_pixels] = 1
    return ingest.GroundTruth(m=rows, n=cols, c=1, labels=labels)


def test_split_35_35_30():
    gt = one_class_gt(100)
    s = ingest.stratified_split(gt, 0.35, 0.35, seed=1)
    assert (len(s.train), len(s.val), len(s.test)) == (35, 35, 30)


def test_split_zero_fracs_all_test():
    gt = one_class_gt(17)
    s = ingest.stratified_split(gt, 0.0, 0.0, seed=1)
    assert (len(s.train), len(s.val), len(s.test)) == (0, 0, 17)


def test_split_round_half_up_small_class():
    gt = one_class_gt(10)
    s = ingest.stratified_split(gt, 0.10, 0.0, seed=1)
    assert (len(s.train), len(s.val), len(s.test)) == (1, 0, 9)


def test_split_deterministic_and_seed_sensitive():
    rng = np.random.default_rng(0)
    labels = rng.integers(0, 4, size=(20, 20)).astype(np.int32)
    gt = ingest.GroundTruth(m=20, n=20, c=3, labels=labels)
    a = ingest.stratified_split(gt, 0.3, 0.2, seed=5)
    b = ingest.stratified_split(gt, 0.3, 0.2, seed=5)
    c = ingest.stratified_split(gt, 0.3, 0.2, seed=6)
    for part in ("train", "val", "test"):
        np.testing.assert_array_equal(getattr(a, part), getattr(b, part))
        assert len(getattr(a, part)) == len(getattr(c, part))
    assert not np.array_equal(a.train, c.train)


def test_split_partition_properties():
    rng = np.random.default_rng(2)
    for trial in range(5):
        labels = rng.integers(0, 5, size=(15, 13)).astype(np.int32)
        if (np.bincount(labels.ravel(), minlength=5)[1:] == 0).any():
            continue
        gt = ingest.GroundTruth(m=15, n=13, c=4, labels=labels)
        s = ingest.stratified_split(gt, 0.4, 0.25, seed=trial)
        parts = [set(map(tuple, getattr(s, p).tolist())) for p in ("train", "val", "test")]
        assert not (parts[0] & parts[1]) and not (parts[0] & parts[2]) and not (parts[1] & parts[2])
        union = parts[0] | parts[1] | parts[2]
        labeled = set(map(tuple, gt.labeled_coords().tolist()))
        assert union == labeled
        assert all(gt.labels[r, c] != 0 for r, c in union)


def test_split_per_class_counts():
    rng = np.random.default_rng(9)
    labels = np.zeros((30, 30), dtype=np.int32)
    flat = labels.ravel()
    flat[:200] = 1
    flat[200:250] = 2
    gt = ingest.GroundTruth(m=30, n=30, c=2, labels=labels)
    s = ingest.stratified_split(gt, 0.35, 0.35, seed=3)
    train_classes = gt.labels[s.train[:, 0], s.train[:, 1]]
    assert (train_classes == 1).sum() == 70  # round(0.35*200)
    assert (train_classes == 2).sum() == 18  # round(0.35*50) = 17.5 -> 18


def test_split_empty_class_names_it():
    labels = np.array([[1, 1], [0, 0]], dtype=np.int32)
    gt = ingest.GroundTruth(m=2, n=2, c=2, labels=labels)
    with pytest.raises(SplitError, match="class 2"):
        ingest.stratified_split(gt, 0.3, 0.3, seed=0)


def test_split_invalid_fracs():
    gt = one_class_gt(10)
    with pytest.raises(ConfigError):
        ingest.stratified_split(gt, 0.6, 0.5, seed=0)
    with pytest.raises(ConfigError):
        ingest.stratified_split(gt, -0.1, 0.2, seed=0)
