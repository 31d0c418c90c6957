import numpy as np
import pytest
import scipy.io

from hsi3dcnn import ingest  # the engine's loader verifies format interop
from hsiconvert import ConversionError, convert
from hsiconvert.cli import main as cli_main


def synth_indian_pines(tmp_path, rng):
    """A stand-in with the corrected distribution's exact keys, dims and dtype."""
    cube = rng.integers(900, 9000, size=(145, 145, 200)).astype(np.uint16)
    gt = rng.integers(0, 17, size=(145, 145)).astype(np.uint8)
    gt.flat[:17] = np.arange(17)  # make sure every class id occurs
    cube_p, gt_p = tmp_path / "ip.mat", tmp_path / "ip_gt.mat"
    scipy.io.savemat(cube_p, {"indian_pines_corrected": cube})
    scipy.io.savemat(gt_p, {"indian_pines_gt": gt})
    return cube, gt, cube_p, gt_p


def test_indian_pines_roundtrip_acceptance(tmp_path):
    """[SECONDARY] converted scene loads with the engine; 1000 random
    coordinates match the source under exact 32-bit casting."""
    rng = np.random.default_rng(0)
    cube, gt, cube_p, gt_p = synth_indian_pines(tmp_path, rng)
    out_c, out_l = tmp_path / "ip.hsic", tmp_path / "ip.hsil"

    summary = convert(cube_p, gt_p, out_c, out_l)
    assert (summary.m, summary.n, summary.l, summary.c) == (145, 145, 200, 16)

    loaded = ingest.load_cube(out_c)
    labels = ingest.load_labels(out_l)
    assert (loaded.m, loaded.n, loaded.l) == (145, 145, 200)
    assert labels.c == 16

    rows = rng.integers(0, 145, size=1000)
    cols = rng.integers(0, 145, size=1000)
    bands = rng.integers(0, 200, size=1000)
    got = loaded.reflectance[bands, rows, cols]
    expected = cube[rows, cols, bands].astype(np.float32)  # exact uint16 -> f32
    np.testing.assert_array_equal(got, expected)
    np.testing.assert_array_equal(labels.labels, gt.astype(np.int32))
    print("\nACCEPTANCE converter-roundtrip: PASS (145x145x200, c=16, "
          "1000 coordinates exact)")


def test_float_values_cast_exactly_once(tmp_path):
    rng = np.random.default_rng(1)
    cube = rng.standard_normal((9, 8, 12)).astype(np.float64) * 1e3
    gt = np.ones((9, 8), dtype=np.uint8)
    # pavia descriptor trusts the file header, so any dims work here
    scipy.io.savemat(tmp_path / "p.mat", {"paviaU": cube})
    scipy.io.savemat(tmp_path / "p_gt.mat", {"paviaU_gt": gt})
    convert(tmp_path / "p.mat", tmp_path / "p_gt.mat",
            tmp_path / "p.hsic", tmp_path / "p.hsil")
    loaded = ingest.load_cube(tmp_path / "p.hsic")
    np.testing.assert_array_equal(
        loaded.reflectance, cube.transpose(2, 0, 1).astype(np.float32)
    )


def test_noncontiguous_labels_are_remapped(tmp_path):
    # Salinas-A ships labels {0, 1, 10, 11, 12, 13, 14}
    rng = np.random.default_rng(2)
    cube = rng.integers(0, 5000, size=(83, 86, 204)).astype(np.int16)
    gt = np.zeros((83, 86), dtype=np.uint8)
    ids = [1, 10, 11, 12, 13, 14]
    for i, v in enumerate(ids):
        gt[i * 10 : i * 10 + 10, :] = v
    scipy.io.savemat(tmp_path / "sa.mat", {"salinasA_corrected": cube})
    scipy.io.savemat(tmp_path / "sa_gt.mat", {"salinasA_gt": gt})
    summary = convert(tmp_path / "sa.mat", tmp_path / "sa_gt.mat",
                      tmp_path / "sa.hsic", tmp_path / "sa.hsil")
    assert summary.c == 6
    assert summary.label_mapping == {1: 1, 10: 2, 11: 3, 12: 4, 13: 5, 14: 6}
    labels = ingest.load_labels(tmp_path / "sa.hsil")
    assert labels.c == 6
    assert set(np.unique(labels.labels)) == {0, 1, 2, 3, 4, 5, 6}
    # ordering preserved: source id 10 became class 2
    assert labels.labels[10, 0] == 2


def test_raw_variant_rejected_with_pointer(tmp_path):
    rng = np.random.default_rng(3)
    raw = rng.integers(0, 5000, size=(145, 145, 220)).astype(np.uint16)
    scipy.io.savemat(tmp_path / "raw.mat", {"indian_pines": raw})
    scipy.io.savemat(tmp_path / "gt.mat", {"indian_pines_gt": np.ones((145, 145), np.uint8)})
    with pytest.raises(ConversionError, match="corrected"):
        convert(tmp_path / "raw.mat", tmp_path / "gt.mat",
                tmp_path / "o.hsic", tmp_path / "o.hsil")
    # raw band count under the corrected key is also rejected
    scipy.io.savemat(tmp_path / "raw2.mat", {"indian_pines_corrected": raw[:, :, : 220]})
    with pytest.raises(ConversionError, match="raw"):
        convert(tmp_path / "raw2.mat", tmp_path / "gt.mat",
                tmp_path / "o.hsic", tmp_path / "o.hsil", dataset="indian-pines")


def test_missing_variable_key(tmp_path):
    scipy.io.savemat(tmp_path / "odd.mat", {"something_else": np.zeros((4, 4, 4))})
    scipy.io.savemat(tmp_path / "gt.mat", {"indian_pines_gt": np.ones((4, 4), np.uint8)})
    with pytest.raises(ConversionError, match="no known scene variable"):
        convert(tmp_path / "odd.mat", tmp_path / "gt.mat",
                tmp_path / "o.hsic", tmp_path / "o.hsil")
    with pytest.raises(ConversionError, match="not found"):
        convert(tmp_path / "odd.mat", tmp_path / "gt.mat",
                tmp_path / "o.hsic", tmp_path / "o.hsil", dataset="indian-pines")


def test_dimension_mismatch_vs_descriptor(tmp_path):
    rng = np.random.default_rng(4)
    wrong = rng.integers(0, 100, size=(100, 145, 200)).astype(np.uint16)
    scipy.io.savemat(tmp_path / "w.mat", {"indian_pines_corrected": wrong})
    scipy.io.savemat(tmp_path / "gt.mat", {"indian_pines_gt": np.ones((100, 145), np.uint8)})
    with pytest.raises(ConversionError, match="spatial dims"):
        convert(tmp_path / "w.mat", tmp_path / "gt.mat",
                tmp_path / "o.hsic", tmp_path / "o.hsil")


def test_gt_shape_mismatch(tmp_path):
    rng = np.random.default_rng(5)
    cube = rng.integers(0, 100, size=(145, 145, 200)).astype(np.uint16)
    scipy.io.savemat(tmp_path / "c.mat", {"indian_pines_corrected": cube})
    scipy.io.savemat(tmp_path / "g.mat", {"indian_pines_gt": np.ones((10, 10), np.uint8)})
    with pytest.raises(ConversionError, match="does not match cube"):
        convert(tmp_path / "c.mat", tmp_path / "g.mat",
                tmp_path / "o.hsic", tmp_path / "o.hsil")


def test_cli_end_to_end(tmp_path, capsys):
    rng = np.random.default_rng(6)
    _, _, cube_p, gt_p = synth_indian_pines(tmp_path, rng)
    code = cli_main([str(cube_p), str(gt_p),
                     str(tmp_path / "o.hsic"), str(tmp_path / "o.hsil")])
    assert code == 0
    out = capsys.readouterr().out
    assert "dataset=indian-pines" in out
    assert "m=145 n=145 l=200 c=16" in out
    assert ingest.load_cube(tmp_path / "o.hsic").l == 200


def test_cli_reports_conversion_error(tmp_path, capsys):
    scipy.io.savemat(tmp_path / "odd.mat", {"x": np.zeros((3, 3, 3))})
    code = cli_main([str(tmp_path / "odd.mat"), str(tmp_path / "odd.mat"),
                     str(tmp_path / "o.hsic"), str(tmp_path / "o.hsil")])
    assert code == 1
    assert capsys.readouterr().err.startswith("error[conversion]")
