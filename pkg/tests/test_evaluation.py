import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ohradar.core import DetectionSet, LabelSet, UsageError, WindowConfig
from ohradar.detectors import DetectorSpec
from ohradar.evaluation import (T2_TOP, MatchCounts, RocCurve, _LabelIndex, aggregate, avg_gain,
                                gain_grid, match_detections, min_pfa_study, pd_at, read_roc,
                                roc_sweep, write_roc)
from ohradar.simulator import dataset_from_arrays, make_dataset


def test_match_examples():
    assert match_detections([10, 50], LabelSet((12, 100))) == MatchCounts(1, 1, 2, 256)
    assert match_detections([3, 40], LabelSet((3, 40))) == MatchCounts(2, 0, 2, 256)
    assert match_detections([11], LabelSet((8, 14))) == MatchCounts(2, 0, 2, 256)
    det = DetectionSet(((11, 1.0),), "x", 0.5)
    assert match_detections(det, [8, 14]).n_detected_labels == 2
    with pytest.raises(UsageError):
        match_detections([1], [1], tol_bins=-1)


@settings(max_examples=300)
@given(st.sets(st.integers(0, 255), max_size=30), st.sets(st.integers(0, 255), max_size=15),
       st.integers(0, 8))
def test_match_brute_force_and_fast_index(det, labels, tol):
    det, labels = sorted(det), sorted(labels)
    nd = sum(any(abs(d - lab) <= tol for d in det) for lab in labels)
    nfa = sum(all(abs(d - lab) > tol for lab in labels) for d in det)
    assert match_detections(det, labels, tol) == MatchCounts(nd, nfa, len(labels), 256)
    mask = np.zeros((1, 256), dtype=bool)
    mask[0, det] = True
    fast_nd, fast_fa = _LabelIndex(LabelSet(tuple(labels)), 256, tol).counts(mask)
    assert (int(fast_nd[0]), int(fast_fa[0])) == (nd, nfa)


def test_aggregate_formulas():
    p_d, _ = aggregate([MatchCounts(2, 0, 4, 256), MatchCounts(3, 0, 3, 256)])
    assert p_d == 0.75
    assert aggregate([MatchCounts(0, 2, 1, 256)])[1] == 2 / 256
    assert aggregate([MatchCounts(1, 0, 1, 256), MatchCounts(0, 0, 1, 256)])[1] == 0.0
    p_d, p_fa = aggregate([MatchCounts(0, 3, 0, 256), MatchCounts(1, 0, 2, 256)])
    assert p_d == 0.5 and p_fa == 3 / 512  # label-free frame skipped for P_D only
    assert math.isnan(aggregate([MatchCounts(0, 0, 0, 256)])[0])
    with pytest.raises(UsageError):
        aggregate([])


@pytest.fixture(scope="module")
def dense():
    return make_dataset("dense_indoor", 15, 21)


def test_roc_sweep_matches_per_frame_aggregate(dense):
    spec = DetectorSpec.parse("os:k=0.7")
    det = spec.build()
    cfg = WindowConfig(20, 10)
    curve = roc_sweep(dense, spec, [2.0, 5.0], cfg)
    for thr, p_fa, p_d in curve.points:
        counts = [match_detections(det.detect(p, cfg, thr), lab) for p, lab in dense]
        assert (p_d, p_fa) == aggregate(counts)


@pytest.mark.parametrize("name,grid", [
    ("proposed", np.linspace(0, 1, 21)), ("ca", np.geomspace(0.5, 100, 15)),
    ("or", np.linspace(0, 10, 11)), ("abl-l2", np.linspace(0, 1.5, 16)),
])
def test_roc_monotone(dense, name, grid):
    curve = roc_sweep(dense, name, grid, WindowConfig())
    assert np.all(np.diff(curve.p_fa) <= 0) and np.all(np.diff(curve.p_d) <= 0)


def test_roc_gram_reversed_threshold(dense):
    curve = roc_sweep(dense, "abl-gram", np.arange(0, 10), WindowConfig())
    assert np.all(np.diff(curve.p_fa) >= 0)


def test_roc_endpoints(dense):
    cfg = WindowConfig()
    top = roc_sweep(dense, "proposed", [0.0, 1.0], cfg).points
    assert top[1][1:] == (0.0, 0.0)
    assert top[0][2] > 0.9
    assert roc_sweep(dense, "os", [1e300], cfg).points[0][1:] == (0.0, 0.0)


def test_pd_at_envelope_and_edges():
    c = RocCurve(((3.0, 0.001, 0.2), (2.0, 0.01, 0.6), (1.5, 0.02, 0.5), (1.0, 0.1, 0.9)), "x")
    np.testing.assert_allclose(pd_at(c, [0.0005, 0.001, 0.0055, 0.015, 0.5]),
                               [0.0, 0.2, 0.4, 0.6, 0.9])
    assert pd_at(RocCurve((), "x"), [0.01])[0] == 0.0


def test_avg_gain_examples():
    grid = gain_grid(0.01)
    assert len(grid) == 20 and grid[0] == pytest.approx(1e-4) and grid[-1] == pytest.approx(0.01)
    ones = RocCurve(((0.0, 0.0, 1.0), (1.0, 1.0, 1.0)), "a")
    half = RocCurve(((0.0, 0.0, 0.5), (1.0, 1.0, 0.5)), "b")
    assert avg_gain(ones, half) == pytest.approx(50.0)
    assert avg_gain(half, half) == 0.0
    with pytest.raises(UsageError):
        avg_gain(ones, half, 0.0)


def test_min_pfa_study(dense):
    out = min_pfa_study(dense, [1, 2, 15], WindowConfig())
    assert tuple(out[0]) == (1, 0.0, 0.0)
    assert out[1].min_reachable_pfa <= out[2].min_reachable_pfa
    with pytest.raises(UsageError):
        min_pfa_study(dense, [0], WindowConfig())
    assert T2_TOP < 1.0 and np.nextafter(T2_TOP, 2.0) == 1.0


def test_label_free_dataset():
    ds = dataset_from_arrays([np.random.default_rng(0).exponential(1.0, 64)], [[]])
    curve = roc_sweep(ds, "ca", [1.0], WindowConfig(8, 2))
    assert math.isnan(curve.points[0][2]) and curve.points[0][1] > 0


def test_roc_file_round_trip(tmp_path, dense):
    curve = roc_sweep(dense, "os:k=0.7", [2.0, 4.0], WindowConfig(16, 8))
    back = read_roc(write_roc(curve, tmp_path / "a.roc"))
    assert back.points == curve.points and back.window == curve.window
    assert back.detector_id == curve.detector_id and back.threshold_name == "alpha"
    (tmp_path / "bad.roc").write_text("# detector: x\n")
    with pytest.raises(ValueError):
        read_roc(tmp_path / "bad.roc")
