import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ohradar.core import (Boundary, LabelSet, RangeProfile, UsageError, Window, WindowConfig,
                          evaluable_cuts, extract_window, normalize_window)


def profile(n=256):
    return RangeProfile(np.arange(n, dtype=float))


class TestRangeProfile:
    def test_rejects_negative_and_nan(self):
        with pytest.raises(UsageError):
            RangeProfile(np.array([1.0, -1.0]))
        with pytest.raises(UsageError):
            RangeProfile(np.array([1.0, np.nan]))
        with pytest.raises(UsageError):
            RangeProfile(np.array([]))

    def test_rejects_bad_bin_width(self):
        with pytest.raises(UsageError):
            RangeProfile(np.ones(4), bin_width_m=0.0)

    def test_magnitudes_read_only_copy(self):
        src = np.ones(4)
        p = RangeProfile(src)
        src[0] = 7.0
        assert p.magnitudes[0] == 1.0
        with pytest.raises(ValueError):
            p.magnitudes[0] = 2.0


def test_labelset_sorted_unique():
    assert tuple(LabelSet((5, 1, 5, 3))) == (1, 3, 5)
    with pytest.raises(UsageError):
        LabelSet((-1,))
    with pytest.raises(UsageError):
        LabelSet((300,)).check(256)


@pytest.mark.parametrize("n_train,n_guard", [(3, 2), (0, 2), (4, 1), (4, -2)])
def test_window_config_rejects(n_train, n_guard):
    with pytest.raises(UsageError):
        WindowConfig(n_train, n_guard)


def test_window_must_fit_profile():
    with pytest.raises(UsageError):
        WindowConfig(20, 10).check(30)


def test_extract_interior_geometry():
    # training cells sit at offsets N_g/2+1 .. N_g/2+N_tc/2 on each side
    win = extract_window(profile(), 128, WindowConfig(20, 10))
    assert win.train_left == tuple(float(b) for b in range(113, 123))
    assert win.train_right == tuple(float(b) for b in range(134, 144))
    assert win.cut == 128.0


def test_extract_skip_at_edge():
    assert extract_window(profile(), 0, WindowConfig(20, 10, Boundary.SKIP)) is None


def test_extract_shrink_one_sided():
    win = extract_window(profile(), 3, WindowConfig(20, 10))
    assert win.train_left == ()
    assert len(win.train_right) == 10


def test_extract_shrink_floor():
    cfg = WindowConfig(20, 10)
    assert len(extract_window(profile(), 255, cfg).train_left) == 10
    # L=14, cut 7: bins 0-1 on the left and 13 on the right survive, 3 < 10
    assert extract_window(RangeProfile(np.ones(14)), 7, cfg) is None


def test_extract_bad_index():
    with pytest.raises(UsageError):
        extract_window(profile(), 256, WindowConfig())


def test_skip_evaluable_range():
    cfg = WindowConfig(20, 10, Boundary.SKIP)
    assert evaluable_cuts(256, cfg) == list(range(15, 256 - 15))


def test_normalize_examples():
    nw = normalize_window(Window(0.8, (0.2, 0.4), (0.8,), 0))
    assert nw.cut_norm == 1.0 and nw.train_norm == (0.25, 0.5, 1.0)
    assert normalize_window(Window(5.0, (5.0,), (5.0,), 0)).train_norm == (1.0, 1.0)
    deg = normalize_window(Window(0.0, (0.0,), (0.0,), 0))
    assert deg.degenerate and deg.cut_norm == 0.0


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(0, 1e6), min_size=3, max_size=40),
       st.sampled_from([2.0, 0.5, 1e3, 1e-3]))
def test_normalize_scale_invariant(vals, c):
    if max(vals) == 0:
        return
    a = normalize_window(Window(vals[0], tuple(vals[1:]), (), 0))
    b = normalize_window(Window(vals[0] * c, tuple(v * c for v in vals[1:]), (), 0))
    assert max((a.cut_norm,) + a.train_norm) == 1.0
    np.testing.assert_allclose(a.train_norm, b.train_norm, rtol=3e-16, atol=0)
    assert a.cut_norm == pytest.approx(b.cut_norm, rel=3e-16, abs=0)


def test_extract_is_pure():
    cfg = WindowConfig(16, 8)
    assert extract_window(profile(), 50, cfg) == extract_window(profile(), 50, cfg)
