import math

import numpy as np
import pytest

from ohradar.core import UsageError
from ohradar.simulator import (Clutter, ClutterKind, DatasetFormatError, RadarConfig, SceneSpec,
                               Scenario, Target, label_bins, load_dataset, make_dataset,
                               range_dft, range_profile, range_window, save_dataset,
                               simulate_frame, synth_if_samples)

RADAR = RadarConfig()


def test_table_defaults():
    assert RADAR.bin_width_m == pytest.approx(0.0732421875)
    assert RADAR.d_max_m == pytest.approx(18.75)
    assert RADAR.beat_frequency(5.0) == pytest.approx(1.6666667e6)


def test_radar_validation():
    with pytest.raises(UsageError):
        RadarConfig(n_samples=0)
    with pytest.raises(UsageError):
        RadarConfig(n_samples=1024)  # 1024*160ns exceeds the chirp period


def test_scene_rejects_out_of_range():
    with pytest.raises(UsageError):
        SceneSpec((Target(19.0, 1.0),))
    with pytest.raises(UsageError):
        SceneSpec((Target(5.0, 0.0),))
    with pytest.raises(UsageError):
        SceneSpec((), noise_sigma=-1.0)


def test_zero_scene_is_silent():
    x = synth_if_samples(SceneSpec())
    assert np.all(x == 0)
    assert np.all(range_profile(x, RADAR).magnitudes == 0)


def test_opposite_phases_cancel():
    scene = SceneSpec((Target(5.0, 1.0, 0.0), Target(5.0, 1.0, math.pi)))
    # the carrier phase term is ~1.6e4 rad, so cancellation is exact to a few ulp of that
    assert np.max(np.abs(synth_if_samples(scene))) < 1e-10


def test_five_meter_target_bin():
    prof = range_profile(synth_if_samples(SceneSpec((Target(5.0, 1.0),))), RADAR)
    assert int(np.argmax(prof.magnitudes)) == 68
    assert tuple(label_bins(SceneSpec((Target(5.0, 1.0),)))) == (68,)


def test_beat_frequency_of_samples():
    x = synth_if_samples(SceneSpec((Target(5.0, 1.0),)))
    phase = np.unwrap(np.angle(x))
    f = -np.polyfit(np.arange(RADAR.n_samples) * RADAR.sample_period_s, phase, 1)[0] / (2 * math.pi)
    assert f == pytest.approx(RADAR.beat_frequency(5.0), rel=1e-9)


def test_parseval():
    rng = np.random.default_rng(0)
    x = rng.normal(size=256) + 1j * rng.normal(size=256)
    X = range_dft(x)
    win_energy = np.sum(np.abs(x * range_window(256)) ** 2)
    assert np.sum(np.abs(X) ** 2) / 256 == pytest.approx(win_energy, rel=1e-9)


@pytest.mark.parametrize("d", np.linspace(0.2, 18.6, 41))
def test_peak_location(d):
    scene = SceneSpec((Target(float(d), 1.0, 0.3),))
    peak = int(np.argmax(range_profile(synth_if_samples(scene), RADAR).magnitudes))
    lab = tuple(label_bins(scene))[0]
    assert min(abs(peak - lab), 256 - abs(peak - lab)) <= 1


def test_labels_merge_and_empty():
    assert len(label_bins(SceneSpec())) == 0
    assert len(label_bins(SceneSpec((Target(4.97, 1.0), Target(5.0, 1.0))))) == 1


def test_noise_sigma_is_complex_rms():
    scene = SceneSpec((), noise_sigma=2.0, seed=3)
    x = synth_if_samples(scene)
    assert np.sqrt(np.mean(np.abs(x) ** 2)) == pytest.approx(2.0, rel=0.15)


def test_clutter_models():
    rng = np.random.default_rng(1)
    assert np.all(Clutter().draw(rng, 8) == 0)
    e = Clutter(ClutterKind.EXPONENTIAL, mean=2.0).draw(rng, 100_000)
    assert e.mean() == pytest.approx(2.0, rel=0.02)
    edge = Clutter(ClutterKind.EDGE, step_bin=50_000, low_mean=1.0, high_mean=10.0).draw(rng, 100_000)
    assert edge[:50_000].mean() == pytest.approx(1.0, rel=0.05)
    assert edge[50_000:].mean() == pytest.approx(10.0, rel=0.05)
    w = Clutter(ClutterKind.WEIBULL, scale=3.0, shape=1.5).draw(rng, 100_000)
    assert w.mean() == pytest.approx(3.0 * math.gamma(1 + 1 / 1.5), rel=0.02)


def test_simulate_frame_deterministic():
    scene = SceneSpec((Target(3.0, 0.5),), 1.0, Clutter(ClutterKind.EXPONENTIAL, mean=1.0), 42)
    a, la = simulate_frame(scene)
    b, lb = simulate_frame(scene)
    assert a.magnitudes.tobytes() == b.magnitudes.tobytes() and la == lb


def test_homogeneous_dataset():
    ds = make_dataset("homogeneous_noise", 100, 7)
    assert len(ds) == 100 and all(len(lab) == 0 for _, lab in ds)


def test_dense_label_counts():
    ds = make_dataset(Scenario.DENSE_INDOOR, 100, 7)
    counts = [len(lab) for _, lab in ds]
    assert min(counts) >= 6 and max(counts) <= 14
    for _, lab in ds:
        bins = tuple(lab)
        assert all(b - a >= 2 for a, b in zip(bins, bins[1:]))


def test_walkers_and_edge_scenarios():
    assert all(len(lab) == 2 for _, lab in make_dataset("two_walkers", 20, 1))
    assert all(2 <= len(lab) <= 4 for _, lab in make_dataset("clutter_edge", 20, 1))


def test_dataset_determinism():
    a = make_dataset("dense_indoor", 5, 3)
    b = make_dataset("dense_indoor", 5, 3)
    c = make_dataset("dense_indoor", 5, 4)
    for (pa, la), (pb, lb) in zip(a, b):
        assert pa.magnitudes.tobytes() == pb.magnitudes.tobytes() and la == lb
    assert a.profiles[0][0].magnitudes.tobytes() != c.profiles[0][0].magnitudes.tobytes()


def test_unknown_scenario():
    with pytest.raises(UsageError):
        make_dataset("bogus", 1, 0)
    with pytest.raises(UsageError):
        make_dataset("dense_indoor", 0, 0)


def test_round_trip(tmp_path):
    ds = make_dataset("dense_indoor", 4, 9)
    save_dataset(ds, tmp_path / "d")
    back = load_dataset(tmp_path / "d")
    assert back.scenario_name == ds.scenario_name and back.seed == 9
    for (pa, la), (pb, lb) in zip(ds, back):
        assert pa.magnitudes.tobytes() == pb.magnitudes.tobytes()
        assert tuple(la) == tuple(lb) and pa.bin_width_m == pb.bin_width_m


def test_load_errors(tmp_path):
    with pytest.raises(DatasetFormatError):
        load_dataset(tmp_path / "missing")
    ds = make_dataset("two_walkers", 2, 0)
    save_dataset(ds, tmp_path / "d")
    (tmp_path / "d" / "frames" / "frame_00001.tsv").write_text("frame_id\tbin\tmagnitude\n1\t0\tx\n")
    with pytest.raises(DatasetFormatError):
        load_dataset(tmp_path / "d")
