"""Synthetic FMCW range profiles with ground-truth labels.

One chirp per frame is synthesized: the beat (IF) samples of point
targets plus circular complex Gaussian receiver noise, Hann-windowed and
transformed to a range profile. Distributed clutter is then added to the
magnitudes.

Dataset directory layout (all plain text)::

    meta.json           scenario, seed, radar parameters, bin width, n_bins, n_frames
    frames/frame_NNNNN.tsv
                        tab-separated columns ``frame_id  bin  magnitude``,
                        one row per bin, magnitudes in shortest round-trip repr
    labels.tsv          ``frame_id  bins`` with bins space-separated (may be empty)
"""

from __future__ import annotations

import enum
import json
import math
import os
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.signal import get_window

from .core import LabelSet, RangeProfile, UsageError

C_LIGHT = 3.0e8

FORMAT_VERSION = 1


@dataclass(frozen=True)
class RadarConfig:
    """Chirp and sampling parameters; defaults follow a 77 GHz indoor sensor."""

    n_samples: int = 256
    sample_period_s: float = 160e-9
    n_chirps: int = 128
    chirp_period_s: float = 80e-6
    slope_hz_per_s: float = 50e6 / 1e-6
    carrier_hz: float = 77e9

    def __post_init__(self):
        for name in ("n_samples", "sample_period_s", "n_chirps", "chirp_period_s",
                     "slope_hz_per_s", "carrier_hz"):
            if not getattr(self, name) > 0:
                raise UsageError(f"{name} must be positive")
        if self.n_samples * self.sample_period_s > self.chirp_period_s:
            raise UsageError("sampling window longer than the chirp")

    @property
    def bin_width_m(self) -> float:
        return C_LIGHT / (2.0 * self.slope_hz_per_s * self.n_samples * self.sample_period_s)

    @property
    def d_max_m(self) -> float:
        """Unambiguous range for complex (IQ) sampling."""
        return C_LIGHT / (2.0 * self.slope_hz_per_s * self.sample_period_s)

    def beat_frequency(self, range_m: float) -> float:
        return 2.0 * self.slope_hz_per_s * range_m / C_LIGHT


class ClutterKind(str, enum.Enum):
    NONE = "none"
    EXPONENTIAL = "exponential"
    WEIBULL = "weibull"
    EDGE = "edge"


@dataclass(frozen=True)
class Clutter:
    """Magnitude-domain clutter model.

    EXPONENTIAL uses ``mean``; WEIBULL uses ``scale`` and ``shape``; EDGE
    draws exponential clutter of mean ``low_mean`` below ``step_bin`` and
    ``high_mean`` from it on.
    """

    kind: ClutterKind = ClutterKind.NONE
    mean: float = 0.0
    scale: float = 0.0
    shape: float = 1.0
    step_bin: int = 0
    low_mean: float = 0.0
    high_mean: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", ClutterKind(self.kind))

    def draw(self, rng: np.random.Generator, n_bins: int) -> np.ndarray:
        k = self.kind
        if k is ClutterKind.NONE:
            return np.zeros(n_bins)
        if k is ClutterKind.EXPONENTIAL:
            return rng.exponential(self.mean, n_bins)
        if k is ClutterKind.WEIBULL:
            return self.scale * rng.weibull(self.shape, n_bins)
        means = np.where(np.arange(n_bins) < self.step_bin, self.low_mean, self.high_mean)
        return rng.exponential(1.0, n_bins) * means


@dataclass(frozen=True)
class Target:
    range_m: float
    amplitude: float
    phase_rad: float = 0.0


@dataclass(frozen=True)
class SceneSpec:
    targets: tuple = ()
    noise_sigma: float = 0.0
    clutter: Clutter = field(default_factory=Clutter)
    seed: int = 0
    radar: RadarConfig = field(default_factory=RadarConfig)

    def __post_init__(self):
        targets = tuple(t if isinstance(t, Target) else Target(*t) for t in self.targets)
        for t in targets:
            if not 0 < t.range_m < self.radar.d_max_m:
                raise UsageError(
                    f"target range {t.range_m} m outside (0, {self.radar.d_max_m:.3f}) m"
                )
            if not t.amplitude > 0:
                raise UsageError("target amplitude must be positive")
        if self.noise_sigma < 0:
            raise UsageError("noise_sigma must be >= 0")
        object.__setattr__(self, "targets", targets)


def _streams(seed: int):
    noise_ss, clutter_ss = np.random.SeedSequence(seed).spawn(2)
    return np.random.default_rng(noise_ss), np.random.default_rng(clutter_ss)


def synth_if_samples(scene: SceneSpec, radar: RadarConfig | None = None) -> np.ndarray:
    """Beat-signal samples of one chirp at one antenna.

    ``noise_sigma`` is the RMS magnitude of the complex noise per sample.
    """
    radar = radar or scene.radar
    n = np.arange(radar.n_samples)
    t = n * radar.sample_period_s
    out = np.zeros(radar.n_samples, dtype=np.complex128)
    for tg in scene.targets:
        if tg.range_m >= radar.d_max_m:
            raise UsageError(f"target range {tg.range_m} m beyond {radar.d_max_m:.3f} m")
        td = 2.0 * tg.range_m / C_LIGHT
        const = (-2.0 * math.pi * radar.carrier_hz * td
                 + math.pi * radar.slope_hz_per_s * td * td + tg.phase_rad)
        out += tg.amplitude * np.exp(1j * (-2.0 * math.pi * radar.slope_hz_per_s * td * t + const))
    if scene.noise_sigma > 0:
        rng, _ = _streams(scene.seed)
        w = rng.standard_normal((2, radar.n_samples)) * (scene.noise_sigma / math.sqrt(2.0))
        out += w[0] + 1j * w[1]
    return out


def range_window(n: int) -> np.ndarray:
    return get_window("hann", n)


def range_dft(samples: np.ndarray) -> np.ndarray:
    """Hann-windowed DFT with the positive-exponent kernel.

    The beat tone of a target rotates clockwise, so the positive kernel
    puts a target at ``d`` into bin ``+d / bin_width``.
    """
    x = np.asarray(samples, dtype=np.complex128) * range_window(len(samples))
    return np.fft.ifft(x) * len(x)


def range_profile(samples: np.ndarray, radar: RadarConfig | None = None,
                  frame_id: int = 0) -> RangeProfile:
    radar = radar or RadarConfig(n_samples=len(samples))
    if len(samples) != radar.n_samples:
        raise UsageError(f"expected {radar.n_samples} samples, got {len(samples)}")
    return RangeProfile(np.abs(range_dft(samples)), radar.bin_width_m, frame_id)


def label_bins(scene: SceneSpec, radar: RadarConfig | None = None) -> LabelSet:
    radar = radar or scene.radar
    bw = radar.bin_width_m
    return LabelSet(tuple(int(round(t.range_m / bw)) % radar.n_samples for t in scene.targets))


def simulate_frame(scene: SceneSpec, frame_id: int = 0) -> tuple[RangeProfile, LabelSet]:
    radar = scene.radar
    prof = range_profile(synth_if_samples(scene, radar), radar, frame_id)
    _, clutter_rng = _streams(scene.seed)
    mags = prof.magnitudes + scene.clutter.draw(clutter_rng, radar.n_samples)
    return RangeProfile(mags, radar.bin_width_m, frame_id), label_bins(scene, radar)


class Scenario(str, enum.Enum):
    DENSE_INDOOR = "dense_indoor"
    TWO_WALKERS = "two_walkers"
    HOMOGENEOUS_NOISE = "homogeneous_noise"
    CLUTTER_EDGE = "clutter_edge"

    @classmethod
    def parse(cls, text) -> "Scenario":
        if isinstance(text, cls):
            return text
        key = str(text).strip().lower().replace("-", "_")
        try:
            return cls(key)
        except ValueError:
            names = ", ".join(s.name for s in cls)
            raise UsageError(f"unknown scenario {text!r}; choose from {names}") from None


@dataclass(frozen=True)
class Dataset:
    profiles: tuple
    scenario_name: str
    radar: RadarConfig = field(default_factory=RadarConfig)
    seed: int = 0

    def __post_init__(self):
        profiles = tuple(self.profiles)
        if profiles:
            n = len(profiles[0][0])
            bw = profiles[0][0].bin_width_m
            for prof, labels in profiles:
                if len(prof) != n or prof.bin_width_m != bw:
                    raise UsageError("all profiles of a dataset must share L and bin width")
                labels.check(n)
        object.__setattr__(self, "profiles", profiles)

    def __len__(self) -> int:
        return len(self.profiles)

    def __iter__(self):
        return iter(self.profiles)

    @property
    def n_bins(self) -> int:
        return len(self.profiles[0][0]) if self.profiles else self.radar.n_samples


# Scene generators work in per-bin SNR. With a Hann window a target of IF
# amplitude a peaks at a*L/2 while unit-sigma noise has RMS sqrt(3L/8) per bin.
PEAK_GAIN = 256 / 2
NOISE_RMS_PER_BIN = math.sqrt(3 * 256 / 8)

def _amplitude(snr_db):
    """IF amplitude whose range-profile peak sits ``snr_db`` above the unit-noise RMS."""
    return NOISE_RMS_PER_BIN / PEAK_GAIN * 10.0 ** (np.asarray(snr_db) / 20.0)


def _dense_indoor(rng: np.random.Generator, radar: RadarConfig) -> SceneSpec:
    # Shelf-like clusters spread along an aisle; targets inside a cluster sit
    # 2-6 bins apart. Weakest target 20 dB above the noise RMS, 30 dB span.
    bw, L = radar.bin_width_m, radar.n_samples
    n_targets = int(rng.integers(6, 15))
    n_clusters = max(2, int(np.ceil(n_targets / 3)))
    lo, hi = 6, L - 10
    edges = np.linspace(lo, hi, n_clusters + 1)
    centers = [int(rng.uniform(a, b)) for a, b in zip(edges[:-1], edges[1:])]
    bins: list[int] = []
    for k in range(n_targets):
        c = centers[k % n_clusters]
        for _ in range(100):
            b = c + int(rng.integers(-8, 9))
            if lo <= b < hi and all(abs(b - o) >= 2 for o in bins):
                bins.append(b)
                break
    snr = 20.0 + rng.uniform(0.0, 30.0, len(bins))
    snr[0], snr[-1] = 20.0, 50.0
    targets = tuple(
        Target((b + rng.uniform(-0.3, 0.3)) * bw, float(a), float(rng.uniform(0, 2 * np.pi)))
        for b, a in zip(bins, _amplitude(snr))
    )
    clutter = Clutter(ClutterKind.WEIBULL, scale=0.5 * NOISE_RMS_PER_BIN, shape=1.5)
    return SceneSpec(targets, 1.0, clutter, _seed(rng), radar)


def _two_walkers(rng: np.random.Generator, radar: RadarConfig) -> SceneSpec:
    bw = radar.bin_width_m
    b1 = int(rng.integers(14, 110))
    b2 = b1 + int(rng.integers(6, 60)) * (1 if rng.random() < 0.5 else -1)
    b2 = int(np.clip(b2, 14, 120))
    if abs(b2 - b1) < 6:
        b2 = b1 + 6
    amps = _amplitude(rng.uniform(15.0, 25.0, 2))
    targets = tuple(
        Target((b + rng.uniform(-0.3, 0.3)) * bw, float(a), float(rng.uniform(0, 2 * np.pi)))
        for b, a in zip((b1, b2), amps)
    )
    clutter = Clutter(ClutterKind.EXPONENTIAL, mean=0.3 * NOISE_RMS_PER_BIN)
    return SceneSpec(targets, 1.0, clutter, _seed(rng), radar)


def _homogeneous(rng: np.random.Generator, radar: RadarConfig) -> SceneSpec:
    return SceneSpec((), 1.0, Clutter(), _seed(rng), radar)


def _clutter_edge(rng: np.random.Generator, radar: RadarConfig) -> SceneSpec:
    bw, L = radar.bin_width_m, radar.n_samples
    step = int(rng.integers(L // 4, 3 * L // 4))
    n_targets = int(rng.integers(2, 5))
    bins = rng.choice(np.arange(10, L - 10), n_targets, replace=False)
    amps = _amplitude(rng.uniform(20.0, 35.0, n_targets))
    targets = tuple(
        Target(float(b) * bw, float(a), float(rng.uniform(0, 2 * np.pi)))
        for b, a in zip(bins, amps)
    )
    clutter = Clutter(ClutterKind.EDGE, step_bin=step, low_mean=0.5 * NOISE_RMS_PER_BIN,
                      high_mean=5.0 * NOISE_RMS_PER_BIN)
    return SceneSpec(targets, 1.0, clutter, _seed(rng), radar)


def _seed(rng: np.random.Generator) -> int:
    return int(rng.integers(0, 2**63 - 1))


_GENERATORS = {
    Scenario.DENSE_INDOOR: _dense_indoor,
    Scenario.TWO_WALKERS: _two_walkers,
    Scenario.HOMOGENEOUS_NOISE: _homogeneous,
    Scenario.CLUTTER_EDGE: _clutter_edge,
}


def make_scene(scenario, rng: np.random.Generator, radar: RadarConfig | None = None) -> SceneSpec:
    return _GENERATORS[Scenario.parse(scenario)](rng, radar or RadarConfig())


def frame_rngs(scenario: Scenario, n_frames: int, seed: int):
    """Independent per-frame generators derived from (seed, scenario, frame)."""
    tag = list(Scenario).index(scenario)
    root = np.random.SeedSequence([int(seed), tag])
    return [np.random.default_rng(s) for s in root.spawn(n_frames)]


def make_dataset(scenario, n_frames: int, seed: int,
                 radar: RadarConfig | None = None) -> Dataset:
    scenario = Scenario.parse(scenario)
    if n_frames < 1:
        raise UsageError("n_frames must be >= 1")
    radar = radar or RadarConfig()
    profiles = []
    for i, rng in enumerate(frame_rngs(scenario, n_frames, seed)):
        scene = make_scene(scenario, rng, radar)
        profiles.append(simulate_frame(scene, i))
    return Dataset(tuple(profiles), scenario.name, radar, int(seed))


# -- persistence ---------------------------------------------------------

def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def save_dataset(ds: Dataset, out_dir) -> list[Path]:
    """Write ``ds`` under ``out_dir``; returns the written paths."""
    out = Path(out_dir)
    frames = out / "frames"
    frames.mkdir(parents=True, exist_ok=True)
    written = []
    meta = {
        "format_version": FORMAT_VERSION,
        "scenario": ds.scenario_name,
        "seed": ds.seed,
        "n_frames": len(ds),
        "n_bins": ds.n_bins,
        "bin_width_m": ds.radar.bin_width_m,
        "radar": asdict(ds.radar),
    }
    path = out / "meta.json"
    _atomic_write(path, json.dumps(meta, indent=2, sort_keys=True) + "\n")
    written.append(path)
    label_lines = ["frame_id\tbins"]
    for prof, labels in ds:
        rows = ["frame_id\tbin\tmagnitude"]
        rows += [f"{prof.frame_id}\t{b}\t{float(m)!r}" for b, m in enumerate(prof.magnitudes)]
        path = frames / f"frame_{prof.frame_id:05d}.tsv"
        _atomic_write(path, "\n".join(rows) + "\n")
        written.append(path)
        label_lines.append(f"{prof.frame_id}\t" + " ".join(str(b) for b in labels))
    path = out / "labels.tsv"
    _atomic_write(path, "\n".join(label_lines) + "\n")
    written.append(path)
    return written


class DatasetFormatError(Exception):
    """A dataset directory is missing files or does not parse."""


def load_dataset(in_dir) -> Dataset:
    root = Path(in_dir)
    try:
        meta = json.loads((root / "meta.json").read_text())
        radar = RadarConfig(**meta["radar"])
        labels = {}
        for line in (root / "labels.tsv").read_text().splitlines()[1:]:
            fid, _, bins = line.partition("\t")
            labels[int(fid)] = LabelSet(tuple(int(b) for b in bins.split()))
        profiles = []
        for fid in range(int(meta["n_frames"])):
            rows = (root / "frames" / f"frame_{fid:05d}.tsv").read_text().splitlines()[1:]
            mags = np.empty(len(rows))
            for j, row in enumerate(rows):
                f, b, m = row.split("\t")
                if int(f) != fid or int(b) != j:
                    raise DatasetFormatError(f"frame {fid}: unexpected row {row!r}")
                mags[j] = float(m)
            if mags.size != meta["n_bins"]:
                raise DatasetFormatError(f"frame {fid}: {mags.size} bins, expected {meta['n_bins']}")
            profiles.append((RangeProfile(mags, float(meta["bin_width_m"]), fid),
                             labels.get(fid, LabelSet())))
    except (OSError, KeyError, ValueError, TypeError) as exc:
        raise DatasetFormatError(f"cannot read dataset at {root}: {exc}") from exc
    return Dataset(tuple(profiles), meta["scenario"], radar, int(meta["seed"]))


def dataset_from_arrays(magnitudes: Sequence[np.ndarray], labels: Sequence[Sequence[int]],
                        bin_width_m: float = 1.0, name: str = "custom") -> Dataset:
    profiles = tuple(
        (RangeProfile(m, bin_width_m, i), LabelSet(tuple(lb)))
        for i, (m, lb) in enumerate(zip(magnitudes, labels))
    )
    return Dataset(profiles, name, RadarConfig(n_samples=len(magnitudes[0])))
