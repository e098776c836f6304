import json

import pytest

from ohradar.bench import format_bench, run_bench
from ohradar.cli import main, noise_samples, parse_grid, parse_window
from ohradar.core import UsageError
from ohradar.evaluation import read_roc
from ohradar.simulator import load_dataset, make_dataset


@pytest.fixture(scope="module")
def data(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    assert main(["generate", "--scenario", "dense_indoor", "--frames", "12", "--seed", "7",
                 "--out", str(root / "d")]) == 0
    return root


def test_generate_layout_and_manifest(data):
    d = data / "d"
    assert len(list((d / "frames").glob("frame_*.tsv"))) == 12
    man = json.loads((d / "manifest.json").read_text())
    assert man["command"] == "generate" and man["seed"] == 7
    assert len(man["output_paths"]) == 12 + 2


def test_generate_is_byte_identical(data, tmp_path):
    assert main(["generate", "--scenario", "dense_indoor", "--frames", "12", "--seed", "7",
                 "--out", str(tmp_path / "again")]) == 0
    for f in sorted((data / "d").rglob("*.tsv")) + [data / "d" / "meta.json"]:
        twin = tmp_path / "again" / f.relative_to(data / "d")
        assert f.read_bytes() == twin.read_bytes()


def test_generate_unknown_scenario(tmp_path, capsys):
    assert main(["generate", "--scenario", "bogus", "--out", str(tmp_path / "x")]) == 2
    assert "unknown scenario" in capsys.readouterr().err


def test_roc_rows_and_plot(data):
    out = data / "p.roc"
    assert main(["roc", "--data", str(data / "d"), "--detector", "proposed:D=15",
                 "--window", "20,10", "--grid", "0.5:0.99:50", "--out", str(out), "--plot"]) == 0
    curve = read_roc(out)
    assert len(curve) == 50 and curve.window.n_train == 20
    assert out.with_suffix(".svg").read_text().lstrip().startswith("<?xml")
    assert (data / "p.roc.manifest.json").exists()


def test_roc_and_gain(data, capsys):
    d = str(data / "d")
    assert main(["roc", "--data", d, "--detector", "os:k=0.7", "--grid", "1:1000:30",
                 "--out", str(data / "o.roc")]) == 0
    assert main(["roc", "--data", d, "--detector", "abl-l2", "--grid", "0:1.5:30",
                 "--out", str(data / "l2.roc")]) == 0
    main(["roc", "--data", d, "--detector", "proposed", "--grid", "0:1:30",
          "--out", str(data / "q.roc")])
    capsys.readouterr()
    assert main(["gain", str(data / "q.roc"), str(data / "o.roc"), "--pfa-max", "0.01"]) == 0
    float(capsys.readouterr().out.strip())
    assert main(["gain", str(data / "q.roc"), str(data / "l2.roc")]) == 0


@pytest.mark.parametrize("argv,code", [
    (["roc", "--detector", "os:q=1", "--grid", "1:2:3"], 2),
    (["roc", "--detector", "os", "--grid", "1:2"], 2),
    (["roc", "--detector", "os", "--grid", "0:2:3"], 2),
    (["roc", "--detector", "os", "--grid", "1:2:3", "--window", "20"], 2),
])
def test_roc_usage_errors(data, tmp_path, argv, code, capsys):
    argv = argv[:1] + ["--data", str(data / "d"), "--out", str(tmp_path / "z")] + argv[1:]
    assert main(argv) == code
    err = capsys.readouterr().err
    if "q=1" in " ".join(argv):
        assert "accepted: alpha, k" in err


def test_missing_inputs(tmp_path):
    assert main(["roc", "--data", str(tmp_path / "none"), "--detector", "os", "--grid",
                 "1:2:3", "--out", str(tmp_path / "z")]) == 1
    assert main(["gain", str(tmp_path / "a"), str(tmp_path / "b")]) == 1


def test_gain_pfa_range(data):
    roc = str(data / "p.roc")
    assert main(["gain", roc, roc, "--pfa-max", "0.5"]) == 2
    assert main(["gain", roc, roc, "--pfa-max", "0"]) == 2


def test_detect(data):
    out = data / "det.tsv"
    assert main(["detect", "--data", str(data / "d"), "--detector", "proposed:T2=0.99",
                 "--out", str(out)]) == 0
    rows = out.read_text().splitlines()
    assert rows[0] == "frame_id\tbin\tscore" and len(rows) > 1


def test_fit_excludes_label_neighbourhood(data):
    ds = load_dataset(data / "d")
    x = noise_samples(ds)
    n_near = 0
    for _, lab in ds:
        near = set()
        for b in lab:
            near.update(range(max(b - 5, 0), min(b + 6, 256)))
        n_near += len(near)
    assert x.size == 12 * 256 - n_near


def test_fit_command(data):
    out = data / "fit.json"
    assert main(["fit", "--data", str(data / "d"), "--out", str(out)]) == 0
    res = json.loads(out.read_text())
    assert len(res["fits"]) == 5 and res["fits"][0]["ks"] <= res["fits"][-1]["ks"]
    assert main(["fit", "--data", str(data / "d"), "--family", "cauchy"]) == 2


def test_fit_homogeneous_near_null(tmp_path):
    main(["generate", "--scenario", "homogeneous_noise", "--frames", "40", "--seed", "3",
          "--out", str(tmp_path / "h")])
    out = tmp_path / "f.json"
    assert main(["fit", "--data", str(tmp_path / "h"), "--family", "weibull",
                 "--out", str(out)]) == 0
    # Rayleigh amplitudes are Weibull with shape 2; n = 10240 -> null band ~ 1.63/sqrt(n)
    fit = json.loads(out.read_text())["fits"][0]
    assert fit["params"][0] == pytest.approx(2.0, rel=0.05)
    assert fit["ks"] < 1.63 / (10240 ** 0.5)


def test_bench_command(data, capsys):
    out = data / "bench.tsv"
    assert main(["bench", "--data", str(data / "d"), "--detectors", "proposed;os",
                 "--train-sizes", "16", "--repetitions", "2", "--out", str(out)]) == 0
    rows = out.read_text().splitlines()
    assert len(rows) == 3 and rows[1].startswith("proposed") and rows[1].endswith("\t0.0")


def test_bench_counters_deterministic():
    profs = make_dataset("dense_indoor", 3, 1).profiles
    a = run_bench(profs, ["proposed", "os"], (16,), 1)
    b = run_bench(profs, ["proposed", "os"], (16,), 1)
    assert [(r.comparisons, r.macs, r.sorts) for r in a] == \
           [(r.comparisons, r.macs, r.sorts) for r in b]
    assert "median_us" in format_bench(a)
    with pytest.raises(UsageError):
        run_bench(profs, ["os"], (16,), 0)


def test_parsers():
    assert parse_window("16,8").n_guard == 8
    assert list(parse_grid("0:1:3", False)) == [0.0, 0.5, 1.0]
    assert parse_grid("1:100:3", True)[1] == pytest.approx(10.0)
    with pytest.raises(UsageError):
        parse_grid("a:b:c", False)
