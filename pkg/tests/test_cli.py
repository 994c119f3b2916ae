import hashlib
import json
from pathlib import Path

import pytest

from spinbus.cli import main

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def write(tmp_path, obj, name="cfg.json"):
    p = tmp_path / name
    p.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return p


def test_pst_run(tmp_path):
    cfg = write(tmp_path, {"experiment": "pst", "parameters": {"N": 6, "k": 0}})
    out = tmp_path / "run"
    assert main(["pst", "--config", str(cfg), "--output", str(out)]) == 0
    rows = [l.split(",") for l in (out / "fidelity.csv").read_text().splitlines()[1:]]
    t, f = max(((float(a), float(b)) for a, b in rows), key=lambda r: r[1])
    assert abs(f - 1) < 1e-8 and t == pytest.approx(3.14159265359 / 2)
    man = json.loads((out / "manifest.json").read_text())
    assert man["status"] == "ok"
    for name, digest in man["checksums"].items():
        assert hashlib.sha256((out / name).read_bytes()).hexdigest() == digest
    spec = json.loads((out / "spectrum.json").read_text())
    assert spec["spmc_verdict"] == "holds"


def test_timestamped_directory(tmp_path):
    cfg = write(tmp_path, {"experiment": "pst", "parameters": {"N": 4}, "output_dir": str(tmp_path / "runs")})
    assert main(["pst", "--config", str(cfg)]) == 0
    (d,) = (tmp_path / "runs").iterdir()
    assert d.name.startswith("pst_")


def test_malformed_json_leaves_nothing(tmp_path):
    cfg = write(tmp_path, "{not json", "bad.json")
    out = tmp_path / "run"
    assert main(["pst", "--config", str(cfg), "--output", str(out)]) == 2
    assert not out.exists()
    assert sorted(p.name for p in tmp_path.iterdir()) == ["bad.json"]


@pytest.mark.parametrize(
    "cfg",
    [
        {"experiment": "pst", "parameters": {"N": 6}, "extra": 1},
        {"experiment": "pst", "parameters": {"N": 6, "bogus": 2}},
        {"experiment": "pst", "parameters": {"N": 1}},
        {"experiment": "pst", "parameters": {"N": 5, "k": 1}},
        {"experiment": "pst", "parameters": {"N": "6"}},
        {"experiment": "pst", "parameters": {}},
        {"experiment": "nope", "parameters": {}},
        {"experiment": "ladder", "parameters": {"L_values": [4], "connection": "sideways"}},
        {"experiment": "memory", "parameters": {"N": 8, "sigma": -1}},
        {"experiment": "pst", "parameters": {"N": 6}, "seed": 1.5},
    ],
)
def test_validation_errors(tmp_path, cfg):
    out = tmp_path / "run"
    name = cfg["experiment"] if cfg["experiment"] in ("pst", "ladder", "memory") else "pst"
    assert main([name, "--config", str(write(tmp_path, cfg)), "--output", str(out)]) == 2
    assert not out.exists()


def test_mismatched_experiment(tmp_path):
    cfg = write(tmp_path, {"experiment": "pst", "parameters": {"N": 6}})
    assert main(["ladder", "--config", str(cfg), "--output", str(tmp_path / "o")]) == 2


def test_ladder_over_capacity(tmp_path):
    cfg = write(tmp_path, {"experiment": "ladder", "parameters": {"L_values": [30]}})
    out = tmp_path / "run"
    assert main(["ladder", "--config", str(cfg), "--output", str(out)]) == 3
    assert not out.exists()


def test_nonempty_output_refused(tmp_path):
    out = tmp_path / "run"
    out.mkdir()
    (out / "keep.txt").write_text("x")
    cfg = write(tmp_path, {"experiment": "pst", "parameters": {"N": 4}})
    assert main(["pst", "--config", str(cfg), "--output", str(out)]) == 2
    assert (out / "keep.txt").exists()


def test_list(capsys):
    assert main(["list"]) == 0
    text = capsys.readouterr().out
    assert all(f"{n}:" in text for n in ("pst", "wavepacket", "ladder", "memory"))
    assert main(["list", "--json"]) == 0
    schemas = json.loads(capsys.readouterr().out)
    assert sorted(schemas) == ["ladder", "memory", "pst", "wavepacket"]
    assert schemas["pst"]["properties"]["parameters"]["required"] == ["N"]
    assert main(["list", "ladder"]) == 0
    assert main(["list", "bogus"]) == 2


def test_threads_flag(tmp_path):
    cfg = write(tmp_path, {"experiment": "ladder", "parameters": {"L_values": [3, 4, 5]}})
    out = tmp_path / "run"
    assert main(["ladder", "--config", str(cfg), "--output", str(out), "--threads", "1"]) == 0
    head = (out / "scaling.csv").read_text().splitlines()[0]
    assert head == "L,J,J0,gap,jeff_perturbative"
    fit = json.loads((out / "fit.json").read_text())
    assert fit["fit"]["exponent"] < 0


def test_memory_outputs(tmp_path):
    cfg = write(tmp_path, {"experiment": "memory", "parameters": {"N": 10, "J": 0.3, "sigma": 0.5}})
    out = tmp_path / "run"
    assert main(["memory", "--config", str(cfg), "--output", str(out)]) == 0
    assert (out / "modes.csv").read_text().splitlines()[0] == "k,omega_k,re_chi,im_chi,abs_chi"
    storage = json.loads((out / "storage.json").read_text())
    assert storage["storage_map"]["phase_map_residual"] < 1e-10
    assert storage["ring_validation"]["dispersion_error"] < 1e-10


def test_bundled_configs_are_valid():
    from spinbus.experiments import validate_config

    names = sorted(p.stem for p in CONFIGS.glob("*.json"))
    assert names == ["ladder", "memory", "pst", "wavepacket"]
    for p in CONFIGS.glob("*.json"):
        exp, _ = validate_config(json.loads(p.read_text()))
        assert exp.name == p.stem
