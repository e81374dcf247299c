import json
import subprocess
import sys

import numpy as np
import pytest

from nfhmimo import formats, varrho
from nfhmimo.cli import main
from nfhmimo.config import load_config

SMALL = """\
tx.n_h = 3
tx.n_v = 3
rx.n_h = 2
rx.n_v = 2
quad_order = 4
"""


def write_cfg(tmp_path, body, name="run.cfg"):
    path = tmp_path / name
    path.write_text(SMALL + body + f"output.dir = {tmp_path / 'out'}\n")
    return path


def run(*args):
    return main([str(a) for a in args])


def test_nmse_sweep_outputs(tmp_path, capsys):
    path = write_cfg(tmp_path, "sweep.axis = spacing\nsweep.values = 0.2, 0.1\n"
                               "sweep.rx_polar_v = 60, 90\n")
    assert run("nmse", "--config", path) == 0
    out = tmp_path / "out"
    rows = formats.read_csv(out / "nmse.csv")
    assert len(rows) == 2 * 2 * 2
    assert [r["model"] for r in rows[:2]] == ["CDCM", "CICM"]
    assert [float(r["rx_polar_v"]) for r in rows[::2]] == [60, 90, 60, 90]
    assert float(rows[0]["sweep_value_si"]) == pytest.approx(0.002)
    assert all(r["error"] == "" and float(r["nmse"]) > 0 for r in rows)
    assert (out / "nmse.png").read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
    meta = json.loads((out / "nmse.meta.json").read_text())
    assert meta["config"]["sweep_values"] == [0.2, 0.1]
    assert meta["config"]["raw"]["quad_order"] == "4"
    assert str(out / "nmse.csv") in capsys.readouterr().out


@pytest.mark.parametrize("command, csv_name, body", [
    ("nmse", "nmse.csv", "sweep.axis = distance\nsweep.values = 1, 2\n"),
    ("eigen", "spectrum.csv", "sweep.axis = spacing\nsweep.values = 0.1, 0.05\n"),
    ("capacity", "capacity.csv", "sweep.axis = snr\nsweep.values = 0, 10, 20\n"),
])
def test_reruns_are_byte_identical(tmp_path, command, csv_name, body):
    path = write_cfg(tmp_path, body + "seed = 42\n")
    assert run(command, "--config", path, "--no-plots") == 0
    first = (tmp_path / "out" / csv_name).read_bytes()
    assert run(command, "--config", path, "--no-plots", "--workers", "3") == 0
    assert (tmp_path / "out" / csv_name).read_bytes() == first


def test_capacity_csv_columns(tmp_path):
    path = write_cfg(tmp_path, "sweep.axis = snr\nsweep.values = 0, 10\n")
    assert run("capacity", "--config", path) == 0
    rows = formats.read_csv(tmp_path / "out" / "capacity.csv")
    assert len(rows) == 2
    for r in rows:
        assert len(r["config_hash"]) == 16
        assert float(r["bound_bits"]) >= float(r["exact_bits"]) > 0
        assert r["wavelength_m"] == "0.01"
    assert rows[0]["config_hash"] != rows[1]["config_hash"]
    assert (tmp_path / "out" / "capacity.png").exists()


def test_eigen_spectrum_rows(tmp_path):
    path = write_cfg(tmp_path, "models = CDCM\n")
    assert run("eigen", "--config", path) == 0
    rows = formats.read_csv(tmp_path / "out" / "spectrum.csv")
    assert len(rows) == 12  # 3M singular values
    assert {r["kind"] for r in rows} == {"singular_values_of_H"}
    vals = [float(r["singular_value"]) for r in rows]
    assert vals == sorted(vals, reverse=True)


def test_dump(tmp_path):
    path = write_cfg(tmp_path, "rx.polar_v = 60\nnoise.variance = 1e-3\nseed = 5\n")
    for model in ("CDCM", "CICM"):
        assert run("dump", "--config", path, "--model", model) == 0
    out = tmp_path / "out"
    cd = formats.read_matrix_csv(out / "channel_CDCM.csv")
    ci = formats.read_matrix_bin(out / "channel_CICM.bin")
    assert formats.read_matrix_bin(out / "channel_CDCM.bin").tobytes() == cd.tobytes()
    cfg = load_config(path)
    dbar = cfg.rx.centers[:, None, :] - cfg.tx.centers[None, :, :]
    rho = varrho(cfg.tx, cfg.rx, dbar, cfg.wave)
    ratio = (cd / ci).reshape(4, 3, 9, 3)
    np.testing.assert_allclose(ratio, np.broadcast_to(rho[:, None, :, None], ratio.shape),
                               rtol=1e-12)

    rows = formats.read_csv(out / "transmission_CDCM.csv")
    j = np.array([formats.parse_complex(r["current"]) for r in rows])
    noise = np.array([formats.parse_complex(r["noise"]) for r in rows if r["noise"]])
    field = np.array([formats.parse_complex(r["field"]) for r in rows if r["field"]])
    np.testing.assert_allclose(field, cd @ j + cfg.rx.element_area * noise, rtol=1e-12)
    meta = json.loads((out / "channel_CDCM.meta.json").read_text())
    assert (meta["rows"], meta["cols"], meta["seed"]) == (12, 27, 5)


def test_dump_same_seed_same_sample(tmp_path):
    path = write_cfg(tmp_path, "noise.variance = 1\n")
    run("dump", "--config", path, "--seed", "9")
    first = (tmp_path / "out" / "transmission_CDCM.csv").read_bytes()
    run("dump", "--config", path, "--seed", "9")
    assert (tmp_path / "out" / "transmission_CDCM.csv").read_bytes() == first
    run("dump", "--config", path, "--seed", "10")
    assert (tmp_path / "out" / "transmission_CDCM.csv").read_bytes() != first


def test_exit_codes(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text("nonsense = 1\n")
    assert run("nmse", "--config", bad) == 1
    good = write_cfg(tmp_path, "")
    assert run("dump", "--config", good, "--model", "nope") == 1
    assert run("nmse", "--config", good, "--quad-order", "1") == 1
    assert run("nmse", "--config", good, "--workers", "0") == 1
    assert run("nmse", "--config", good, "--seed", str(2 ** 64)) == 1
    sweep = write_cfg(tmp_path, "sweep.axis = snr\nsweep.values = 1, 2\n", "sweep.cfg")
    assert run("dump", "--config", sweep) == 2
    no_ref = write_cfg(tmp_path, "models = CDCM\n", "noref.cfg")
    assert run("nmse", "--config", no_ref) == 2
    # co-centred surfaces: the far-field distance is zero and the row records it
    clash = write_cfg(tmp_path, "rx.center = 0, 0, 0\n", "clash.cfg")
    assert run("capacity", "--config", clash, "--no-plots") == 2
    rows = formats.read_csv(tmp_path / "out" / "capacity.csv")
    assert rows[0]["error"].startswith("ValueError")
    assert "row(s) recorded errors" in capsys.readouterr().err


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "nfhmimo", "--help"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0
    for cmd in ("nmse", "eigen", "capacity", "dump"):
        assert cmd in res.stdout
