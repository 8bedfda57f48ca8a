"""Command-line driver: scenario round-trips, output schema, exit codes."""

import csv
import io
import json
import math
import subprocess
import sys

import pytest

from fluxsink import cli, scenario
from fluxsink.errors import ConfigError


def _write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def _scenario_text(**kw):
    base = dict(
        kind="inverse_square",
        beta=0.3,
        gamma=0.5,
        p=1.0,
        model="kind = sink",
        m_range="auto",
        phi_samples=0,
        fmt="csv",
        path="out",
    )
    base.update(kw)
    pot = [f"kind = {base['kind']}", f"beta = {base['beta']}", f"p = {base['p']}"]
    if base["kind"] == "inverse_square":
        pot.insert(2, f"gamma = {base['gamma']}")
    else:
        pot.insert(2, f"lam = {base['lam']}")
    return (
        "[potential]\n" + "\n".join(pot) + "\n\n"
        "[model]\n" + base["model"] + "\n\n"
        "[modes]\n" + f"m_range = {base['m_range']}\n\n"
        "[angles]\n" + f"phi_samples = {base['phi_samples']}\n\n"
        "[output]\n" + f"format = {base['fmt']}\npath = {base['path']}\n"
    )


def _read_summary_csv(path):
    with open(path, newline="") as fh:
        return dict(csv.reader(fh))


# ---------------------------------------------------------------------
# scenario round-trip
# ---------------------------------------------------------------------


ROUNDTRIP_MODELS = [
    ("inverse_square", "kind = sink"),
    ("inverse_square", "kind = elastic\nl = 0.7\ntheta = 1.2"),
    ("inverse_square", "kind = total_absorption\nn_minus = 1\nn_plus = 2"),
    ("inverse_square", "kind = custom\nratio_0 = 0.01, -0.005\nratio_1 = 0.3, 0.0"),
    ("inverse_quartic", "kind = sink"),
    ("inverse_quartic", "kind = elastic\ntheta = 0.4"),
    ("inverse_quartic", "kind = total_absorption\nm_abs = 2"),
]


@pytest.mark.parametrize("kind,model", ROUNDTRIP_MODELS)
def test_scenario_roundtrip(tmp_path, kind, model):
    text = _scenario_text(kind=kind, lam=1.5, model=model, m_range="-3:4", phi_samples=11)
    first = scenario.load_scenario(_write(tmp_path, "a.ini", text))
    scenario.write_scenario(first, str(tmp_path / "b.ini"))
    second = scenario.load_scenario(str(tmp_path / "b.ini"))
    assert first == second


def test_scenario_parse_diagnostics(tmp_path):
    bad = _scenario_text().replace("beta = 0.3", "beta = nope")
    with pytest.raises(ConfigError, match="beta"):
        scenario.load_scenario(_write(tmp_path, "bad.ini", bad))
    with pytest.raises(ConfigError, match="cannot read"):
        scenario.load_scenario(str(tmp_path / "missing.ini"))
    trunc = _scenario_text().replace("[model]\nkind = sink\n\n", "")
    with pytest.raises(ConfigError, match=r"\[model\]"):
        scenario.load_scenario(_write(tmp_path, "trunc.ini", trunc))


# ---------------------------------------------------------------------
# run: spec'd scenarios
# ---------------------------------------------------------------------


def test_run_sink_scenario(tmp_path):
    cfgp = _write(tmp_path, "s.ini", _scenario_text(path=str(tmp_path / "out")))
    assert cli.main(["run", cfgp]) == 0
    rows = (tmp_path / "out" / "modes.csv").read_text().splitlines()
    assert rows[0] == ",".join(cli.MODE_COLUMNS)
    super_rows = [r for r in rows[1:] if r.split(",")[1] == "Supercritical"]
    assert len(super_rows) == 1 and super_rows[0].startswith("0,")
    total = float(_read_summary_csv(tmp_path / "out" / "summary.csv")["sigma_total_abs"])
    want = 1.0 - math.exp(-2.0 * math.pi * math.sqrt(0.5**2 - 0.3**2))
    assert abs(total - want) <= 1e-12
    assert abs(total - 0.9190) < 5e-5


def test_run_elastic_zero_total(tmp_path):
    text = _scenario_text(model="kind = elastic\nl = 0.4\ntheta = 1.0", path=str(tmp_path / "out"))
    assert cli.main(["run", _write(tmp_path, "e.ini", text)]) == 0
    summary = _read_summary_csv(tmp_path / "out" / "summary.csv")
    assert summary["sigma_total_abs"] == "0"  # exact zero, not rounded


def test_run_pure_ab_total_absorption(tmp_path):
    text = _scenario_text(
        beta=0.25, gamma=0.0, p=2.0,
        model="kind = total_absorption\nn_minus = 0\nn_plus = 1",
        path=str(tmp_path / "out"),
    )
    assert cli.main(["run", _write(tmp_path, "t.ini", text)]) == 0
    summary = _read_summary_csv(tmp_path / "out" / "summary.csv")
    assert summary["sigma_total_abs"] == "1"  # 2/p exactly


GOLDEN_MODES = """\
m,regime,nu_squared,mu,re_s,im_s,abs_s,sigma_abs
-2,Regular,5.0625,2.25,0.70710678118654724,-0.70710678118654779,1,0
-1,Regular,1.5625,1.25,0.70710678118654768,-0.70710678118654735,1,0
0,Subcritical,0.0625,0.25,0,0,0,0.5
1,Subcritical,0.5625,0.75,0,0,0,0.5
2,Regular,3.0625,1.75,0.70710678118654757,0.70710678118654746,1,0
3,Regular,7.5625,2.75,0.70710678118654757,0.70710678118654746,1,0
"""

GOLDEN_SUMMARY = """\
potential,inverse_square
beta,0.25
gamma,0
p,2
mass,0.5
model,"total_absorption(window=[0, 1])"
m_lo,-2
m_hi,3
phi_samples,0
sigma_total_abs,1
"""


def test_golden_files(tmp_path):
    # schema stability gate: byte-for-byte against frozen closed-form output
    text = _scenario_text(
        beta=0.25, gamma=0.0, p=2.0,
        model="kind = total_absorption\nn_minus = 0\nn_plus = 1",
        m_range="-2:3", path=str(tmp_path / "out"),
    )
    assert cli.main(["run", _write(tmp_path, "g.ini", text)]) == 0
    assert (tmp_path / "out" / "modes.csv").read_text() == GOLDEN_MODES
    assert (tmp_path / "out" / "summary.csv").read_text() == GOLDEN_SUMMARY


def test_run_byte_determinism(tmp_path):
    text = _scenario_text(phi_samples=7)
    cfgp = _write(tmp_path, "d.ini", text)
    assert cli.main(["run", cfgp, "--out", str(tmp_path / "o1")]) == 0
    assert cli.main(["run", cfgp, "--out", str(tmp_path / "o2")]) == 0
    for name in ("modes.csv", "summary.csv", "differential.csv"):
        assert (tmp_path / "o1" / name).read_bytes() == (tmp_path / "o2" / name).read_bytes()


def test_json_matches_csv(tmp_path):
    text = _scenario_text(phi_samples=0)
    cfgp = _write(tmp_path, "j.ini", text)
    assert cli.main(["run", cfgp, "--out", str(tmp_path / "oc"), "--format", "csv"]) == 0
    assert cli.main(["run", cfgp, "--out", str(tmp_path / "oj"), "--format", "json"]) == 0
    modes = json.load(open(tmp_path / "oj" / "modes.json"))["modes"]
    csv_rows = (tmp_path / "oc" / "modes.csv").read_text().splitlines()[1:]
    assert [tuple(o) for o in modes] == [cli.MODE_COLUMNS] * len(modes)
    for obj, row in zip(modes, csv_rows):
        cells = row.split(",")
        assert obj["m"] == int(cells[0]) and obj["regime"] == cells[1]
        for key, cell in zip(cli.MODE_COLUMNS[2:], cells[2:]):
            assert obj[key] == float(cell)
    summary = json.load(open(tmp_path / "oj" / "summary.json"))
    assert isinstance(summary["sigma_total_abs"], float)
    assert summary["m_lo"] == -10 and summary["phi_samples"] == 0


def test_differential_matches_closed_ab(tmp_path):
    # gamma = 0 with the default elastic condition is the pure-flux line,
    # so the sampled curve must equal the closed-form magnitude
    beta, p, n = 0.25, 2.0, 9
    text = _scenario_text(
        beta=beta, gamma=0.0, p=p,
        model="kind = elastic",
        phi_samples=n, path=str(tmp_path / "out"),
    )
    assert cli.main(["run", _write(tmp_path, "ab.ini", text)]) == 0
    rows = (tmp_path / "out" / "differential.csv").read_text().splitlines()
    assert rows[0] == "phi,dsigma_dphi"
    assert len(rows) == n + 1
    for row in rows[1:]:
        phi_s, val_s = row.split(",")
        phi, val = float(phi_s), float(val_s)
        want = math.sin(math.pi * beta) ** 2 / (
            2.0 * math.pi * p * math.sin(0.5 * phi) ** 2
        )
        assert abs(val - want) <= 1e-10 * want


def test_quartic_schedule_run_exact(tmp_path):
    # absorbed window only: every row is closed-form, no integration
    text = _scenario_text(
        kind="inverse_quartic", lam=2.0, p=0.5,
        model="kind = total_absorption\nm_abs = 1",
        m_range="-1:1", path=str(tmp_path / "out"),
    )
    assert cli.main(["run", _write(tmp_path, "q.ini", text)]) == 0
    summary = _read_summary_csv(tmp_path / "out" / "summary.csv")
    assert summary["sigma_total_abs"] == "6"  # 3 modes x 1/p, p = 1/2
    rows = (tmp_path / "out" / "modes.csv").read_text().splitlines()[1:]
    assert all(r.split(",")[1] == "Quartic" for r in rows)


def test_quartic_sink_run(tmp_path):
    text = _scenario_text(
        kind="inverse_quartic", lam=1.0, p=1.0,
        model="kind = sink", m_range="0:0", path=str(tmp_path / "out"),
    )
    assert cli.main(["run", _write(tmp_path, "qs.ini", text)]) == 0
    row = (tmp_path / "out" / "modes.csv").read_text().splitlines()[1].split(",")
    assert 0.0 < float(row[7]) < 1.0  # partial capture, p = 1


def test_custom_model_run(tmp_path):
    text = _scenario_text(
        model="kind = custom\nratio_0 = 0.01, 0.0\nratio_1 = 0.3, 0.0",
        m_range="0:1", path=str(tmp_path / "out"),
    )
    assert cli.main(["run", _write(tmp_path, "c.ini", text)]) == 0
    rows = (tmp_path / "out" / "modes.csv").read_text().splitlines()[1:]
    assert len(rows) == 2
    assert all(float(r.split(",")[6]) <= 1.0 + 1e-12 for r in rows)


# ---------------------------------------------------------------------
# exit codes and option precedence
# ---------------------------------------------------------------------


def test_exit_codes(tmp_path, capsys):
    assert cli.main(["run", str(tmp_path / "missing.ini")]) == 1
    assert cli.main(["bogus"]) == 1
    assert cli.main(["--help"]) == 0
    capsys.readouterr()

    # mode on a regime boundary: solver error, surfaced with the mode index
    deg = _scenario_text(beta=0.5, gamma=0.5, path=str(tmp_path / "o"))
    assert cli.main(["run", _write(tmp_path, "deg.ini", deg)]) == 2
    assert "m=0" in capsys.readouterr().err

    # explicit range missing absorbing modes is a config error
    short = _scenario_text(m_range="2:5", path=str(tmp_path / "o"))
    assert cli.main(["run", _write(tmp_path, "short.ini", short)]) == 1
    assert "non-Regular" in capsys.readouterr().err


def test_outdir_precedence(tmp_path, monkeypatch):
    cfgp = _write(tmp_path, "p.ini", _scenario_text(path=str(tmp_path / "from_cfg")))
    monkeypatch.setenv("FLUXSINK_OUTDIR", str(tmp_path / "from_env"))
    assert cli.main(["run", cfgp]) == 0
    assert (tmp_path / "from_env" / "modes.csv").exists()
    assert cli.main(["run", cfgp, "--out", str(tmp_path / "from_flag")]) == 0
    assert (tmp_path / "from_flag" / "modes.csv").exists()
    monkeypatch.delenv("FLUXSINK_OUTDIR")
    assert cli.main(["run", cfgp]) == 0
    assert (tmp_path / "from_cfg" / "modes.csv").exists()


def test_module_entry_point(tmp_path):
    cfgp = _write(tmp_path, "m.ini", _scenario_text(path=str(tmp_path / "out")))
    proc = subprocess.run(
        [sys.executable, "-m", "fluxsink.cli", "run", cfgp],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert "modes.csv" in proc.stdout


# ---------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------


def test_sweep_product_order_and_values(tmp_path):
    text = _scenario_text(
        beta=0.25, gamma=0.0, p=2.0,
        model="kind = total_absorption\nn_minus = 0\nn_plus = 1",
    )
    cfgp = _write(tmp_path, "sw.ini", text)
    args = ["sweep", cfgp, "--vary", "beta=0.1:0.3:0.1", "--vary", "p=1:2:1"]
    assert cli.main(args + ["--out", str(tmp_path / "s1")]) == 0
    lines = (tmp_path / "s1" / "sweep.csv").read_text().splitlines()
    assert lines[0] == "beta,p,sigma_total_abs"
    assert len(lines) == 1 + 3 * 2
    got = [tuple(float(c) for c in ln.split(",")) for ln in lines[1:]]
    # rightmost axis fastest; window total is 2/p independent of beta
    assert [(round(b, 10), pp) for b, pp, _ in got] == [
        (0.1, 1.0), (0.1, 2.0), (0.2, 1.0), (0.2, 2.0), (0.3, 1.0), (0.3, 2.0)
    ]
    for _, pp, total in got:
        assert total == 2.0 / pp

    assert cli.main(args + ["--out", str(tmp_path / "s2")]) == 0
    assert (tmp_path / "s1" / "sweep.csv").read_bytes() == (tmp_path / "s2" / "sweep.csv").read_bytes()


def test_sweep_rejects_bad_axes(tmp_path, capsys):
    cfgp = _write(tmp_path, "sw.ini", _scenario_text())
    assert cli.main(["sweep", cfgp, "--vary", "beta=0:0.5"]) == 1
    assert cli.main(["sweep", cfgp, "--vary", "lam=1:2:1"]) == 1
    assert cli.main(["sweep", cfgp, "--vary", "beta=0:0.5:0.1", "--vary", "beta=0:0.5:0.1"]) == 1
    assert cli.main(["sweep", cfgp]) == 1  # --vary is required
    capsys.readouterr()


# ---------------------------------------------------------------------
# certify
# ---------------------------------------------------------------------


def test_certify_default_passes():
    buf = io.StringIO()
    assert cli.certify(stream=buf) == 0
    out = buf.getvalue()
    assert "[FAIL]" not in out
    assert out.strip().endswith("checks passed")
    assert "wronskian-sweep" in out and "oracle-vs-closed" in out


def test_certify_strict_shrinks_residuals():
    buf = io.StringIO()
    assert cli.certify(strict=True, stream=buf) == 0
    lines = buf.getvalue().splitlines()
    refine = [ln for ln in lines if "oracle-refinement" in ln]
    assert len(refine) == 1 and refine[0].startswith("[PASS]")


def test_certify_fault_injection(monkeypatch):
    monkeypatch.setenv("FLUXSINK_FAULT", "wronskian")
    buf = io.StringIO()
    assert cli.certify(stream=buf) == 3
    wrons = [ln for ln in buf.getvalue().splitlines() if "wronskian-sweep" in ln]
    assert wrons and wrons[0].startswith("[FAIL]")
