"""End-to-end CLI tests, driven through main(argv)."""

import json
import math

import pytest

from qsdpi.cli import EXIT_ERROR, EXIT_FALSIFIED, EXIT_OK, figure2_rows, main
from qsdpi.divergences import binary_entropy

LN2 = math.log(2.0)


@pytest.fixture
def dep_file(tmp_path):
    path = tmp_path / "dep.json"
    path.write_text(json.dumps({"kind": "depolarizing", "p": 0.5, "dim": 2}))
    return str(path)


@pytest.fixture
def dep2_file(tmp_path):
    path = tmp_path / "dep2.json"
    path.write_text(json.dumps({"kind": "depolarizing", "p": 0.8, "dim": 2}))
    return str(path)


def _run(capsys, argv):
    code = main(argv)
    return code, capsys.readouterr().out


def test_figure2_rows_values():
    rows = figure2_rows([0.5])
    r = rows[0]
    assert r["lower"] == pytest.approx((LN2 - 0.5 * binary_entropy(0.25)) / LN2,
                                       abs=1e-15)
    assert r["upper_tight"] == pytest.approx(0.5 * (1.0 + 0.25), abs=1e-15)
    assert r["upper_loose"] == pytest.approx(1.5 * 0.5, abs=1e-15)
    assert r["lower_loose"] == pytest.approx(0.5, abs=1e-15)
    # ordering of the band on a fine grid
    for r in figure2_rows([i / 50 for i in range(51)]):
        assert r["lower_loose"] <= r["upper_tight"] + 1e-12
        assert r["lower"] <= r["upper_tight"] + 1e-12
        assert r["upper_tight"] <= r["upper_loose"] + 1e-12


def test_figure2_csv(capsys):
    code, out = _run(capsys, ["figure2", "--p", "0", "0.5", "1",
                              "--format", "csv"])
    assert code == EXIT_OK
    lines = out.strip().splitlines()
    assert lines[0] == "p,lower,upper_tight,upper_loose,lower_loose"
    assert len(lines) == 4
    row = lines[2].split(",")
    assert float(row[0]) == 0.5
    assert float(row[2]) == pytest.approx(0.625, abs=1e-12)


def test_eta_report(capsys, dep_file):
    code, out = _run(capsys, ["eta", "--channel", dep_file, "--restarts", "5"])
    assert code == EXIT_OK
    assert "closed_form = 0.25" in out
    kv = dict(line.split(" = ") for line in out.strip().splitlines()
              if " = " in line)
    assert float(kv["estimate_lower"]) <= 0.25 + 1e-7


def test_report_is_deterministic(capsys, dep_file):
    _, out1 = _run(capsys, ["eta", "--channel", dep_file, "--restarts", "3"])
    _, out2 = _run(capsys, ["eta", "--channel", dep_file, "--restarts", "3"])
    assert out1 == out2


def test_order_degrade_exit_codes(capsys, dep_file, dep2_file):
    # dep(0.5) degrades to dep(0.8): certified, exit 0.
    code, out = _run(capsys, ["order", "degrade", "--channel", dep_file,
                              "--channel2", dep2_file])
    assert code == EXIT_OK
    assert "certified" in out
    # reverse direction cannot be degraded: exit 2
    code, out = _run(capsys, ["order", "degrade", "--channel", dep2_file,
                              "--channel2", dep_file])
    assert code == EXIT_FALSIFIED


def test_order_less_noisy_falsified(capsys, dep_file, dep2_file):
    code, out = _run(capsys, ["order", "less-noisy", "--channel", dep2_file,
                              "--channel2", dep_file, "--trials", "60"])
    assert code == EXIT_FALSIFIED
    assert "falsified" in out
    code, out = _run(capsys, ["order", "less-noisy", "--channel", dep_file,
                              "--channel2", dep2_file, "--trials", "40"])
    assert code == EXIT_OK
    assert "undecided" in out


def test_order_approx_report(capsys, dep_file, dep2_file):
    code, out = _run(capsys, ["order", "approx", "--channel", dep_file,
                              "--channel2", dep2_file])
    assert code == EXIT_OK
    assert "eps_deg" in out and "implication chain" in out


def test_capacity_report(capsys):
    code, out = _run(capsys, ["capacity", "--kind", "deg", "--eps", "0.05"])
    assert code == EXIT_OK
    assert "eps_tilde" in out and "eps_hat" in out


def test_capacity_bits_scaling(capsys, dep_file):
    code, nats = _run(capsys, ["capacity", "--kind", "mc", "--eps", "0.1",
                               "--channel", dep_file, "--restarts", "2"])
    assert code == EXIT_OK
    code, bits = _run(capsys, ["capacity", "--kind", "mc", "--eps", "0.1",
                               "--channel", dep_file, "--restarts", "2",
                               "--bits"])
    assert code == EXIT_OK

    def grab(out, key):
        for line in out.splitlines():
            if line.strip().startswith(key + " = "):
                return float(line.split(" = ")[1])
        raise KeyError(key)

    assert grab(bits, "holevo_chi") == pytest.approx(
        grab(nats, "holevo_chi") / LN2, rel=1e-9)


def test_weyl_gamma0_and_degrade(capsys):
    code, out = _run(capsys, ["weyl", "gamma0", "--n", "2", "--delta", "0.3"])
    assert code == EXIT_OK
    assert "0.954545454545" in out

    code, out = _run(capsys, ["weyl", "degrade-test", "--n", "2",
                              "--delta", "0.3", "--gamma", "0.5"])
    assert code == EXIT_OK
    code, out = _run(capsys, ["weyl", "degrade-test", "--n", "2",
                              "--delta", "0.3", "--gamma", "0.96"])
    assert code == EXIT_FALSIFIED


def test_weyl_ln_mixture_small(capsys):
    code, out = _run(capsys, ["weyl", "ln-mixture", "--n", "2",
                              "--delta", "0.3", "--trials", "100"])
    assert code == EXIT_OK
    assert "undecided" in out


def test_gaussian_eta_and_sweep(capsys):
    code, out = _run(capsys, ["gaussian", "eta", "--family", "additive",
                              "--E", "1", "--E1", "1"])
    assert code == EXIT_OK
    assert "0.584962500721" in out

    code, out = _run(capsys, ["gaussian", "sweep", "--family", "additive",
                              "--E", "1", "--E1", "1", "--delta", "0.2", "0.05",
                              "--format", "csv"])
    assert code == EXIT_OK
    lines = out.strip().splitlines()
    assert lines[0].startswith("delta,")
    assert len(lines) == 3


def test_gaussian_g_check(capsys):
    code, out = _run(capsys, ["gaussian", "g-check", "--family", "additive",
                              "--grid-points", "6"])
    assert code == EXIT_OK
    assert "max_violation" in out


def test_lsi_report(capsys, dep_file):
    code, out = _run(capsys, ["lsi", "--channel", dep_file, "--restarts", "2"])
    assert code == EXIT_OK
    assert "sdpi_constant = 0.25" in out


def test_error_exit_code(capsys, tmp_path):
    assert main(["eta", "--channel", str(tmp_path / "missing.json")]) == \
        EXIT_ERROR
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"kind": "nonsense"}))
    assert main(["eta", "--channel", str(bad)]) == EXIT_ERROR


def test_out_file(tmp_path, capsys, dep_file):
    dest = tmp_path / "report.txt"
    code, _ = _run(capsys, ["eta", "--channel", dep_file, "--restarts", "2",
                            "--out", str(dest)])
    assert code == EXIT_OK
    assert "closed_form = 0.25" in dest.read_text()


def test_kraus_channel_json(tmp_path, capsys):
    from qsdpi.channels import depolarizing

    ch = depolarizing(0.5)
    ops = [[[[float(x.real), float(x.imag)] for x in row] for row in K]
           for K in ch.kraus]
    path = tmp_path / "kraus.json"
    path.write_text(json.dumps({"kind": "kraus", "ops": ops}))
    code, out = _run(capsys, ["eta", "--channel", str(path),
                              "--restarts", "3"])
    assert code == EXIT_OK
    kv = dict(line.split(" = ") for line in out.strip().splitlines()
              if " = " in line)
    assert float(kv["estimate_lower"]) == pytest.approx(0.25, abs=5e-3)
