import json

import numpy as np
import pytest

from bolax.cli import main


def test_spectrum_command(tmp_path):
    out = tmp_path / "run1"
    rc = main(["spectrum", "--family", "cosine", "--amplitude", "0.2",
               "--modes", "256", "--out", str(out)])
    assert rc == 0
    lines = (out / "spectrum.csv").read_text().strip().split("\n")
    assert lines[0] == "n,lambda,gamma,inner1_re,inner1_im"
    assert len(lines) == 1 + 129          # header plus reliable rows 0..128
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["schema"] == 1
    assert manifest["command"] == "spectrum"
    assert "spectrum.csv" in manifest["outputs"]


def test_spectrum_free_case_on_the_line(tmp_path):
    out = tmp_path / "free"
    assert main(["spectrum", "--family", "zero", "--modes", "64",
                 "--out", str(out)]) == 0
    rows = (out / "spectrum.csv").read_text().strip().split("\n")[1:]
    for row in rows:
        n, lam, gamma = row.split(",")[:3]
        assert float(lam) == pytest.approx(float(n), abs=1e-12)
        assert float(gamma) == pytest.approx(0.0, abs=1e-12)


def test_determinism_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    args = ["spectrum", "--family", "random", "--seed", "7", "--n-max", "12",
            "--modes", "64"]
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b)]) == 0
    assert (a / "spectrum.csv").read_bytes() == (b / "spectrum.csv").read_bytes()


def test_float_roundtrip_17_digits(tmp_path):
    out = tmp_path / "rt"
    assert main(["spectrum", "--family", "cosine", "--amplitude", "0.2",
                 "--modes", "64", "--out", str(out)]) == 0
    from bolax import assemble_lax_matrix, eigendecompose, make_potential
    sd = eigendecompose(assemble_lax_matrix(make_potential("cosine", 16, amplitude=0.2), 64))
    rows = (out / "spectrum.csv").read_text().strip().split("\n")[1:]
    lam_back = np.array([float(r.split(",")[1]) for r in rows])
    assert np.array_equal(lam_back, sd.lambdas[:33])


def test_birkhoff_command(tmp_path):
    out = tmp_path / "bk"
    rc = main(["birkhoff", "--family", "cosine", "--amplitude", "0.2",
               "--modes", "64", "--out", str(out)])
    assert rc == 0
    lines = (out / "birkhoff.csv").read_text().strip().split("\n")
    assert lines[0] == "n,zeta_re,zeta_im,gamma,kappa"
    assert len(lines) == 1 + 33


def test_invert_command_roundtrip(tmp_path):
    bk_dir = tmp_path / "bk"
    assert main(["birkhoff", "--family", "cosine", "--amplitude", "0.1",
                 "--modes", "64", "--out", str(bk_dir)]) == 0
    inv_dir = tmp_path / "inv"
    rc = main(["invert", "--zeta", str(bk_dir / "birkhoff.csv"), "--modes", "64",
               "--n-max", "4", "--out", str(inv_dir)])
    assert rc == 0
    pot = json.loads((inv_dir / "potential.json").read_text())
    assert pot["coeffs"][0][0] == pytest.approx(0.05, abs=1e-6)
    log_lines = (inv_dir / "inverse_log.csv").read_text().strip().split("\n")
    assert log_lines[0] == "iteration,residual,step_norm"


def test_evolve_command(tmp_path):
    out = tmp_path / "ev"
    rc = main(["evolve", "--family", "cosine", "--amplitude", "0.1",
               "--n-max", "8", "--modes", "48", "--method", "birkhoff",
               "--t-end", "0.2", "--samples", "3", "--out", str(out)])
    assert rc == 0
    lines = (out / "trajectory.csv").read_text().strip().split("\n")
    assert lines[0].startswith("t,u1_re,u1_im")
    assert len(lines) == 4


def test_counterexample_command(tmp_path):
    out = tmp_path / "ce"
    rc = main(["counterexample", "--beta", "2", "--q", "0.9,0.99",
               "--out", str(out)])
    assert rc == 0
    lines = (out / "ce_sweep.csv").read_text().strip().split("\n")
    assert lines[0] == "q,eps,mu_q,lambda0_matrix,norm_sqrtlog,xi_window_ratio"
    assert len(lines) == 3
    row1 = [float(v) for v in lines[1].split(",")]
    assert row1[2] == pytest.approx(3.194122611302483, abs=1e-5)
    assert row1[3] == pytest.approx(-3.194122611302483, rel=1e-3)


def test_counterexample_parallel_jobs_preserve_order(tmp_path):
    a, b = tmp_path / "serial", tmp_path / "par"
    assert main(["counterexample", "--beta", "2", "--q", "0.9,0.92",
                 "--out", str(a), "--jobs", "1"]) == 0
    assert main(["counterexample", "--beta", "2", "--q", "0.9,0.92",
                 "--out", str(b), "--jobs", "2"]) == 0
    assert (a / "ce_sweep.csv").read_bytes() == (b / "ce_sweep.csv").read_bytes()


def test_verify_command_exit_codes(capsys):
    rc = main(["verify", "--suite", "hardy", "--modes", "64"])
    captured = capsys.readouterr()
    assert rc == 0
    assert "PASS" in captured.out
    assert "FAIL" not in captured.out


def test_unknown_suite_is_validation_error(capsys):
    assert main(["verify", "--suite", "bogus"]) == 1


def test_unreadable_input_is_validation_error(tmp_path):
    assert main(["spectrum", "--input", str(tmp_path / "missing.json"),
                 "--out", str(tmp_path)]) == 1


def test_numerical_failure_exit_code(tmp_path):
    # amplitude far outside the stable regime blows up the direct integrator
    rc = main(["evolve", "--family", "cosine", "--amplitude", "40",
               "--n-max", "4", "--method", "direct", "--t-end", "5.0",
               "--dt", "0.2", "--grid", "64", "--samples", "3",
               "--out", str(tmp_path / "blow")])
    assert rc == 2


def test_potential_json_input(tmp_path):
    from bolax import make_potential
    from bolax.potentials import potential_to_json
    u = make_potential("cosine", 4, amplitude=0.2)
    pot = tmp_path / "u.json"
    pot.write_text(json.dumps(potential_to_json(u)))
    out = tmp_path / "fromjson"
    assert main(["spectrum", "--input", str(pot), "--modes", "64",
                 "--out", str(out)]) == 0
    ref = tmp_path / "ref"
    assert main(["spectrum", "--family", "cosine", "--amplitude", "0.2",
                 "--n-max", "4", "--modes", "64", "--out", str(ref)]) == 0
    assert (out / "spectrum.csv").read_bytes() == (ref / "spectrum.csv").read_bytes()


def test_birkhoff_refine_flag(tmp_path):
    out = tmp_path / "ref"
    assert main(["birkhoff", "--family", "cosine", "--amplitude", "0.2",
                 "--modes", "48", "--refine", "--out", str(out)]) == 0
    assert (out / "birkhoff.csv").exists()


def test_config_file_with_flag_override(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"schema": 1, "family": "cosine", "amplitude": 0.2,
                               "modes": 32, "out": str(tmp_path / "cfgout")}))
    rc = main(["spectrum", "--config", str(cfg), "--modes", "64"])
    assert rc == 0
    rows = (tmp_path / "cfgout" / "spectrum.csv").read_text().strip().split("\n")
    assert len(rows) == 1 + 33            # flag override wins: M = 64
