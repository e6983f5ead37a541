"""End-to-end command-line checks: artifacts, manifests, exit codes."""

import json

import numpy as np
import pytest

from phasekit import cli, gridfile, states
from phasekit.grid import Grid1D, PhaseFunction2D, SampledFunction1D
from phasekit.symplectic import flow_matrix
from phasekit.weyl import OperatorKernel, Symbol2D
from phasekit.wigner import Theta, Window, windowed_transform

SMALL = ["--n", "64", "--half-width", "8.0"]


def _manifest(path):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def test_flow_identity_matrix(tmp_path, capsys):
    out = str(tmp_path / "flow.csv")
    assert cli.main(["flow", "--theta", "0", "--output", out]) == 0
    rows = [line.split(",") for line in
            open(out, encoding="utf-8").read().strip().splitlines()]
    M = np.array([[float(v) for v in row] for row in rows])
    assert M.shape == (4, 4)
    assert np.array_equal(M, np.eye(4))
    # the identity should print as clean zeros and ones, no -0.0
    assert "-0.0" not in open(out, encoding="utf-8").read()
    man = _manifest(out + ".manifest.json")
    assert man["command"] == "flow"
    assert man["inputs"]["theta"] == 0.0
    assert man["format_version"] == 1
    assert "flow matrix" in capsys.readouterr().out


def test_flow_matrix_csv_round_trips_exactly(tmp_path):
    # float reprs in the CSV restore the closed-form matrix bit for bit
    out = str(tmp_path / "flow.csv")
    assert cli.main(["flow", "--theta", "0.4", "--output", out]) == 0
    rows = [line.split(",") for line in
            open(out, encoding="utf-8").read().strip().splitlines()]
    M = np.array([[float(v) for v in row] for row in rows])
    assert np.array_equal(M, flow_matrix(0.4) + 0.0)


def test_wigner_gaussian_closed_form(tmp_path):
    out = str(tmp_path / "w.bin")
    rc = cli.main(["wigner", "--gaussian", *SMALL,
                   "--output", out, "--payload", "binary"])
    assert rc == 0
    W = gridfile.read(out)
    assert isinstance(W, PhaseFunction2D)
    x = W.grid_x.nodes()[:, None]
    p = W.grid_p.nodes()[None, :]
    exact = np.exp(-(x**2) - p**2) / np.pi
    assert np.max(np.abs(W.values - exact)) < 1e-7


def test_fracwigner_zero_angle_is_tensor_form(tmp_path):
    out = str(tmp_path / "w0.bin")
    rc = cli.main(["fracwigner", "--gaussian", "--theta", "0", *SMALL,
                   "--output", out, "--payload", "binary"])
    assert rc == 0
    W = gridfile.read(out)
    g = states.gaussian(W.grid_x).values[:, None]
    ghat = states.gaussian(W.grid_p).values[None, :]
    exact = g * ghat / np.sqrt(2.0 * np.pi)
    assert np.max(np.abs(W.values - exact)) < 1e-7


def test_propagate_zero_angle_is_identity(tmp_path):
    grid = Grid1D.centered(64, 8.0)
    rng = np.random.default_rng(5)
    F = PhaseFunction2D(grid, grid.dual(),
                        rng.standard_normal((64, 64))
                        + 1j * rng.standard_normal((64, 64)))
    src = str(tmp_path / "in.bin")
    out = str(tmp_path / "out.bin")
    gridfile.write(src, F, "binary")
    rc = cli.main(["propagate", "--input", src, "--theta", "0",
                   "--output", out, "--payload", "binary"])
    assert rc == 0
    assert np.array_equal(gridfile.read(out).values, F.values)


def test_reconstruct_inverts_windowed_transform(tmp_path):
    grid = Grid1D.centered(64, 8.0)
    psi = states.hermite(grid, 1)
    F = windowed_transform(psi, Window(states.gaussian(grid)), Theta.wigner())
    src = str(tmp_path / "lift.bin")
    out = str(tmp_path / "back.bin")
    gridfile.write(src, F, "binary")
    rc = cli.main(["reconstruct", "--input", src,
                   "--output", out, "--payload", "binary"])
    assert rc == 0
    back = gridfile.read(out)
    assert isinstance(back, SampledFunction1D)
    assert np.max(np.abs(back.values - psi.values)) < 1e-6


def test_weyl_symbol_of_rank_one_gaussian(tmp_path):
    # the projector onto the gaussian has the closed-form angle symbol
    # 2 exp(-x^2 - xi^2)
    grid = Grid1D.centered(128, 8.0)
    g = states.gaussian(grid).values
    src = str(tmp_path / "k.bin")
    out = str(tmp_path / "s.bin")
    gridfile.write(src, OperatorKernel(grid, np.outer(g, g.conj())), "binary")
    rc = cli.main(["weyl-symbol", "--kernel", src,
                   "--output", out, "--payload", "binary"])
    assert rc == 0
    sym = gridfile.read(out)
    assert isinstance(sym, Symbol2D)
    x = sym.grid_x.nodes()[:, None]
    xi = sym.grid_xi.nodes()[None, :]
    exact = 2.0 * np.exp(-(x**2) - xi**2)
    assert np.max(np.abs(sym.values - exact)) < 1e-6


def test_star_commutator_at_standard_angle(tmp_path):
    xy = str(tmp_path / "xy.bin")
    yx = str(tmp_path / "yx.bin")
    argv = ["star", *SMALL, "--payload", "binary"]
    assert cli.main([*argv, "--a", "x", "--b", "xi", "--output", xy]) == 0
    assert cli.main([*argv, "--a", "xi", "--b", "x", "--output", yx]) == 0
    a = gridfile.read(xy)
    b = gridfile.read(yx)
    # products of tagged builtins stay tagged through the file round trip
    assert a.poly is not None
    commutator = a.values - b.values
    assert np.max(np.abs(commutator - 1j)) < 1e-12


def test_star_rejects_polynomials_off_angle(tmp_path, capsys):
    rc = cli.main(["star", "--a", "x", "--b", "xi", "--theta", "0.1",
                   *SMALL, "--output", str(tmp_path / "s.bin")])
    assert rc == 2
    assert "polynomial" in capsys.readouterr().err


def test_expect_oscillator_in_hermite_state(tmp_path):
    out = str(tmp_path / "e.json")
    rc = cli.main(["expect", "--op", "oscillator", "--state", "hermite:2",
                   *SMALL, "--output", out])
    assert rc == 0
    record = json.load(open(out, encoding="utf-8"))
    assert record["value"][0] == pytest.approx(2.5, abs=1e-6)
    assert record["value"][1] == pytest.approx(0.0, abs=1e-9)
    assert record["self_adjoint"] is True
    assert record["residual"] < 1e-6
    man = _manifest(out + ".manifest.json")
    assert man["results"]["value"] == record["value"]


def test_bopp_spectrum_artifacts(tmp_path):
    base = str(tmp_path / "spec")
    rc = cli.main(["bopp-spectrum", "--symbol", "oscillator", "--count", "3",
                   "--n", "32", "--half-width", "6.0", "--output", base])
    assert rc == 0
    record = json.load(open(base + ".json", encoding="utf-8"))
    assert record["eigenvalues"] == pytest.approx([0.5, 1.5, 2.5], abs=1e-3)
    assert record["pairing"] == {"0": 0, "1": 1, "2": 2}
    lines = open(base + ".csv", encoding="utf-8").read().strip().splitlines()
    assert lines[0] == "index,eigenvalue,multiplicity,residual,reference,pushforward"
    assert len(lines) == 4
    first = lines[1].split(",")
    assert int(first[0]) == 0
    assert float(first[1]) == pytest.approx(0.5, abs=1e-3)
    man = _manifest(base + ".manifest.json")
    assert man["results"]["eigenvalues"] == record["eigenvalues"]


def test_evolve_artifacts(tmp_path):
    base = str(tmp_path / "ev")
    rc = cli.main(["evolve", "--t", "1.0", "--steps", "4",
                   "--n", "32", "--half-width", "6.0", "--output", base])
    assert rc == 0
    state = gridfile.read(base + "-state.csv")
    phase = gridfile.read(base + "-phase.csv")
    assert isinstance(state, SampledFunction1D)
    assert isinstance(phase, PhaseFunction2D)
    lines = open(base + "-divergence.csv", encoding="utf-8").read().strip().splitlines()
    assert lines[0] == "time,divergence"
    assert len(lines) == 6  # header plus one row per checkpoint
    man = _manifest(base + ".manifest.json")
    assert man["results"]["divergence"] < 1e-4
    assert man["inputs"]["steps"] == 4


def test_verify_suite_passes(tmp_path, capsys):
    man_path = str(tmp_path / "verify.json")
    rc = cli.main(["verify", "--suite", "flow", "--manifest", man_path])
    assert rc == 0
    out = capsys.readouterr().out
    assert "pass  flow-algebra/" in out
    assert "4/4 checks passed (suite flow, seed 0)" in out
    man = _manifest(man_path)
    assert man["passed"] is True
    assert man["inputs"]["criteria"] == ["flow-algebra"]
    for row in man["checks"]:
        assert row["passed"] is True
        assert row["error"] <= row["tolerance"]


def test_verify_tolerance_override_fails_loudly(tmp_path, capsys):
    man_path = str(tmp_path / "verify.json")
    rc = cli.main(["verify", "--suite", "flow", "--manifest", man_path,
                   "--tolerance", "flow-algebra/symplectic-form=1e-30"])
    assert rc == 1
    captured = capsys.readouterr()
    assert "FAIL" in captured.out
    assert "flow-algebra" in captured.err
    man = _manifest(man_path)
    assert man["passed"] is False
    # the override is recorded verbatim
    assert man["inputs"]["tolerance_overrides"]["flow-algebra/symplectic-form"] == 1e-30
    failed = [row for row in man["checks"] if not row["passed"]]
    assert len(failed) == 1
    assert failed[0]["check"] == "symplectic-form"
    assert failed[0]["tolerance"] == 1e-30


def test_verify_unknown_suite(tmp_path, capsys):
    rc = cli.main(["verify", "--suite", "nonsense",
                   "--manifest", str(tmp_path / "m.json")])
    assert rc == 2
    assert "error:" in capsys.readouterr().err


def test_config_merge_and_flag_precedence(tmp_path):
    cfg = tmp_path / "job.json"
    cfg.write_text(json.dumps({
        "command": "fracwigner",
        "grid": {"n": 64, "x_min": -6.0, "dx": 0.1875},
        "theta": 0.1,
        "state": "hermite:1",
    }))
    out = str(tmp_path / "w.bin")
    rc = cli.main(["fracwigner", "--config", str(cfg), "--theta", "0.2",
                   "--output", out, "--payload", "binary"])
    assert rc == 0
    man = _manifest(out + ".manifest.json")
    assert man["inputs"]["theta"] == 0.2  # flag wins over config
    assert man["inputs"]["state"] == "hermite:1"  # config fills the rest
    assert man["inputs"]["grid"] == {"n": 64, "x_min": -6.0, "dx": 0.1875}
    assert gridfile.read(out).grid_x.n == 64


def test_config_command_mismatch(tmp_path, capsys):
    cfg = tmp_path / "job.json"
    cfg.write_text(json.dumps({"command": "wigner"}))
    rc = cli.main(["flow", "--config", str(cfg),
                   "--output", str(tmp_path / "f.csv")])
    assert rc == 2
    assert "declares command" in capsys.readouterr().err


def test_config_must_be_json_object(tmp_path, capsys):
    cfg = tmp_path / "job.json"
    cfg.write_text("[1, 2, 3]")
    rc = cli.main(["flow", "--config", str(cfg),
                   "--output", str(tmp_path / "f.csv")])
    assert rc == 2
    assert "JSON object" in capsys.readouterr().err


def test_config_invalid_json(tmp_path, capsys):
    cfg = tmp_path / "job.json"
    cfg.write_text("{nope")
    rc = cli.main(["flow", "--config", str(cfg),
                   "--output", str(tmp_path / "f.csv")])
    assert rc == 2
    assert "valid JSON" in capsys.readouterr().err


def test_config_file_missing(tmp_path, capsys):
    rc = cli.main(["flow", "--config", str(tmp_path / "absent.json"),
                   "--output", str(tmp_path / "f.csv")])
    assert rc == 2
    assert "not found" in capsys.readouterr().err


def test_config_bad_payload_value(tmp_path, capsys):
    cfg = tmp_path / "job.json"
    cfg.write_text(json.dumps({"payload": "hex"}))
    rc = cli.main(["wigner", "--gaussian", *SMALL, "--config", str(cfg),
                   "--output", str(tmp_path / "w.out")])
    assert rc == 2
    assert "payload" in capsys.readouterr().err


def test_repeat_runs_are_bit_identical(tmp_path):
    outs = []
    for name in ("a.bin", "b.bin"):
        out = tmp_path / name
        rc = cli.main(["wigner", "--gaussian", *SMALL,
                       "--output", str(out), "--payload", "binary",
                       "--manifest", str(out) + ".man"])
        assert rc == 0
        outs.append(out)
    assert outs[0].read_bytes() == outs[1].read_bytes()
    # manifests record their own output path, so compare them with the
    # path-bearing lines stripped
    men = []
    for out in outs:
        man = _manifest(str(out) + ".man")
        man["outputs"] = None
        men.append(json.dumps(man, sort_keys=True))
    assert men[0] == men[1]


def test_missing_input_file(tmp_path, capsys):
    rc = cli.main(["propagate", "--input", str(tmp_path / "absent.bin"),
                   "--output", str(tmp_path / "o.bin")])
    assert rc == 2
    assert "error:" in capsys.readouterr().err


def test_wrong_kind_input(tmp_path, capsys):
    grid = Grid1D.centered(16, 4.0)
    src = str(tmp_path / "f1d.bin")
    gridfile.write(src, states.gaussian(grid), "binary")
    rc = cli.main(["propagate", "--input", src,
                   "--output", str(tmp_path / "o.bin")])
    assert rc == 2
    assert "expected a phase-plane function" in capsys.readouterr().err


def test_state_spec_errors(tmp_path, capsys):
    for spec in ("hermite:x", "coherent:zzz", "mystery:3"):
        rc = cli.main(["wigner", "--state", spec, *SMALL,
                       "--output", str(tmp_path / "w.out")])
        assert rc == 2, spec
        assert "error:" in capsys.readouterr().err


def test_unknown_command_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        cli.main(["transmogrify"])
    assert exc.value.code == 2


def test_builtin_symbol_requires_valid_spec(tmp_path, capsys):
    rc = cli.main(["star", "--a", "x", "--b", "nonsense", *SMALL,
                   "--output", str(tmp_path / "s.out")])
    assert rc == 2
    assert "symbol" in capsys.readouterr().err
