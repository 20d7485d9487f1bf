"""End-to-end tests of the command-line interface (direct ``main`` calls)."""

import json
import os

import numpy as np
import pytest

from lowrank_cones import ClauseReport, LimitReport, load_bundle, matcore, tight_witness
from lowrank_cones.blockrank import BlockShape
from lowrank_cones.cli import main

from conftest import random_rank_matrix

X0 = np.diag([2.0, 1.0, 0.0, 0.0])
ETA0 = np.array(
    [
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.5],
    ]
)


def _write(path, M):
    matcore.write_matrix_text(os.fspath(path), np.asarray(M, dtype=float))
    return os.fspath(path)


def _value(captured, key):
    for line in captured.splitlines():
        if line.startswith(key + ":"):
            return line.split(":", 1)[1].strip()
    raise AssertionError(f"no '{key}:' line in output:\n{captured}")


# ---------------------------------------------------------------------------
# Success paths


def test_help_exits_zero(capsys):
    assert main(["--help"]) == 0
    assert "lowrank-cones" in capsys.readouterr().out


def test_distance_command(tmp_path, capsys):
    x = _write(tmp_path / "x.txt", np.diag([3.0, 2.0, 1.0]))
    assert main(["distance", "--input", x, "--r", "1"]) == 0
    out = capsys.readouterr().out
    assert float(_value(out, "distance")) == pytest.approx(np.sqrt(5.0), abs=1e-12)


def test_project_then_membership_roundtrip(tmp_path, capsys):
    x = _write(tmp_path / "x.txt", X0)
    eta = _write(tmp_path / "eta.txt", ETA0)
    proj = tmp_path / "proj.txt"
    rc = main(
        ["project", "normal", "--input", x, "--input", eta, "--rbar", "2", "--output", str(proj)]
    )
    assert rc == 0
    out = capsys.readouterr().out
    assert _value(out, "rank") == "2"
    # Only the trailing block survives: distance is |(A, B, C)| = sqrt(3).
    assert float(_value(out, "distance")) == pytest.approx(np.sqrt(3.0), abs=1e-12)
    assert proj.exists()
    rc = main(["membership", "normal", "--input", x, "--input", str(proj), "--rbar", "2"])
    assert rc == 0
    out = capsys.readouterr().out
    assert _value(out, "member") == "true"
    assert float(_value(out, "residual")) <= 1e-12


def test_membership_false_still_exits_zero(tmp_path, capsys):
    x = _write(tmp_path / "x.txt", X0)
    eta = _write(tmp_path / "eta.txt", ETA0)
    rc = main(["membership", "regular-tangent", "--input", x, "--input", eta, "--rbar", "3"])
    assert rc == 0
    out = capsys.readouterr().out
    assert _value(out, "member") == "false"
    assert float(_value(out, "residual")) > 0.1


def test_frame_writes_factor_files(tmp_path, capsys):
    x = _write(tmp_path / "x.txt", X0)
    out_dir = tmp_path / "frame"
    assert main(["frame", "--input", x, "--output", str(out_dir)]) == 0
    out = capsys.readouterr().out
    assert _value(out, "rank") == "2"
    assert _value(out, "sigma").split() == ["2", "1"]
    for name in ("u", "v", "u_perp", "v_perp", "sigma"):
        assert (out_dir / f"{name}.txt").exists()
    U = matcore.read_matrix_text(str(out_dir / "u.txt"))
    assert U.shape == (4, 2)


def test_sequence_roundtrip(tmp_path, capsys):
    out_dir = tmp_path / "bundle"
    rc = main(
        ["sequence", "--m", "4", "--n", "4", "--rlow", "1", "--r", "2", "--N", "6", "--seed", "3", "--output", str(out_dir)]
    )
    assert rc == 0
    out = capsys.readouterr().out
    assert _value(out, "elements") == "6"
    assert _value(out, "target_rank") == "1"
    assert _value(out, "sequence_rank") == "2"
    bundle = load_bundle(str(out_dir))
    assert len(bundle) == 6
    assert bundle.r_seq == 2


def test_witness_command(capsys):
    assert main(["witness", "1", "2", "2", "1"]) == 0
    out = capsys.readouterr().out
    assert _value(out, "bound") == "3"
    assert _value(out, "rank") == "3"
    assert "3 3" in out  # the witness matrix itself is printed


def test_rotate_command(tmp_path, capsys):
    M = random_rank_matrix(4, 4, 2, 11)
    m = _write(tmp_path / "m.txt", M)
    assert main(["rotate", "2", "1", "--input", m]) == 0
    out = capsys.readouterr().out
    budget = int(_value(out, "corner_budget"))
    corner_rank = int(_value(out, "corner_rank"))
    assert corner_rank <= budget


def test_gap_command(tmp_path, capsys):
    b1 = _write(tmp_path / "b1.txt", np.array([[1.0], [0.0]]))
    b2 = _write(tmp_path / "b2.txt", np.array([[0.0], [1.0]]))
    assert main(["gap", "--input", b1, "--input", b2]) == 0
    assert float(_value(capsys.readouterr().out, "gap")) == pytest.approx(1.0, abs=1e-12)


def test_verify_polar_writes_reports(tmp_path, capsys):
    rc = main(
        ["verify", "polar", "--rlow", "1", "--r", "2", "--N", "30", "--trials", "1", "--seed", "0", "--output", str(tmp_path)]
    )
    assert rc == 0
    out = capsys.readouterr().out
    assert "clause fixed_space_polarity: pass" in out
    assert _value(out, "result") == "pass"
    report = json.loads((tmp_path / "verify_polar.json").read_bytes())
    assert report["passed"] is True
    header = (tmp_path / "verify_polar.csv").read_text().splitlines()[0]
    assert header == "index,probe_id,residual"


def test_verify_failure_exits_one(tmp_path, capsys, monkeypatch):
    import lowrank_cones.limits as limits_mod

    failing = LimitReport(
        params={"suite": "main"},
        seed=0,
        clauses=[ClauseReport(name="lower_inner", verdict="fail", residual_summary={}, probes=[])],
        runtime_ms=0.0,
        timestamp="1970-01-01T00:00:00+00:00",
    )
    monkeypatch.setattr(limits_mod, "verify_main_theorem", lambda *a, **k: failing)
    rc = main(["verify", "main", "--trials", "1", "--N", "10", "--output", str(tmp_path)])
    assert rc == 1
    out = capsys.readouterr().out
    assert "clause lower_inner: fail" in out
    assert _value(out, "result") == "fail"


# ---------------------------------------------------------------------------
# Seeding


def test_env_seed_matches_explicit_seed(tmp_path, capsys, monkeypatch):
    main(["sequence", "--N", "5", "--seed", "7"])
    explicit = capsys.readouterr().out
    monkeypatch.setenv("LOWRANK_CONES_SEED", "7")
    main(["sequence", "--N", "5"])
    from_env = capsys.readouterr().out
    assert explicit == from_env
    # An explicit --seed always beats the environment.
    main(["sequence", "--N", "5", "--seed", "9"])
    overridden = capsys.readouterr().out
    assert overridden != from_env


def test_env_seed_must_be_integer(monkeypatch, capsys):
    monkeypatch.setenv("LOWRANK_CONES_SEED", "not-a-number")
    assert main(["sequence", "--N", "5"]) == 3
    assert "LOWRANK_CONES_SEED" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# Error paths and exit codes


def test_missing_file_exits_two(capsys):
    assert main(["distance", "--input", "/no/such/file.txt", "--r", "1"]) == 2
    assert "error:" in capsys.readouterr().err


def test_malformed_matrix_exits_three(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("2 2\n1 2\n3\n")
    assert main(["distance", "--input", str(bad), "--r", "1"]) == 3


def test_wrong_input_count_exits_three(tmp_path):
    x = _write(tmp_path / "x.txt", X0)
    assert main(["project", "tangent", "--input", x, "--rbar", "2"]) == 3


def test_rbar_at_ambient_limit_exits_three(tmp_path, capsys):
    x = _write(tmp_path / "x.txt", X0)
    eta = _write(tmp_path / "eta.txt", ETA0)
    rc = main(["membership", "tangent", "--input", x, "--input", eta, "--rbar", "4"])
    assert rc == 3
    assert "require rbar < min(m, n)" in capsys.readouterr().err


def test_witness_invalid_shape_exits_three(capsys):
    assert main(["witness", "1", "2", "2", "3"]) == 3


def test_verify_invalid_params_exits_three(tmp_path, capsys):
    rc = main(["verify", "main", "--rbar", "4", "--output", str(tmp_path)])
    assert rc == 3
    assert "require rbar < min(m, n)" in capsys.readouterr().err


def test_base_rank_above_rbar_exits_four(tmp_path, capsys):
    x = _write(tmp_path / "x.txt", X0)  # rank 2
    eta = _write(tmp_path / "eta.txt", ETA0)
    rc = main(["project", "tangent", "--input", x, "--input", eta, "--rbar", "1"])
    assert rc == 4
    assert "exceeds rbar" in capsys.readouterr().err


def test_rotate_rank_too_high_exits_four(tmp_path, capsys):
    m = _write(tmp_path / "m.txt", random_rank_matrix(4, 4, 4, 13))
    assert main(["rotate", "1", "1", "--input", m]) == 4


def test_unknown_command_exits_three(capsys):
    assert main(["bogus-command"]) == 3


def test_witness_shape_matches_blockrank_contract():
    # The CLI prints the same witness the library builds.
    W = tight_witness(BlockShape(1, 2, 2, 1))
    assert W.shape == (3, 3)
