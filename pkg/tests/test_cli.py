import csv
import json

import numpy as np
import pytest

import qmc
from qmc import io
from qmc.cli import main


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def zeta2_file(tmp_path):
    path = tmp_path / "zeta2.json"
    io.save_state(path, qmc.zeta_d(2).state)
    return path


@pytest.fixture
def psi_file(tmp_path):
    path = tmp_path / "psi05.json"
    io.save_state(path, qmc.psi_x(0.5).state)
    return path


# ---------------------------------------------------------------------------
# cmi


def test_cmi_zeta2(capsys, zeta2_file):
    code, out, _ = run(capsys, "cmi", zeta2_file)
    assert code == 0
    assert out.strip() == "0.415037499279"


def test_cmi_markov_file(capsys, tmp_path):
    from qmc.verify import _random_markov_state
    from qmc.linalg import rng_from

    st = qmc.assemble(_random_markov_state(rng_from(0), ((2, 2),)))
    path = tmp_path / "markov.json"
    io.save_state(path, st)
    code, out, _ = run(capsys, "cmi", path)
    assert code == 0
    assert out.strip() == "0.000000000000"


def test_cmi_malformed_file(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"dims": [2, 2, 2]}')
    code, _, err = run(capsys, "cmi", path)
    assert code == 2
    assert "matrix" in err or "vector" in err


def test_cmi_unreadable_json(capsys, tmp_path):
    path = tmp_path / "nojson.json"
    path.write_text("{broken")
    code, _, err = run(capsys, "cmi", path)
    assert code == 2


# ---------------------------------------------------------------------------
# delta


def test_delta_markov_state(capsys, tmp_path):
    from qmc.verify import _random_markov_state
    from qmc.linalg import rng_from

    st = qmc.assemble(_random_markov_state(rng_from(1), ((1, 1), (1, 1))))
    path = tmp_path / "markov.json"
    io.save_state(path, st)
    code, out, _ = run(capsys, "delta", path, "--restarts", 2, "--max-iters", 200, "--seed", 3)
    assert code == 0
    lower, upper = (float(v) for v in out.split())
    assert upper <= 1e-6
    assert lower <= upper + 1e-6


def test_delta_psi_within_sandwich(capsys, psi_file, tmp_path):
    out_path = tmp_path / "res.json"
    code, out, _ = run(
        capsys, "delta", psi_file, "--restarts", 2, "--max-iters", 600, "--seed", 1, "--out", out_path
    )
    assert code == 0
    lower, upper = (float(v) for v in out.split())
    assert 0.8112781244591328 - 1e-3 <= upper <= 2 * 0.8112781244591328 + 1e-3
    obj = json.loads(out_path.read_text())
    assert abs(obj["value"] - upper) < 1e-9


def test_delta_deterministic_output(capsys, psi_file, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        code, _, _ = run(
            capsys, "delta", psi_file, "--restarts", 2, "--max-iters", 150, "--seed", 9, "--out", path
        )
        assert code == 0
    assert a.read_bytes() == b.read_bytes()


def test_delta_nonconvergence_exit_code(capsys, psi_file):
    # full mode, one restart, one iteration, impossible tolerance
    code, out, _ = run(
        capsys, "delta", psi_file, "--shape", "full", "--restarts", 1,
        "--max-iters", 1, "--tol", "1e-30", "--seed", 0,
    )
    assert code == 3
    assert len(out.split()) == 2


# ---------------------------------------------------------------------------
# ep


def test_ep_bell(capsys, tmp_path):
    v = np.zeros(4, dtype=complex)
    v[0] = v[3] = 1 / np.sqrt(2)
    path = tmp_path / "bell.json"
    io.save_state(path, qmc.PureState(v, (2, 2)))
    code, out, _ = run(capsys, "ep", path, "--seed", 0)
    assert code == 0
    lower, upper = (float(x) for x in out.split())
    assert abs(upper - 1.0) < 1e-6
    assert abs(lower - 1.0) < 1e-6


def test_ep_rejects_tripartite(capsys, zeta2_file):
    code, _, err = run(capsys, "ep", zeta2_file)
    assert code == 2
    assert "dims" in err


# ---------------------------------------------------------------------------
# classical


def test_classical_common_bit(capsys, tmp_path):
    path = tmp_path / "dist.json"
    path.write_text(json.dumps({"shape": [2, 1, 2], "table": [0.5, 0.0, 0.0, 0.5]}))
    q_path = tmp_path / "q.json"
    code, out, _ = run(capsys, "classical", path, "--project", q_path)
    assert code == 0
    lines = out.strip().splitlines()
    assert lines == ["1.000000000000", "1.000000000000"]
    q = io.load_joint(q_path)
    assert np.allclose(q.table.reshape(2, 2), 0.25)


def test_classical_markov_input(capsys, tmp_path):
    path = tmp_path / "dist.json"
    table = [0.3, 0.0, 0.0, 0.2, 0.1, 0.0, 0.0, 0.4]
    path.write_text(json.dumps({"shape": [2, 2, 2], "table": table}))
    code, out, _ = run(capsys, "classical", path)
    assert code == 0
    cmi_line, d_line = out.strip().splitlines()
    assert float(cmi_line) < 1e-9
    assert float(d_line) < 1e-9


def test_classical_negative_entry(capsys, tmp_path):
    path = tmp_path / "dist.json"
    path.write_text(json.dumps({"shape": [2, 1, 2], "table": [0.6, 0.5, -0.1, 0.0]}))
    code, _, err = run(capsys, "classical", path)
    assert code == 2
    assert "table" in err


# ---------------------------------------------------------------------------
# family / scan


def test_family_psi_roundtrips_through_cmi(capsys, tmp_path):
    path = tmp_path / "state.json"
    code, _, _ = run(capsys, "family", "psi-x", "--x", 0.5, "--out", path)
    assert code == 0
    code, out, _ = run(capsys, "cmi", path)
    assert code == 0
    assert out.strip() == "0.668122245993"


def test_family_cq_via_spec(capsys, tmp_path):
    spec = tmp_path / "cq.json"
    s = 1 / np.sqrt(2)
    spec.write_text(
        json.dumps(
            {
                "probs": [0.5, 0.5],
                "states": [[[1.0, 0.0], [0.0, 0.0]], [[s, 0.0], [s, 0.0]]],
            }
        )
    )
    out_path = tmp_path / "cq_state.json"
    code, _, _ = run(capsys, "family", "cq", "--spec", spec, "--out", out_path)
    assert code == 0
    st = io.load_state(out_path)
    assert st.dims == (2, 2, 2)


def test_family_missing_parameter(capsys):
    code, _, err = run(capsys, "family", "psi-x")
    assert code == 2
    assert "--x" in err


def test_scan_psi_ratio_increases(capsys, tmp_path):
    csv_path = tmp_path / "scan.csv"
    code, _, _ = run(
        capsys, "scan", "psi-x", "--grid", "0.3,0.2,0.1,0.05", "--csv", csv_path,
        "--restarts", 2, "--max-iters", 800, "--seed", 0,
    )
    assert code == 0
    with open(csv_path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == [
        "param", "S_A", "S_B", "cmi", "delta_lower", "delta_upper", "delta_hat",
        "ratio(delta_hat/cmi)",
    ]
    assert len(rows) == 5
    ratios = [float(r[-1]) for r in rows[1:]]
    assert all(b > a for a, b in zip(ratios, ratios[1:]))
    # delta_hat stays inside the analytic sandwich at every grid point
    for r in rows[1:]:
        assert float(r[4]) - 1e-3 <= float(r[6]) <= float(r[5]) + 1e-3


def test_scan_zeta(capsys, tmp_path):
    csv_path = tmp_path / "zeta.csv"
    code, _, _ = run(
        capsys, "scan", "zeta-d", "--grid", "2", "--csv", csv_path,
        "--restarts", 1, "--max-iters", 300, "--seed", 0,
    )
    assert code == 0
    with open(csv_path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert float(rows[1][3]) < 1.0          # cmi below one bit
    assert abs(float(rows[1][4]) - 1.0) < 1e-12  # distance floor log2(2)


# ---------------------------------------------------------------------------
# verify


def test_verify_classical_suite(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "classical", "--seed", 0)
    assert code == 0
    assert "[PASS]" in out
    assert "[FAIL]" not in out


def test_verify_deterministic_report(capsys):
    _, out1, _ = run(capsys, "verify", "--suite", "classical", "--seed", 5)
    _, out2, _ = run(capsys, "verify", "--suite", "classical", "--seed", 5)
    assert out1 == out2
