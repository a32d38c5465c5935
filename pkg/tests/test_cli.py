import csv
import io
import json
import math
import subprocess
import sys

import pytest

from opaquebound.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_disc_at_reference_point(capsys):
    code, out, _ = run(capsys, "disc-bound", "--at", "0.001067,0.965763", "--format", "json")
    assert code == 0
    rec = json.loads(out)
    assert rec["delta"] == pytest.approx(1.076457e-6, rel=1e-3)
    assert rec["valid"] is True
    for key in ("eta_prime", "h_prime", "w", "gamma_star", "W", "D_opposing", "D_neighbor"):
        assert key in rec


def test_disc_search(capsys):
    code, out, _ = run(capsys, "disc-bound", "--format", "json", "--grid", "60,60")
    assert code == 0
    rec = json.loads(out)
    assert rec["params"]["r"] == pytest.approx(0.001067, abs=5e-4)
    assert rec["params"]["t"] == pytest.approx(0.965763, abs=5e-4)


def test_disc_infeasible_exit_2(capsys):
    code, _, err = run(capsys, "disc-bound", "--at", "0.05,0.9")
    assert code == 2 and "error" in err


def test_disc_below_target_exit_1(capsys):
    code, out, _ = run(capsys, "disc-bound", "--at", "0.001,0.93")
    assert code == 1


def test_disc_bad_pair_exit_2(capsys):
    assert run(capsys, "disc-bound", "--at", "0.001")[0] == 2
    assert run(capsys, "disc-bound", "--at", "a,b")[0] == 2


def test_disc_optimal_gamma(capsys):
    code, out, _ = run(capsys, "disc-bound", "--at", "0.001067,0.965763",
                       "--gamma-neighbor", "optimal", "--format", "json")
    assert code == 0
    assert json.loads(out)["neighbor_gamma"] == pytest.approx(0.124871, abs=2e-6)


def test_square_default(capsys):
    code, out, _ = run(capsys, "square-bound", "--format", "json", "--samples", "20000")
    assert code == 0
    assert json.loads(out)["final_bound"] > 2.3e-5


def test_square_alternate(capsys):
    code, out, _ = run(capsys, "square-bound", "--zeta", "0.1", "--t", "0.618",
                       "--format", "json", "--samples", "20000")
    assert code == 0
    assert 0 < json.loads(out)["final_bound"] < 2.3e-5


def test_square_bad_t_exit_2(capsys):
    assert run(capsys, "square-bound", "--t", "0.9")[0] == 2


def test_square_invalid_exit_1(capsys):
    assert run(capsys, "square-bound", "--d-neighbor", "0.9", "--samples", "20000")[0] == 1


def test_certify(capsys):
    code, out, _ = run(capsys, "certify", "--at", "0.001067,0.965763",
                       "--samples", "20000", "--format", "json")
    assert code == 0
    rec = json.loads(out)
    assert rec["disc"]["valid"] and rec["square"]["valid"]


def test_certify_invalid_exit_1(capsys):
    assert run(capsys, "certify", "--at", "0.001,0.93", "--samples", "20000")[0] == 1


def test_barrier_round_trip(capsys, tmp_path):
    for kind, body, length in (("circle", "disc", 2 * math.pi),
                               ("jones", "square", math.sqrt(2) + math.sqrt(6) / 2),
                               ("square-boundary", "square", 4.0)):
        path = tmp_path / f"{kind}.json"
        assert run(capsys, "make-barrier", kind, "-o", str(path))[0] == 0
        code, out, _ = run(capsys, "validate-barrier", str(path), "--body", body,
                           "--n-alpha", "300", "--n-offset", "300", "--format", "json")
        rec = json.loads(out)
        assert code == 0 and rec["passed"] and rec["half_perimeter_check"]
        assert rec["length"] == pytest.approx(length, rel=1e-11)


def test_barrier_to_stdout(capsys):
    code, out, _ = run(capsys, "make-barrier", "gapped-circle", "--gap", "0.3")
    assert code == 0
    assert json.loads(out)["arcs"][0]["angle_sweep"] == pytest.approx(2 * math.pi - 0.3)


def test_gapped_circle_exit_1(capsys, tmp_path):
    path = tmp_path / "g.json"
    run(capsys, "make-barrier", "gapped-circle", "-o", str(path))
    code, out, _ = run(capsys, "validate-barrier", str(path), "--format", "json")
    rec = json.loads(out)
    assert code == 1 and rec["missed"] > 0 and rec["missed_examples"]


def test_malformed_barrier_exit_2(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"segments": [[1, 2]]}')
    assert run(capsys, "validate-barrier", str(path))[0] == 2
    assert run(capsys, "validate-barrier", str(tmp_path / "missing.json"))[0] == 2
    ok = tmp_path / "ok.json"
    run(capsys, "make-barrier", "circle", "-o", str(ok))
    assert run(capsys, "validate-barrier", str(ok), "--n-alpha", "0")[0] == 2


def test_table_rows(capsys):
    code, out, _ = run(capsys, "table", "--format", "csv", "--samples", "20000")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    sq, disc = rows
    assert float(sq["perimeter"]) == 4.0
    assert float(sq["gain"]) > 2.3e-5
    assert float(sq["upper"]) == pytest.approx(math.sqrt(2) + math.sqrt(6) / 2, abs=1e-12)
    assert float(disc["perimeter"]) == pytest.approx(2 * math.pi, abs=0)
    assert float(disc["new_lower"]) - math.pi == pytest.approx(1.076457e-6, rel=1e-3)
    assert disc["upper"] == "" and disc["upper_note"].startswith("n/a")
    # full precision floats
    assert len(sq["gain"]) > 12

    code, out, _ = run(capsys, "table", "--samples", "20000")
    assert code == 0 and "2 + 2.3e-05" in out and "pi + 1.076e-06" in out


def test_config_precedence(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"t": 0.9}))
    assert run(capsys, "square-bound", "--config", str(cfg))[0] == 2
    # flag wins over config
    code, out, _ = run(capsys, "square-bound", "--config", str(cfg), "--t", "0.615",
                       "--samples", "20000", "--format", "json")
    assert code == 0 and json.loads(out)["params"]["t"] == 0.615
    bad = tmp_path / "bad.json"
    bad.write_text("[]")
    assert run(capsys, "table", "--config", str(bad))[0] == 2
    bad.write_text("{oops")
    assert run(capsys, "table", "--config", str(bad))[0] == 2


def test_threads_env(capsys, monkeypatch):
    monkeypatch.setenv("OPAQUE_THREADS", "nope")
    assert run(capsys, "table")[0] == 2
    monkeypatch.setenv("OPAQUE_THREADS", "2")
    assert run(capsys, "table", "--samples", "20000")[0] == 0
    assert run(capsys, "table", "--threads", "0")[0] == 2


def test_output_file_and_determinism(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        assert run(capsys, "disc-bound", "--at", "0.001067,0.965763", "--format", "json",
                   "-o", str(p))[0] == 0
    assert a.read_bytes() == b.read_bytes()
    assert json.loads(a.read_text())["delta"] > 0


def test_text_and_csv_record_formats(capsys):
    _, out, _ = run(capsys, "disc-bound", "--at", "0.001067,0.965763", "--format", "csv")
    rows = dict(list(csv.reader(io.StringIO(out)))[1:])
    assert float(rows["delta"]) == pytest.approx(1.076457e-6, rel=1e-3)
    _, out, _ = run(capsys, "disc-bound", "--at", "0.001067,0.965763")
    assert out.splitlines()[0].split() == ["command", "disc-bound"]


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "opaquebound", "--version"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip() == "0.1.0"
    proc = subprocess.run([sys.executable, "-m", "opaquebound", "square-bound", "--t", "0.9"],
                          capture_output=True, text=True)
    assert proc.returncode == 2
