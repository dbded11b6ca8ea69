import csv
import io
import json
import math
import subprocess
import sys

import pytest

from vertex_amplitudes import RingSpec, scatter
from vertex_amplitudes.cli import CSV_HEADER, main


def run(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_sweep_csv(capsys):
    code, out, _ = run(["sweep", "--subject", "ring", "--l1", "1", "--l2", "2.1",
                        "--k-min", "0.5", "--k-max", "3", "--points", "6"], capsys)
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert tuple(rows[0]) == CSV_HEADER
    assert len(rows) == 7
    k, re_t, im_t = (float(v) for v in rows[3][:3])
    ref = scatter(RingSpec(1.0, 2.1).graph(), k)
    assert complex(re_t, im_t) == ref.t  # written with full precision


def test_workers_do_not_change_output(tmp_path):
    outs = []
    for w in (1, 3):
        p = tmp_path / f"w{w}.csv"
        assert main(["cascade", "--l1", "1", "--l2", "2.1", "--n-rings", "3", "--k-min", "0.2",
                     "--k-max", "6", "--points", "50", "--workers", str(w), "--out", str(p)]) == 0
        outs.append(p.read_text())
    assert outs[0] == outs[1]


def test_singular_points_become_nan_rows_and_are_logged(tmp_path, capsys):
    log = tmp_path / "skip.tsv"
    code, out, _ = run(["sweep", "--l1", "1", "--l2", "1", "--k-min", str(math.pi / 2),
                        "--k-max", str(3 * math.pi / 2), "--points", "3",
                        "--skip-log", str(log)], capsys)
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))[1:]
    assert rows[1][1] == "nan" and rows[0][1] != "nan"
    assert "EdgeResonanceSingularity" in log.read_text()


def test_all_singular_exit_code(capsys):
    code, _, err = run(["sweep", "--l1", "1", "--l2", "1", "--k-min", str(math.pi),
                        "--k-max", str(2 * math.pi), "--points", "2"], capsys)
    assert code == 3


@pytest.mark.parametrize("args", [
    ["sweep", "--k-min", "2", "--k-max", "1"],
    ["sweep", "--points", "1"],
    ["sweep", "--k-min", "-1"],
    ["sweep", "--swept", "n_wells", "--subject", "ring"],
    ["cascade", "--n-rings", "3", "--links", "0.1"],
    ["resonances", "--subject", "ab_ring", "--alpha", "0.3"],
    ["bound-states", "--subject", "ring"],
    ["sweep", "--subject", "finite_support", "--potential-file", "/nonexistent/v.dat"],
])
def test_config_errors_exit_2(args, capsys):
    code, out, _ = run(args, capsys)
    assert code == 2
    assert out == ""


def test_config_file_and_flag_precedence(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# ring sweep\nsubject = ring\nl2 = 1.1\nk-min = 1\nk-max = 2\npoints = 4\n")
    code, out, _ = run(["sweep", "--config", str(cfg), "--points", "3", "--format", "json"], capsys)
    assert code == 0
    data = json.loads(out)
    assert len(data["rows"]) == 3 and data["columns"] == list(CSV_HEADER)
    bad = tmp_path / "bad.cfg"
    bad.write_text("colour = blue\n")
    assert main(["sweep", "--config", str(bad)]) == 2


def test_json_maps_nan_to_null(capsys):
    code, out, _ = run(["sweep", "--l1", "1", "--l2", "1", "--k-min", str(math.pi / 2),
                        "--k-max", str(3 * math.pi / 2), "--points", "3", "--format", "json"],
                       capsys)
    data = json.loads(out)
    assert data["rows"][1][1] is None and data["skipped"]


def test_resonance_table(capsys):
    code, out, _ = run(["resonances", "--l1", "1", "--l2", "2.1", "--k-min", "0.1",
                        "--k-max", "10"], capsys)
    assert code == 0
    kinds = [r["kind"] for r in json.loads(out)["resonances"]]
    assert kinds.count("FTR") == 4 and kinds.count("STR") == 2


def test_bound_states_table(tmp_path, capsys):
    code, out, _ = run(["bound-states", "--subject", "parallel_wells", "--n-wells", "3"], capsys)
    assert code == 0
    rows = json.loads(out)["bound_states"]
    assert [r["n_wells"] for r in rows] == [1, 2, 3]
    pot = tmp_path / "v.dat"
    pot.write_text("\n".join(f"{x:.4f} -0.5" for x in [i / 100 for i in range(101)]))
    code, out, _ = run(["bound-states", "--subject", "finite_support",
                        "--potential-file", str(pot)], capsys)
    assert code == 0 and len(json.loads(out)["bound_states"]) == 2


def test_sweep_over_flux(capsys):
    code, out, _ = run(["sweep", "--subject", "ab_ring", "--swept", "alpha", "--k", "2.0",
                        "--k-min", "0.1", "--k-max", "4", "--points", "5"], capsys)
    assert code == 0
    assert len(list(csv.reader(io.StringIO(out)))) == 6


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "vertex_amplitudes", "sweep", "--points", "2",
                           "--k-min", "1", "--k-max", "2"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("param,")
