import csv
import io
import json
import math
import subprocess
import sys

import pytest

from convpow.cli import build_parser, fmt, main
from convpow.fixtures import CHECKS, FIXTURES, compare_analysis, quartic_example, cubic_drift
from convpow.zfun import LatticeFunction, power, save


@pytest.fixture
def write(tmp_path):
    def _write(f, name="f.json"):
        path = tmp_path / name
        save(f, path)
        return str(path)
    return _write


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_fmt():
    assert fmt(0.0) == "0" and fmt(-0.0) == "0"
    assert fmt(0.1) == "0.10000000000000001"
    assert float(fmt(math.pi)) == math.pi


def test_kernel_eval_gaussian_row(capsys):
    code, out, _ = run(capsys, "kernel-eval", "--m", "2", "--from", "0", "--to", "1", "--step", "0.5")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and rows[0] == ["x", "re", "im"]
    assert rows[1] == ["0", "0.28209479177387814", "0"]
    assert len(rows) == 4
    x, re, im = map(float, rows[3])
    assert x == 1.0 and re == pytest.approx(math.exp(-0.25) / math.sqrt(4 * math.pi), rel=1e-14)


def test_kernel_eval_rejects_unsupported_order(capsys):
    code, _, err = run(capsys, "kernel-eval", "--m", "5", "--from", "0", "--to", "1", "--step", "1")
    assert code == 2 and "unsupported" in err


def test_kernel_eval_bad_range(capsys):
    assert run(capsys, "kernel-eval", "--m", "2", "--from", "1", "--to", "0", "--step", "1")[0] == 2


def test_analyze_stable(capsys, write):
    code, out, _ = run(capsys, "analyze", "--input", write(quartic_example()))
    d = json.loads(out)
    assert code == 0 and d["verdict"]["case"] == "Stable"
    assert d["analysis"]["points"][0]["nu"] == 4


def test_analyze_degenerate_exit(capsys, write):
    code, out, _ = run(capsys, "analyze", "--input", write(quartic_example()), "--max-order", "3")
    assert code == 3 and json.loads(out)["verdict"] is None


def test_classify_with_fit(capsys, write):
    code, out, _ = run(capsys, "classify", "--input", write(cubic_drift()), "--fit", "500,4000")
    d = json.loads(out)
    assert code == 0 and d["case"] == "Unstable"
    assert d["growth_exponent"] == pytest.approx(0.125)
    assert 0.09 <= d["fitted_growth_exponent"] <= 0.16


def test_zero_function_degenerate(capsys, tmp_path):
    path = tmp_path / "zero.txt"
    path.write_text("0 0 0\n")
    assert run(capsys, "classify", "--input", str(path))[0] == 3


def test_missing_and_malformed_input(capsys, tmp_path):
    assert run(capsys, "analyze", "--input", str(tmp_path / "nope.json"))[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{\"offset\": 0.5, \"coeffs\": [[1, 0]]}")
    assert run(capsys, "analyze", "--input", str(bad))[0] == 2


def test_power_csv(capsys, write):
    f = LatticeFunction(-1, [0.25, 0.5, 0.25])
    code, out, _ = run(capsys, "power", "--input", write(f), "--n", "3", "--method", "direct")
    rows = list(csv.DictReader(io.StringIO(out)))
    exact = power(f, 3, "direct")
    assert code == 0 and len(rows) == exact.width
    for r in rows:
        assert complex(float(r["re"]), float(r["im"])) == exact(int(r["x"]))


def test_power_rejects_negative(capsys, write):
    assert run(capsys, "power", "--input", write(quartic_example()), "--n", "-1")[0] == 2


def test_llt_compare_files(capsys, write, tmp_path):
    out_csv, summary = tmp_path / "llt.csv", tmp_path / "s.json"
    code, _, _ = run(capsys, "llt-compare", "--input", write(quartic_example()), "--n", "50,200",
                     "--out", str(out_csv), "--summary", str(summary))
    assert code == 0
    rows = list(csv.DictReader(out_csv.open()))
    assert {r["n"] for r in rows} == {"50", "200"}
    errs = json.loads(summary.read_text())["sup_error_scaled"]
    assert errs["50"] > errs["200"] > 0


def test_llt_compare_single_point(capsys, write):
    assert run(capsys, "llt-compare", "--input", write(LatticeFunction.delta(3)), "--n", "4")[0] == 3


def test_llt_compare_unstable(capsys, write):
    assert run(capsys, "llt-compare", "--input", write(cubic_drift()), "--n", "4")[0] == 3


def test_carne_verify_path(capsys):
    code, out, _ = run(capsys, "carne-verify", "--dim", "201", "--k", "2", "--n", "10,20")
    d = json.loads(out)
    assert code == 0 and d["discrepancy"] <= 1e-7 and d["locality_violations"] == 0
    assert set(d["bound_constants"]) == {"10", "20"}
    assert d["diag_ratios"] is not None


def test_carne_verify_edge_file(capsys, tmp_path):
    path = tmp_path / "g.txt"
    lines = ["# weighted lazy path"]
    for i in range(60):
        lines.append(f"{i} {i + 1} {1 + (i % 3)}")
    deg = [0.0] * 61
    for i in range(60):
        deg[i] += 1 + (i % 3)
        deg[i + 1] += 1 + (i % 3)
    lines += [f"{i} {i} {d}" for i, d in enumerate(deg)]
    path.write_text("\n".join(lines))
    code, out, _ = run(capsys, "carne-verify", "--graph", str(path), "--k", "2", "--n", "5,10")
    assert code == 0 and json.loads(out)["discrepancy"] <= 1e-7


def test_carne_verify_bad_params(capsys):
    assert run(capsys, "carne-verify", "--s", "0.9", "--k", "2")[0] == 2


def test_examples_list(capsys):
    code, out, _ = run(capsys, "examples", "list")
    names = [line.split("\t")[0] for line in out.splitlines()]
    assert code == 0 and names == list(CHECKS)
    assert all("[PAPER]" in l or "[DERIVED]" in l or "[TRIVIAL]" in l for l in out.splitlines())


def test_examples_run(capsys):
    code, out, _ = run(capsys, "examples", "run", "cos4")
    assert code == 0 and out.strip().endswith("cos4: PASS")


def test_examples_unknown_and_missing(capsys):
    assert run(capsys, "examples", "run", "bogus")[0] == 2
    assert run(capsys, "examples", "run")[0] == 2


def test_unknown_command(capsys):
    assert run(capsys, "frobnicate")[0] == 2


def test_threads_flag_sets_environment(capsys, monkeypatch):
    import os
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        monkeypatch.delenv(var, raising=False)
    run(capsys, "--threads", "2", "examples", "list")
    assert os.environ["OMP_NUM_THREADS"] == "2"


def test_deterministic_output(capsys, write):
    path = write(quartic_example())
    first = run(capsys, "analyze", "--input", path)[1]
    assert run(capsys, "analyze", "--input", path)[1] == first


def test_parser_defaults():
    args = build_parser().parse_args(["carne-verify"])
    assert args.seed == 42 and args.dim == 401 and args.graph == "path"


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "convpow", "examples", "run", "delta0"],
                          capture_output=True, text=True, timeout=120)
    assert proc.returncode == 0 and "delta0: PASS" in proc.stdout


# -- fixture library --------------------------------------------------------------

@pytest.mark.parametrize("name", list(FIXTURES))
def test_fixture_records(name):
    fx = FIXTURES[name]
    assert fx.provenance in {"PAPER", "DERIVED", "TRIVIAL"}
    bad = [row for row in compare_analysis(fx) if not row[3]]
    assert not bad


@pytest.mark.parametrize("name", ["quartic-llt", "kernel-identities", "carne-transmutation"])
def test_end_to_end_checks(name):
    result = CHECKS[name][1]()
    assert result.rows and result.passed
