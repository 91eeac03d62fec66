"""Command line behaviour, exercised in process through main(argv)."""

import json

import numpy as np
import pytest

from specsim import EigenSpec, FarfimaSpec, FilterSpec, KernelSpec
from specsim.cli import UsageError, load_spec_file, main, parse_manifest


def read_csv(path):
    lines = path.read_text().strip().split("\n")
    return lines[0], [line.split(",") for line in lines[1:]]


# ---------------------------------------------------------------------------
# manifest parsing

def test_manifest_defaults():
    m = parse_manifest(["validate", "--spec", "example1"])
    assert m.command == "validate"
    assert m.T == (128,)
    assert (m.M, m.N, m.seed) == (51, 50, 0)
    assert m.replicates == 100
    assert m.lags == (0, 1, 2, 3, 5, 10)
    assert m.method is None
    assert m.oversample == 1
    assert m.burnin is None
    assert m.out == "."


def test_bench_default_lengths():
    m = parse_manifest(["bench", "--spec", "example1"])
    assert m.T == (400, 800)
    m = parse_manifest(["bench", "--spec", "example1", "--T", "16,32,64"])
    assert m.T == (16, 32, 64)


def test_flags_override_config_file(tmp_path):
    config = tmp_path / "run.json"
    config.write_text(json.dumps({"spec": "example2", "T": 400, "I": 7, "seed": 3}))
    m = parse_manifest(["simulate", "--config", str(config), "--T", "800"])
    assert m.spec == "example2"
    assert m.T == (800,)
    assert m.replicates == 7
    assert m.seed == 3


def test_config_rejects_unknown_keys(tmp_path, capsys):
    config = tmp_path / "run.json"
    config.write_text(json.dumps({"spec": "example1", "bogus": 1}))
    assert main(["simulate", "--config", str(config)]) == 2
    assert "unknown config keys" in capsys.readouterr().err


def test_config_must_be_json_object(tmp_path):
    config = tmp_path / "run.json"
    config.write_text("[1, 2]")
    assert main(["simulate", "--config", str(config)]) == 2
    config.write_text("{not json")
    assert main(["simulate", "--config", str(config)]) == 2


@pytest.mark.parametrize("argv", [
    ["simulate"],                                            # no spec at all
    ["simulate", "--spec", "example1", "--spec-file", "x"],  # both sources
    ["simulate", "--spec", "nope"],                          # unknown name
    ["simulate", "--spec", "example1", "--T", "255"],        # odd length
    ["simulate", "--spec", "example1", "--T", "0"],
    ["simulate", "--spec", "example1", "--M", "1"],
    ["simulate", "--spec", "example1", "--N", "0"],
    ["simulate", "--spec", "example1", "--I", "0"],
    ["simulate", "--spec", "example1", "--seed", "-1"],
    ["simulate", "--spec", "example1", "--oversample", "0"],
    ["simulate", "--spec", "example1", "--burnin", "-1"],
    ["simulate", "--spec", "example1", "--T", "8,16"],       # list outside bench
    ["validate", "--spec", "example1", "--T", "8", "--lags", "0,8"],
    ["validate", "--spec", "example1", "--lags", "-1"],
    ["validate", "--spec", "example1", "--lags", "0,x"],
    ["simulate", "--spec", "example1", "--method", "turbo"],
    ["simulate", "--spec", "example1", "--method", "spectral-xx"],
    ["simulate", "--spec", "example1", "--method", "spectral-lr"],  # wrong form
])
def test_usage_errors_exit_2(argv, capsys):
    assert main(argv) == 2
    assert "usage error" in capsys.readouterr().err


def test_missing_command_is_rejected():
    with pytest.raises(SystemExit):
        parse_manifest([])


def test_method_mismatch_is_a_runtime_error(capsys):
    assert main(["simulate", "--spec", "example1", "--T", "8", "--M", "5",
                 "--N", "2", "--method", "temporal"]) == 1
    assert "error:" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# simulate command

def test_simulate_writes_sample_and_manifest(tmp_path, capsys):
    out = tmp_path / "run"
    code = main(["simulate", "--spec", "example1", "--T", "16", "--M", "5",
                 "--N", "3", "--seed", "7", "--out", str(out)])
    assert code == 0
    printed = capsys.readouterr().out
    assert "sample.csv" in printed and "manifest.json" in printed

    header, rows = read_csv(out / "sample.csv")
    assert header == "t,x_0,x_0.25,x_0.5,x_0.75,x_1"
    assert len(rows) == 16
    assert [r[0] for r in rows] == [str(t) for t in range(1, 17)]
    values = np.array([[float(v) for v in r[1:]] for r in rows])
    assert np.isfinite(values).all()

    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["command"] == "simulate"
    assert manifest["spec"] == "example1"
    assert manifest["T"] == [16]
    assert manifest["method"] == "ckl"
    assert manifest["I"] == 100


def test_simulate_reproduces_byte_for_byte(tmp_path):
    argv = ["simulate", "--spec", "white-noise", "--T", "16", "--M", "5",
            "--N", "3", "--seed", "11"]
    out1, out2, out3 = (tmp_path / n for n in ("a", "b", "c"))
    assert main(argv + ["--out", str(out1)]) == 0
    assert main(argv + ["--out", str(out2)]) == 0
    assert (out1 / "sample.csv").read_bytes() == (out2 / "sample.csv").read_bytes()
    assert main(["simulate", "--spec", "white-noise", "--T", "16", "--M", "5",
                 "--N", "3", "--seed", "12", "--out", str(out3)]) == 0
    assert (out1 / "sample.csv").read_bytes() != (out3 / "sample.csv").read_bytes()


def test_simulate_accepts_method_aliases(tmp_path):
    out = tmp_path / "run"
    code = main(["simulate", "--spec", "example2", "--T", "16", "--M", "5",
                 "--N", "3", "--method", "hybrid-bm", "--burnin", "8",
                 "--out", str(out)])
    assert code == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["method"] == "hybrid-bm"
    assert manifest["burnin"] == 8


# ---------------------------------------------------------------------------
# validate command

def test_validate_accuracy_table_at_paper_scale(tmp_path):
    out = tmp_path / "run"
    code = main(["validate", "--spec", "example1", "--T", "128", "--M", "21",
                 "--N", "50", "--I", "200", "--seed", "0", "--out", str(out)])
    assert code == 0
    header, rows = read_csv(out / "accuracy.csv")
    assert header == "h,rel_error,method"
    assert [r[0] for r in rows] == ["0", "1", "2", "3", "5", "10"]
    for h, err, method in rows:
        assert method == "ckl"
        assert float(err) <= 0.1, f"lag {h} rel error {err}"


def test_validate_small_run_structure(tmp_path):
    out = tmp_path / "run"
    code = main(["validate", "--spec", "white-noise", "--T", "32", "--M", "5",
                 "--N", "3", "--I", "4", "--lags", "2,0", "--out", str(out)])
    assert code == 0
    header, rows = read_csv(out / "accuracy.csv")
    assert [r[0] for r in rows] == ["2", "0"]  # manifest order, not sorted


# ---------------------------------------------------------------------------
# bench command

def test_bench_table(tmp_path):
    out = tmp_path / "run"
    code = main(["bench", "--spec", "example1", "--T", "16,32", "--M", "5",
                 "--N", "2", "--out", str(out)])
    assert code == 0
    header, rows = read_csv(out / "bench.csv")
    assert header == "method,T,M,N,seconds"
    assert [(r[0], r[1]) for r in rows] == [("ckl", "16"), ("ckl", "32")]
    for r in rows:
        assert float(r[4]) > 0


# ---------------------------------------------------------------------------
# demo command

def test_demo_truncation_sweep(tmp_path):
    out = tmp_path / "run"
    code = main(["demo", "--spec", "example1", "--T", "32", "--M", "7",
                 "--N", "5", "--I", "4", "--lags", "0,1", "--out", str(out)])
    assert code == 0
    _, rows = read_csv(out / "accuracy.csv")
    labels = [r[2] for r in rows]
    assert labels == ["ckl[N=1]", "ckl[N=1]", "ckl[N=3]", "ckl[N=3]",
                      "ckl[N=10]", "ckl[N=10]", "ckl[N=50]", "ckl[N=50]"]


def test_demo_method_sweep(tmp_path):
    out = tmp_path / "run"
    code = main(["demo", "--spec", "example2", "--T", "32", "--M", "7",
                 "--N", "5", "--I", "3", "--lags", "0", "--burnin", "16",
                 "--out", str(out)])
    assert code == 0
    _, rows = read_csv(out / "accuracy.csv")
    assert [r[2] for r in rows] == ["spectral-bm", "hybrid-bm", "spectral-svd",
                                    "hybrid-svd", "temporal"]


def test_demo_rejects_other_specs(capsys):
    assert main(["demo", "--spec", "white-noise", "--T", "16", "--M", "5",
                 "--N", "2", "--I", "2"]) == 2
    assert "demo supports" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# JSON spec files

def write_spec(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return path


def test_load_eigen_spec(tmp_path):
    path = write_spec(tmp_path, "eigen.json", {
        "kind": "eigen",
        "eigenvalue": "1/(n*n*(1 - 0.9*cos(omega)))",
        "eigenfunction": "sqrt(2)*sin(n*pi*x)",
        "n_max": 12,
    })
    spec = load_spec_file(str(path))
    assert isinstance(spec, EigenSpec)
    assert spec.n_max == 12
    assert spec.eigenvalue(1, np.pi) == pytest.approx(1 / 1.9)


def test_load_filter_spec(tmp_path):
    path = write_spec(tmp_path, "filter.json", {
        "kind": "filter",
        "response": {"scale": "1/(1 + omega)", "g": "exp(x*x/2)"},
        "noise": {"kernel": "min(x,y)"},
    })
    assert isinstance(load_spec_file(str(path)), FilterSpec)


def test_load_farfima_spec(tmp_path):
    path = write_spec(tmp_path, "farfima.json", {
        "kind": "farfima",
        "ar": [{"c": 0.34, "g": "exp(x*x/2)"}],
        "d": 0.2,
        "ma": ["0.3*cos(x - y)"],
        "noise": {"eigenvalue": "1/(((n - 0.5)*pi)^2)",
                  "function": "sqrt(2)*sin((n - 0.5)*pi*x)"},
    })
    spec = load_spec_file(str(path))
    assert isinstance(spec, FarfimaSpec)
    assert (spec.p, spec.q, spec.d) == (1, 1, 0.2)


def test_load_kernel_spec(tmp_path):
    path = write_spec(tmp_path, "kernel.json", {
        "kind": "kernel",
        "kernel": "(min(x,y) - x*y)/(1 - 0.9*cos(omega))",
    })
    assert isinstance(load_spec_file(str(path)), KernelSpec)


@pytest.mark.parametrize("kind,extra", [
    ("eigen", {"eigenvalue": "1", "eigenfunction": "x"}),
    ("filter", {"response": "identity", "noise": {"kernel": "min(x,y)"}}),
    ("farfima", {"d": 0.1, "noise": {"kernel": "min(x,y)"}}),
    ("kernel", {"kernel": "(min(x,y) - x*y)/(1 - 0.9*cos(omega))"}),
])
def test_spec_files_simulate_end_to_end(tmp_path, kind, extra):
    path = write_spec(tmp_path, f"{kind}.json", {"kind": kind, **extra})
    out = tmp_path / kind
    code = main(["simulate", "--spec-file", str(path), "--T", "16", "--M", "5",
                 "--N", "3", "--out", str(out)])
    assert code == 0
    _, rows = read_csv(out / "sample.csv")
    assert len(rows) == 16


def test_spec_file_errors(tmp_path, capsys):
    bad_json = tmp_path / "bad.json"
    bad_json.write_text("{nope")
    assert main(["simulate", "--spec-file", str(bad_json)]) == 2

    unknown_kind = write_spec(tmp_path, "kind.json", {"kind": "magic"})
    assert main(["simulate", "--spec-file", str(unknown_kind)]) == 2

    unknown_key = write_spec(tmp_path, "key.json", {
        "kind": "farfima", "noise": {"kernel": "min(x,y)"}, "frobnicate": 1})
    assert main(["simulate", "--spec-file", str(unknown_key)]) == 2

    missing = tmp_path / "absent.json"
    assert main(["simulate", "--spec-file", str(missing)]) == 2
    capsys.readouterr()


def test_spec_file_with_negative_eigenvalue_fails_at_runtime(tmp_path, capsys):
    path = write_spec(tmp_path, "neg.json", {
        "kind": "eigen", "eigenvalue": "-1", "eigenfunction": "sin(n*pi*x)"})
    code = main(["simulate", "--spec-file", str(path), "--T", "8", "--M", "5",
                 "--N", "2", "--out", str(tmp_path / "out")])
    assert code == 1
    assert "negative" in capsys.readouterr().err


def test_form_suffix_requires_builtin_spec(tmp_path, capsys):
    path = write_spec(tmp_path, "k.json", {"kind": "kernel",
                                           "kernel": "min(x,y) - x*y"})
    code = main(["simulate", "--spec-file", str(path), "--method", "spectral-bm",
                 "--T", "8", "--M", "5", "--N", "2"])
    assert code == 2
    assert "built-in" in capsys.readouterr().err


def test_usage_error_type():
    with pytest.raises(UsageError):
        parse_manifest(["simulate", "--spec", "example1", "--T", "7"])
