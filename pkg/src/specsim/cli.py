"""Command line front end.

Commands: simulate (write one sample), validate (Monte-Carlo accuracy table
against the finite-T covariance target), bench (wall-clock scaling table),
demo (preset accuracy studies on the built-in specs).  Artifacts are CSV and
JSON files that reproduce byte-for-byte from the same manifest.

    specsim simulate --spec example1 --T 128 --M 51 --N 50 --seed 7 --out run1
    specsim validate --spec example2 --method hybrid-bm --I 200 --lags 0,1,5
    specsim bench --spec example2 --method temporal --T 400,800
    specsim demo --spec example3 --I 100 --out demo3

Flag values override config-file values (--config, JSON with the same keys);
unknown config keys are rejected.  Exit codes: 0 success, 1 runtime error,
2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .exprs import compile_expression
from .grid import make_grid
from .simulate_spectral import METHODS, SimConfig, default_method, simulate
from .spectra import (
    ClosedFormKernel,
    EigenSpec,
    FarfimaSpec,
    FilterSpec,
    IdentityResponse,
    KernelSpec,
    LowRankSum,
    MercerSeries,
    RankOneKernel,
    RankOneResponse,
    ScaledKernelResponse,
    brownian_motion_covariance,
    builtin_specs,
    finite_T_target_covariances,
    long_memory_far_spec,
    shifted_sine_kernel_spec,
    shifted_sine_spec,
    smooth_farma_spec,
    true_autocovariances,
    white_noise_spec,
)
from .validate import relative_errors, replicate_autocovariances, run_benchmark

__all__ = ["RunManifest", "parse_manifest", "run", "main"]


class UsageError(Exception):
    """Bad flags or malformed run/spec files; maps to exit code 2."""


@dataclass(frozen=True)
class RunManifest:
    command: str
    spec: str | None
    spec_file: str | None
    T: tuple[int, ...]
    M: int
    N: int
    seed: int
    replicates: int
    lags: tuple[int, ...]
    method: str | None
    oversample: int
    burnin: int | None
    out: str


_CONFIG_KEYS = ("spec", "spec_file", "T", "M", "N", "seed", "I", "lags",
                "method", "oversample", "burnin", "out")
_DEFAULTS = {"T": (128,), "M": 51, "N": 50, "seed": 0, "I": 100,
             "lags": (0, 1, 2, 3, 5, 10), "method": None, "oversample": 1,
             "burnin": None, "out": "."}
_BENCH_DEFAULT_T = (400, 800)


def _int_list(text, flag: str) -> tuple[int, ...]:
    if isinstance(text, int):
        return (text,)
    if isinstance(text, (list, tuple)):
        items = list(text)
    else:
        items = str(text).split(",")
    try:
        return tuple(int(v) for v in items)
    except (TypeError, ValueError):
        raise UsageError(f"{flag} expects comma-separated integers, got {text!r}") from None


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="specsim",
        description="Simulate functional time series from a spectral density "
                    "and validate them against covariance targets.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, blurb in (
        ("simulate", "simulate one sample and write sample.csv"),
        ("validate", "Monte-Carlo accuracy table, writes accuracy.csv"),
        ("bench", "wall-clock timing table, writes bench.csv"),
        ("demo", "preset accuracy study for a built-in spec"),
    ):
        p = sub.add_parser(name, help=blurb)
        p.add_argument("--config", help="JSON file with the same keys as the flags")
        p.add_argument("--spec", help="built-in spec name")
        p.add_argument("--spec-file", dest="spec_file", help="JSON spec file")
        p.add_argument("--T", help="sample length (bench: comma-separated list)")
        p.add_argument("--M", type=int, help="grid size")
        p.add_argument("--N", type=int, help="series truncation level")
        p.add_argument("--seed", type=int, help="base seed")
        p.add_argument("--I", dest="replicates", type=int, help="replicate count")
        p.add_argument("--lags", help="comma-separated lag list")
        p.add_argument("--method", help="simulation method or alias")
        p.add_argument("--oversample", type=int, help="length multiplier before cutting")
        p.add_argument("--burnin", type=int, help="burn-in for time-domain routes")
        p.add_argument("--out", help="output directory")
    return parser


def parse_manifest(argv) -> RunManifest:
    """Merge flags over an optional config file into a validated manifest."""
    args = _build_parser().parse_args(argv)

    merged = dict(_DEFAULTS)
    if args.command == "bench":
        merged["T"] = _BENCH_DEFAULT_T
    merged.update({"spec": None, "spec_file": None})

    if args.config:
        path = Path(args.config)
        if not path.is_file():
            raise UsageError(f"config file not found: {path}")
        try:
            loaded = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise UsageError(f"config file {path} is not valid JSON: {exc}") from None
        if not isinstance(loaded, dict):
            raise UsageError(f"config file {path} must hold a JSON object")
        unknown = sorted(set(loaded) - set(_CONFIG_KEYS))
        if unknown:
            raise UsageError(f"unknown config keys {unknown}; allowed: {list(_CONFIG_KEYS)}")
        if "I" in loaded:
            loaded["replicates"] = loaded.pop("I")
        merged.update(loaded)

    for key in ("spec", "spec_file", "M", "N", "seed", "replicates", "method",
                "oversample", "burnin", "out"):
        flag = getattr(args, key if key != "replicates" else "replicates")
        if flag is not None:
            merged[key] = flag
    merged.setdefault("replicates", _DEFAULTS["I"] if "I" in _DEFAULTS else 100)
    if args.T is not None:
        merged["T"] = args.T
    if args.lags is not None:
        merged["lags"] = args.lags

    T = _int_list(merged["T"], "--T")
    lags = _int_list(merged["lags"], "--lags")
    manifest = RunManifest(
        command=args.command,
        spec=merged["spec"],
        spec_file=merged["spec_file"],
        T=T,
        M=int(merged["M"]),
        N=int(merged["N"]),
        seed=int(merged["seed"]),
        replicates=int(merged.get("replicates", 100)),
        lags=lags,
        method=merged["method"],
        oversample=int(merged["oversample"]),
        burnin=None if merged["burnin"] is None else int(merged["burnin"]),
        out=str(merged["out"]),
    )
    _validate_manifest(manifest)
    return manifest


def _validate_manifest(m: RunManifest) -> None:
    if m.spec is None and m.spec_file is None:
        raise UsageError("missing spec: pass --spec <name> or --spec-file <path>")
    if m.spec is not None and m.spec_file is not None:
        raise UsageError("--spec and --spec-file are mutually exclusive")
    if m.spec is not None and m.spec not in builtin_specs():
        raise UsageError(f"unknown spec {m.spec!r}; built-ins: {sorted(builtin_specs())}")
    if m.spec_file is not None and not Path(m.spec_file).is_file():
        raise UsageError(f"spec file not found: {m.spec_file}")
    if not m.T:
        raise UsageError("--T must name at least one sample length")
    for t in m.T:
        if t < 2 or t % 2:
            raise UsageError(f"T must be even and >= 2, got {t}")
    if m.command != "bench" and len(m.T) != 1:
        raise UsageError(f"{m.command} needs a single --T value, got {list(m.T)}")
    if m.M < 2:
        raise UsageError(f"M must be >= 2, got {m.M}")
    if m.N < 1:
        raise UsageError(f"N must be >= 1, got {m.N}")
    if not 0 <= m.seed < 2**64:
        raise UsageError(f"seed must be an unsigned 64-bit integer, got {m.seed}")
    if m.replicates < 1:
        raise UsageError(f"I must be >= 1, got {m.replicates}")
    if m.oversample < 1:
        raise UsageError(f"oversample must be >= 1, got {m.oversample}")
    if m.burnin is not None and m.burnin < 0:
        raise UsageError(f"burnin must be >= 0, got {m.burnin}")
    if any(h < 0 for h in m.lags):
        raise UsageError(f"lags must be nonnegative, got {list(m.lags)}")
    if m.command in ("validate", "demo") and max(m.lags) >= min(m.T):
        raise UsageError(f"lags {list(m.lags)} must stay below T = {min(m.T)}")


# ---------------------------------------------------------------------------
# spec and method resolution

_BUILTIN_FORMS = {
    "example2": {"bm": "series", "svd": "kernel"},
    "example3": {"lr": "lowrank", "svd": "kernel"},
    "white-noise": {"bm": "series", "svd": "kernel"},
}


def _split_method(method: str | None) -> tuple[str | None, str | None]:
    """Canonical-or-base method and optional noise-form suffix."""
    if method is None or method in METHODS:
        return method, None
    base, sep, form = method.rpartition("-")
    if method in ("spectral", "hybrid"):
        return method, None
    if sep and base in ("spectral", "hybrid", "temporal") and form in ("bm", "svd", "lr"):
        return base, form
    raise UsageError(
        f"unknown method {method!r}; use one of {METHODS}, spectral, hybrid, "
        "or a form-suffixed alias like spectral-bm, hybrid-svd, spectral-lr")


def _builtin_spec(name: str, form: str | None):
    if form is not None:
        table = _BUILTIN_FORMS.get(name)
        if table is None or form not in table:
            raise UsageError(f"spec {name!r} has no {form!r} noise form")
    if name == "example1":
        return shifted_sine_spec()
    if name == "example1-kernel":
        return shifted_sine_kernel_spec()
    if name == "example2":
        return long_memory_far_spec(_BUILTIN_FORMS["example2"].get(form, "series"))
    if name == "example3":
        return smooth_farma_spec(_BUILTIN_FORMS["example3"].get(form, "lowrank"))
    if name == "white-noise":
        if form == "svd":
            return FarfimaSpec(ar=(), d=0.0, ma=(), noise=brownian_motion_covariance("kernel"))
        return white_noise_spec()
    raise UsageError(f"unknown spec {name!r}")


def resolve_spec(manifest: RunManifest):
    """(spec object, canonical method or None, method label) for a manifest."""
    base, form = _split_method(manifest.method)
    if manifest.spec_file is not None:
        if form is not None:
            raise UsageError("noise-form method suffixes only apply to built-in specs")
        spec = load_spec_file(manifest.spec_file)
    else:
        spec = _builtin_spec(manifest.spec, form)
    if base is None:
        method = None
    elif base == "spectral":
        method = default_method(spec)
    elif base == "hybrid":
        method = "farfima-hybrid"
    else:
        method = base
    label = manifest.method if manifest.method is not None else default_method(spec)
    return spec, method, label


# ---------------------------------------------------------------------------
# JSON spec files

def _reject_unknown(obj: dict, allowed: tuple[str, ...], where: str) -> None:
    unknown = sorted(set(obj) - set(allowed))
    if unknown:
        raise UsageError(f"unknown keys {unknown} in {where}; allowed: {list(allowed)}")


def _noise_from_json(obj, where: str):
    if not isinstance(obj, dict):
        raise UsageError(f"{where} must be a JSON object")
    if "kernel" in obj:
        _reject_unknown(obj, ("kernel",), where)
        fn = compile_expression(obj["kernel"], ("x", "y"))
        return ClosedFormKernel(fn)
    if "coefficients" in obj or "functions" in obj:
        _reject_unknown(obj, ("coefficients", "functions"), where)
        coeffs = obj.get("coefficients", ())
        exprs = obj.get("functions", ())
        if len(coeffs) != len(exprs):
            raise UsageError(f"{where}: coefficients and functions must pair up")
        fns = tuple(compile_expression(e, ("x",)) for e in exprs)
        return LowRankSum(tuple(float(c) for c in coeffs), fns)
    if "eigenvalue" in obj or "function" in obj:
        _reject_unknown(obj, ("eigenvalue", "function", "n_max"), where)
        lam = compile_expression(obj["eigenvalue"], ("n",))
        fn = compile_expression(obj["function"], ("n", "x"))
        n_max = obj.get("n_max")
        return MercerSeries(eigenvalue=lambda n: float(lam(n)), function=fn,
                            n_max=None if n_max is None else int(n_max))
    raise UsageError(
        f"{where} needs 'kernel', 'coefficients'+'functions', or 'eigenvalue'+'function'")


def _operator_from_json(obj, where: str):
    if isinstance(obj, str):
        return compile_expression(obj, ("x", "y"))
    if isinstance(obj, dict) and "c" in obj and "g" in obj:
        _reject_unknown(obj, ("c", "g"), where)
        return RankOneKernel(float(obj["c"]), compile_expression(obj["g"], ("x",)))
    raise UsageError(f"{where} must be a kernel formula string or {{'c':, 'g':}}")


def _response_from_json(obj, where: str):
    if obj == "identity":
        return IdentityResponse()
    if not isinstance(obj, dict) or "scale" not in obj:
        raise UsageError(f"{where} must be 'identity' or an object with 'scale'")
    scale = compile_expression(obj["scale"], ("omega",))
    if "g" in obj:
        _reject_unknown(obj, ("scale", "g"), where)
        return RankOneResponse(scale=lambda w: complex(scale(w)),
                               g=compile_expression(obj["g"], ("x",)))
    if "kernel" in obj:
        _reject_unknown(obj, ("scale", "kernel"), where)
        return ScaledKernelResponse(scale=lambda w: complex(scale(w)),
                                    kernel=compile_expression(obj["kernel"], ("x", "y")))
    raise UsageError(f"{where} needs 'g' or 'kernel' next to 'scale'")


def load_spec_file(path: str):
    """Build a spectral density spec from a JSON file with a 'kind' field."""
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"spec file not found: {p}")
    try:
        obj = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise UsageError(f"spec file {p} is not valid JSON: {exc}") from None
    if not isinstance(obj, dict) or "kind" not in obj:
        raise UsageError(f"spec file {p} must be a JSON object with a 'kind' field")
    kind = obj["kind"]
    try:
        if kind == "eigen":
            _reject_unknown(obj, ("kind", "eigenvalue", "eigenfunction", "n_max"), str(p))
            lam = compile_expression(obj["eigenvalue"], ("n", "omega"))
            phi = compile_expression(obj["eigenfunction"], ("n", "omega", "x"))
            n_max = obj.get("n_max")
            return EigenSpec(eigenvalue=lambda n, w: float(lam(n, w)), eigenfunction=phi,
                             n_max=None if n_max is None else int(n_max))
        if kind == "filter":
            _reject_unknown(obj, ("kind", "response", "noise"), str(p))
            return FilterSpec(response=_response_from_json(obj.get("response"), "response"),
                              noise=_noise_from_json(obj.get("noise"), "noise"))
        if kind == "farfima":
            _reject_unknown(obj, ("kind", "ar", "d", "ma", "noise"), str(p))
            ar = tuple(_operator_from_json(e, f"ar[{i}]") for i, e in enumerate(obj.get("ar", ())))
            ma = tuple(_operator_from_json(e, f"ma[{i}]") for i, e in enumerate(obj.get("ma", ())))
            return FarfimaSpec(ar=ar, d=float(obj.get("d", 0.0)), ma=ma,
                               noise=_noise_from_json(obj.get("noise"), "noise"))
        if kind == "kernel":
            _reject_unknown(obj, ("kind", "kernel"), str(p))
            return KernelSpec(compile_expression(obj["kernel"], ("omega", "x", "y")))
    except KeyError as exc:
        raise UsageError(f"spec file {p} is missing required key {exc}") from None
    except ValueError as exc:
        raise UsageError(f"spec file {p}: {exc}") from None
    raise UsageError(f"unknown spec kind {kind!r}; use eigen, filter, farfima, or kernel")


# ---------------------------------------------------------------------------
# artifacts

def _fmt(x) -> str:
    return format(float(x), ".17g")


def _write_lines(path: Path, lines: list[str]) -> None:
    path.write_text("\n".join(lines) + "\n")


def _write_manifest(manifest: RunManifest, label: str, out: Path) -> Path:
    payload = {
        "command": manifest.command,
        "spec": manifest.spec,
        "spec_file": manifest.spec_file,
        "T": list(manifest.T),
        "M": manifest.M,
        "N": manifest.N,
        "seed": manifest.seed,
        "I": manifest.replicates,
        "lags": list(manifest.lags),
        "method": label,
        "oversample": manifest.oversample,
        "burnin": manifest.burnin,
        "out": manifest.out,
    }
    path = out / "manifest.json"
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return path


def _accuracy_rows(spec, manifest: RunManifest, method: str | None, label: str,
                   grid, targets) -> list[str]:
    """Per-lag rel.error rows; errors are normalized by the lag-0 target."""
    config = SimConfig(manifest.T[0], manifest.M, manifest.N, manifest.seed,
                       manifest.oversample, method)
    lags = tuple(sorted(set(manifest.lags) | {0}))
    averaged = replicate_autocovariances(spec, config, lags, manifest.replicates,
                                         grid, burnin=manifest.burnin)
    errors = relative_errors(averaged, targets)
    return [f"{h},{_fmt(errors[h])},{label}" for h in manifest.lags]


def _cmd_simulate(manifest, spec, method, label, out: Path) -> list[Path]:
    config = SimConfig(manifest.T[0], manifest.M, manifest.N, manifest.seed,
                       manifest.oversample, method)
    grid = make_grid(manifest.M)
    sample = simulate(spec, config, grid, burnin=manifest.burnin)
    header = "t," + ",".join(f"x_{_fmt(p)}" for p in grid.points)
    rows = [f"{t + 1}," + ",".join(_fmt(v) for v in row)
            for t, row in enumerate(sample.values)]
    path = out / "sample.csv"
    _write_lines(path, [header] + rows)
    return [path, _write_manifest(manifest, label, out)]


def _cmd_validate(manifest, spec, method, label, out: Path) -> list[Path]:
    grid = make_grid(manifest.M)
    lags = tuple(sorted(set(manifest.lags) | {0}))
    targets = finite_T_target_covariances(spec, lags, grid, manifest.T[0], manifest.N)
    rows = _accuracy_rows(spec, manifest, method, label, grid, targets)
    path = out / "accuracy.csv"
    _write_lines(path, ["h,rel_error,method"] + rows)
    return [path, _write_manifest(manifest, label, out)]


def _cmd_bench(manifest, spec, method, label, out: Path) -> list[Path]:
    configs = [SimConfig(t, manifest.M, manifest.N, manifest.seed, manifest.oversample,
                         method) for t in manifest.T]
    records = run_benchmark(spec, configs, burnin=manifest.burnin)
    rows = [f"{label},{r.T},{r.M},{r.N},{_fmt(r.seconds)}" for r in records]
    path = out / "bench.csv"
    _write_lines(path, ["method,T,M,N,seconds"] + rows)
    return [path, _write_manifest(manifest, label, out)]


_DEMO_METHODS = {
    "example2": ("spectral-bm", "hybrid-bm", "spectral-svd", "hybrid-svd", "temporal"),
    "example3": ("spectral-lr", "hybrid-lr", "spectral-svd", "temporal"),
}


def _cmd_demo(manifest, spec, method, label, out: Path) -> list[Path]:
    """Accuracy study against the true autocovariances: example1 sweeps the
    truncation level, example2 and example3 sweep the simulation methods."""
    if manifest.spec == "example1":
        grid = make_grid(manifest.M)
        targets = true_autocovariances(spec, tuple(sorted(set(manifest.lags) | {0})), grid)
        rows = []
        for n in (1, 3, 10, 50):
            sub = replace(manifest, N=n)
            rows += _accuracy_rows(spec, sub, method, f"ckl[N={n}]", grid, targets)
    elif manifest.spec in _DEMO_METHODS:
        grid = make_grid(manifest.M)
        targets = true_autocovariances(spec, tuple(sorted(set(manifest.lags) | {0})), grid)
        rows = []
        for alias in _DEMO_METHODS[manifest.spec]:
            sub = replace(manifest, method=alias)
            sub_spec, sub_method, sub_label = resolve_spec(sub)
            rows += _accuracy_rows(sub_spec, sub, sub_method, sub_label, grid, targets)
    else:
        raise UsageError("demo supports --spec example1, example2, or example3")
    path = out / "accuracy.csv"
    _write_lines(path, ["h,rel_error,method"] + rows)
    return [path, _write_manifest(manifest, label, out)]


_COMMANDS = {"simulate": _cmd_simulate, "validate": _cmd_validate,
             "bench": _cmd_bench, "demo": _cmd_demo}


def run(manifest: RunManifest) -> int:
    """Execute a manifest and write its artifacts; returns the exit code."""
    spec, method, label = resolve_spec(manifest)
    out = Path(manifest.out)
    out.mkdir(parents=True, exist_ok=True)
    paths = _COMMANDS[manifest.command](manifest, spec, method, label, out)
    for path in paths:
        print(f"wrote {path}")
    return 0


def main(argv=None) -> int:
    try:
        manifest = parse_manifest(sys.argv[1:] if argv is None else argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    try:
        return run(manifest)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - boundary: report and set exit code
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
