"""Batch front end: JSON-configured runs emitting CSV tables and JSON summaries.

Commands:
    correlate   correlation curve E(0, delta) over a grid of differences
    chsh        one CHSH statistic, or its maximum over a setting grid
    verify      the derivation-chain check suite, as a JSON report
    oscillator  coupled-oscillator trajectory, spectrum and exchange period

Every command reads a JSON config (unknown keys are rejected), takes a few
overriding flags, writes its outputs under --out and is byte-deterministic
for a fixed config and seed. Exit codes: 0 success, 1 a check or tolerance
failed, 2 configuration error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

from . import hvmodels, oscillator, verifier
from .estimator import (
    ChshQuadruple,
    chsh,
    lhv_correlation,
    mc_correlation,
    maximize_chsh,
    qm_correlation,
    scan_correlation,
)
from .hvmodels import make_conditional_malus, make_factorized_sign, random_atomized
from .quantum import make_parallel, make_singlet

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2

MODEL_NAMES = (
    "qm-singlet",
    "qm-parallel",
    "factorized-sign",
    "conditional-malus",
    "atomized",
)

DEFAULT_CHECKS = (
    "bounds",
    "zero-identity",
    "bounding-step",
    "bell-bound",
    "cross-terms",
    "degenerate",
    "sampling-gap",
)


class ConfigError(Exception):
    """Invalid or inconsistent run configuration."""


# --------------------------------------------------------------------------
# config plumbing

def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    return cfg


def _reject_unknown(cfg: dict, allowed: set[str], where: str) -> None:
    unknown = sorted(set(cfg) - allowed)
    if unknown:
        raise ConfigError(f"unknown {where} keys: {', '.join(unknown)}")


def _angle_scale(cfg: dict, needed: bool) -> float:
    units = cfg.get("units")
    if units is None:
        if needed:
            raise ConfigError(
                'angles present: the config must state "units": "degrees" or "radians"'
            )
        return 1.0
    if units == "degrees":
        return math.pi / 180.0
    if units == "radians":
        return 1.0
    raise ConfigError(f'units must be "degrees" or "radians", got {units!r}')


def _num(cfg: dict, key: str, kind=float, required=False, default=None):
    if key not in cfg:
        if required:
            raise ConfigError(f"missing required config key {key!r}")
        return default
    try:
        value = kind(cfg[key])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"config key {key!r} is not a valid {kind.__name__}") from exc
    return value


def _parse_deltas(spec, scale: float) -> list[float]:
    if isinstance(spec, list):
        if not spec:
            raise ConfigError("deltas list must not be empty")
        return [float(x) * scale for x in spec]
    if isinstance(spec, dict):
        _reject_unknown(spec, {"start", "stop", "step", "count"}, "deltas")
        start = float(spec.get("start", 0.0))
        if "stop" not in spec:
            raise ConfigError("deltas needs a stop value")
        stop = float(spec["stop"])
        if "step" in spec and "count" in spec:
            raise ConfigError("give deltas either a step or a count, not both")
        if "step" in spec:
            step = float(spec["step"])
            if step <= 0:
                raise ConfigError("deltas step must be positive")
            n = int(math.floor((stop - start) / step + 1e-9)) + 1
        elif "count" in spec:
            n = int(spec["count"])
            if n < 1:
                raise ConfigError("deltas count must be positive")
            step = (stop - start) / (n - 1) if n > 1 else 0.0
        else:
            raise ConfigError("deltas needs a step or a count")
        return [(start + i * step) * scale for i in range(n)]
    raise ConfigError("deltas must be a list or an object")


def _parse_quadruple(spec, scale: float) -> ChshQuadruple:
    if not isinstance(spec, dict):
        raise ConfigError("quadruple must be an object with a, a_prime, b, b_prime")
    _reject_unknown(spec, {"a", "a_prime", "b", "b_prime"}, "quadruple")
    try:
        return ChshQuadruple(
            float(spec["a"]) * scale,
            float(spec["a_prime"]) * scale,
            float(spec["b"]) * scale,
            float(spec["b_prime"]) * scale,
        )
    except KeyError as exc:
        raise ConfigError(f"quadruple is missing {exc.args[0]!r}") from None


def _build_model(cfg: dict, scale: float):
    name = cfg.get("model")
    if name not in MODEL_NAMES:
        raise ConfigError(
            f"model must be one of {', '.join(MODEL_NAMES)}, got {name!r}"
        )
    params = cfg.get("model_params", {})
    if not isinstance(params, dict):
        raise ConfigError("model_params must be an object")
    if name == "qm-singlet":
        _reject_unknown(params, set(), "model_params")
        return name, make_singlet()
    if name == "qm-parallel":
        _reject_unknown(params, set(), "model_params")
        return name, make_parallel()
    if name == "factorized-sign":
        _reject_unknown(params, {"offset"}, "model_params")
        return name, make_factorized_sign(float(params.get("offset", 0.0)) * scale)
    if name == "conditional-malus":
        _reject_unknown(params, set(), "model_params")
        return name, make_conditional_malus()
    _reject_unknown(params, {"n_atoms", "table_seed"}, "model_params")
    try:
        n_atoms = int(params["n_atoms"])
        table_seed = int(params["table_seed"])
    except KeyError as exc:
        raise ConfigError(
            f"atomized model needs model_params.{exc.args[0]}"
        ) from None
    return name, random_atomized(n_atoms, table_seed)


def _resolve_method(cfg: dict, seed) -> str:
    method = cfg.get("method")
    if method is None:
        method = "montecarlo" if "trials" in cfg else "analytic"
    if method not in ("analytic", "montecarlo"):
        raise ConfigError(f'method must be "analytic" or "montecarlo", got {method!r}')
    if method == "analytic" and "trials" in cfg:
        raise ConfigError("trials only applies to the montecarlo method")
    if method == "montecarlo":
        if _num(cfg, "trials", int, default=0) < 1:
            raise ConfigError("montecarlo runs need a positive trials count")
        if seed is None:
            raise ConfigError("montecarlo runs need a seed (config key or --seed)")
    return method


def _correlation_provider(cfg, model_name, model, method, seed, workers):
    points = _num(cfg, "quadrature_points", int,
                  default=hvmodels.DEFAULT_QUADRATURE_POINTS)
    if method == "analytic":
        if model_name.startswith("qm-"):
            return qm_correlation(model), None  # exact, no quadrature involved
        return lhv_correlation(model, points=points), points
    trials = _num(cfg, "trials", int, required=True)
    partitions = _num(cfg, "partitions", int, default=1)
    if partitions < 1:
        raise ConfigError("partitions must be at least 1")
    return mc_correlation(model, trials, seed, partitions, workers), points


# --------------------------------------------------------------------------
# deterministic emission

def _fmt_float(x) -> str:
    if x is None:
        return ""
    return repr(float(x))


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt_float(x) if isinstance(x, (float, type(None)))
                             else str(x) for x in row])


def _write_json(path: Path, obj: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


# --------------------------------------------------------------------------
# commands

CORRELATE_KEYS = {
    "model", "model_params", "units", "deltas", "method", "trials", "seed",
    "partitions", "quadrature_points",
}


def cmd_correlate(args) -> int:
    cfg = _load_config(args.config)
    _reject_unknown(cfg, CORRELATE_KEYS, "correlate")
    scale = _angle_scale(cfg, needed=True)
    if "deltas" not in cfg:
        raise ConfigError("correlate needs a deltas grid")
    deltas = _parse_deltas(cfg["deltas"], scale)
    model_name, model = _build_model(cfg, scale)
    seed = args.seed if args.seed is not None else _num(cfg, "seed", int)
    method = _resolve_method(cfg, seed)
    provider, points = _correlation_provider(
        cfg, model_name, model, method, seed, args.workers
    )
    rows = scan_correlation(provider, deltas)
    out = _out_dir(args)
    files = {}
    if args.format == "csv":
        csv_path = out / "correlate.csv"
        _write_csv(
            csv_path,
            ["delta_rad", "E", "stderr"],
            [(r.delta, r.value, r.stderr) for r in rows],
        )
        files["table"] = csv_path.name
    summary = {
        "command": "correlate",
        "model": model_name,
        "method": method,
        "units": "radians",
        "trials": _num(cfg, "trials", int) if method == "montecarlo" else None,
        "seed": seed if method == "montecarlo" else None,
        "partitions": _num(cfg, "partitions", int, default=1)
        if method == "montecarlo" else None,
        "quadrature_points": points if method == "analytic" else None,
        "results": [
            {"delta_rad": r.delta, "value": r.value, "stderr": r.stderr}
            for r in rows
        ],
        "files": files,
    }
    _write_json(out / "correlate.json", summary)
    print(f"correlate: model={model_name} method={method} rows={len(rows)} "
          f"-> {out / 'correlate.json'}")
    return EXIT_OK


CHSH_KEYS = {
    "model", "model_params", "units", "quadruple", "maximize", "grid_step",
    "method", "trials", "seed", "partitions", "quadrature_points",
}


def cmd_chsh(args) -> int:
    cfg = _load_config(args.config)
    _reject_unknown(cfg, CHSH_KEYS, "chsh")
    maximize = bool(cfg.get("maximize", False))
    has_quadruple = "quadruple" in cfg
    if maximize == has_quadruple:
        raise ConfigError('chsh needs exactly one of "quadruple" or "maximize": true')
    scale = _angle_scale(cfg, needed=has_quadruple or "grid_step" in cfg)
    model_name, model = _build_model(cfg, scale)
    seed = args.seed if args.seed is not None else _num(cfg, "seed", int)
    method = _resolve_method(cfg, seed)
    provider, points = _correlation_provider(
        cfg, model_name, model, method, seed, args.workers
    )
    grid_step = None
    if maximize:
        grid_step = (
            float(cfg["grid_step"]) * scale if "grid_step" in cfg else math.pi / 8.0
        )
        try:
            found = maximize_chsh(provider, grid_step)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        quadruple = found.quadruple
    else:
        quadruple = _parse_quadruple(cfg["quadruple"], scale)
    result = chsh(provider, quadruple)
    out = _out_dir(args)
    summary = {
        "command": "chsh",
        "model": model_name,
        "method": method,
        "units": "radians",
        "maximize": maximize,
        "grid_step": grid_step,
        "quadruple": {
            "a": quadruple.a,
            "a_prime": quadruple.a_prime,
            "b": quadruple.b,
            "b_prime": quadruple.b_prime,
        },
        "correlations": result.correlations,
        "abs_form": result.abs_form,
        "signed_form": result.signed_form,
        "combined_stderr": result.combined_stderr,
        "pair_stderrs": result.pair_stderrs,
        "trials": _num(cfg, "trials", int) if method == "montecarlo" else None,
        "seed": seed if method == "montecarlo" else None,
        "partitions": _num(cfg, "partitions", int, default=1)
        if method == "montecarlo" else None,
        "quadrature_points": points if method == "analytic" else None,
    }
    _write_json(out / "chsh.json", summary)
    print(f"chsh: model={model_name} abs_form={result.abs_form:.6f} "
          f"signed_form={result.signed_form:.6f} -> {out / 'chsh.json'}")
    return EXIT_OK


VERIFY_KEYS = {
    "checks", "seed", "units", "quadrature_points", "random_inputs",
    "random_quadruples", "atom_counts", "trials_per_pair", "grid_step",
}


def cmd_verify(args) -> int:
    cfg = _load_config(args.config)
    _reject_unknown(cfg, VERIFY_KEYS, "verify")
    checks = cfg.get("checks", list(DEFAULT_CHECKS))
    if not isinstance(checks, list) or not checks:
        raise ConfigError("checks must be a non-empty list of check names")
    unknown = sorted(set(checks) - set(DEFAULT_CHECKS))
    if unknown:
        raise ConfigError(f"unknown checks: {', '.join(unknown)}")
    seed = args.seed if args.seed is not None else _num(cfg, "seed", int)
    if seed is None:
        raise ConfigError("verify draws random inputs and needs a seed")
    scale = _angle_scale(cfg, needed="grid_step" in cfg)
    points = _num(cfg, "quadrature_points", int,
                  default=hvmodels.DEFAULT_QUADRATURE_POINTS)
    random_inputs = _num(cfg, "random_inputs", int, default=100_000)
    random_quadruples = _num(cfg, "random_quadruples", int, default=200)
    trials_per_pair = _num(cfg, "trials_per_pair", int, default=10_000)
    grid_step = float(cfg["grid_step"]) * scale if "grid_step" in cfg else math.pi / 8
    atom_counts = cfg.get("atom_counts", [2, 5, 50])
    if not isinstance(atom_counts, list) or not all(
        isinstance(x, int) and x >= 1 for x in atom_counts
    ):
        raise ConfigError("atom_counts must be a list of positive integers")

    sign_model = make_factorized_sign()
    records: list[verifier.CheckRecord] = []
    for name in checks:
        if name == "bounds":
            settings = [i * math.pi / 12 for i in range(12)]
            records.append(
                verifier.check_bounds(sign_model, settings, hvmodels.midpoint_grid(128))
            )
        elif name == "zero-identity":
            records.append(verifier.zero_identity_sweep(random_inputs, seed))
        elif name == "bounding-step":
            records.append(
                verifier.abs_bound_step_sweep(
                    sign_model, random_quadruples, seed, points
                )
            )
        elif name == "bell-bound":
            records.append(
                verifier.check_bell_inequality(sign_model, grid_step, points)
            )
        elif name == "cross-terms":
            for n_atoms in atom_counts:
                model = random_atomized(n_atoms, seed)
                records.append(verifier.cross_terms_report(model))
        elif name == "degenerate":
            quadruples = verifier.quadruple_grid(grid_step)
            for n_atoms in atom_counts:
                model = random_atomized(n_atoms, seed)
                records.append(
                    verifier.check_degenerate_inequality(model, quadruples)
                )
        elif name == "sampling-gap":
            records.append(verifier.check_sampling_gap(trials_per_pair, seed))
    all_pass = all(r.passed for r in records)
    out = _out_dir(args)
    _write_json(
        out / "verify.json",
        {
            "command": "verify",
            "seed": seed,
            "all_pass": all_pass,
            "checks": [r.to_json() for r in records],
        },
    )
    for r in records:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status} {r.check}: value={r.value:.6g} bound={r.bound:.6g}")
    print(f"verify: {'all checks passed' if all_pass else 'CHECKS FAILED'} "
          f"-> {out / 'verify.json'}")
    return EXIT_OK if all_pass else EXIT_CHECK_FAILED


OSCILLATOR_KEYS = {
    "mass", "omega", "kappa", "h", "initial", "dt", "steps", "sample_every",
    "levels", "drift_tolerance",
}


def cmd_oscillator(args) -> int:
    cfg = _load_config(args.config)
    _reject_unknown(cfg, OSCILLATOR_KEYS, "oscillator")
    initial_cfg = cfg.get("initial", {})
    if not isinstance(initial_cfg, dict):
        raise ConfigError("initial must be an object")
    _reject_unknown(initial_cfg, {"q1", "q2", "p1", "p2"}, "initial")
    try:
        params = oscillator.OscillatorParams(
            m=_num(cfg, "mass", float, default=1.0),
            omega=_num(cfg, "omega", float, default=1.0),
            kappa=_num(cfg, "kappa", float, default=0.0),
            h=_num(cfg, "h", float, default=1.0),
        )
        initial = oscillator.PhaseState(
            q1=float(initial_cfg.get("q1", 0.0)),
            q2=float(initial_cfg.get("q2", 0.0)),
            p1=float(initial_cfg.get("p1", 0.0)),
            p2=float(initial_cfg.get("p2", 0.0)),
        )
        dt = _num(cfg, "dt", float, default=0.01)
        steps = _num(cfg, "steps", int, default=20_000)
        traj = oscillator.integrate_classical(params, initial, dt, steps)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    sample_every = _num(cfg, "sample_every", int, default=1)
    if sample_every < 1:
        raise ConfigError("sample_every must be at least 1")
    n_levels = _num(cfg, "levels", int, default=3)
    if n_levels < 1:
        raise ConfigError("levels must be at least 1")
    drift_tol = _num(cfg, "drift_tolerance", float, default=1e-6)
    w1, w2 = oscillator.normal_frequencies(params)
    predicted = 2.0 * math.pi / abs(w1 - w2) if w1 != w2 else None
    measured = oscillator.estimate_exchange_period(traj)
    rel_error = (
        abs(measured - predicted) / predicted
        if (measured is not None and predicted is not None)
        else None
    )
    drift = traj.energy_drift
    out = _out_dir(args)
    files = {}
    sl = slice(None, None, sample_every)
    table = list(zip(
        traj.t[sl], traj.q1[sl], traj.q2[sl], traj.p1[sl], traj.p2[sl],
        traj.e1[sl], traj.e2[sl], traj.e_total[sl],
    ))
    if args.format == "csv":
        csv_path = out / "oscillator.csv"
        _write_csv(
            csv_path,
            ["t", "q1", "q2", "p1", "p2", "E1", "E2", "Etotal"],
            [tuple(float(x) for x in row) for row in table],
        )
        files["trajectory"] = csv_path.name
    summary = {
        "command": "oscillator",
        "params": {"m": params.m, "omega": params.omega,
                   "kappa": params.kappa, "h": params.h},
        "normal_frequencies": [w1, w2],
        "levels": [
            {"n1": lv.n1, "n2": lv.n2, "energy": lv.energy}
            for lv in oscillator.spectrum(params, n_levels)
        ],
        "dt": dt,
        "steps": steps,
        "energy_drift": drift,
        "energy_span": traj.energy_span,
        "drift_tolerance": drift_tol,
        "drift_pass": drift <= drift_tol,
        "exchange_period_predicted": predicted,
        "exchange_period_measured": measured,
        "exchange_period_rel_error": rel_error,
        "files": files,
    }
    _write_json(out / "oscillator.json", summary)
    print(f"oscillator: w1'={w1:.6f} w2'={w2:.6f} drift={drift:.3g} "
          f"-> {out / 'oscillator.json'}")
    if drift > drift_tol:
        print(f"oscillator: energy drift {drift:.3g} exceeds tolerance {drift_tol:.3g}",
              file=sys.stderr)
        return EXIT_CHECK_FAILED
    return EXIT_OK


# --------------------------------------------------------------------------
# entry point

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="belllab",
        description="EPR/Bell-test simulation laboratory",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    specs = (
        ("correlate", cmd_correlate, True,
         "correlation curve over a grid of setting differences"),
        ("chsh", cmd_chsh, True, "one CHSH statistic or its grid maximum"),
        ("verify", cmd_verify, False, "run the derivation-chain check suite"),
        ("oscillator", cmd_oscillator, False,
         "coupled-oscillator trajectory and spectrum"),
    )
    for name, fn, config_required, help_text in specs:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=config_required,
                       help="path to the JSON run configuration")
        p.add_argument("--seed", type=int, default=None,
                       help="override the config seed")
        p.add_argument("--out", default="out",
                       help="output directory (default: ./out)")
        p.add_argument("--format", choices=("csv", "json"), default="csv",
                       help="table output format (JSON summaries are always written)")
        p.add_argument("--workers", type=int, default=1,
                       help="worker threads for partition evaluation; "
                            "never affects results")
        p.set_defaults(handler=fn)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.workers < 1:
        print("error: --workers must be at least 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return args.handler(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
