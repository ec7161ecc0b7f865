"""Command-line front end.

    burrce fit DATA.csv [--method ce|nr|em] [--seed S] [--format json|text]
    burrce sample --c C --k K --n N [--cl CL] [--seed S] [--out FILE]
    burrce benchmark SPEC.json [--out FILE] [--jobs J] [--format csv|json] [--timing]

Data files are CSV with a ``value`` column and an optional ``status``
column (1 = exact failure, 0 = right-censored). When ``--seed`` is absent
the seed is read from ``$BURRCE_SEED``, falling back to 0.

Exit status: 0 success, 1 input or configuration error, 2 the fit did not
converge.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import warnings
from dataclasses import fields, replace
from importlib import resources

import numpy as np

from .baselines import EmConfig, NrConfig, em_fit, nr_fit
from .ce import CeConfig, check_wingo, fit_mle
from .dist import BurrParams, cdf, sample
from .errors import BurrError, NoRoot, SpecError, WingoWarning
from .gof import ks_pvalue, ks_statistic
from .likelihood import Observations
from .simulation import emit_report, generate_censored, load_spec, run_benchmark

SEED_ENV = "BURRCE_SEED"

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NOT_CONVERGED = 2


class InputError(Exception):
    pass


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get(SEED_ENV)
    if env is None or env == "":
        return 0
    try:
        return int(env)
    except ValueError:
        raise InputError(f"{SEED_ENV}={env!r} is not an integer") from None


def read_data(text: str, require_status: bool = False) -> Observations:
    rows = list(csv.reader(io.StringIO(text)))
    while rows and not any(cell.strip() for cell in rows[-1]):
        rows.pop()
    if not rows:
        raise InputError("no observations")
    header = [h.strip().lower() for h in rows[0]]
    if header not in (["value"], ["value", "status"]):
        raise InputError("line 1: header must be 'value' or 'value,status'")
    has_status = len(header) == 2
    if require_status and not has_status:
        raise InputError("line 1: --censored requires a status column")
    values, exact = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if not any(cell.strip() for cell in row):
            continue
        if len(row) != len(header):
            raise InputError(f"line {lineno}: expected {len(header)} fields, got {len(row)}")
        try:
            v = float(row[0])
        except ValueError:
            raise InputError(f"line {lineno}: value {row[0]!r} is not a number") from None
        if not math.isfinite(v) or v <= 0:
            raise InputError(f"line {lineno}: value must be positive and finite, got {row[0].strip()}")
        status = 1
        if has_status:
            s = row[1].strip()
            if s not in ("0", "1"):
                raise InputError(f"line {lineno}: status must be 0 or 1, got {s!r}")
            status = int(s)
        values.append(v)
        exact.append(status == 1)
    if not values:
        raise InputError("no observations")
    return Observations(np.array(values), np.array(exact))


def write_data(obs: Observations) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["value", "status"])
    for v, e in zip(obs.values, obs.exact):
        w.writerow([repr(float(v)), 1 if e else 0])
    return buf.getvalue()


def _override(cfg, args, mapping):
    changes = {name: getattr(args, dest) for dest, name in mapping.items() if getattr(args, dest, None) is not None}
    return replace(cfg, **changes) if changes else cfg


_CE_FLAGS = {
    "population": "population",
    "elite_fraction": "elite_fraction",
    "mean_smoothing": "mean_smoothing",
    "std_smoothing": "std_smoothing",
    "stop_threshold": "stop_threshold",
    "init_mean": "init_mean",
    "init_std": "init_std",
    "max_iterations": "max_iterations",
}
_NR_FLAGS = {"nr_tol": "tol", "nr_max_iter": "max_iter", "c_init": "c_init"}
_EM_FLAGS = {"mc_samples": "mc_samples", "em_tol": "tol", "em_max_iter": "max_iter"}


def _configs(args):
    doc = {}
    if args.config:
        try:
            with open(args.config) as fh:
                doc = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read config {args.config}: {exc}") from None
        unknown = set(doc) - {"ce", "nr", "em"}
        if unknown:
            raise InputError(f"config: unknown sections {sorted(unknown)}")
    out = []
    for key, cls, flags in (("ce", CeConfig, _CE_FLAGS), ("nr", NrConfig, _NR_FLAGS), ("em", EmConfig, _EM_FLAGS)):
        section = doc.get(key) or {}
        valid = {f.name for f in fields(cls)}
        bad = set(section) - valid
        if bad:
            raise InputError(f"config /{key}: unknown keys {sorted(bad)}")
        cfg = _override(cls.from_dict(section), args, flags)
        if key == "nr" and args.fix_c:
            cfg = replace(cfg, fix_c=True)
        out.append(cfg)
    return out


def _format_text(report: dict) -> str:
    lines = [
        f"method      {report['method']}",
        f"c           {report['c']:.6g}",
        f"k           {report['k']:.6g}",
        f"loglik      {report['loglik']:.10g}",
        f"iterations  {report['iterations']}",
        f"converged   {str(report['converged']).lower()}",
        f"seconds     {report['seconds']:.4g}",
        f"n / r       {report['n']} / {report['r']}",
        f"ks_D        {report['ks']['statistic']:.6g}",
        f"ks_p        {report['ks']['p_value']:.6g}  ({report['ks']['note']})",
    ]
    if report["warnings"]:
        lines += [f"warning     {w}" for w in report["warnings"]]
    return "\n".join(lines) + "\n"


def cmd_fit(args) -> int:
    try:
        with open(args.input) as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {args.input}: {exc.strerror}") from None
    obs = read_data(text, require_status=args.censored)
    ce_cfg, nr_cfg, em_cfg = _configs(args)
    rng = np.random.default_rng(_seed(args))
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", WingoWarning)
        if args.method == "ce":
            res = fit_mle(obs, ce_cfg, rng)
        elif args.method == "nr":
            check_wingo(obs)
            res = nr_fit(obs, nr_cfg)
        else:
            check_wingo(obs)
            res = em_fit(obs, em_cfg, rng)
    wingo = [str(w.message) for w in caught if issubclass(w.category, WingoWarning)]
    params = BurrParams(res.c, res.k)
    tested = obs.values[obs.exact]
    d = ks_statistic(tested, lambda v: cdf(params, v))
    note = "post-fit, approximate" + ("" if obs.is_complete else "; exact observations only")
    report = {
        "method": res.method,
        "c": res.c,
        "k": res.k,
        "loglik": res.loglik,
        "iterations": res.iterations,
        "converged": bool(res.converged),
        "seconds": res.seconds,
        "n": obs.n,
        "r": obs.r,
        "wingo_condition": not wingo,
        "warnings": wingo,
        "ks": {"statistic": d, "p_value": ks_pvalue(d, tested.size), "n": int(tested.size), "note": note},
    }
    if args.format == "json":
        sys.stdout.write(json.dumps(report, indent=2) + "\n")
    else:
        sys.stdout.write(_format_text(report))
    return EXIT_OK if res.converged else EXIT_NOT_CONVERGED


def cmd_sample(args) -> int:
    try:
        params = BurrParams(args.c, args.k)
    except BurrError as exc:
        raise InputError(str(exc)) from None
    if args.n < 1:
        raise InputError("--n must be >= 1")
    if not 0.0 <= args.cl < 1.0:
        raise InputError("--cl must lie in [0, 1)")
    rng = np.random.default_rng(_seed(args))
    if args.cl == 0.0:
        obs = Observations.complete(sample(params, args.n, rng))
    else:
        obs = generate_censored(params, args.n, args.cl, rng)
    _write_out(write_data(obs), args.out)
    return EXIT_OK


def _write_out(text: str, path: str | None):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def _load_spec_doc(path: str) -> dict:
    if not os.path.exists(path):
        bundled = resources.files("burrce").joinpath("data", os.path.basename(path))
        if bundled.is_file():
            return json.loads(bundled.read_text())
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from None


def cmd_benchmark(args) -> int:
    doc = _load_spec_doc(args.spec)
    try:
        spec = load_spec(doc)
    except SpecError as exc:
        raise InputError(f"spec {exc.pointer or '/'}: {exc.message}") from None
    if args.jobs < 1:
        raise InputError("--jobs must be >= 1")
    report = run_benchmark(spec, jobs=args.jobs)
    _write_out(emit_report(report, args.format, timing=args.timing), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="burrce", description="Burr XII estimation by the cross-entropy method")
    sub = p.add_subparsers(dest="command", required=True)

    f = sub.add_parser("fit", help="fit Burr XII to a data file")
    f.add_argument("input")
    f.add_argument("--method", choices=["ce", "nr", "em"], default="ce")
    f.add_argument("--censored", action="store_true", help="require a status column")
    f.add_argument("--seed", type=int)
    f.add_argument("--format", choices=["json", "text"], default="text")
    f.add_argument("--config", help="JSON document with optional 'ce', 'nr', 'em' sections")
    g = f.add_argument_group("CE overrides")
    g.add_argument("--population", type=int)
    g.add_argument("--elite-fraction", type=float)
    g.add_argument("--mean-smoothing", type=float)
    g.add_argument("--std-smoothing", type=float)
    g.add_argument("--stop-threshold", type=float)
    g.add_argument("--init-mean", type=float)
    g.add_argument("--init-std", type=float)
    g.add_argument("--max-iterations", type=int)
    g = f.add_argument_group("NR overrides")
    g.add_argument("--nr-tol", type=float)
    g.add_argument("--nr-max-iter", type=int)
    g.add_argument("--c-init", type=float)
    g.add_argument("--fix-c", action="store_true", help="hold c at --c-init and only profile k")
    g = f.add_argument_group("EM overrides")
    g.add_argument("--mc-samples", type=int)
    g.add_argument("--em-tol", type=float)
    g.add_argument("--em-max-iter", type=int)
    f.set_defaults(func=cmd_fit)

    s = sub.add_parser("sample", help="write synthetic (optionally censored) data")
    s.add_argument("--c", type=float, required=True)
    s.add_argument("--k", type=float, required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--cl", type=float, default=0.0)
    s.add_argument("--seed", type=int)
    s.add_argument("--out")
    s.set_defaults(func=cmd_sample)

    b = sub.add_parser("benchmark", help="run a Monte Carlo benchmark spec")
    b.add_argument("spec", help="spec JSON path, or the name of a bundled spec such as table1_desk.json")
    b.add_argument("--out")
    b.add_argument("--jobs", type=int, default=1)
    b.add_argument("--format", choices=["csv", "json"], default="csv")
    b.add_argument("--timing", action="store_true", help="fill mean_seconds (output is then not reproducible)")
    b.set_defaults(func=cmd_benchmark)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NoRoot as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    except BurrError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
