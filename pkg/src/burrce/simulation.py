"""Censored-data generation and seeded replication benchmarks.

Replication seeds come from a counter-based mix: the splitmix64 finalizer
is applied to ``master_seed``, then the cell index, then the replication
index is folded in and mixed again (see :func:`replication_seed`). A
replication's outcome therefore depends only on ``(master_seed, cell,
replication)``, never on execution order or the number of worker
processes.

Within a replication one dataset is generated and every requested method
is fitted to that same dataset, each method with its own child stream.
"""
from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .baselines import EmConfig, NrConfig, em_fit, nr_fit
from .ce import CeConfig, fit_mle
from .dist import BurrParams, sample
from .errors import BurrError, DegenerateSpec, DomainError, SpecError, UnsupportedFormat
from .likelihood import Observations

__all__ = [
    "METHODS",
    "CSV_COLUMNS",
    "Cell",
    "BenchmarkSpec",
    "MethodStats",
    "CellReport",
    "BenchmarkReport",
    "exact_count",
    "generate_censored",
    "censor",
    "replication_seed",
    "run_benchmark",
    "emit_report",
    "parse_report_csv",
    "load_spec",
]

METHODS = ("ce", "nr", "em")

CSV_COLUMNS = (
    "method",
    "c_true",
    "k_true",
    "n",
    "CL",
    "replications",
    "c_mean",
    "c_std",
    "c_abs_bias",
    "k_mean",
    "k_std",
    "k_abs_bias",
    "mean_seconds",
    "convergence_rate",
)

_MASK64 = (1 << 64) - 1


def exact_count(n: int, cl: float) -> int:
    return int(round(n * (1.0 - cl)))


def censor(y, u) -> Observations:
    """Turn raw lifetimes into a multiply censored set.

    The first ``len(y) - len(u)`` values are kept as exact failures; the
    remaining ones are multiplied by the factors ``u`` and flagged censored.
    """
    y = np.asarray(y, dtype=float)
    u = np.asarray(u, dtype=float)
    r = y.size - u.size
    x = y.copy()
    x[r:] = y[r:] * u
    exact = np.zeros(y.size, dtype=bool)
    exact[:r] = True
    return Observations(x, exact)


def generate_censored(params: BurrParams, n: int, cl: float, rng: np.random.Generator) -> Observations:
    """Draw ``n`` Burr lifetimes; censor the last ``n - r`` at ``y_i u_i``, ``u_i ~ U(0, 1)``.

    ``r = round(n (1 - cl))``.
    """
    if not 0.0 <= cl < 1.0:
        raise DomainError("censoring level must lie in [0, 1)")
    r = exact_count(n, cl)
    if r < 1:
        raise DegenerateSpec(f"n={n}, CL={cl} leaves no exact observation")
    y = sample(params, n, rng)
    # (0, 1): a zero factor would produce a zero lifetime
    u = 1.0 - rng.random(n - r)
    u = np.where(u == 1.0, 0.5, u)
    return censor(y, u)


def _splitmix64(z: int) -> int:
    z = (z + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def replication_seed(master_seed: int, cell: int, replication: int) -> int:
    z = _splitmix64(master_seed & _MASK64)
    z = _splitmix64(z ^ (cell & _MASK64))
    return _splitmix64(z ^ (replication & _MASK64))


@dataclass(frozen=True)
class Cell:
    c: float
    k: float
    n: int
    cl: float
    replications: int
    methods: tuple[str, ...] = ("ce",)

    def __post_init__(self):
        BurrParams(self.c, self.k)
        if self.n < 1:
            raise DegenerateSpec("n must be >= 1")
        if not 0.0 <= self.cl < 1.0:
            raise DegenerateSpec("cl must lie in [0, 1)")
        if exact_count(self.n, self.cl) < 1:
            raise DegenerateSpec(f"n={self.n}, CL={self.cl} leaves no exact observation")
        if self.replications < 1:
            raise DegenerateSpec("replications must be >= 1")
        bad = [m for m in self.methods if m not in METHODS]
        if bad or not self.methods:
            raise DegenerateSpec(f"unknown methods {bad}")
        # canonical method order regardless of input order
        object.__setattr__(self, "methods", tuple(m for m in METHODS if m in self.methods))

    @property
    def params(self) -> BurrParams:
        return BurrParams(self.c, self.k)


@dataclass(frozen=True)
class BenchmarkSpec:
    cells: tuple[Cell, ...]
    master_seed: int = 0
    ce: CeConfig = field(default_factory=CeConfig)
    nr: NrConfig = field(default_factory=NrConfig)
    em: EmConfig = field(default_factory=EmConfig)


@dataclass
class MethodStats:
    method: str
    replications: int
    converged: int = 0
    c_mean: float | None = None
    c_std: float | None = None
    k_mean: float | None = None
    k_std: float | None = None
    c_abs_bias: float | None = None
    k_abs_bias: float | None = None
    mean_seconds: float | None = None
    estimates: np.ndarray | None = field(default=None, repr=False)

    @property
    def convergence_rate(self) -> float:
        return self.converged / self.replications if self.replications else 0.0


@dataclass
class CellReport:
    cell: Cell
    methods: dict[str, MethodStats]
    error: str | None = None


@dataclass
class BenchmarkReport:
    cells: list[CellReport]

    def stats(self, cell_index: int, method: str) -> MethodStats:
        return self.cells[cell_index].methods[method]


# -- running -----------------------------------------------------------------


def _fit_one(method: str, obs: Observations, spec: BenchmarkSpec, rng: np.random.Generator):
    if method == "ce":
        return fit_mle(obs, spec.ce, rng)
    if method == "nr":
        return nr_fit(obs, spec.nr)
    return em_fit(obs, spec.em, rng)


def _run_replication(args):
    spec, cell_index, rep = args
    cell = spec.cells[cell_index]
    seed = replication_seed(spec.master_seed, cell_index, rep)
    streams = np.random.SeedSequence(seed).spawn(1 + len(METHODS))
    obs = generate_censored(cell.params, cell.n, cell.cl, np.random.default_rng(streams[0]))
    out = {}
    for m in cell.methods:
        rng = np.random.default_rng(streams[1 + METHODS.index(m)])
        try:
            res = _fit_one(m, obs, spec, rng)
            out[m] = (res.c, res.k, res.seconds, bool(res.converged))
        except BurrError:
            out[m] = (math.nan, math.nan, math.nan, False)
    return cell_index, rep, out


def _aggregate(cell: Cell, rows: list[dict]) -> dict[str, MethodStats]:
    result = {}
    for m in cell.methods:
        arr = np.array([r[m] for r in rows], dtype=float).reshape(-1, 4)
        ok = arr[:, 3] == 1.0
        st = MethodStats(method=m, replications=len(rows), converged=int(ok.sum()))
        good = arr[ok]
        st.estimates = good[:, :2].copy()
        if good.shape[0] >= 1:
            st.c_mean = float(good[:, 0].mean())
            st.k_mean = float(good[:, 1].mean())
            st.c_abs_bias = abs(st.c_mean - cell.c)
            st.k_abs_bias = abs(st.k_mean - cell.k)
            st.mean_seconds = float(good[:, 2].mean())
        if good.shape[0] >= 2:
            st.c_std = float(good[:, 0].std(ddof=1))
            st.k_std = float(good[:, 1].std(ddof=1))
        result[m] = st
    return result


def run_benchmark(spec: BenchmarkSpec, jobs: int = 1) -> BenchmarkReport:
    """Run every replication of every cell and aggregate per (cell, method).

    Replications that do not converge count against ``convergence_rate``
    and are left out of the means and standard deviations (which use the
    ``R - 1`` denominator; undefined, i.e. None, when fewer than two
    replications converged). A cell whose replications raise is reported
    with its ``error`` set instead of aborting the run.
    """
    tasks = [(spec, ci, rep) for ci, cell in enumerate(spec.cells) for rep in range(cell.replications)]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            outcomes = list(ex.map(_guarded, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    else:
        outcomes = list(map(_guarded, tasks))
    per_cell: dict[int, list] = {i: [] for i in range(len(spec.cells))}
    errors: dict[int, str] = {}
    for task, res in zip(tasks, outcomes):
        ci = task[1]
        if isinstance(res, str):
            errors.setdefault(ci, res)
        else:
            per_cell[ci].append(res[2])
    cells = []
    for ci, cell in enumerate(spec.cells):
        if ci in errors:
            cells.append(CellReport(cell, {m: MethodStats(m, cell.replications) for m in cell.methods}, errors[ci]))
        else:
            cells.append(CellReport(cell, _aggregate(cell, per_cell[ci])))
    return BenchmarkReport(cells)


def _guarded(args):
    try:
        return _run_replication(args)
    except Exception as exc:  # noqa: BLE001 - recorded as a cell failure
        return f"{type(exc).__name__}: {exc}"


# -- serialization -----------------------------------------------------------


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    v = float(v)
    if math.isnan(v):
        return ""
    return repr(v)


def _rows(report: BenchmarkReport, timing: bool) -> Iterable[dict]:
    for cr in report.cells:
        cell = cr.cell
        for m in cell.methods:
            st = cr.methods[m]
            yield {
                "method": m,
                "c_true": cell.c,
                "k_true": cell.k,
                "n": cell.n,
                "CL": cell.cl,
                "replications": cell.replications,
                "c_mean": st.c_mean,
                "c_std": st.c_std,
                "c_abs_bias": st.c_abs_bias,
                "k_mean": st.k_mean,
                "k_std": st.k_std,
                "k_abs_bias": st.k_abs_bias,
                "mean_seconds": st.mean_seconds if timing else None,
                "convergence_rate": st.convergence_rate,
                **({"error": cr.error} if cr.error else {}),
            }


def emit_report(report: BenchmarkReport, fmt: str = "csv", *, timing: bool = True) -> str:
    """Serialize a report as CSV or JSON.

    One row per (cell, method) in spec order, methods ordered ce, nr, em.
    Undefined statistics are empty CSV fields / JSON nulls. ``timing=False``
    blanks ``mean_seconds`` so the document is byte-reproducible.
    """
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for row in _rows(report, timing):
            w.writerow([_fmt(row[col]) for col in CSV_COLUMNS])
        return buf.getvalue()
    if fmt == "json":
        rows = []
        for row in _rows(report, timing):
            rows.append({key: (None if isinstance(v, float) and math.isnan(v) else v) for key, v in row.items()})
        return json.dumps({"columns": list(CSV_COLUMNS), "rows": rows}, indent=2) + "\n"
    raise UnsupportedFormat(f"unsupported report format {fmt!r}")


def parse_report_csv(text: str) -> list[dict]:
    """Inverse of the CSV emitter; empty fields come back as None."""
    reader = csv.DictReader(io.StringIO(text))
    out = []
    for row in reader:
        parsed = {}
        for key, v in row.items():
            if key == "method":
                parsed[key] = v
            elif v == "":
                parsed[key] = None
            elif key in ("n", "replications"):
                parsed[key] = int(v)
            else:
                parsed[key] = float(v)
        out.append(parsed)
    return out


# -- spec documents ----------------------------------------------------------

_CONFIG_FIELDS = {
    "ce": {
        "population": "integer",
        "elite_fraction": "number",
        "mean_smoothing": "number",
        "std_smoothing": "number",
        "stop_threshold": "number",
        "init_mean": "number",
        "init_std": "number",
        "max_iterations": "integer",
    },
    "nr": {"tol": "number", "max_iter": "integer", "c_init": ["number", "null"], "fix_c": "boolean"},
    "em": {"mc_samples": "integer", "tol": "number", "max_iter": "integer"},
}

SPEC_SCHEMA = {
    "type": "object",
    "required": ["master_seed", "cells"],
    "additionalProperties": False,
    "properties": {
        "master_seed": {"type": "integer", "minimum": 0, "maximum": _MASK64},
        "cells": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["c", "k", "n", "cl", "replications", "methods"],
                "additionalProperties": False,
                "properties": {
                    "c": {"type": "number", "exclusiveMinimum": 0},
                    "k": {"type": "number", "exclusiveMinimum": 0},
                    "n": {"type": "integer", "minimum": 1},
                    "cl": {"type": "number", "minimum": 0, "exclusiveMaximum": 1},
                    "replications": {"type": "integer", "minimum": 1},
                    "methods": {
                        "type": "array",
                        "minItems": 1,
                        "uniqueItems": True,
                        "items": {"enum": list(METHODS)},
                    },
                },
            },
        },
        **{
            name: {
                "type": "object",
                "additionalProperties": False,
                "properties": {k: {"type": t} for k, t in fields.items()},
            }
            for name, fields in _CONFIG_FIELDS.items()
        },
    },
}


def _pointer(path) -> str:
    return "".join("/" + str(p).replace("~", "~0").replace("/", "~1") for p in path)


def load_spec(doc: dict) -> BenchmarkSpec:
    """Validate a benchmark spec document and build a :class:`BenchmarkSpec`.

    Raises :class:`SpecError` carrying the JSON pointer of the first
    offending field.
    """
    import jsonschema

    validator = jsonschema.Draft202012Validator(SPEC_SCHEMA)
    errs = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errs:
        e = errs[0]
        raise SpecError(_pointer(e.absolute_path), e.message)
    cells = []
    for i, cd in enumerate(doc["cells"]):
        if exact_count(cd["n"], cd["cl"]) < 1:
            raise SpecError(f"/cells/{i}/cl", "n*(1-cl) rounds to zero exact observations")
        cells.append(Cell(float(cd["c"]), float(cd["k"]), cd["n"], float(cd["cl"]), cd["replications"], tuple(cd["methods"])))
    configs = {}
    for name, cls in (("ce", CeConfig), ("nr", NrConfig), ("em", EmConfig)):
        try:
            configs[name] = cls.from_dict(doc.get(name))
        except BurrError as exc:
            raise SpecError(f"/{name}", str(exc)) from None
    return BenchmarkSpec(cells=tuple(cells), master_seed=int(doc["master_seed"]), **configs)
