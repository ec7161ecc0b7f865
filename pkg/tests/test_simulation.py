import json
import math
from importlib.resources import files

import numpy as np
import pytest

from burrce import simulation
from burrce.dist import BurrParams, sample
from burrce.errors import DegenerateSpec, DomainError, SpecError, UnsupportedFormat
from burrce.simulation import (
    CSV_COLUMNS,
    BenchmarkReport,
    BenchmarkSpec,
    Cell,
    censor,
    emit_report,
    exact_count,
    generate_censored,
    load_spec,
    parse_report_csv,
    replication_seed,
    run_benchmark,
)


def _spec(*cells, seed=7):
    return BenchmarkSpec(cells=tuple(cells), master_seed=seed)


def test_exact_count_rounding():
    assert exact_count(100, 0.2) == 80
    assert exact_count(20, 0.6) == 8
    assert exact_count(5, 0.5) == 2  # round-half-even on 2.5


def test_censor_arithmetic():
    obs = censor([1, 2, 3, 4], [0.5, 0.25])
    np.testing.assert_array_equal(obs.values, [1, 2, 1.5, 1.0])
    assert list(obs.exact) == [True, True, False, False]


def test_generate_no_censoring_is_raw_draws():
    obs = generate_censored(BurrParams(2, 5), 50, 0.0, np.random.default_rng(1))
    assert obs.is_complete
    np.testing.assert_array_equal(obs.values, sample(BurrParams(2, 5), 50, np.random.default_rng(1)))


def test_generate_censored_counts_and_ordering():
    p = BurrParams(2, 5)
    obs = generate_censored(p, 10_000, 0.6, np.random.default_rng(2))
    assert obs.r == 4000
    raw = sample(p, 10_000, np.random.default_rng(2))
    cens = ~obs.exact
    assert np.all(obs.values[cens] < raw[cens])
    np.testing.assert_array_equal(obs.values[obs.exact], raw[obs.exact])


@pytest.mark.parametrize("n,cl", [(20, 0.2), (40, 0.6), (100, 0.6), (7, 0.3), (3, 0.5)])
def test_exact_flag_count_every_replication(n, cl):
    rng = np.random.default_rng(n)
    for _ in range(20):
        assert generate_censored(BurrParams(1, 1), n, cl, rng).r == exact_count(n, cl)


def test_generate_errors():
    with pytest.raises(DegenerateSpec):
        generate_censored(BurrParams(1, 1), 1, 0.9, np.random.default_rng(0))
    with pytest.raises(DomainError):
        generate_censored(BurrParams(1, 1), 10, 1.0, np.random.default_rng(0))


def test_cell_validation_and_method_order():
    assert Cell(2, 5, 10, 0.0, 1, ("em", "ce")).methods == ("ce", "em")
    for bad in (dict(n=1, cl=0.9), dict(replications=0), dict(methods=("ml",)), dict(methods=())):
        args = dict(c=2, k=5, n=10, cl=0.0, replications=1, methods=("ce",)) | bad
        with pytest.raises(DegenerateSpec):
            Cell(**args)


def test_replication_seed_distinct_and_stable():
    seeds = {replication_seed(1, c, r) for c in range(10) for r in range(100)}
    assert len(seeds) == 1000
    assert replication_seed(1, 2, 3) == replication_seed(1, 2, 3)
    assert replication_seed(1, 2, 3) != replication_seed(2, 2, 3)
    assert all(0 <= s < 2**64 for s in seeds)


def test_splitmix64_reference():
    # first outputs of the reference splitmix64 generator seeded with 0
    z = 0
    outs = []
    for _ in range(2):
        outs.append(simulation._splitmix64(z))
        z = (z + 0x9E3779B97F4A7C15) & (2**64 - 1)
    assert outs == [0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4]


def test_single_replication_std_absent():
    rep = run_benchmark(_spec(Cell(2, 5, 50, 0.0, 1, ("ce",))))
    st = rep.stats(0, "ce")
    assert st.c_std is None and st.k_std is None
    assert st.c_mean is not None
    row = parse_report_csv(emit_report(rep))[0]
    assert row["c_std"] is None and row["k_std"] is None


def test_aggregate_matches_manual():
    spec = _spec(Cell(2, 5, 60, 0.2, 8, ("ce", "nr")))
    rep = run_benchmark(spec)
    for m in ("ce", "nr"):
        st = rep.stats(0, m)
        est = st.estimates
        assert st.converged == est.shape[0] == 8
        assert st.c_mean == pytest.approx(float(np.mean(est[:, 0])), rel=1e-15)
        assert st.k_std == pytest.approx(float(np.std(est[:, 1], ddof=1)), rel=1e-15)
        assert st.c_abs_bias == pytest.approx(abs(st.c_mean - 2), rel=1e-15)
        assert 0 <= st.convergence_rate <= 1 and st.c_std >= 0


def test_methods_share_dataset():
    # NR and EM agree to tolerance on complete data only if both saw the same sample
    rep = run_benchmark(_spec(Cell(2, 5, 80, 0.0, 3, ("nr", "em"))))
    np.testing.assert_allclose(rep.stats(0, "nr").estimates, rep.stats(0, "em").estimates, atol=1e-6)


def test_emit_empty_and_single():
    assert emit_report(BenchmarkReport([])) == ",".join(CSV_COLUMNS) + "\n"
    rep = run_benchmark(_spec(Cell(2, 5, 40, 0.0, 2, ("ce",))))
    lines = emit_report(rep).splitlines()
    assert len(lines) == 2
    assert lines[0].split(",") == list(CSV_COLUMNS)
    with pytest.raises(UnsupportedFormat):
        emit_report(rep, "xml")


def test_emit_round_trip():
    rep = run_benchmark(_spec(Cell(2, 5, 40, 0.2, 3, ("ce", "nr", "em")), Cell(0.5, 0.5, 20, 0.6, 3, ("ce",))))
    rows = parse_report_csv(emit_report(rep))
    assert [r["method"] for r in rows] == ["ce", "nr", "em", "ce"]
    i = 0
    for ci, cr in enumerate(rep.cells):
        for m in cr.cell.methods:
            st = rep.stats(ci, m)
            for key in ("c_mean", "c_std", "c_abs_bias", "k_mean", "k_std", "k_abs_bias", "mean_seconds"):
                assert rows[i][key] == pytest.approx(getattr(st, key), rel=1e-12, abs=1e-12)
            assert rows[i]["convergence_rate"] == st.convergence_rate
            assert rows[i]["n"] == cr.cell.n and rows[i]["CL"] == cr.cell.cl
            i += 1


def test_emit_json_mirror():
    rep = run_benchmark(_spec(Cell(2, 5, 40, 0.0, 1, ("ce",))))
    doc = json.loads(emit_report(rep, "json", timing=False))
    assert doc["columns"] == list(CSV_COLUMNS)
    row = doc["rows"][0]
    assert row["c_std"] is None and row["mean_seconds"] is None
    assert row["c_mean"] == rep.stats(0, "ce").c_mean


def test_report_deterministic_and_parallel_invariant():
    spec = _spec(Cell(2, 5, 40, 0.2, 6, ("ce", "nr", "em")), Cell(5, 1, 20, 0.6, 6, ("ce",)))
    a = emit_report(run_benchmark(spec), timing=False)
    b = emit_report(run_benchmark(spec), timing=False)
    c = emit_report(run_benchmark(spec, jobs=2), timing=False)
    assert a == b == c
    other = emit_report(run_benchmark(_spec(*spec.cells, seed=8)), timing=False)
    assert other != a


def test_cell_failure_is_recorded(monkeypatch):
    real = simulation._run_replication

    def flaky(args):
        if args[1] == 1:
            raise RuntimeError("boom")
        return real(args)

    monkeypatch.setattr(simulation, "_run_replication", flaky)
    rep = run_benchmark(_spec(Cell(2, 5, 30, 0.0, 2), Cell(3, 4, 30, 0.0, 2), Cell(2, 5, 30, 0.0, 2)))
    assert rep.cells[1].error == "RuntimeError: boom"
    assert rep.cells[0].error is None and rep.cells[2].error is None
    assert rep.stats(0, "ce").c_mean is not None
    assert len(emit_report(rep).splitlines()) == 4


def test_load_spec_valid_and_errors():
    doc = {
        "master_seed": 3,
        "cells": [{"c": 2, "k": 5, "n": 50, "cl": 0.2, "replications": 4, "methods": ["em", "ce"]}],
        "ce": {"population": 200},
        "em": {"mc_samples": 50},
    }
    spec = load_spec(doc)
    assert spec.cells[0].methods == ("ce", "em")
    assert spec.ce.population == 200 and spec.em.mc_samples == 50

    cases = [
        ({**doc, "cells": [{**doc["cells"][0], "replications": 0}]}, "/cells/0/replications"),
        ({**doc, "cells": [{**doc["cells"][0], "cl": 1.0}]}, "/cells/0/cl"),
        ({**doc, "cells": [{**doc["cells"][0], "n": 1, "cl": 0.9}]}, "/cells/0/cl"),
        ({**doc, "cells": [{**doc["cells"][0], "methods": ["bayes"]}]}, "/cells/0/methods/0"),
        ({**doc, "em": {"mc_samples": 5}}, "/em"),
        ({k: v for k, v in doc.items() if k != "master_seed"}, ""),
    ]
    for bad, pointer in cases:
        with pytest.raises(SpecError) as info:
            load_spec(bad)
        assert info.value.pointer == pointer


def test_bundled_specs_load():
    for name in ("table1_desk.json", "table2_desk.json", "table3_desk.json"):
        spec = load_spec(json.loads(files("burrce.data").joinpath(name).read_text()))
        assert len(spec.cells) == (9 if name.startswith("table1") else 12)


COMPLETE_GRID = [(2.0, 5.0), (3.0, 4.0), (4.14, 9.13)]


@pytest.mark.slow
def test_ce_bias_small_at_large_n():
    spec = _spec(*(Cell(c, k, 2500, 0.0, 100) for c, k in COMPLETE_GRID), seed=11)
    rep = run_benchmark(spec, jobs=4)
    for i, (c, k) in enumerate(COMPLETE_GRID):
        st = rep.stats(i, "ce")
        assert st.c_abs_bias < 0.02 * c and st.k_abs_bias < 0.02 * k


@pytest.mark.slow
def test_std_shrinks_with_n():
    ns = (50, 100, 1000)
    spec = _spec(*(Cell(c, k, n, 0.0, 100) for c, k in COMPLETE_GRID for n in ns), seed=12)
    rep = run_benchmark(spec, jobs=4)
    inversions = comparisons = 0
    for t in range(len(COMPLETE_GRID)):
        for attr in ("c_std", "k_std"):
            vals = [getattr(rep.stats(3 * t + j, "ce"), attr) for j in range(3)]
            for a, b in zip(vals, vals[1:]):
                comparisons += 1
                inversions += b > a
    assert comparisons == 12
    assert inversions <= math.floor(comparisons / 10)
