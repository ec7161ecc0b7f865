"""
A small Monte Carlo benchmark
=============================

Replicated fits on a grid of cells, aggregated into a CSV report.
"""

from burrce import BenchmarkSpec, Cell, emit_report, run_benchmark

spec = BenchmarkSpec(
    cells=(
        Cell(c=2.0, k=5.0, n=100, cl=0.0, replications=50, methods=("ce", "nr")),
        Cell(c=2.0, k=5.0, n=100, cl=0.2, replications=50, methods=("ce", "em")),
    ),
    master_seed=2024,
)

# timing=False keeps the report byte-reproducible
print(emit_report(run_benchmark(spec), timing=False))
