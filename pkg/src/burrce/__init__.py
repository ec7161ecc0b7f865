"""Burr XII parameter estimation for complete and multiply censored lifetimes.

The primary estimator is a cross-entropy search over ``(c, k)``
(:func:`fit_mle`); Newton-Raphson (:func:`nr_fit`) and Monte Carlo EM
(:func:`em_fit`) are provided as baselines.
"""
from .baselines import EmConfig, NrConfig, em_fit, nr_fit
from .ce import CeConfig, fit_mle, maximize
from .dist import BurrParams, cdf, log_pdf, log_survival, mean, pdf, quantile, sample, std_dev
from .gof import KsResult, fit_and_test, ks_pvalue, ks_statistic
from .likelihood import Observations, loglik, profile_k, score
from .result import FitResult
from .simulation import BenchmarkSpec, Cell, emit_report, generate_censored, load_spec, run_benchmark

__version__ = "0.1.0"

__all__ = [
    "BurrParams",
    "pdf",
    "log_pdf",
    "cdf",
    "log_survival",
    "quantile",
    "sample",
    "mean",
    "std_dev",
    "Observations",
    "loglik",
    "score",
    "profile_k",
    "CeConfig",
    "maximize",
    "fit_mle",
    "NrConfig",
    "EmConfig",
    "nr_fit",
    "em_fit",
    "FitResult",
    "KsResult",
    "ks_statistic",
    "ks_pvalue",
    "fit_and_test",
    "Cell",
    "BenchmarkSpec",
    "generate_censored",
    "run_benchmark",
    "emit_report",
    "load_spec",
]
