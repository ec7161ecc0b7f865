"""
Goodness of fit
===============

Fit a sample, then run a Kolmogorov-Smirnov test against the fitted cdf.
"""

import numpy as np

from burrce import BurrParams, fit_and_test, sample

rng = np.random.default_rng(3)
x = sample(BurrParams(4.9, 6.3), 5000, rng)
fit, ks = fit_and_test(x, rng=rng)
print(f"fitted c={fit.c:.3f} k={fit.k:.3f}")
print(f"D={ks.statistic:.4f} p={ks.p_value:.3f} ({ks.note})")

# an exponential sample is also fitted; the test reports how well Burr XII matches its shape
expo = rng.exponential(1.0, 1000)
fit, ks = fit_and_test(expo, rng=rng)
print(f"exponential: c={fit.c:.3f} k={fit.k:.3f} D={ks.statistic:.4f} p={ks.p_value:.3f}")
