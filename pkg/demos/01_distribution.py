"""
The Burr XII distribution
=========================

Density, cdf, quantiles, moments and sampling.
"""

import numpy as np

from burrce import BurrParams, cdf, mean, pdf, quantile, sample, std_dev

p = BurrParams(c=2.0, k=5.0)

# density and cdf on a small grid
x = np.linspace(0.1, 2.0, 5)
print("x   ", np.round(x, 3))
print("pdf ", np.round(pdf(p, x), 4))
print("cdf ", np.round(cdf(p, x), 4))

# the quantile function inverts the cdf
print("median", quantile(p, 0.5), "-> cdf", cdf(p, quantile(p, 0.5)))

# closed-form moments against a large sample
draws = sample(p, 200_000, np.random.default_rng(0))
print(f"mean  {mean(p):.5f}  sample {draws.mean():.5f}")
print(f"std   {std_dev(p):.5f}  sample {draws.std():.5f}")
