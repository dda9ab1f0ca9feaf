"""Vervaat perpetuities and reproducible Mersenne Twister streams.

Run with ``python demos/vervaat_and_rng.py``.
"""

# %%
import numpy as np

from fixedpivot import MT19937, dickman_cdf, r_seed, vervaat_pdf_cdf, vervaat_rnd

# %% [markdown]
# On (0, 1] the Dickman density is flat at exp(-gamma).  The delay-equation
# solution and the Laplace-inversion series agree closely.

# %%
xs = np.array([0.5, 1.0, 1.5, 2.5, 4.0])
f, F = vervaat_pdf_cdf(xs, beta=1.0)
_, F_series = vervaat_pdf_cdf(xs, beta=1.0, method="series")
for x, a, b, c in zip(xs, f, F, F_series):
    print(f"x={x:3.1f} pdf={a:.6f} cdf={b:.6f} series cdf={c:.6f}")
print(f"Dickman cdf at 1: {float(dickman_cdf(1.0)):.12f}  exp(-gamma)={np.exp(-np.euler_gamma):.12f}")

# %% [markdown]
# The sampler truncates the perpetuity once the product of uniforms drops
# below ``eps``.  Its mean should be close to beta.

# %%
draws = vervaat_rnd(2.0, 20000, MT19937(11))
print(f"sample mean={draws.mean():.3f} (beta=2)")

# %% [markdown]
# Classic mode reproduces the reference MT19937 doubles.  R mode reproduces
# ``set.seed(42); runif(3)`` from base R.

# %%
print("classic seed 5489:", MT19937(5489).random(3))
print("R seed 42:       ", r_seed(42).r_unif(3))
