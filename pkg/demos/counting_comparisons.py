"""How many comparisons does fixed-pivot selection spend?

Run with ``python demos/counting_comparisons.py``.
"""

# %%
import numpy as np

from fixedpivot import MT19937, bench_run, BenchConfig, dickman_fit, select_kth_instrumented, summarize

# %% [markdown]
# Asking for the maximum of 2, 3, ..., n, 1 makes the pivot shed one element
# per pass.  That is the worst case, and the total is (n^2 + 5n) / 2 exactly.

# %%
for n in (8, 16, 32, 64):
    _, counts = select_kth_instrumented(np.array(list(range(2, n + 1)) + [1], dtype=float), n)
    print(f"n={n:3d} total={counts.total:5d} formula={(n * n + 5 * n) // 2:5d}")

# %% [markdown]
# On random data finding the maximum costs about 2n on average.

# %%
config = BenchConfig(dist="uniform", n_set=[100, 1000], k_set=["max", "median"], replicates=200, seed=1)
rows = bench_run(config)
for g in summarize(rows):
    print(f"n={g.n:5d} k={g.k:5d} mean={g.mean:9.1f} ratio to n={g.mean / g.n:.2f}")

# %% [markdown]
# Scaled by n and shifted by one, the find-max totals follow the Dickman law.

# %%
totals = [r.total for r in rows if r.n == 1000 and r.k == 1000]
print(f"KS distance to Dickman: {dickman_fit(totals, 1000):.4f}")

# %% [markdown]
# A pivot hint pointing at the answer settles the search in one pass.

# %%
x = np.asarray(MT19937(7).random(1000))
k = 500
hint = int(np.argsort(x)[k - 1]) + 1
_, plain = select_kth_instrumented(x.copy(), k)
_, hinted = select_kth_instrumented(x.copy(), k, oracle=hint)
print(f"plain total={plain.total} hinted total={hinted.total}")
