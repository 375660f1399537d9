"""How the two sampling distributions spread their draws over set sizes.

The classical kernel distribution concentrates on very small and very
large subsets; leverage-proportional sampling puts the same total mass on
every size.  The without-replacement sampler draws complement pairs
directly, so each emitted mask arrives next to its complement.
"""

import numpy as np

from levshap import bernoulli_sample, sample_with_replacement, solve_c
from levshap.masks import popcount

n, draws = 12, 50_000
rng = np.random.default_rng(0)

for name in ("kernel", "leverage"):
    masks = sample_with_replacement(n, draws, name, paired=False, rng=rng)
    hist = np.bincount(popcount(masks), minlength=n)[1:n] / draws
    bars = ["#" * int(round(60 * h)) for h in hist]
    print(f"{name} distribution, share of draws per set size:")
    for s, (h, bar) in enumerate(zip(hist, bars), start=1):
        print(f"  |S|={s:>2}  {h:6.3f}  {bar}")
    print()

m = 60
c = solve_c(n, m)
masks, plan = bernoulli_sample(n, c, np.random.default_rng(1))
print(f"pair sampling without replacement at budget m={m}: c={c:.2f}")
print(f"  pairs drawn per (smaller) size: {plan.pair_counts}")
print(f"  first three pairs (mask next to complement):")
for i in range(0, 6, 2):
    print(f"    {''.join(map(str, masks[i]))}  ~  {''.join(map(str, masks[i + 1]))}")
print(f"  total evaluations this run would use: {masks.shape[0] + 2} (expected {m})")
