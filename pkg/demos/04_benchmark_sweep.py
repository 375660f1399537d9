"""A small benchmark sweep through the library API.

Runs three estimators over a budget grid with shared seeds, writes the
row-level CSV, and prints the aggregated quartiles.  The same sweep is
available from the command line:

    levshap sweep-size --game interaction:seed=0 --n 8 \
        --m-grid 5n,10n,20n --seeds 25 --out sweep.csv
"""

import tempfile
from pathlib import Path

from levshap.bench import ExperimentSpec, aggregate, run_size_sweep, write_csv

spec = ExperimentSpec(
    game="interaction:seed=0",
    n=8,
    estimators=("leverage", "kernel_optimized", "kernel"),
    m_grid=(40, 80, 160),
    seeds=25,
)
rows = run_size_sweep(spec)

out = Path(tempfile.gettempdir()) / "levshap_demo_sweep.csv"
write_csv(rows, out)
print(f"wrote {len(rows)} rows to {out}\n")

print(f"{'m':>5} {'estimator':>18} {'median l2^2':>14} {'q1':>12} {'q3':>12}")
for group in aggregate(rows):
    stats = group["l2_error"]
    print(
        f"{group['m']:>5} {group['estimator']:>18} "
        f"{stats['median']:>14.3e} {stats['q1']:>12.3e} {stats['q3']:>12.3e}"
    )
