"""Five controllers, one plant, both default references.

Plain PID, static feedforward, each adaptive channel on its own and both
together. Smaller is better in every column except e_min, where closer to
zero is better. The best entry of each column is starred.
"""
import sys
import time
from pathlib import Path

from pneutrack import RunConfig, compare_methods, gradual_reference
from pneutrack import csvio

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_out")

for name, cfg in (("rapid 30 s", RunConfig()), ("gradual 120 s", RunConfig().with_reference(gradual_reference()))):
    t0 = time.perf_counter()
    result = compare_methods(cfg, workers=5)
    print(f"\n{name} reference ({time.perf_counter() - t0:.1f} s)")
    print(result.table())
    r = {m: rep.rmse for m, rep in result.reports.items()}
    best_single = min(r["fb_adaptive"], r["ff_adaptive"])
    print(f"two_dof vs pid        {100 * (1 - r['two_dof'] / r['pid']):5.1f}% lower RMSE")
    print(f"two_dof vs ff_static  {100 * (1 - r['two_dof'] / r['ff_static']):5.1f}% lower RMSE")
    print(f"two_dof vs best single channel {100 * (1 - r['two_dof'] / best_single):5.1f}% lower RMSE")
    tag = name.split()[1]
    csvio.write_metrics(result.reports, out / f"metrics_{tag}.csv")
    for m, tr in result.traces.items():
        csvio.write_trace(tr, out / f"trace_{tag}_{m}.csv")

print(f"\nCSV files in {out}/")
