"""Small SER-versus-noise sweep via the benchmark driver.

Runs a scaled-down version of the noise sweep (L=64 so it finishes in
seconds), writes the CSV, and prints the aggregated table.  The full-size
experiment is the same config with L=258, K=129, s=12 and more trials;
see bench_configs/ for ready-made files.
"""

import tempfile
from pathlib import Path

from turbocs import SweepConfig, run_sweep

out = Path(tempfile.gettempdir()) / "noise_sweep_demo.csv"
config = SweepConfig(
    sweep="noise",
    L=64,
    K=32,
    s=4,
    grid=(8.0, 11.0, 14.0, 17.0, 20.0),
    algorithms=("IHT", "ISF", "AMP", "IKS"),
    trials=200,
    master_seed=42,
    out=str(out),
)

rows = run_sweep(config)

print(f"wrote {out}")
print(f"{'algorithm':<10s} {'1/sigma^2 [dB]':>14s} {'SER':>10s} {'stderr':>10s}")
for row in rows:
    print(
        f"{row.algorithm:<10s} {row.sweep_value:14.1f} "
        f"{row.ser_mean:10.2e} {row.ser_stderr:10.1e}"
    )
