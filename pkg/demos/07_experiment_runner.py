"""Drive a full (but downsized) experiment through the same path the CLI uses.

The `slicesim run` command is a thin wrapper over run_experiment /
export_report; calling main() directly makes the demo easy to step through.
Overrides shrink the run so this finishes in seconds: two seeds, two r_B
values, 2-hour horizon, greedy agent only (no training).

Rerun it: every byte of the output directory is identical, because all
randomness flows from the named per-seed streams and floats are exported via
repr.
"""

import pathlib
import tempfile

from slicesim.cli import main

out = pathlib.Path(tempfile.mkdtemp(prefix="slicesim_demo_")) / "run1"
args = ["run", "--experiment", "revenue", "--agent", "greedy",
        "--out", str(out),
        "--set", "run.seeds=(1,2)",
        "--set", "run.reward_b_sweep=(2.0,6.0)",
        "--set", "run.horizon_hours=2.0"]
code = main(args)
print(f"\nexit code {code}; artifacts in {out}:")
for p in sorted(out.iterdir()):
    print(f"  {p.name} ({p.stat().st_size} bytes)")

print("\nrevenue.csv:")
print((out / "revenue.csv").read_text())
print("manifest.txt (first lines):")
print("\n".join((out / "manifest.txt").read_text().splitlines()[:8]))
