"""Running a config end to end, from Python and from the command line.

Equivalent shell session::

    parbandit validate demos/configs/fixed_context.json
    parbandit bounds   demos/configs/fixed_context.json
    parbandit run      demos/configs/fixed_context.json --out-dir /tmp/pb --workers 2
"""

# %%
import csv
import json
import subprocess
import sys
import tempfile
from pathlib import Path

from parbandit.runner import parse_config, run_experiment

config = Path(__file__).with_name("configs") / "fixed_context.json"

with tempfile.TemporaryDirectory() as tmp:
    cfg = parse_config(config)
    cfg.output_dir = tmp
    (manifest,) = run_experiment(cfg)
    print("outputs:", sorted(p.name for p in Path(tmp).iterdir()))
    with open(Path(tmp) / "aggregate.csv") as fh:
        rows = list(csv.DictReader(fh))
    for alg in dict.fromkeys(r["algorithm"] for r in rows):
        for P in sorted({r["P"] for r in rows}, key=int):
            last = [r for r in rows if r["algorithm"] == alg and r["P"] == P][-1]
            print(f"{alg:10s} P={P:>2s} final mean regret {float(last['mean_cum_regret']):.1f}")
    first = json.loads((Path(tmp) / "manifest.json").read_text())["seeds"][0]
    print("streams recorded per cell:", sorted(first["streams"]))

# %% Exit codes: 0 ok, 2 bad config, 3 runtime error
with tempfile.NamedTemporaryFile("w", suffix=".json", delete=False) as fh:
    json.dump({"environment": {"oracle": "linear", "d": 3}, "total_queries": 10,
               "parallelism": [1], "algorithms": ["LinUCB"]}, fh)
proc = subprocess.run([sys.executable, "-m", "parbandit", "validate", fh.name], capture_output=True, text=True)
print("exit", proc.returncode, proc.stderr.strip())
