"""The command-line workflow end to end.

Generate an instance from a JSON spec, solve it with the adaptive schedule,
then turn the trace into plot data.  Everything goes through ``main`` so it
runs without the console script on the PATH.
"""

import json
import tempfile
from pathlib import Path

from dualproj.cli import main
from dualproj.io import read_summary

with tempfile.TemporaryDirectory() as tmp:
    tmp = Path(tmp)
    (tmp / "spec.json").write_text(json.dumps({"I": 80, "K": 8, "m": 4, "seed": 5}))
    main(["generate", str(tmp / "spec.json"), "-o", str(tmp / "market.txt")])
    print((tmp / "market.txt").read_text().splitlines()[0])

    code = main(["solve", str(tmp / "market.txt"), "--trace", str(tmp / "trace.csv"),
                 "--summary", str(tmp / "summary.json")])
    s = read_summary(tmp / "summary.json")
    print("exit", code, "| Q", s["Q"], "| infeasibility", s["infeasibility"]["status"],
          "| gap", s["gap"].get("gap", s["gap"].get("error")))

    main(["stats", str(tmp / "trace.csv"), "-o", str(tmp / "plot.csv")])
    lines = (tmp / "plot.csv").read_text().splitlines()
    print("\n".join(ln for ln in lines if not ln.startswith("Q_vs_iter")))

    main(["project", "simplex_eq", "--point", "0.9,0.4"])
