"""
Command line
============

Same as ``ez-avoid --scenario all --out demo_out``: solves every scenario and
writes CSV, JSON and SVG files plus a summary.
"""

import json
import sys
import tempfile
from pathlib import Path

from ez_avoid.cli import main

out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(tempfile.mkdtemp(prefix="ez_avoid_"))
code = main(["--scenario", "all", "--out", str(out)])
print("exit code", code)
for p in sorted(out.iterdir()):
    print(" ", p.name)
summary = json.loads((out / "summary.json").read_text())
for name, entry in summary["scenarios"].items():
    print(f"{name}: tf={entry['tf']:.6f} status={entry['status']}")
