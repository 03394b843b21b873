"""
Command line runs
=================

Every capability is reachable from the ``annloewner`` command.  Reports are
deterministic JSON with 17 significant digits, so two runs can be diffed.
"""

import json
import tempfile
from pathlib import Path

from annloewner.cli import main

out = Path(tempfile.mkdtemp())

# %%
# Classify a preset
# -----------------
cfg = out / "split.json"
cfg.write_text(json.dumps({"preset": "split"}))
code = main(["classify", "--config", str(cfg), "--out", str(out)])
print("exit code", code)
print(json.loads((out / "type_report.json").read_text())["type"]["declared_type"])

# %%
# Validator
# ---------
# The mixed_split preset carries inner mass past the degeneration time, so it
# is rejected with exit code 2.
cfg.write_text(json.dumps({"preset": "mixed_split"}))
print("exit code", main(["validate", "--config", str(cfg), "--out", str(out)]))

# %%
# Self test on a subset of the acceptance checks
# ----------------------------------------------
cfg.write_text(json.dumps({"criteria": [1, 3, 9]}))
main(["selftest", "--config", str(cfg), "--out", str(out)])
