"""
A full batch run from the command line
======================================

Generate a small labelled corpus, train both models with the ``audiolog``
command and analyse the clips. Every call below is the same as typing
``audiolog <verb> ...`` in a shell.
"""

import csv
import json
import tempfile
from pathlib import Path

from audiolog import write_wav
from audiolog.cli import main
from audiolog.synth import corpus

root = Path(tempfile.mkdtemp(prefix="audiolog_"))
clips = root / "clips"
clips.mkdir()

rows = []
for i, (clip, mood, env) in enumerate(corpus(50, seed=0)):
    name = f"clip_{i:02d}.wav"
    write_wav(clip, clips / name)
    # every group of five holds one clip per mood; groups 3, 7 and 8 are held out
    rows.append((f"clips/{name}", mood, env, "test" if i // 5 in (3, 7, 8) else "train"))

for target, col in (("mood", 1), ("environment", 2)):
    with open(root / f"{target}.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["path", "label", "split"])
        w.writerows((r[0], r[col], r[3]) for r in rows)

###############################################################################
# Training prints a confusion table for the held-out rows.

models, out = root / "models", root / "out"
main(["train-tree", "--input", str(root / "environment.csv"), "--models", str(models), "--out", str(out)])
main(["train-mlp", "--input", str(root / "mood.csv"), "--models", str(models), "--out", str(out)])

###############################################################################
# ``analyze`` writes one JSON record per clip plus a CSV and JSON summary.
# Exit code 0 means at least one clip went through.

code = main(["analyze", "--input", str(clips), "--models", str(models), "--out", str(out), "--jobs", "2"])
print("exit code", code)
first = json.loads((out / "records.ndjson").read_text().splitlines()[0])
print(first["source_id"], first["environment"], first.get("mood"), f"{len(first['segments'])} segment(s)")
