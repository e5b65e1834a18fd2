import csv
from pathlib import Path

import numpy as np
import pytest

from audiolog import synth, write_wav
from audiolog.config import load_config
from audiolog.pipeline import run_train

SR = 11025

# Clip groups (of five, one per mood) held out for testing; one group per environment.
TEST_GROUPS = (3, 7, 8)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def silence_then_tone(seed: int = 0, freq: float = 1000.0):
    """1 s of faint noise followed by 1 s of full-scale tone, with frame truth."""
    r = np.random.default_rng(seed)
    quiet = 1e-4 * r.standard_normal(SR)
    loud = synth.tone(freq, 1.0)
    return np.concatenate([quiet, loud])


def write_corpus(root: Path, n_clips: int = 50, seed: int = 0) -> dict:
    """Synthetic labelled corpus on disk with mood and environment manifests."""
    root.mkdir(parents=True, exist_ok=True)
    clips = root / "clips"
    clips.mkdir(exist_ok=True)
    rows = []
    for i, (clip, mood, env) in enumerate(synth.corpus(n_clips, seed=seed)):
        name = f"clip_{i:02d}.wav"
        write_wav(clip, clips / name)
        split = "test" if (i // 5) in TEST_GROUPS else "train"
        rows.append((f"clips/{name}", mood, env, split))
    paths = {"clips": clips}
    for target, col in (("mood", 1), ("environment", 2)):
        p = root / f"{target}.csv"
        with open(p, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["path", "label", "split"])
            for r in rows:
                w.writerow([r[0], r[col], r[3]])
        paths[target] = p
    paths["rows"] = rows
    return paths


@pytest.fixture(scope="session")
def corpus_dir(tmp_path_factory):
    return write_corpus(tmp_path_factory.mktemp("corpus"))


@pytest.fixture(scope="session")
def trained(corpus_dir, tmp_path_factory):
    """Both models trained on the session corpus and saved under ``models``."""
    cfg = load_config()
    models = tmp_path_factory.mktemp("models")
    tree = run_train("train-tree", corpus_dir["environment"], cfg)
    mlp = run_train("train-mlp", corpus_dir["mood"], cfg)
    tree.model.save(models / cfg.models.environment)
    mlp.model.save(models / cfg.models.mood)
    return {"models": models, "tree": tree, "mlp": mlp}
