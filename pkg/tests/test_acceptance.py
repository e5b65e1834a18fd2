"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run on its own with ``pytest tests/test_acceptance.py -v`` (the verdict lines
are written straight to the terminal) or ``python3 tests/test_acceptance.py``.
"""

import json
import math
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from audiolog import AudioClip, synth
from audiolog.classify import MlpConfig, MlpModel, TreeConfig, train_mlp, train_tree
from audiolog.classify.tree import DecisionTree, gain_ratio
from audiolog.cli import main as cli_main
from audiolog.denoise import analyze, csne_db, denoise, synthesize
from audiolog.diarize import DiarizeConfig, diarize
from audiolog.dsp import FRAME_LEN, HOP, N_BINS, frame_count, frame_signal, nccf, stft
from audiolog.features import spectral, voice
from audiolog.vad import VadDecision, detect_speech

import oracles
from conftest import SR, silence_then_tone, write_corpus


@pytest.fixture
def verdict(capsys):
    def report(number: int, title: str, checks: dict[str, bool], detail: str = ""):
        ok = all(checks.values())
        failed = [k for k, v in checks.items() if not v]
        line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {title}"
        if detail:
            line += f" ({detail})"
        if failed:
            line += f" -- failed: {', '.join(failed)}"
        with capsys.disabled():
            print("\n" + line)
        assert ok, line

    return report


def close(a, b, rel, abs_=0.0):
    return math.isclose(float(a), float(b), rel_tol=rel, abs_tol=abs_)


# -- 1 -------------------------------------------------------------------------

def test_equation_oracles(verdict):
    t0 = time.perf_counter()
    r = np.random.default_rng(101)
    n = 100
    checks = {name: True for name in (
        "csne", "jitter_abs", "jitter_rel", "shimmer", "freq_modulation", "freq_range", "hnr",
        "nccf", "centroid", "flux", "entropy", "flatness", "sharpness", "stft_features")}

    for _ in range(n):
        s, e = r.standard_normal((2, int(r.integers(2, 300))))
        checks["csne"] &= close(csne_db(s, e), oracles.csne(list(s), list(e)), 1e-9)

        m = int(r.integers(2, 150))
        periods = r.uniform(1 / 500, 1 / 50, m)
        amps = r.uniform(1e-3, 1.0, m)
        f0 = 1 / periods
        checks["jitter_abs"] &= close(voice.jitter_abs(periods), oracles.jitter_abs(list(periods)), 1e-9)
        checks["jitter_rel"] &= close(voice.jitter_rel(periods), oracles.jitter_rel(list(periods)), 1e-9)
        checks["shimmer"] &= close(voice.shimmer_from_amplitudes(amps), oracles.shimmer(list(amps)), 1e-9)
        checks["freq_modulation"] &= close(voice.freq_modulation(f0), oracles.freq_modulation(list(f0)), 1e-9)
        checks["freq_range"] &= close(voice.freq_range(f0), oracles.freq_range(list(f0)), 1e-9, 1e-9)
        rr = float(r.uniform(-0.2, 1.2))
        checks["hnr"] &= close(voice.hnr_db(rr), oracles.hnr(rr), 1e-9, 1e-12)

        power = r.exponential(1.0, N_BINS) * (r.random(N_BINS) < 0.8)
        prev = r.exponential(1.0, N_BINS)
        checks["centroid"] &= close(spectral.centroid_per_frame(np.sqrt(power))[0],
                                    oracles.centroid(list(np.sqrt(power))), 1e-9)
        checks["flux"] &= close(spectral.flux_per_frame(np.vstack([prev, power]))[1],
                                oracles.flux(list(prev), list(power)), 1e-9)
        checks["entropy"] &= close(spectral.entropy_per_frame(power)[0], oracles.entropy(list(power)), 1e-9)
        checks["flatness"] &= close(spectral.flatness_per_frame(power)[0], oracles.flatness(list(power)), 1e-9)
        checks["sharpness"] &= close(spectral.sharpness_per_frame(power)[0], oracles.sharpness(list(power)), 1e-9)

    # FFT-dependent: correlation and spectra of random frames against transform-free oracles
    frames = r.standard_normal((n, FRAME_LEN)) * r.uniform(1e-3, 1.0, (n, 1))
    lags = 30
    got = nccf(frames, lags)
    for row, x in zip(got, frames):
        want = oracles.nccf(list(x), lags)
        checks["nccf"] &= bool(np.allclose(row, want, rtol=1e-6, atol=1e-9))
    spec = stft(frames * np.hanning(FRAME_LEN))
    for k, x in enumerate(frames):
        p = oracles.dft_power(x * np.hanning(FRAME_LEN), 512)
        checks["stft_features"] &= bool(np.allclose(spec.power[k], p, rtol=1e-6, atol=1e-9 * p.max()))
        row = spec.power[k : k + 1]
        checks["stft_features"] &= close(spectral.entropy_per_frame(row)[0], oracles.entropy(list(p)), 1e-6)
        checks["stft_features"] &= close(spectral.sharpness_per_frame(row)[0], oracles.sharpness(list(p)), 1e-6)

    elapsed = time.perf_counter() - t0
    checks["runtime < 10 s"] = elapsed < 10.0
    verdict(1, "equation oracles", checks, f"{n} random inputs per quantity, {elapsed:.2f} s")


# -- 2 -------------------------------------------------------------------------

def test_closed_form_examples(verdict):
    s = np.random.default_rng(0).uniform(0.1, 1.0, 64)
    two = np.zeros(N_BINS)
    two[[10, 20]] = 1.0
    point = np.zeros(N_BINS)
    point[40] = 1.0

    def band(z):
        loud = np.zeros(24)
        loud[z - 1] = 1.0
        return spectral.sharpness_from_loudness(loud)[0]

    checks = {
        "csne 2S = 6.0206 dB": round(csne_db(s, 2 * s), 4) == 6.0206,
        "csne -S = -6.0206 dB": round(csne_db(s, -s), 4) == -6.0206,
        "csne S = 100 dB cap": csne_db(s, s) == 100.0,
        "jitter_rel {5,6} ms = 20%": close(voice.jitter_rel([0.005, 0.006]), 20.0, 1e-12),
        "jitter_abs {5,6} ms = 0.5 ms": close(voice.jitter_abs([0.005, 0.006]), 0.0005, 1e-12),
        "shimmer {1,0.1} = 10 dB": close(voice.shimmer_from_amplitudes([1.0, 0.1]), 10.0, 1e-12),
        "freq_modulation {100,300} = 0.5": close(voice.freq_modulation([100.0, 300.0]), 0.5, 1e-12),
        "freq_range 100..199 = 89.1": close(voice.freq_range(np.arange(100.0, 200.0)), 89.1, 1e-12),
        "hnr R=0.5 = 0 dB": close(voice.hnr_db(0.5), 0.0, 0.0, 1e-12),
        "hnr R=0.9 = 9.542 dB": round(float(voice.hnr_db(0.9)), 3) == 9.542,
        "entropy point mass = 0": spectral.spectral_entropy(point) == 0.0,
        "entropy uniform = 1": close(spectral.spectral_entropy(np.ones(N_BINS)), 1.0, 1e-12),
        "entropy two bins = 0.1249": round(spectral.spectral_entropy(two), 4) == 0.1249,
        "sharpness z=10 = 1.1 acum": close(band(10), 1.1, 1e-12),
        "sharpness z=2 = 0.22 acum": close(band(2), 0.22, 1e-12),
        "centroid point mass bin 5 = 5": spectral.spectral_centroid(np.eye(N_BINS)[5]) == 5.0,
        "flatness constant = 1": close(spectral.spectral_flatness(np.full(N_BINS, 0.3)), 1.0, 1e-12),
    }
    verdict(2, "closed-form examples", checks, f"{len(checks)} cases")


# -- 3 -------------------------------------------------------------------------

def test_vad_silence_then_tone(verdict):
    x = silence_then_tone()
    t0 = time.perf_counter()
    d = detect_speech(frame_signal(AudioClip(x, SR)))
    elapsed = time.perf_counter() - t0
    truth = HOP * np.arange(frame_count(x.size)) + FRAME_LEN / 2 >= SR
    agreement = float(np.mean(d.speech_flags == truth))
    checks = {"agreement >= 95%": agreement >= 0.95, "runtime < 1 s": elapsed < 1.0}
    verdict(3, "speech detection on silence + tone", checks, f"agreement {agreement:.2%}, {elapsed:.3f} s")


# -- 4 -------------------------------------------------------------------------

def test_denoiser(verdict):
    t0 = time.perf_counter()
    r = np.random.default_rng(0)
    clean = 0.5 * synth.tone(500.0, 3.0)
    noise = r.standard_normal(clean.size)
    noise *= np.sqrt(np.mean(clean**2) / np.mean(noise**2))
    noisy = clean + noise
    # halve on the way in so the 0 dB mixture stays inside [-1, 1]; the chain is scale-covariant
    out = denoise(AudioClip(noisy / 2, SR)).samples * 2

    def snr(x):
        return 10 * np.log10(np.sum(clean**2) / np.sum((x - clean) ** 2))

    gain_db = snr(out) - snr(noisy)
    worst = 0.0
    for n in (1, 440, 441, 551, 5000, 3 * SR + 7):
        x = r.uniform(-1, 1, n)
        spec, lead, padded = analyze(x)
        worst = max(worst, float(np.max(np.abs(synthesize(spec, lead, padded, n) - x))))
    elapsed = time.perf_counter() - t0
    checks = {
        "input SNR 0 dB": close(snr(noisy), 0.0, 0.0, 1e-9),
        "SNR gain >= 5 dB": gain_db >= 5.0,
        "unit-gain reconstruction within 1e-6": worst <= 1e-6,
        "runtime < 5 s": elapsed < 5.0,
    }
    verdict(4, "denoiser", checks, f"gain {gain_db:.2f} dB, reconstruction error {worst:.1e}, {elapsed:.2f} s")


# -- 5 -------------------------------------------------------------------------

def test_diarization(verdict):
    t0 = time.perf_counter()
    clip, sample_truth = synth.two_speaker_clip(seconds=20.0, seed=0)
    truth = synth.frame_truth(sample_truth)
    vad = VadDecision.all_speech(frame_count(len(clip)))
    cfg = DiarizeConfig(seed=0)
    first = diarize(clip, vad, cfg)
    second = diarize(clip, vad, cfg)
    elapsed = time.perf_counter() - t0
    pred = np.full(truth.size, -1)
    for seg in first:
        pred[seg.start_frame : seg.end_frame] = 0 if seg.speaker_id == "S1" else 1
    acc = max(np.mean(pred == truth), np.mean((1 - pred) == truth))
    checks = {"accuracy >= 90%": acc >= 0.9, "deterministic": first == second, "runtime < 10 s": elapsed < 10.0}
    verdict(5, "two-speaker diarization", checks, f"accuracy {acc:.2%}, {len(first)} segments, {elapsed:.2f} s")


# -- 6 -------------------------------------------------------------------------

def exhaustive_best(x, y_idx, n_classes, min_leaf):
    best = -1.0
    for f in range(x.shape[1]):
        vals = sorted(set(x[:, f].tolist()))
        for a, b in zip(vals, vals[1:]):
            left = x[:, f] <= (a + b) / 2
            if min(left.sum(), (~left).sum()) >= min_leaf:
                best = max(best, gain_ratio(y_idx, left, n_classes)[0])
    return best


def all_splits_maximal(tree, x, y_idx, n_classes, min_leaf):
    """Re-scan every internal node's training subset and compare with the chosen split."""
    stack = [(tree.root, np.ones(len(y_idx), dtype=bool))]
    while stack:
        node, mask = stack.pop()
        if node.is_leaf:
            continue
        xs, ys = x[mask], y_idx[mask]
        left = xs[:, node.feature] <= node.threshold
        chosen = gain_ratio(ys, left, n_classes)[0]
        if chosen < exhaustive_best(xs, ys, n_classes, min_leaf) - 1e-12:
            return False
        goes_left = mask & (x[:, node.feature] <= node.threshold)
        stack.extend([(node.left, goes_left), (node.right, mask & ~goes_left)])
    return True


def test_tree_correctness(verdict):
    full = TreeConfig(max_depth=50, min_leaf=1)
    xs = np.array([[0.1], [0.2], [0.3], [0.4], [0.6], [0.7], [0.8], [0.95]])
    ys = ["indoor"] * 4 + ["outdoor"] * 4
    sep = train_tree(xs, ys, full)
    xx = np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]])
    yx = ["a", "b", "b", "a"]
    xor = train_tree(xx, yx, full)
    pts = np.random.default_rng(6).uniform(-0.5, 1.5, (500, 2))
    rule = ["a" if (p[0] > 0.5) == (p[1] > 0.5) else "b" for p in pts]

    r = np.random.default_rng(60)
    xr = np.round(r.uniform(0, 1, (40, 3)), 2)
    yr = r.integers(0, 3, 40)
    rnd = train_tree(xr, [str(v) for v in yr], TreeConfig(max_depth=4, min_leaf=2))
    yr_idx = np.array([rnd.classes.index(str(v)) for v in yr])

    checks = {
        "separable: one split at 0.5": sep.depth() == 1 and close(sep.root.threshold, 0.5, 1e-12),
        "separable: 100% training accuracy": sep.predict(xs) == ys,
        "separable: x=0.9 -> right leaf, confidence 1": sep.predict_one([0.9]) == ("outdoor", 1.0),
        "xor: depth 2": xor.depth() == 2,
        "xor: 100% training accuracy": xor.predict(xx) == yx,
        "xor: matches rule table on 500 points": xor.predict(pts) == rule,
        "separable split maximal": all_splits_maximal(sep, xs, np.array([0] * 4 + [1] * 4), 2, 1),
        "xor splits maximal": all_splits_maximal(xor, xx, np.array([0, 1, 1, 0]), 2, 1),
        "random-data splits maximal": all_splits_maximal(rnd, xr, yr_idx, len(rnd.classes), 2),
    }
    verdict(6, "decision tree correctness", checks)


# -- 7 -------------------------------------------------------------------------

def test_mlp_gradients_and_toy_set(verdict):
    t0 = time.perf_counter()
    r = np.random.default_rng(7)
    model = MlpModel.initialise([4, 8, 8, 4, 4, 3], ("x", "y", "z"), r)
    for b in model.biases:
        b += r.uniform(-0.5, 0.5, b.shape)
    xn = r.standard_normal((10, 4))
    y = r.integers(0, 3, 10)
    _, gw, gb = model.loss_and_gradients(xn, y)
    eps = 1e-5
    worst = 0.0
    for params, grads in ((model.weights, gw), (model.biases, gb)):
        for p, g in zip(params, grads):
            for idx in np.ndindex(p.shape):
                keep = p[idx]
                p[idx] = keep + eps
                up = model.loss_and_gradients(xn, y)[0]
                p[idx] = keep - eps
                down = model.loss_and_gradients(xn, y)[0]
                p[idx] = keep
                num = (up - down) / (2 * eps)
                worst = max(worst, abs(g[idx] - num) / max(abs(g[idx]) + abs(num), 1e-8))

    tr = np.random.default_rng(0)
    x = tr.standard_normal((20, 4))
    w = tr.standard_normal(4)
    labels = np.where(x @ w > 0, "laugh", "cry")
    x += 0.5 * np.outer(np.where(labels == "laugh", 1, -1), w / np.linalg.norm(w))
    cfg = MlpConfig(hidden=(8, 8), epochs=500, dropout=0.0, learning_rate=0.1, batch_size=4)
    net = train_mlp(x, list(labels), cfg)
    acc = float(np.mean(np.array(net.predict(x)) == labels))
    elapsed = time.perf_counter() - t0
    checks = {"max relative error < 1e-4": worst < 1e-4, "toy set 100%": acc == 1.0, "runtime < 30 s": elapsed < 30.0}
    verdict(7, "network gradient check and toy set", checks,
            f"max relative error {worst:.1e}, toy accuracy {acc:.0%}, {elapsed:.2f} s")


# -- 8 -------------------------------------------------------------------------

def test_end_to_end_corpus(verdict, tmp_path):
    t0 = time.perf_counter()
    corpus = write_corpus(tmp_path / "corpus", n_clips=50, seed=0)
    models, out = tmp_path / "models", tmp_path / "out"
    codes = [
        cli_main(["train-tree", "--input", str(corpus["environment"]), "--models", str(models), "--out", str(out)]),
        cli_main(["train-mlp", "--input", str(corpus["mood"]), "--models", str(models), "--out", str(out)]),
    ]
    env = json.loads((out / "metrics_train-tree.json").read_text())["metrics"]["accuracy"]
    mood = json.loads((out / "metrics_train-mlp.json").read_text())["metrics"]["accuracy"]
    runs = []
    for i in range(2):
        d = tmp_path / f"run{i}"
        codes.append(cli_main(["analyze", "--input", str(corpus["clips"]), "--models", str(models),
                               "--out", str(d), "--seed", "0"]))
        runs.append([(d / n).read_bytes() for n in ("records.ndjson", "summary.csv", "summary.json")])
    elapsed = time.perf_counter() - t0
    checks = {
        "all commands exit 0": codes == [0, 0, 0, 0],
        "mood test accuracy >= 80%": mood >= 0.8,
        "environment test accuracy >= 80%": env >= 0.8,
        "analysis bitwise reproducible": runs[0] == runs[1],
        "runtime < 5 min": elapsed < 300.0,
    }
    verdict(8, "end-to-end synthetic corpus", checks,
            f"mood {mood:.2%}, environment {env:.2%}, {elapsed:.1f} s")


# -- 9 -------------------------------------------------------------------------

def test_serialization_round_trip(verdict, tmp_path):
    r = np.random.default_rng(9)
    x = r.standard_normal((120, 8))
    env = [("indoor", "outdoor", "tv_music")[i] for i in np.digitize(x[:, 0] + 0.3 * x[:, 1], [-0.5, 0.5])]
    mood = [("laugh", "sing", "cry", "arguing", "sigh")[i] for i in r.integers(0, 5, 120)]
    tree = train_tree(x, env)
    net = train_mlp(x, mood, MlpConfig(hidden=(16, 16, 8, 8), epochs=40))
    tree.save(tmp_path / "tree.json")
    net.save(tmp_path / "mlp.json")
    tree2 = DecisionTree.load(tmp_path / "tree.json")
    net2 = MlpModel.load(tmp_path / "mlp.json")
    probes = r.standard_normal((100, 8)) * 2
    checks = {
        "tree predictions identical": [tree.predict_one(p) for p in probes] == [tree2.predict_one(p) for p in probes],
        "network labels identical": net.predict(probes) == net2.predict(probes),
        "network probabilities identical": bool(np.array_equal(net.predict_proba(probes), net2.predict_proba(probes))),
    }
    verdict(9, "model serialization round trip", checks, "100 probes")


if __name__ == "__main__":
    sys.exit(pytest.main([str(Path(__file__)), "-q"]))
