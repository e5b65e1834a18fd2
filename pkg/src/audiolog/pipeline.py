"""End-to-end processing of clip directories and labelled manifests.

Per clip the stages run in a fixed order: load, canonicalize, speech
detection, silence suppression, denoising, CSNE, environment
classification, diarization, per-segment features and mood
classification. With the ``audiolog.pipeline`` logger at DEBUG level each
stage logs ``stage <name> <source>`` as it starts.
"""

from __future__ import annotations

import csv
import json
import logging
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .audio_io import AudioClip, canonicalize, load_wav
from .classify.labels import ENVIRONMENT_CLASSES, MOOD_CLASSES
from .classify.metrics import Metrics, evaluate
from .classify.mlp import MlpModel, classify_mood, train_mlp
from .classify.tree import DecisionTree, classify_environment, train_tree
from .config import PipelineConfig
from .denoise import csne_db, denoise
from .diarize import SpeakerSegment, diarize, single_speaker
from .dsp import HOP, frame_count, frame_signal
from .errors import (
    AudioLogError,
    DegenerateClusters,
    ManifestMalformed,
    ModelMissing,
    NoInputs,
    NoSpeechDetected,
    TooLittleSpeech,
)
from .features.lld import extract_lld
from .features.vector import clip_features
from .vad import VadDecision, detect_speech, suppress_silence

log = logging.getLogger("audiolog.pipeline")

ENV_FEATURES = ("csne_db", "energy_mean", "energy_std", "flatness_mean", "centroid_mean", "zcr_mean")


def _stage(name: str, source: str) -> None:
    log.debug("stage %s %s", name, source)


@dataclass
class AnalysisRecord:
    source_id: str
    duration_s: float = 0.0
    speech_fraction: float = 0.0
    csne_db: float | None = None
    environment: str | None = None
    environment_confidence: float | None = None
    segments: list[dict] = field(default_factory=list)
    mood: str | None = None
    curated: dict | None = None
    warnings: list[str] = field(default_factory=list)
    error: str | None = None

    def to_dict(self) -> dict:
        d = {
            "source_id": self.source_id,
            "duration_s": self.duration_s,
            "speech_fraction": self.speech_fraction,
            "csne_db": self.csne_db,
            "environment": None if self.environment is None
            else {"label": self.environment, "confidence": self.environment_confidence},
            "segments": self.segments,
            "curated": self.curated,
            "warnings": self.warnings,
        }
        if self.mood is not None:
            d["mood"] = self.mood
        if self.error is not None:
            d["error"] = self.error
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, allow_nan=False)


@dataclass(frozen=True)
class ClipChain:
    """Intermediate products of the front half of the chain for one clip."""

    canonical: AudioClip
    vad: VadDecision
    speech: AudioClip | None
    enhanced: AudioClip
    csne_db: float
    env_features: np.ndarray
    warnings: tuple[str, ...]


MIN_BACKGROUND_FRAMES = 20


def environment_features(canonical: AudioClip, csne: float, vad: VadDecision | None = None) -> np.ndarray:
    """CSNE plus LLD statistics of the background.

    The LLD statistics come from the frames the VAD left as non-speech, since
    those carry the surroundings rather than the talker; with fewer than
    ``MIN_BACKGROUND_FRAMES`` of them the whole clip is used.
    """
    lld = extract_lld(canonical)
    rows = lld.frames
    if vad is not None:
        quiet = ~vad.speech_flags[: rows.shape[0]]
        if quiet.sum() >= MIN_BACKGROUND_FRAMES:
            rows = rows[quiet]
    col = {c: rows[:, i] for i, c in enumerate(lld.columns)}
    return np.array([
        csne,
        col["energy"].mean(),
        col["energy"].std(),
        col["flatness"].mean(),
        col["centroid"].mean(),
        col["zcr"].mean(),
    ])


def front_end(clip: AudioClip, cfg: PipelineConfig) -> ClipChain:
    """Canonicalize, detect speech, suppress silence, denoise and measure CSNE.

    A clip with no speech is denoised whole so the environment can still be
    classified; the returned ``speech`` is then None.
    """
    src = clip.source_id
    warnings = []
    _stage("canonicalize", src)
    canonical = canonicalize(clip)
    _stage("vad", src)
    vad = detect_speech(frame_signal(canonical, "rect"), cfg.vad)
    _stage("suppress_silence", src)
    try:
        speech = suppress_silence(canonical, vad)
    except NoSpeechDetected:
        speech = None
        warnings.append("no speech")
    _stage("denoise", src)
    base = speech if speech is not None else canonical
    enhanced = denoise(base, cfg.denoise)
    _stage("csne", src)
    csne = csne_db(base, enhanced, cfg.denoise.csne_cap_db)
    env = environment_features(canonical, csne, vad)
    return ClipChain(canonical, vad, speech, enhanced, csne, env, tuple(warnings))


def segment_clip(clip: AudioClip, seg: SpeakerSegment, n_frames: int) -> AudioClip:
    start, stop = seg.sample_span(len(clip), n_frames)
    return clip.with_samples(clip.samples[start:stop])


def majority(labels, weights, classes) -> str:
    tally = Counter()
    for lab, w in zip(labels, weights):
        tally[lab] += w
    best = max(tally.values())
    return next(c for c in classes if tally.get(c, -1) == best)


def _rounded(d: dict) -> dict:
    return {k: (float(v) if isinstance(v, (float, np.floating)) else v) for k, v in d.items()}


def analyze_clip(clip: AudioClip, cfg: PipelineConfig, tree: DecisionTree, mlp: MlpModel) -> AnalysisRecord:
    src = clip.source_id
    chain = front_end(clip, cfg)
    rec = AnalysisRecord(src, chain.canonical.duration_s, chain.vad.speech_fraction, chain.csne_db)
    rec.warnings.extend(chain.warnings)

    _stage("environment", src)
    rec.environment, rec.environment_confidence = classify_environment(tree, chain.env_features)
    if chain.speech is None:
        return rec

    _stage("diarize", src)
    enhanced = chain.enhanced
    n_frames = frame_count(len(enhanced))
    vad = VadDecision.all_speech(n_frames)
    try:
        segments = diarize(enhanced, vad, cfg.diarize_cfg)
    except (DegenerateClusters, TooLittleSpeech) as exc:
        segments = single_speaker(vad)
        rec.warnings.append(f"single speaker ({type(exc).__name__})")

    _stage("features", src)
    fv, curated, _ = clip_features(enhanced, cfg.features)
    rec.curated = _rounded(curated.to_dict())
    seg_moods, seg_weights = [], []
    _stage("mood", src)
    for seg in segments:
        part = segment_clip(enhanced, seg, n_frames)
        speech_part = segment_clip(chain.speech, seg, n_frames)
        sfv, scur, _ = clip_features(part, cfg.features)
        label, probs = classify_mood(mlp, sfv)
        entry = seg.to_dict(HOP, enhanced.sample_rate_hz)
        entry["csne_db"] = csne_db(speech_part, part, cfg.denoise.csne_cap_db)
        entry["mood"] = {"label": label, "probabilities": dict(zip(mlp.classes, map(float, probs)))}
        entry["curated"] = _rounded(scur.to_dict())
        rec.segments.append(entry)
        seg_moods.append(label)
        seg_weights.append(seg.n_frames)
    rec.mood = majority(seg_moods, seg_weights, mlp.classes)
    return rec


# -- batch runs ---------------------------------------------------------------

def list_wavs(input_dir: str | Path) -> list[Path]:
    d = Path(input_dir)
    if not d.is_dir():
        raise NoInputs(f"{d} is not a directory")
    paths = sorted(p for p in d.iterdir() if p.suffix.lower() == ".wav" and p.is_file())
    if not paths:
        raise NoInputs(f"no .wav files in {d}")
    return paths


def load_models(models_dir: str | Path, cfg: PipelineConfig) -> tuple[DecisionTree, MlpModel]:
    d = Path(models_dir)
    tree_path, mlp_path = d / cfg.models.environment, d / cfg.models.mood
    for p in (tree_path, mlp_path):
        if not p.is_file():
            raise ModelMissing(f"model file {p} not found")
    return DecisionTree.load(tree_path), MlpModel.load(mlp_path)


def _analyze_path(args) -> AnalysisRecord:
    path, cfg, tree, mlp = args
    _stage("load", path.name)
    try:
        clip = load_wav(path)
        return analyze_clip(clip, cfg, tree, mlp)
    except (AudioLogError, OSError) as exc:
        return AnalysisRecord(path.name, warnings=[f"failed: {type(exc).__name__}"], error=str(exc))


def _map(fn, items, jobs: int) -> list:
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def summarize(records: list[AnalysisRecord]) -> dict:
    ok = [r for r in records if r.error is None]
    csnes = [r.csne_db for r in ok if r.csne_db is not None]
    return {
        "clips": len(records),
        "analyzed": len(ok),
        "failed": len(records) - len(ok),
        "environment_counts": dict(sorted(Counter(r.environment for r in ok if r.environment).items())),
        "mood_counts": dict(sorted(Counter(r.mood for r in ok if r.mood).items())),
        "segment_mood_counts": dict(sorted(Counter(s["mood"]["label"] for r in ok for s in r.segments).items())),
        "mean_csne_db": float(np.mean(csnes)) if csnes else None,
    }


def run_analyze(input_dir, cfg: PipelineConfig, models_dir) -> tuple[list[AnalysisRecord], dict]:
    """Analyse every WAV in ``input_dir``; records come back in file-name order."""
    paths = list_wavs(input_dir)
    tree, mlp = load_models(models_dir, cfg)
    records = _map(_analyze_path, [(p, cfg, tree, mlp) for p in paths], cfg.jobs)
    return records, summarize(records)


SUMMARY_COLUMNS = ("source_id", "duration_s", "speech_fraction", "csne_db", "environment",
                   "environment_confidence", "mood", "n_segments", "warnings")


def write_outputs(records: list[AnalysisRecord], summary: dict, out_dir) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "records.ndjson", "w") as fh:
        for r in records:
            fh.write(r.to_json() + "\n")
    with open(out / "summary.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(SUMMARY_COLUMNS)
        for r in records:
            w.writerow([r.source_id, r.duration_s, r.speech_fraction, r.csne_db, r.environment,
                        r.environment_confidence, r.mood, len(r.segments), "; ".join(r.warnings)])
    (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True))


# -- manifests and training ------------------------------------------------------

@dataclass(frozen=True)
class ManifestRow:
    path: Path
    label: str
    split: str
    line: int


def read_manifest(path, classes) -> list[ManifestRow]:
    """Parse a ``path,label,split`` CSV; paths are relative to the manifest's directory."""
    path = Path(path)
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise ManifestMalformed(f"{path}: {exc}") from exc
    with fh:
        reader = csv.DictReader(fh)
        missing = {"path", "label", "split"} - set(reader.fieldnames or [])
        if missing:
            raise ManifestMalformed(f"{path}: missing column(s) {', '.join(sorted(missing))}")
        rows = []
        for line, r in enumerate(reader, start=2):
            label, split = (r["label"] or "").strip(), (r["split"] or "").strip()
            if label not in classes:
                raise ManifestMalformed(f"{path}:{line}: label {label!r} is not one of {', '.join(classes)}")
            if split not in ("train", "test"):
                raise ManifestMalformed(f"{path}:{line}: split {split!r} must be train or test")
            clip_path = Path((r["path"] or "").strip())
            if not clip_path.is_absolute():
                clip_path = path.parent / clip_path
            rows.append(ManifestRow(clip_path, label, split, line))
    if not rows:
        raise ManifestMalformed(f"{path}: no rows")
    return rows


def _clip_vectors(args):
    path, cfg, want = args
    chain = front_end(load_wav(path), cfg)
    if want == "environment":
        return chain.env_features
    if chain.speech is None:
        return None
    return clip_features(chain.enhanced, cfg.features)[0].values


def manifest_features(rows: list[ManifestRow], cfg: PipelineConfig, target: str):
    """Feature rows for ``target`` ('environment' or 'mood'); clips without speech are dropped for mood."""
    try:
        vecs = _map(_clip_vectors, [(r.path, cfg, target) for r in rows], cfg.jobs)
    except OSError as exc:
        raise ManifestMalformed(str(exc)) from exc
    kept = [(r, v) for r, v in zip(rows, vecs) if v is not None]
    for r, v in zip(rows, vecs):
        if v is None:
            log.warning("%s: no speech, row skipped", r.path.name)
    return kept


@dataclass
class TrainResult:
    model: DecisionTree | MlpModel
    metrics: Metrics | None
    n_train: int
    n_test: int
    skipped: int


def run_train(mode: str, manifest, cfg: PipelineConfig) -> TrainResult:
    """Train the environment tree (``train-tree``) or mood network (``train-mlp``)."""
    if mode == "train-tree":
        classes, target = ENVIRONMENT_CLASSES, "environment"
    elif mode == "train-mlp":
        classes, target = MOOD_CLASSES, "mood"
    else:
        raise ValueError(f"unknown training mode {mode!r}")
    rows = read_manifest(manifest, classes)
    if len({r.label for r in rows if r.split == "train"}) < 2:
        raise ManifestMalformed(f"{manifest}: training split needs at least two classes")
    kept = manifest_features(rows, cfg, target)
    train = [(r, v) for r, v in kept if r.split == "train"]
    test = [(r, v) for r, v in kept if r.split == "test"]
    x = np.array([v for _, v in train])
    y = [r.label for r, _ in train]
    if target == "environment":
        model = train_tree(x, y, cfg.tree, classes)
    else:
        model = train_mlp(x, y, cfg.mlp_cfg, classes)
    metrics = evaluate(model, np.array([v for _, v in test]), [r.label for r, _ in test]) if test else None
    return TrainResult(model, metrics, len(train), len(test), len(rows) - len(kept))


def run_evaluate(manifest, cfg: PipelineConfig, models_dir) -> Metrics:
    """Score the stored model matching the manifest's label set on its test split."""
    with open(manifest, newline="") as fh:
        labels = {(r.get("label") or "").strip() for r in csv.DictReader(fh)}
    if labels and labels <= set(ENVIRONMENT_CLASSES):
        classes, target, name = ENVIRONMENT_CLASSES, "environment", cfg.models.environment
    else:
        classes, target, name = MOOD_CLASSES, "mood", cfg.models.mood
    rows = [r for r in read_manifest(manifest, classes) if r.split == "test"]
    model_path = Path(models_dir) / name
    if not model_path.is_file():
        raise ModelMissing(f"model file {model_path} not found")
    model = DecisionTree.load(model_path) if target == "environment" else MlpModel.load(model_path)
    kept = manifest_features(rows, cfg, target)
    return evaluate(model, np.array([v for _, v in kept]), [r.label for r, _ in kept])


def feature_table(input_dir, cfg: PipelineConfig) -> list[dict]:
    """Curated scalars and fused vector per clip, from the enhanced speech."""
    out = []
    for path in list_wavs(input_dir):
        try:
            chain = front_end(load_wav(path), cfg)
        except (AudioLogError, OSError) as exc:
            log.warning("%s: %s", path.name, exc)
            continue
        fv, curated, _ = clip_features(chain.enhanced, cfg.features)
        row = {"source_id": path.name, "csne_db": chain.csne_db}
        row.update({k: v for k, v in curated.to_dict().items() if k != "flags"})
        row["flags"] = ";".join(curated.flags + chain.warnings)
        row["vector"] = fv.values.tolist()
        out.append(row)
    return out


def write_feature_table(rows: list[dict], out_dir) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "features.json").write_text(json.dumps(rows, indent=1, allow_nan=False))
    if not rows:
        return
    scalar = [k for k in rows[0] if k != "vector"]
    n = len(rows[0]["vector"])
    with open(out / "features.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(scalar + [f"v{i}" for i in range(n)])
        for r in rows:
            w.writerow([r[k] for k in scalar] + r["vector"])
