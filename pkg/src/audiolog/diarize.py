"""Unsupervised two-speaker segmentation with a Fisher discriminant.

MFCC frames are split by k-means, then refined by alternating between
fitting a Fisher linear discriminant to the current labels and relabelling
every frame by its nearer class mean along the discriminant axis. Labels are
median-smoothed in time on each pass, which is what makes the refinement
use the sequential structure of conversation rather than treating frames
independently.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.cluster.vq import kmeans2
from scipy.ndimage import median_filter

from .audio_io import AudioClip
from .dsp import FFT_SIZE, FRAME_LEN, HOP, frame_array
from .errors import DegenerateClusters, DegenerateMeans, SingularScatter, TooLittleSpeech
from .features.lld import mfcc_from_power
from .vad import VadDecision

SPEAKERS = ("S1", "S2")


@dataclass(frozen=True)
class DiarizeConfig:
    seed: int = 0
    smooth_frames: int = 25
    min_turn_frames: int = 50
    max_iter: int = 20
    ridge: float = 1e-6
    # below this Fisher ratio on the final labels the clip is one speaker
    min_separation: float = 1.0


@dataclass(frozen=True)
class SpeakerSegment:
    start_frame: int
    end_frame: int  # exclusive
    speaker_id: str

    @property
    def n_frames(self) -> int:
        return self.end_frame - self.start_frame

    def seconds(self, hop: int = HOP, sample_rate: int = 11025) -> tuple[float, float]:
        return self.start_frame * hop / sample_rate, self.end_frame * hop / sample_rate

    def sample_span(self, n_samples: int, n_frames: int, hop: int = HOP) -> tuple[int, int]:
        """Samples owned by the segment under the hop-sized frame ownership rule."""
        stop = self.end_frame * hop if self.end_frame < n_frames else n_samples
        return self.start_frame * hop, min(stop, n_samples)

    def to_dict(self, hop: int = HOP, sample_rate: int = 11025) -> dict:
        start_s, end_s = self.seconds(hop, sample_rate)
        return {
            "speaker": self.speaker_id,
            "start_frame": self.start_frame,
            "end_frame": self.end_frame,
            "start_s": round(start_s, 4),
            "end_s": round(end_s, 4),
        }


def _scatter(x: np.ndarray, labels: np.ndarray):
    a, b = x[labels == 0], x[labels == 1]
    if a.shape[0] == 0 or b.shape[0] == 0:
        raise DegenerateClusters("one class is empty")
    mu_a, mu_b = a.mean(axis=0), b.mean(axis=0)
    da, db = a - mu_a, b - mu_b
    return mu_a, mu_b, da.T @ da + db.T @ db


def fld_axis(x: np.ndarray, labels: np.ndarray, ridge: float = 1e-6) -> np.ndarray:
    """Unit vector along ``S_w^-1 (mu_1 - mu_2)`` for a two-class labelling."""
    x = np.asarray(x, dtype=np.float64)
    labels = np.asarray(labels).astype(int)
    mu_a, mu_b, sw = _scatter(x, labels)
    diff = mu_a - mu_b
    if np.linalg.norm(diff) <= 1e-12 * max(1.0, np.abs(x).max()):
        raise DegenerateMeans("class means coincide")
    sw = sw + ridge * np.eye(sw.shape[0])
    try:
        w = np.linalg.solve(sw, diff)
    except np.linalg.LinAlgError as exc:
        raise SingularScatter(str(exc)) from exc
    if not np.all(np.isfinite(w)) or np.linalg.cond(sw) > 1e14:
        raise SingularScatter("within-class scatter is singular")
    return w / np.linalg.norm(w)


def fisher_criterion(x: np.ndarray, labels: np.ndarray, w: np.ndarray) -> float:
    """Between-class over within-class scatter of the projection onto ``w``."""
    mu_a, mu_b, sw = _scatter(np.asarray(x, dtype=np.float64), np.asarray(labels).astype(int))
    between = float(w @ (mu_a - mu_b)) ** 2
    within = float(w @ sw @ w)
    return between / within if within > 0 else np.inf


def fisher_ratio_1d(proj: np.ndarray, labels: np.ndarray) -> float:
    a, b = proj[labels == 0], proj[labels == 1]
    if a.size == 0 or b.size == 0:
        return 0.0
    return float((a.mean() - b.mean()) ** 2 / max(a.var() + b.var(), 1e-12))


def smooth_labels(labels: np.ndarray, width: int) -> np.ndarray:
    if width <= 1:
        return labels.copy()
    return median_filter(labels.astype(int), size=width, mode="nearest")


def runs(labels: np.ndarray) -> list[tuple[int, int, int]]:
    """(start, stop, label) for each maximal constant run."""
    if labels.size == 0:
        return []
    cuts = np.flatnonzero(np.diff(labels)) + 1
    starts = np.concatenate([[0], cuts])
    stops = np.concatenate([cuts, [labels.size]])
    return [(int(s), int(e), int(labels[s])) for s, e in zip(starts, stops)]


def merge_short_runs(labels: np.ndarray, min_len: int) -> np.ndarray:
    """Absorb runs shorter than ``min_len`` into their longer neighbour, shortest first."""
    out = labels.copy()
    while True:
        rs = runs(out)
        if len(rs) <= 1:
            return out
        i = min(range(len(rs)), key=lambda j: (rs[j][1] - rs[j][0], j))
        s, e, _ = rs[i]
        if e - s >= min_len:
            return out
        left = rs[i - 1] if i > 0 else None
        right = rs[i + 1] if i + 1 < len(rs) else None
        if left is None or (right is not None and right[1] - right[0] > left[1] - left[0]):
            out[s:e] = right[2]
        else:
            out[s:e] = left[2]


def speech_mfcc(clip: AudioClip, vad: VadDecision) -> tuple[np.ndarray, np.ndarray]:
    """MFCC rows of the speech frames and the frame index of each row."""
    frames = frame_array(clip.samples, FRAME_LEN, HOP, "hann")
    n = min(frames.shape[0], len(vad))
    index = np.flatnonzero(vad.speech_flags[:n])
    power = np.abs(np.fft.rfft(frames[index], n=FFT_SIZE, axis=1)) ** 2
    return mfcc_from_power(power), index


def _relabel(proj: np.ndarray, labels: np.ndarray) -> np.ndarray:
    m0, m1 = proj[labels == 0].mean(), proj[labels == 1].mean()
    return (np.abs(proj - m1) < np.abs(proj - m0)).astype(int)


def cluster_frames(x: np.ndarray, cfg: DiarizeConfig = DiarizeConfig()) -> np.ndarray:
    """Two-way frame labels (0/1, first frame labelled 0) for MFCC rows ``x``."""
    if x.shape[0] < 2 * cfg.min_turn_frames:
        raise TooLittleSpeech(f"{x.shape[0]} speech frames, need {2 * cfg.min_turn_frames}")
    sd = x.std(axis=0)
    z = (x - x.mean(axis=0)) / np.where(sd > 1e-12, sd, 1.0)
    rng = np.random.default_rng(cfg.seed)
    _, labels = kmeans2(z, 2, minit="++", seed=rng)
    labels = smooth_labels(labels, cfg.smooth_frames)
    for _ in range(cfg.max_iter):
        try:
            w = fld_axis(z, labels, cfg.ridge)
        except DegenerateMeans as exc:
            raise DegenerateClusters(str(exc)) from exc
        new = smooth_labels(_relabel(z @ w, labels), cfg.smooth_frames)
        if np.array_equal(new, labels):
            break
        labels = new
        if labels.min() == labels.max():
            raise DegenerateClusters("relabelling emptied a cluster")
    labels = merge_short_runs(labels, cfg.min_turn_frames)
    if labels.min() == labels.max():
        raise DegenerateClusters("one speaker after merging short turns")
    if fisher_ratio_1d(z @ fld_axis(z, labels, cfg.ridge), labels) < cfg.min_separation:
        raise DegenerateClusters("speaker classes are not separable")
    return labels if labels[0] == 0 else 1 - labels


def segments_from_labels(labels: np.ndarray, frame_index: np.ndarray | None = None) -> list[SpeakerSegment]:
    """Segments in clip frame indices; ``frame_index`` maps speech rows to frames.

    A run is split wherever the speech frames it covers are not contiguous,
    so the segments tile the speech frames exactly.
    """
    idx = np.arange(labels.size) if frame_index is None else np.asarray(frame_index)
    segs = []
    for s, e, lab in runs(labels):
        piece = idx[s:e]
        breaks = np.flatnonzero(np.diff(piece) > 1) + 1
        for part in np.split(piece, breaks):
            segs.append(SpeakerSegment(int(part[0]), int(part[-1]) + 1, SPEAKERS[lab]))
    return segs


def diarize(clip: AudioClip, vad: VadDecision, cfg: DiarizeConfig = DiarizeConfig()) -> list[SpeakerSegment]:
    """Two-speaker segments over the speech frames of ``clip``.

    Raises :class:`DegenerateClusters` when the frames do not split into two
    separable speakers; callers treat the clip as single-speaker.
    """
    x, index = speech_mfcc(clip, vad)
    labels = cluster_frames(x, cfg)
    return segments_from_labels(labels, index)


def single_speaker(vad: VadDecision) -> list[SpeakerSegment]:
    """One S1 segment per contiguous speech run: the degenerate-case fallback."""
    return [SpeakerSegment(s, e, SPEAKERS[0]) for s, e, lab in runs(vad.speech_flags.astype(int)) if lab == 1]
