"""Recurring temporal shapes in continuous streams.

Sliding windows are z-normalized, reduced by piecewise aggregate
approximation, and labeled with symbolic words via Gaussian breakpoints;
clustering the reduced vectors yields motifs whose occurrences can be
located, highlighted, and promoted into events for mining.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from datetime import date

import numpy as np
from scipy.stats import norm

from .events import _nominal_period, _split_at_midnight, rebuild_day_strings
from .ingest import SampleSet
from .model import DayString, EventRecord, KIND_MOTIF, ValidationError

FLAT_WINDOW_EPS = 1e-8
KMEANS_MAX_ITER = 100
KMEANS_TOL = 1e-6


@dataclass(frozen=True)
class MotifConfig:
    stream: str
    window_s: int = 1800
    stride_s: int | None = None
    paa_segments: int = 8
    sax_alphabet: int = 4
    k: int = 6
    seed: int = 0
    match_threshold: float = 1.0

    def __post_init__(self) -> None:
        if self.window_s <= 0:
            raise ValidationError("window_s must be positive")
        if self.stride_s is not None and self.stride_s <= 0:
            raise ValidationError("stride_s must be positive")
        if not (2 <= self.sax_alphabet <= 10):
            raise ValidationError("sax_alphabet must be in [2, 10]")
        if self.k < 1:
            raise ValidationError("k must be >= 1")
        if self.paa_segments < 1:
            raise ValidationError("paa_segments must be >= 1")

    @property
    def stride(self) -> int:
        return self.stride_s if self.stride_s is not None else max(1, self.window_s // 4)

    def to_json_dict(self) -> dict:
        return {
            "stream": self.stream,
            "window_s": self.window_s,
            "stride_s": self.stride,
            "paa_segments": self.paa_segments,
            "sax_alphabet": self.sax_alphabet,
            "k": self.k,
            "seed": self.seed,
            "match_threshold": self.match_threshold,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> MotifConfig:
        return cls(
            stream=data["stream"],
            window_s=int(data.get("window_s", 1800)),
            stride_s=int(data["stride_s"]) if data.get("stride_s") else None,
            paa_segments=int(data.get("paa_segments", 8)),
            sax_alphabet=int(data.get("sax_alphabet", 4)),
            k=int(data.get("k", 6)),
            seed=int(data.get("seed", 0)),
            match_threshold=float(data.get("match_threshold", 1.0)),
        )


@dataclass(frozen=True)
class Window:
    participant_id: str
    start: int
    end: int
    paa: tuple[float, ...]
    sax_word: str


@dataclass
class WindowSet:
    config: MotifConfig
    windows: list[Window]
    warnings: list[str] = field(default_factory=list)

    def matrix(self) -> np.ndarray:
        if not self.windows:
            return np.empty((0, self.config.paa_segments))
        return np.asarray([w.paa for w in self.windows], dtype=np.float64)


@dataclass(frozen=True)
class MotifOccurrence:
    participant_id: str
    start: int
    end: int
    distance: float

    def to_json_dict(self) -> dict:
        from .model import epoch_to_iso

        return {
            "participant_id": self.participant_id,
            "start": epoch_to_iso(self.start),
            "end": epoch_to_iso(self.end),
            "distance": self.distance,
        }


@dataclass
class Motif:
    motif_id: str
    centroid: tuple[float, ...]
    sax_word: str
    member_count: int
    occurrences: list[MotifOccurrence]

    def to_json_dict(self) -> dict:
        return {
            "motif_id": self.motif_id,
            "centroid": list(self.centroid),
            "sax_word": self.sax_word,
            "member_count": self.member_count,
            "occurrence_count": len(self.occurrences),
        }


# ---------------------------------------------------------------------------
# Window transform: z-normalize -> PAA -> SAX
# ---------------------------------------------------------------------------

def znormalize(window: np.ndarray) -> tuple[np.ndarray, bool]:
    """(z-scored window, is_flat); flat windows map to all zeros."""
    window = np.asarray(window, dtype=np.float64)
    std = window.std()
    if std < FLAT_WINDOW_EPS:
        return np.zeros_like(window), True
    return (window - window.mean()) / std, False


def paa(window: np.ndarray, segments: int) -> np.ndarray:
    """Piecewise aggregate approximation: per-segment means, samples assigned
    to segment floor(i * p / n)."""
    n = len(window)
    if segments > n:
        raise ValidationError(f"paa_segments {segments} exceeds window length {n}")
    bins = (np.arange(n) * segments) // n
    sums = np.bincount(bins, weights=window, minlength=segments)
    counts = np.bincount(bins, minlength=segments)
    return sums / counts


def sax_breakpoints(alphabet: int) -> np.ndarray:
    """Standard-normal equiprobable breakpoints for the alphabet size."""
    return norm.ppf(np.arange(1, alphabet) / alphabet)


def sax_word(paa_vector: np.ndarray, alphabet: int) -> str:
    cells = np.digitize(paa_vector, sax_breakpoints(alphabet))
    return "".join(chr(ord("a") + int(c)) for c in cells)


def flat_word(alphabet: int, segments: int) -> str:
    return chr(ord("a") + alphabet // 2) * segments


def window_transform(samples: SampleSet, config: MotifConfig) -> WindowSet:
    """Sliding-window features per participant for the configured stream.

    Windows spanning data gaps (observed span > 2x the nominal window) are
    skipped; streams shorter than one window contribute nothing but a
    warning.
    """
    out = WindowSet(config=config, windows=[])
    p = config.paa_segments
    for pid in samples.participants:
        times, values = samples.get(pid, config.stream)
        if len(times) == 0:
            continue
        period = _nominal_period(times)
        length = max(1, int(round(config.window_s / period)))
        if length < p:
            raise ValidationError(
                f"paa_segments {p} exceeds window sample count {length}"
            )
        if len(times) < length:
            out.warnings.append(
                f"stream {config.stream!r} for {pid} shorter than one window"
            )
            continue
        stride = max(1, int(round(config.stride / period)))
        for i in range(0, len(times) - length + 1, stride):
            span = int(times[i + length - 1]) - int(times[i]) + period
            if span > 2 * config.window_s:
                continue
            z, flat = znormalize(values[i : i + length])
            vector = paa(z, p)
            word = flat_word(config.sax_alphabet, p) if flat else sax_word(
                vector, config.sax_alphabet
            )
            out.windows.append(
                Window(
                    participant_id=pid,
                    start=int(times[i]),
                    end=int(times[i + length - 1]) + period,
                    paa=tuple(vector.tolist()),
                    sax_word=word,
                )
            )
    return out


# ---------------------------------------------------------------------------
# k-means clustering
# ---------------------------------------------------------------------------

def _kmeans_pp_init(X: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = len(X)
    centroids = np.empty((k, X.shape[1]))
    centroids[0] = X[rng.integers(n)]
    dist2 = ((X - centroids[0]) ** 2).sum(axis=1)
    for j in range(1, k):
        total = dist2.sum()
        if total <= 0:
            centroids[j] = X[rng.integers(n)]
        else:
            centroids[j] = X[rng.choice(n, p=dist2 / total)]
        dist2 = np.minimum(dist2, ((X - centroids[j]) ** 2).sum(axis=1))
    return centroids


def kmeans(
    X: np.ndarray,
    k: int,
    seed: int,
    max_iter: int = KMEANS_MAX_ITER,
    tol: float = KMEANS_TOL,
) -> tuple[np.ndarray, np.ndarray, list[float]]:
    """Deterministic seeded Lloyd iteration.

    Empty clusters are re-seeded from the farthest point. Returns (labels,
    centroids, objective history); the objective is asserted non-increasing
    every iteration.
    """
    if len(X) < k:
        raise ValidationError(
            f"{len(X)} windows cannot form {k} clusters; use a smaller k"
        )
    rng = np.random.default_rng(seed)
    centroids = _kmeans_pp_init(X, k, rng)
    history: list[float] = []
    for _ in range(max_iter):
        dists = ((X[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
        labels = dists.argmin(axis=1)
        for j in range(k):
            if not (labels == j).any():
                farthest = dists[np.arange(len(X)), labels].argmax()
                centroids[j] = X[farthest]
                dists[:, j] = ((X - centroids[j]) ** 2).sum(axis=1)
                labels = dists.argmin(axis=1)
        objective = float(dists[np.arange(len(X)), labels].sum())
        if history:
            assert objective <= history[-1] + 1e-9 * max(1.0, history[-1]), (
                "k-means objective increased"
            )
        history.append(objective)
        new_centroids = centroids.copy()
        for j in range(k):
            members = X[labels == j]
            if len(members):
                new_centroids[j] = members.mean(axis=0)
        shift = float(np.abs(new_centroids - centroids).max())
        centroids = new_centroids
        if shift < tol:
            break
    dists = ((X[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
    labels = dists.argmin(axis=1)
    return labels, centroids, history


# ---------------------------------------------------------------------------
# Motifs
# ---------------------------------------------------------------------------

def _suppress_overlaps(
    candidates: list[tuple[Window, float]]
) -> list[MotifOccurrence]:
    """Greedy non-overlap suppression: closest matches win; any overlapping
    later candidate from the same participant is dropped."""
    accepted: list[MotifOccurrence] = []
    spans: dict[str, list[tuple[int, int]]] = {}
    for window, distance in sorted(
        candidates, key=lambda c: (c[1], c[0].participant_id, c[0].start)
    ):
        taken = spans.setdefault(window.participant_id, [])
        if any(window.start < e and window.end > s for s, e in taken):
            continue
        taken.append((window.start, window.end))
        accepted.append(
            MotifOccurrence(
                participant_id=window.participant_id,
                start=window.start,
                end=window.end,
                distance=distance,
            )
        )
    accepted.sort(key=lambda o: (o.participant_id, o.start))
    return accepted


def cluster_motifs(windows: WindowSet, config: MotifConfig) -> list[Motif]:
    """k-means over the reduced window vectors; each cluster becomes a motif
    whose occurrences are its members after overlap suppression."""
    X = windows.matrix()
    labels, centroids, _history = kmeans(X, config.k, config.seed)
    motifs = []
    for j in range(config.k):
        member_idx = np.flatnonzero(labels == j)
        members = [windows.windows[i] for i in member_idx]
        dists = np.sqrt(((X[member_idx] - centroids[j]) ** 2).sum(axis=1))
        words = Counter(w.sax_word for w in members)
        if words:
            best = max(words.values())
            modal = min(w for w, c in words.items() if c == best)
        else:
            modal = ""
        motifs.append(
            Motif(
                motif_id="",
                centroid=tuple(centroids[j].tolist()),
                sax_word=modal,
                member_count=len(members),
                occurrences=_suppress_overlaps(list(zip(members, dists.tolist()))),
            )
        )
    motifs.sort(key=lambda m: (-m.member_count, m.sax_word, m.centroid))
    for idx, motif in enumerate(motifs):
        motif.motif_id = f"m{idx}"
    return motifs


def locate_motif(
    motif: Motif, samples: SampleSet, config: MotifConfig
) -> list[MotifOccurrence]:
    """Non-overlapping windows within match_threshold of the centroid,
    closest-first suppression, sorted by participant then time."""
    windows = window_transform(samples, config)
    centroid = np.asarray(motif.centroid)
    candidates = []
    for window in windows.windows:
        distance = float(np.sqrt(((np.asarray(window.paa) - centroid) ** 2).sum()))
        if distance <= config.match_threshold:
            candidates.append((window, distance))
    return _suppress_overlaps(candidates)


def motif_events(
    motif: Motif, occurrences: list[MotifOccurrence] | None = None
) -> list[EventRecord]:
    """MOTIF EventRecords for the occurrences, split at midnight."""
    occurrences = motif.occurrences if occurrences is None else occurrences
    events: list[EventRecord] = []

    def make(pid: str, day: date, s: int, e: int) -> EventRecord:
        return EventRecord(
            participant_id=pid,
            day=day,
            start=s,
            end=e,
            kind=KIND_MOTIF,
            motif_id=motif.motif_id,
        )

    for occ in occurrences:
        events.extend(_split_at_midnight(occ.participant_id, occ.start, occ.end, make))
    return events


def promote_motif(
    motif: Motif,
    base_events: list[EventRecord],
    occurrences: list[MotifOccurrence] | None = None,
) -> tuple[list[EventRecord], list[DayString]]:
    """Add the motif's occurrences to the event alphabet and rebuild the day
    strings. Re-promotion is idempotent (duplicate events collapse)."""
    extra = motif_events(motif, occurrences)
    day_strings = rebuild_day_strings(base_events, extra)
    merged = sorted(
        dict.fromkeys(base_events + extra),
        key=lambda e: (e.participant_id, e.start, e.kind, e.end),
    )
    return merged, day_strings
