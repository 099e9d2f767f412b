"""Seeded synthetic cohorts with the three-source schema and a planted signal.

Each planted attribute has a threshold on the min-max normalized scale.
A student's value lies above it ("on") when the student passes, except
that the indicator is flipped independently per attribute with
probability ``noise / weight`` (capped at 0.5).  The normalized minimum
and maximum are pinned to 0 and 1 so the thresholds survive rescaling.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..dataset import (SCORES_FILE, SOURCE_FILES, Dataset, default_schema, write_scores_csv,
                       write_source_csv)
from ..errors import ConfigError

# name -> (normalized threshold, raw range, integer counts?)
PLANTED = {
    "SummAll": (0.03, 120.0, True),
    "COIStotalFreq": (0.30, 40.0, True),
    "AOI3FixCount": (0.29, 400.0, True),
    "surprise": (0.05, 0.6, False),
}

DEFAULT_SIGNAL = {"SummAll": 2.0, "COIStotalFreq": 0.5, "AOI3FixCount": 2.0, "surprise": 2.0}


@dataclass(frozen=True)
class GenParams:
    n: int = 40
    n_pass: int = 21
    noise: float = 0.2
    signal: dict = field(default_factory=lambda: dict(DEFAULT_SIGNAL))

    def __post_init__(self):
        if self.n < 2:
            raise ConfigError("a cohort needs at least two students")
        if not 0 <= self.n_pass <= self.n:
            raise ConfigError(f"infeasible balance: {self.n_pass} PASS of {self.n}")
        if not 0.0 <= self.noise <= 0.5:
            raise ConfigError("noise must lie in [0, 0.5]")
        for name, w in self.signal.items():
            if name not in PLANTED:
                raise ConfigError(f"no planted threshold for attribute {name!r}")
            if w < 0:
                raise ConfigError(f"signal weight for {name!r} must be non-negative")

    def flip_probability(self, name: str) -> float:
        w = self.signal.get(name, 0.0)
        if w <= 0:
            return 0.5
        return min(0.5, self.noise / w)


def _planted_column(rng, on, threshold, span, integer):
    n = len(on)
    z = np.where(on,
                 threshold + (1.0 - threshold) * rng.beta(1.2, 3.0, n),
                 threshold * rng.random(n))
    if on.any():
        z[np.flatnonzero(on)[np.argmax(z[on])]] = 1.0
    if (~on).any():
        z[np.flatnonzero(~on)[np.argmin(z[~on])]] = 0.0
    if not integer:
        return z * span
    raw = np.where(on, np.ceil(z * span - 1e-9), np.floor(z * span))
    return raw


def synthesize(params: GenParams | None = None, seed: int = 1) -> tuple[list[Dataset], dict[str, float]]:
    """Three single-source datasets plus the id -> mark table."""
    params = params or GenParams()
    rng = np.random.default_rng(seed)
    schema = default_schema()
    n = params.n
    passed = np.zeros(n, dtype=bool)
    passed[rng.permutation(n)[: params.n_pass]] = True
    marks = np.where(passed, np.round(rng.uniform(5.0, 10.0, n), 2),
                     np.round(rng.uniform(0.0, 4.99, n), 2))
    ids = tuple(f"s{i + 1:02d}" for i in range(n))

    cols = {}
    for name, (thr, span, integer) in PLANTED.items():
        flip = rng.random(n) < params.flip_probability(name)
        cols[name] = _planted_column(rng, passed ^ flip, thr, span, integer)
    cols["PKAtotalFreq"] = rng.poisson(6.0, n).astype(float)
    cols["AOI1FixCount"] = rng.poisson(60.0, n).astype(float)
    cols["AOI2FixCount"] = rng.poisson(35.0, n).astype(float)
    for emo in ("anger", "contempt", "disgust", "fear", "happiness", "sadness"):
        cols[emo] = np.round(rng.beta(1.0, 9.0, n), 6)
    cols["neutral"] = np.round(0.3 + 0.6 * rng.beta(4.0, 2.0, n), 6)
    cols["surprise"] = np.round(cols["surprise"], 6)

    parts = []
    for src in schema.sources:
        sub = schema.for_source(src)
        X = np.column_stack([cols[a.name] for a in sub.attributes])
        parts.append(Dataset(sub, ids, X))
    return parts, {i: float(m) for i, m in zip(ids, marks)}


def generate_synthetic(params: GenParams | None, seed: int, out_dir) -> list[Path]:
    """Write ``logs.csv``, ``emotion.csv``, ``gaze.csv`` and ``scores.csv``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    parts, scores = synthesize(params, seed)
    paths = []
    for p in parts:
        src = p.schema.sources[0]
        path = out / SOURCE_FILES[src]
        write_source_csv(p, src, path)
        paths.append(path)
    path = out / SCORES_FILE
    write_scores_csv(list(scores), list(scores.values()), path)
    paths.append(path)
    return paths

