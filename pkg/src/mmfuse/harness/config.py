"""Experiment configuration and its flat ``key = value`` file format.

Example::

    # comments start with '#'
    modes = merge_all, select_merged, ensemble_per_source
    representations = numerical, discretized
    algorithms = C45Tree, REPTree, RandomTree, Ripper, PartRules, NNGE
    k = 10
    cv_seed = 1
    gen_seed = 3
    output_dir = out

Lists are comma separated.  ``input_dir`` points at a directory holding
``logs.csv``, ``emotion.csv``, ``gaze.csv`` and ``scores.csv``; without it
a synthetic cohort is generated from ``gen_*`` keys.  Seeds left unset
take the value of the ``FUSE_SEED`` environment variable, else 1.
"""
from __future__ import annotations

import hashlib
import json
import os
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

from ..errors import ConfigError, DataError
from ..learners.base import ALGORITHMS, canonical_algorithm
from ..preprocess import ClassCutoffs
from .synthetic import DEFAULT_SIGNAL, GenParams

MODES = ("merge_all", "select_merged", "ensemble_per_source")
REPRESENTATIONS = ("numerical", "discretized")
FORMATS = ("text", "csv", "json")
SEED_KEYS = ("cv_seed", "gen_seed", "learner_seed", "anon_seed")
SEED_ENV = "FUSE_SEED"


@dataclass(frozen=True)
class ExperimentConfig:
    input_dir: str | None = None
    gen_n: int = 40
    gen_pass: int = 21
    gen_noise: float = 0.2
    gen_signal: tuple[tuple[str, float], ...] = tuple(DEFAULT_SIGNAL.items())
    modes: tuple[str, ...] = MODES
    representations: tuple[str, ...] = REPRESENTATIONS
    algorithms: tuple[str, ...] = ALGORITHMS
    k: int = 10
    cv_seed: int = 1
    gen_seed: int = 1
    learner_seed: int = 1
    anon_seed: int = 1
    n_bins: int = 3
    cutoffs: tuple[float, ...] = (5.0,)
    cutoff_labels: tuple[str, ...] = ("FAIL", "PASS")
    output_dir: str = "fuse_out"
    fit_in_fold: bool = False
    allow_missing: bool = False
    vote_across_algorithms: bool = False
    formats: tuple[str, ...] = FORMATS

    def __post_init__(self):
        for name in ("modes", "representations", "algorithms"):
            if not getattr(self, name):
                raise ConfigError(f"{name} must name at least one entry")
        _check_members("mode", self.modes, MODES)
        _check_members("representation", self.representations, REPRESENTATIONS)
        _check_members("format", self.formats, FORMATS)
        algos = tuple(canonical_algorithm(a) for a in self.algorithms)
        if len(set(algos)) != len(algos):
            raise ConfigError("algorithms listed twice")
        object.__setattr__(self, "algorithms", tuple(a for a in ALGORITHMS if a in algos))
        object.__setattr__(self, "modes", tuple(m for m in MODES if m in self.modes))
        object.__setattr__(self, "representations",
                           tuple(r for r in REPRESENTATIONS if r in self.representations))
        if self.k < 2:
            raise ConfigError("k must be at least 2")
        if self.n_bins < 2:
            raise ConfigError("n_bins must be at least 2")
        if self.input_dir is None and self.gen_n < self.k:
            raise ConfigError(f"gen_n={self.gen_n} is smaller than k={self.k}")
        try:
            self.class_cutoffs
            self.gen_params
        except DataError as exc:
            raise ConfigError(str(exc)) from None

    @property
    def class_cutoffs(self) -> ClassCutoffs:
        return ClassCutoffs(self.cutoffs, self.cutoff_labels)

    @property
    def gen_params(self) -> GenParams:
        return GenParams(self.gen_n, self.gen_pass, self.gen_noise, dict(self.gen_signal))

    @property
    def seeds(self) -> dict[str, int]:
        return {k: getattr(self, k) for k in SEED_KEYS}

    def to_dict(self) -> dict:
        d = asdict(self)
        d["gen_signal"] = [list(p) for p in self.gen_signal]
        return d

    def hash(self) -> str:
        """Digest of every setting that affects results (not the output location)."""
        d = self.to_dict()
        d.pop("output_dir")
        d.pop("formats")
        blob = json.dumps(d, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]

    def with_output(self, output_dir) -> ExperimentConfig:
        return replace(self, output_dir=str(output_dir))


def _check_members(what, values, allowed):
    bad = [v for v in values if v not in allowed]
    if bad:
        raise ConfigError(f"unknown {what} {bad[0]!r}; expected one of {', '.join(allowed)}")
    if len(set(values)) != len(values):
        raise ConfigError(f"{what} listed twice")


def _split(text):
    return tuple(p.strip() for p in text.split(",") if p.strip())


def _bool(text):
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _signal(text):
    out = []
    for item in _split(text):
        name, sep, w = item.partition(":")
        if not sep:
            raise ValueError(f"signal entries look like name:weight, got {item!r}")
        out.append((name.strip(), float(w)))
    return tuple(out)


_FIELD_TYPES = {f.name: f.type for f in fields(ExperimentConfig)}

_PARSERS = {
    "input_dir": lambda t: t.strip() or None,
    "output_dir": str.strip,
    "gen_signal": _signal,
    "cutoffs": lambda t: tuple(float(v) for v in _split(t)),
    "fit_in_fold": _bool,
    "allow_missing": _bool,
    "vote_across_algorithms": _bool,
    "gen_noise": float,
}


def _parse_value(key, text):
    if key in _PARSERS:
        return _PARSERS[key](text)
    if _FIELD_TYPES[key].startswith("tuple"):
        return _split(text)
    return int(text)


def parse_config(text: str, env=None, base_dir=None) -> ExperimentConfig:
    """Parse config text; unknown keys, bad values and repeats raise ConfigError."""
    env = os.environ if env is None else env
    values = {}
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, val = line.partition("=")
        key = key.strip()
        if not sep:
            raise ConfigError(f"line {no}: expected 'key = value', got {raw!r}")
        if key not in _FIELD_TYPES:
            raise ConfigError(f"line {no}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {no}: key {key!r} given twice")
        try:
            values[key] = _parse_value(key, val.strip())
        except ValueError as exc:
            raise ConfigError(f"line {no}: bad value for {key!r}: {exc}") from None
    if base_dir is not None:
        for key in ("input_dir", "output_dir"):
            if values.get(key) and not Path(values[key]).is_absolute():
                values[key] = str(Path(base_dir) / values[key])
    values.update(_env_seeds(values, env))
    return ExperimentConfig(**values)


def _env_seeds(values, env):
    raw = env.get(SEED_ENV)
    if raw is None or raw == "":
        return {}
    try:
        seed = int(raw)
    except ValueError:
        raise ConfigError(f"{SEED_ENV} must be an integer, got {raw!r}") from None
    return {k: seed for k in SEED_KEYS if k not in values}


def load_config(path, env=None) -> ExperimentConfig:
    """Read a config file; relative paths inside it resolve against its directory."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config(text, env, base_dir=path.parent)


def default_config(env=None, **overrides) -> ExperimentConfig:
    """Defaults with ``FUSE_SEED`` applied to seeds not given in ``overrides``."""
    env = os.environ if env is None else env
    overrides.update(_env_seeds(overrides, env))
    return ExperimentConfig(**overrides)


def render_config(config: ExperimentConfig) -> str:
    """Inverse of :func:`parse_config` (seeds are always written explicitly)."""
    lines = []
    for f in fields(config):
        v = getattr(config, f.name)
        if v is None:
            continue
        if f.name == "gen_signal":
            text = ", ".join(f"{n}:{w!r}" for n, w in v)
        elif isinstance(v, tuple):
            text = ", ".join(repr(x) if isinstance(x, float) else str(x) for x in v)
        elif isinstance(v, bool):
            text = "true" if v else "false"
        else:
            text = repr(v) if isinstance(v, float) else str(v)
        lines.append(f"{f.name} = {text}")
    return "\n".join(lines) + "\n"


__all__ = ["ExperimentConfig", "MODES", "REPRESENTATIONS", "FORMATS", "parse_config",
           "load_config", "default_config", "render_config"]
