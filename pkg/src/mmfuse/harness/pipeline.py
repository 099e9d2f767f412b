"""End-to-end experiment grid: load, join, anonymize, represent, select, cross-validate."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from ..dataset import Dataset, anonymize, join_sources, load_sources_dir
from ..errors import ConfigError, DataError, FuseError
from ..evaluation import EvalReport, SummaryRow, cross_validate, stratified_folds, summarize
from ..learners import LearnerSpec, VoteMember, VoteSpec, export_rules, train
from ..learners.base import ALGORITHMS
from ..preprocess import (BinningParams, NormalizationParams, apply_binning, apply_normalization,
                          equal_width_discretize, impute_missing, min_max_normalize, project)
from ..selection import FeatureSubset, select_best_first, select_per_source
from .config import MODES, REPRESENTATIONS, ExperimentConfig
from .synthetic import synthesize

TOOL = "mmfuse 0.1.0"
VOTE_ALL = "Vote"
CELL_ALGORITHMS = ALGORITHMS + (VOTE_ALL,)


@dataclass(frozen=True)
class SelectionReport:
    """Attributes kept by CFS for one (mode, representation, dataset) triple."""

    mode: str
    representation: str
    dataset: str
    names: tuple[str, ...]
    merit: float

    @classmethod
    def from_dict(cls, d) -> SelectionReport:
        return cls(d["mode"], d["representation"], d["dataset"], tuple(d["names"]), float(d["merit"]))


@dataclass(frozen=True)
class RuleDump:
    mode: str
    representation: str
    algorithm: str
    text: str

    @property
    def cell(self) -> str:
        return f"{self.mode}:{self.representation}:{self.algorithm}"


@dataclass
class ReportBundle:
    provenance: dict
    reports: list[EvalReport]
    selections: list[SelectionReport] = field(default_factory=list)
    summary: list[SummaryRow] = field(default_factory=list)
    rules: list[RuleDump] = field(default_factory=list)

    def report(self, mode, representation, algorithm) -> EvalReport:
        for r in self.reports:
            if r.cell == (mode, representation, algorithm):
                return r
        raise KeyError(f"no cell {mode}:{representation}:{algorithm}")

    def to_dict(self) -> dict:
        return {
            "provenance": self.provenance,
            "reports": [r.to_dict() for r in self.reports],
            "selections": [asdict(s) for s in self.selections],
            "summary": [asdict(s) for s in self.summary],
            "rules": [asdict(r) for r in self.rules],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> ReportBundle:
        d = json.loads(text)
        for s in d["selections"]:
            s["names"] = tuple(s["names"])
        return cls(d["provenance"],
                   [EvalReport.from_dict(r) for r in d["reports"]],
                   [SelectionReport.from_dict(s) for s in d["selections"]],
                   [SummaryRow(**s) for s in d["summary"]],
                   [RuleDump(**r) for r in d["rules"]])

    def __eq__(self, other):
        if not isinstance(other, ReportBundle):
            return NotImplemented
        return self.to_json() == other.to_json()


def provenance(config: ExperimentConfig) -> dict:
    return {
        "tool": TOOL,
        "config_hash": config.hash(),
        "cv_seed": config.cv_seed,
        "gen_seed": config.gen_seed if config.input_dir is None else "n/a",
        "learner_seed": config.learner_seed,
        "anon_seed": config.anon_seed,
        "k": config.k,
        "n_bins": config.n_bins,
        "cutoffs": list(config.cutoffs),
        "cutoff_labels": list(config.cutoff_labels),
        "fit_in_fold": config.fit_in_fold,
        "input": "synthetic" if config.input_dir is None else "files",
    }


def provenance_lines(prov: dict) -> list[str]:
    """Header lines carried at the top of every output file."""
    keys = ("tool", "config_hash", "cv_seed", "gen_seed", "learner_seed", "anon_seed", "k",
            "n_bins", "cutoffs", "cutoff_labels", "fit_in_fold", "input")
    return [f"{key}: {prov[key]}" for key in keys if key in prov]


# -- data preparation ------------------------------------------------------------

def load_cohort(config: ExperimentConfig) -> Dataset:
    """Joined, labelled and anonymized dataset in source units."""
    if config.input_dir is None:
        parts, scores = synthesize(config.gen_params, config.gen_seed)
    else:
        parts, scores = load_sources_dir(config.input_dir, allow_missing=config.allow_missing)
    joined = join_sources(parts, scores, config.class_cutoffs)
    if joined.has_missing:
        joined = impute_missing(joined)
    if len(joined) < config.k:
        raise DataError(f"{len(joined)} instances cannot fill {config.k} folds")
    data, _ = anonymize(joined, config.anon_seed)
    return data


def represent(raw: Dataset, representation: str, n_bins: int) -> Dataset:
    numeric, _ = min_max_normalize(raw)
    if representation == "numerical":
        return numeric
    return equal_width_discretize(numeric, n_bins)[0]


def learner_for(mode: str, algorithm: str, data: Dataset, seed: int, chosen=None,
                vote_algorithms=ALGORITHMS):
    """Return (learner, training data) for one cell on an already prepared dataset.

    ``chosen`` caches the FeatureSubsets by dataset tag: an empty dict is
    filled by running CFS, a filled one is reused as is.  ``algorithm`` may
    be ``"Vote"`` in ensemble_per_source mode: one base per source and per
    entry of ``vote_algorithms``.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    if algorithm == VOTE_ALL:
        if mode != "ensemble_per_source":
            raise ConfigError("the cross-algorithm vote exists only in ensemble_per_source mode")
        spec = None
    else:
        spec = LearnerSpec(algorithm, seed=seed)
    if mode == "merge_all":
        return spec, data
    if chosen is None:
        chosen = {}
    if not chosen:
        if mode == "select_merged":
            chosen["merged"] = select_best_first(data)
        else:
            chosen.update(select_per_source(data))
    if mode == "select_merged":
        return spec, project(data, chosen["merged"])
    if spec is None:
        members = tuple(VoteMember(f"{a} ({src})", LearnerSpec(a, seed=seed), fs.names)
                        for src, fs in chosen.items() for a in vote_algorithms)
    else:
        members = tuple(VoteMember(src, spec, fs.names) for src, fs in chosen.items())
    used = sorted({data.schema.index(n) for fs in chosen.values() for n in fs.names})
    return VoteSpec(members), project(data, used)


class FittedPipeline:
    """Model plus the preprocessing fitted on its training rows (leakage-free mode)."""

    def __init__(self, norm: NormalizationParams, binning: BinningParams | None, model, names):
        self.norm, self.binning, self.model = norm, binning, model
        self.columns = np.array([names.index(n) for n in model.schema.names], dtype=np.intp)

    def transform(self, row):
        z = apply_normalization(np.asarray(row, dtype=np.float64), self.norm)
        return z if self.binning is None else apply_binning(z, self.binning)

    def distribution(self, row):
        return self.model.distribution(self.transform(row)[self.columns])


def in_fold_learner(mode, representation, algorithm, n_bins, seed, cache: dict | None = None,
                    vote_algorithms=ALGORITHMS) -> Callable[[Dataset], FittedPipeline]:
    """Callable fitting normalization, binning and selection on each training split.

    Pass one ``cache`` to all algorithms of a (mode, representation) pair so
    each fold's preprocessing and CFS run once.
    """
    cache = {} if cache is None else cache

    def fit(train_raw: Dataset) -> FittedPipeline:
        key = train_raw.ids
        if key not in cache:
            data, norm = min_max_normalize(train_raw)
            binning = None
            if representation == "discretized":
                data, binning = equal_width_discretize(data, n_bins)
            cache[key] = (data, norm, binning, {})
        data, norm, binning, chosen = cache[key]
        learner, train_data = learner_for(mode, algorithm, data, seed, chosen, vote_algorithms)
        return FittedPipeline(norm, binning, train(learner, train_data), train_raw.schema.names)

    fit.__name__ = algorithm
    return fit


# -- the grid --------------------------------------------------------------------

def _cell_error(exc, mode, rep, algo):
    msg = f"cell {mode}:{rep}:{algo}: {exc}"
    try:
        return type(exc)(msg)
    except TypeError:
        return FuseError(msg)


def _best(reports: list[EvalReport]) -> EvalReport:
    def key(r):
        return (-r.accuracy_pct, -r.auc, CELL_ALGORITHMS.index(r.algorithm),
                REPRESENTATIONS.index(r.representation))
    return min(reports, key=key)


def cell_algorithms(config: ExperimentConfig, mode: str) -> tuple[str, ...]:
    """Algorithm rows of one mode (plus the cross-algorithm vote when enabled)."""
    if mode == "ensemble_per_source" and config.vote_across_algorithms:
        return config.algorithms + (VOTE_ALL,)
    return config.algorithms


def run_pipeline(config: ExperimentConfig) -> ReportBundle:
    """Run every (mode, representation, algorithm) cell and collect reports."""
    raw = load_cohort(config)
    folds = stratified_folds(raw.labels, config.k, config.cv_seed)
    prepared = {rep: represent(raw, rep, config.n_bins) for rep in config.representations}
    reports, selections = [], []
    for mode in config.modes:
        for rep in config.representations:
            data = prepared[rep]
            chosen: dict[str, FeatureSubset] = {}
            fold_cache: dict = {}
            for algo in cell_algorithms(config, mode):
                try:
                    if config.fit_in_fold:
                        learner = in_fold_learner(mode, rep, algo, config.n_bins, config.learner_seed,
                                                  fold_cache, config.algorithms)
                        cv_data = raw
                    else:
                        learner, cv_data = learner_for(mode, algo, data, config.learner_seed, chosen,
                                                       config.algorithms)
                    reports.append(cross_validate(learner, cv_data, config.k, config.cv_seed, mode=mode,
                                                  representation=rep, algorithm=algo, folds=folds))
                except FuseError as exc:
                    raise _cell_error(exc, mode, rep, algo) from exc
            if mode != "merge_all":
                if not chosen:
                    learner_for(mode, config.algorithms[0], data, config.learner_seed, chosen)
                for tag, fs in chosen.items():
                    selections.append(SelectionReport(mode, rep, tag, fs.names, fs.merit))
    rules = []
    for mode in config.modes:
        best = _best([r for r in reports if r.mode == mode])
        rules.append(RuleDump(mode, best.representation, best.algorithm,
                              cell_rules(config, mode, best.representation, best.algorithm, raw)))
    return ReportBundle(provenance(config), reports, selections, summarize(reports), rules)


def cell_rules(config: ExperimentConfig, mode: str, representation: str, algorithm: str,
               raw: Dataset | None = None) -> str:
    """Rule text of one cell's model trained on the whole cohort."""
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    if representation not in REPRESENTATIONS:
        raise ValueError(f"unknown representation {representation!r}")
    raw = raw if raw is not None else load_cohort(config)
    data = represent(raw, representation, config.n_bins)
    learner, train_data = learner_for(mode, algorithm, data, config.learner_seed,
                                      vote_algorithms=config.algorithms)
    return export_rules(train(learner, train_data))


def selection_only(config: ExperimentConfig) -> list[SelectionReport]:
    """CFS choices for every selecting mode and representation, without any CV."""
    raw = load_cohort(config)
    out = []
    for rep in config.representations:
        data = represent(raw, rep, config.n_bins)
        for mode in ("select_merged", "ensemble_per_source"):
            chosen: dict[str, FeatureSubset] = {}
            learner_for(mode, config.algorithms[0], data, config.learner_seed, chosen)
            out.extend(SelectionReport(mode, rep, tag, fs.names, fs.merit) for tag, fs in chosen.items())
    return out
