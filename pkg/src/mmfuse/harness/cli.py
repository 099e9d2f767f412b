"""Command line entry point ``fuse``.

Exit codes: 0 success, 2 configuration error, 3 data error.
"""
from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace
from pathlib import Path

from ..errors import ConfigError, DataError
from ..learners.base import canonical_algorithm
from .config import MODES, REPRESENTATIONS, SEED_ENV, default_config, load_config, render_config
from .pipeline import (VOTE_ALL, ReportBundle, cell_rules, provenance, provenance_lines, run_pipeline,
                       selection_only)
from .report import render_tables, selection_table, summary_table
from .synthetic import GenParams, generate_synthetic

EXIT_OK, EXIT_CONFIG, EXIT_DATA = 0, 2, 3


def _base_config(args):
    if getattr(args, "config", None):
        return load_config(args.config)
    return default_config()


def _with_input(config, directory):
    if directory is None:
        return config
    if not Path(directory).is_dir():
        raise DataError(f"input directory {directory} does not exist")
    return replace(config, input_dir=str(directory))


def cmd_run(args) -> int:
    config = load_config(args.config)
    if args.out:
        config = config.with_output(args.out)
    if args.fit_in_fold:
        config = replace(config, fit_in_fold=True)
    if args.vote_across_algorithms:
        config = replace(config, vote_across_algorithms=True)
    bundle = run_pipeline(config)
    out = Path(config.output_dir)
    paths = render_tables(bundle, config.formats, out)
    (out / "config.txt").write_text(
        "".join(f"# {line}\n" for line in provenance_lines(bundle.provenance)) + render_config(config),
        encoding="utf-8")
    if not args.quiet:
        sys.stdout.write(summary_table(bundle))
        print(f"wrote {len(paths) + 1} files to {out}")
    return EXIT_OK


def _seed(value):
    if value is not None:
        return value
    raw = os.environ.get(SEED_ENV)
    if raw:
        try:
            return int(raw)
        except ValueError:
            raise ConfigError(f"{SEED_ENV} must be an integer, got {raw!r}") from None
    return 1


def cmd_gen(args) -> int:
    base = GenParams()
    params = GenParams(args.n if args.n is not None else base.n,
                       args.n_pass if args.n_pass is not None else base.n_pass,
                       args.noise if args.noise is not None else base.noise)
    seed = _seed(args.seed)
    for p in generate_synthetic(params, seed, args.out):
        print(p)
    return EXIT_OK


def cmd_select(args) -> int:
    config = _with_input(_base_config(args), args.input)
    selections = selection_only(config)
    bundle = ReportBundle(provenance(config), [], selections)
    text = "".join(f"# {line}\n" for line in provenance_lines(bundle.provenance)) + selection_table(bundle)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def parse_cell(text: str) -> tuple[str, str, str]:
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"cell must look like MODE:REP:ALGO, got {text!r}")
    mode, rep, algo = (p.strip() for p in parts)
    if mode not in MODES:
        raise ConfigError(f"unknown mode {mode!r}; expected one of {', '.join(MODES)}")
    if rep not in REPRESENTATIONS:
        raise ConfigError(f"unknown representation {rep!r}; expected one of {', '.join(REPRESENTATIONS)}")
    if algo == VOTE_ALL:
        return mode, rep, algo
    return mode, rep, canonical_algorithm(algo)


def cmd_rules(args) -> int:
    mode, rep, algo = parse_cell(args.cell)
    config = _with_input(_base_config(args), args.input)
    head = "".join(f"# {line}\n" for line in provenance_lines(provenance(config)))
    text = head + f"# cell: {mode}:{rep}:{algo}\n" + cell_rules(config, mode, rep, algo)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fuse", description="Multi-source student performance prediction.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run the experiment grid from a config file")
    p.add_argument("--config", required=True, help="flat key = value config file")
    p.add_argument("--out", help="output directory (overrides output_dir)")
    p.add_argument("--fit-in-fold", action="store_true",
                   help="fit normalization, binning and selection on training folds only")
    p.add_argument("--vote-across-algorithms", action="store_true",
                   help="add a Vote row combining every algorithm on every source")
    p.add_argument("-q", "--quiet", action="store_true")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("gen", help="write a synthetic cohort as four CSV files")
    p.add_argument("--seed", type=int, help=f"generator seed (default: ${SEED_ENV} or 1)")
    p.add_argument("--out", required=True, help="directory to write into")
    p.add_argument("--n", type=int, help="number of students")
    p.add_argument("--n-pass", type=int, help="number of PASS students")
    p.add_argument("--noise", type=float, help="label noise level in [0, 0.5]")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("select", help="print the CFS attribute selections")
    p.add_argument("--in", dest="input", required=True, help="directory with the four CSV files")
    p.add_argument("--config", help="optional config file for seeds, cut-offs and bins")
    p.add_argument("--out", help="write the table here instead of stdout")
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("rules", help="print the rules of one cell trained on all data")
    p.add_argument("--cell", required=True, help="MODE:REP:ALGO, e.g. merge_all:numerical:C45Tree")
    p.add_argument("--config", help="optional config file")
    p.add_argument("--in", dest="input", help="directory with the four CSV files (default: synthetic)")
    p.add_argument("--out", help="write the rules here instead of stdout")
    p.set_defaults(func=cmd_rules)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"fuse: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DataError, FileNotFoundError) as exc:
        print(f"fuse: data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
