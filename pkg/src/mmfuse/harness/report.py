"""Aligned text tables, CSV and JSON renderings of a ReportBundle."""
from __future__ import annotations

import csv
import io
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .config import MODES, REPRESENTATIONS
from .pipeline import CELL_ALGORITHMS, ReportBundle, provenance_lines

TITLES = {
    "merge_all": "All attributes merged",
    "select_merged": "Selected attributes of the merged data",
    "ensemble_per_source": "Vote of per-source models on selected attributes",
}


def align(rows: Sequence[Sequence[str]], right: Iterable[int] = ()) -> list[str]:
    """Pad cells to common column widths; columns in ``right`` are right-aligned."""
    right = set(right)
    widths = [max(len(r[j]) for r in rows) for j in range(len(rows[0]))]
    out = []
    for r in rows:
        cells = [c.rjust(w) if j in right else c.ljust(w) for j, (c, w) in enumerate(zip(r, widths))]
        out.append("  ".join(cells).rstrip())
    return out


def _header(bundle: ReportBundle, prefix: str = "# ") -> str:
    return "".join(f"{prefix}{line}\n" for line in provenance_lines(bundle.provenance))


def _present(values, order):
    return [v for v in order if v in set(values)]


def results_table(bundle: ReportBundle, mode: str) -> str:
    """Algorithm rows by NUMERICAL/DISCRETIZED (%Acc, AUC) column pairs plus an ``Avg.`` row."""
    cells = {(r.representation, r.algorithm): r for r in bundle.reports if r.mode == mode}
    reps = _present([rep for rep, _ in cells], REPRESENTATIONS)
    algos = _present([a for _, a in cells], CELL_ALGORITHMS)
    top = [""] + [x for rep in reps for x in (rep.upper(), "")]
    head = ["Algorithm"] + ["%Acc", "AUC"] * len(reps)
    rows = [top, head]
    for a in algos:
        row = [a]
        for rep in reps:
            r = cells[(rep, a)]
            row += [f"{r.accuracy_pct:.2f}", f"{r.auc:.2f}"]
        rows.append(row)
    avg = ["Avg."]
    for rep in reps:
        rs = [cells[(rep, a)] for a in algos]
        avg += [f"{np.mean([r.accuracy_pct for r in rs]):.2f}", f"{np.mean([r.auc for r in rs]):.2f}"]
    rows.append(avg)
    lines = align(rows, right=range(1, len(head)))
    rule = "-" * max(len(line) for line in lines)
    return "\n".join([TITLES.get(mode, mode), rule, *lines[:2], rule, *lines[2:-1], rule, lines[-1]]) + "\n"


def summary_table(bundle: ReportBundle) -> str:
    """Average %Acc and AUC per mode and representation."""
    by = {(s.mode, s.representation): s for s in bundle.summary}
    modes = _present([m for m, _ in by], MODES)
    reps = _present([r for _, r in by], REPRESENTATIONS)
    rows = [[""] + [x for rep in reps for x in (rep.upper(), "")],
            ["Mode"] + ["%Acc", "AUC"] * len(reps)]
    for m in modes:
        row = [m]
        for rep in reps:
            s = by.get((m, rep))
            row += [f"{s.accuracy_pct:.2f}", f"{s.auc:.2f}"] if s else ["", ""]
        rows.append(row)
    lines = align(rows, right=range(1, 1 + 2 * len(reps)))
    rule = "-" * max(len(line) for line in lines)
    return "\n".join(["Average over algorithms", rule, *lines[:2], rule, *lines[2:]]) + "\n"


def selection_table(bundle: ReportBundle) -> str:
    rows = [["Mode", "Representation", "Dataset", "#Selected", "Merit", "Attributes"]]
    for s in bundle.selections:
        rows.append([s.mode, s.representation, s.dataset, str(len(s.names)), f"{s.merit:.4f}",
                     ", ".join(s.names)])
    lines = align(rows, right=(3, 4))
    rule = "-" * max(len(line) for line in lines)
    return "\n".join(["Selected attributes", rule, lines[0], rule, *lines[1:]]) + "\n"


def _csv(rows) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


def reports_csv(bundle: ReportBundle) -> str:
    rows = [["mode", "representation", "algorithm", "accuracy_pct", "auc", "k", "cv_seed"]]
    rows += [[r.mode, r.representation, r.algorithm, repr(r.accuracy_pct), repr(r.auc), r.k, r.seed]
             for r in bundle.reports]
    return _csv(rows)


def predictions_csv(bundle: ReportBundle) -> str:
    rows = [["mode", "representation", "algorithm", "id", "actual", "predicted", "pass_probability"]]
    for r in bundle.reports:
        for i, a, p, q in zip(r.ids, r.actual, r.predicted, r.pass_probability):
            rows.append([r.mode, r.representation, r.algorithm, i, a, p, repr(q)])
    return _csv(rows)


def summary_csv(bundle: ReportBundle) -> str:
    rows = [["mode", "representation", "accuracy_pct", "auc", "n_algorithms"]]
    rows += [[s.mode, s.representation, repr(s.accuracy_pct), repr(s.auc), s.n_algorithms]
             for s in bundle.summary]
    return _csv(rows)


def selection_csv(bundle: ReportBundle) -> str:
    rows = [["mode", "representation", "dataset", "n_selected", "merit", "attributes"]]
    rows += [[s.mode, s.representation, s.dataset, len(s.names), repr(s.merit), " ".join(s.names)]
             for s in bundle.selections]
    return _csv(rows)


def rules_text(bundle: ReportBundle, mode: str) -> str:
    dump = next(r for r in bundle.rules if r.mode == mode)
    return f"# best cell: {dump.cell}\n" + dump.text


def render_tables(bundle: ReportBundle, formats: Iterable[str], out_dir) -> list[Path]:
    """Write the requested renderings (``text``, ``csv``, ``json``); return the paths written."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    formats = set(formats)
    head = _header(bundle)
    files: dict[str, str] = {}
    if "text" in formats:
        modes = _present({r.mode for r in bundle.reports}, MODES)
        for m in modes:
            files[f"results_{m}.txt"] = head + results_table(bundle, m)
        files["summary.txt"] = head + summary_table(bundle)
        if bundle.selections:
            files["selection.txt"] = head + selection_table(bundle)
        for dump in bundle.rules:
            files[f"rules_{dump.mode}.txt"] = head + rules_text(bundle, dump.mode)
    if "csv" in formats:
        files["reports.csv"] = head + reports_csv(bundle)
        files["predictions.csv"] = head + predictions_csv(bundle)
        files["summary.csv"] = head + summary_csv(bundle)
        if bundle.selections:
            files["selection.csv"] = head + selection_csv(bundle)
    if "json" in formats:
        # the provenance travels inside the document as its first key
        files["bundle.json"] = bundle.to_json()
    paths = []
    for name in sorted(files):
        p = out / name
        p.write_text(files[name], encoding="utf-8")
        paths.append(p)
    return paths


def read_bundle(path) -> ReportBundle:
    return ReportBundle.from_json(Path(path).read_text(encoding="utf-8"))
