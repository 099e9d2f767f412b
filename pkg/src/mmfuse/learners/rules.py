"""Canonical IF-THEN rule text: export from any model and an independent interpreter.

Each rule line reads ``If <conjunction> Then <label> (<label>=<count>, ...)``;
the parenthesised class counts are optional on input.  A vote exports one
``=== <tag> ===`` section per base model.  Exemplar sections start with
``Match: nearest`` and a ``Scale:`` line and fire the nearest rule rather
than the first matching one.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Mapping

from ..errors import DataError, RuleSyntaxError
from .base import (RuleListModel, argmax_label, average_distributions, counts_to_distribution,
                   format_counts, format_number)
from .nnge import ExemplarModel, exemplar_distance
from .trees import TreeModel, leaf_label
from .vote import VoteModel


def _conj(conds, schema) -> str:
    return " AND ".join(c.render(schema) for c in conds) if conds else "true"


def _rule_line(conds, schema, label, counts) -> str:
    labels = schema.class_labels
    return f"If {_conj(conds, schema)} Then {labels[label]} {format_counts(labels, counts)}"


def _export_tree(model: TreeModel) -> list[str]:
    lines = [_rule_line(conds, model.schema, leaf_label(leaf), leaf.counts)
             for conds, leaf in model.root.paths()]
    lines.append(f"Size of the tree: {model.size}")
    lines.append(f"Number of Rules: {len(lines) - 1}")
    return lines


def _export_rule_list(model: RuleListModel) -> list[str]:
    lines = [_rule_line(r.conditions, model.schema, r.label, r.counts) for r in model.rules]
    lines.append(f"Number of Rules: {len(model.rules)}")
    return lines


def _export_exemplars(model: ExemplarModel) -> list[str]:
    schema = model.schema
    scales = [f"{a.name}={model.scales[j]!r}" for j, a in enumerate(schema.attributes) if a.is_numeric]
    lines = ["Match: nearest", "Scale: " + ", ".join(scales)]
    for e, counts in zip(model.exemplars, model.counts):
        parts = []
        for j, a in enumerate(schema.attributes):
            if a.is_numeric:
                parts.append(f"{a.name} in [{float(e.lo[j])!r}, {float(e.hi[j])!r}]")
            else:
                parts.append(f"{a.name} in {{{', '.join(a.categories[v] for v in sorted(e.cats[j]))}}}")
        onehot = [counts[k] if k == e.target else 0 for k in range(len(counts))]
        lines.append(f"If {' AND '.join(parts) or 'true'} Then {schema.class_labels[e.target]} "
                     f"{format_counts(schema.class_labels, onehot)}")
    lines.append(f"Number of Rules: {len(model.exemplars)}")
    return lines


def _body(model) -> list[str]:
    if isinstance(model, TreeModel):
        return _export_tree(model)
    if isinstance(model, RuleListModel):
        return _export_rule_list(model)
    if isinstance(model, ExemplarModel):
        return _export_exemplars(model)
    raise TypeError(f"cannot export rules from {type(model).__name__}")


def export_rules(model) -> str:
    """Render a model (or vote of models) as canonical rule text."""
    if isinstance(model, VoteModel):
        lines, total = [], 0
        for tag, base in model.bases:
            body = _body(base)
            total += int(body[-1].split(":")[1])
            lines.append(f"=== {tag} ===")
            lines.extend(body)
            lines.append("")
        lines.append(f"Number of Rules: {total}")
        return "\n".join(lines) + "\n"
    return "\n".join(_body(model)) + "\n"


# -- interpreter -----------------------------------------------------------------

_RULE = re.compile(r"^if\s+(.+?)\s+then\s+(\S+)(?:\s+\(([^)]*)\))?$", re.IGNORECASE)
_ELSE = re.compile(r"^else\s+(\S+)$", re.IGNORECASE)
_HEAD = re.compile(r"^===\s*(.*?)\s*===$")
_AND = re.compile(r"\s+AND\s+", re.IGNORECASE)
_INTERVAL = re.compile(r"^(\S+?)\s+in\s+\[\s*(\S+)\s*,\s*(\S+)\s*\]$")
_SET = re.compile(r"^(\S+?)\s+in\s+\{(.*)\}$")
_CMP = re.compile(r"^(\S+?)\s*(<=|>=|<|>|=)\s*(\S+)$")
_FOOTER = re.compile(r"^(number of rules|size of the tree)\s*:\s*\d+$", re.IGNORECASE)


@dataclass
class _Rule:
    conds: list
    label: str
    counts: list | None


@dataclass
class _Section:
    tag: str
    nearest: bool = False
    scales: dict = field(default_factory=dict)
    rules: list = field(default_factory=list)


def _parse_cond(text):
    for kind, rx in (("interval", _INTERVAL), ("set", _SET), ("cmp", _CMP)):
        m = rx.match(text)
        if m:
            break
    else:
        raise RuleSyntaxError(f"cannot parse condition {text!r}")
    if kind == "interval":
        try:
            return ("interval", m.group(1), float(m.group(2)), float(m.group(3)))
        except ValueError:
            raise RuleSyntaxError(f"bad interval bounds in {text!r}") from None
    if kind == "set":
        items = frozenset(s.strip() for s in m.group(2).split(",") if s.strip())
        return ("set", m.group(1), items)
    name, op, raw = m.groups()
    try:
        value = float(raw)
    except ValueError:
        if op != "=":
            raise RuleSyntaxError(f"non-numeric threshold in {text!r}") from None
        value = raw
    return ("cmp", name, op, value)


def _parse_counts(text):
    out = []
    for item in text.split(","):
        if "=" not in item:
            raise RuleSyntaxError(f"bad class counts {text!r}")
        k, v = item.split("=", 1)
        try:
            out.append((k.strip(), float(v)))
        except ValueError:
            raise RuleSyntaxError(f"bad class counts {text!r}") from None
    return out


def parse_rules(text: str) -> list[_Section]:
    """Split rule text into sections; blank lines and '#' comments are skipped."""
    sections = [_Section("")]
    for raw in text.splitlines():
        s = raw.strip()
        if not s or s.startswith("#"):
            continue
        m = _HEAD.match(s)
        if m:
            sections.append(_Section(m.group(1)))
            continue
        sec = sections[-1]
        low = s.lower()
        if low.startswith("match:"):
            sec.nearest = s.split(":", 1)[1].strip().lower() == "nearest"
        elif low.startswith("scale:"):
            for item in s.split(":", 1)[1].split(","):
                if item.strip():
                    k, _, v = item.partition("=")
                    try:
                        sec.scales[k.strip()] = float(v)
                    except ValueError:
                        raise RuleSyntaxError(f"bad scale entry {item!r}") from None
        elif _FOOTER.match(s):
            continue
        elif (m := _RULE.match(s)) is not None:
            body = m.group(1).strip()
            conds = [] if body.lower() == "true" else [_parse_cond(c.strip()) for c in _AND.split(body)]
            counts = _parse_counts(m.group(3)) if m.group(3) else None
            sec.rules.append(_Rule(conds, m.group(2), counts))
        elif (m := _ELSE.match(s)) is not None:
            sec.rules.append(_Rule([], m.group(1), None))
        else:
            raise RuleSyntaxError(f"unrecognised line {s!r}")
    if len(sections) > 1:
        if sections[0].rules:
            raise RuleSyntaxError("rules appear before the first section header")
        sections = sections[1:]
    for sec in sections:
        if not sec.rules:
            raise RuleSyntaxError(f"section {sec.tag!r} has no rules")
    return sections


def _value(instance, name):
    try:
        return instance[name]
    except KeyError:
        raise DataError(f"instance lacks attribute {name!r}") from None


def _holds(cond, instance) -> bool:
    kind = cond[0]
    if kind == "interval":
        v = float(_value(instance, cond[1]))
        return cond[2] <= v <= cond[3]
    if kind == "set":
        return str(_value(instance, cond[1])) in cond[2]
    _, name, op, ref = cond
    v = _value(instance, name)
    if op == "=":
        return str(v) == ref if isinstance(ref, str) else float(v) == ref
    v = float(v)
    if op == "<=":
        return v <= ref
    if op == "<":
        return v < ref
    if op == ">=":
        return v >= ref
    return v > ref


def _nearest(sec: _Section, instance) -> _Rule:
    best, best_d = None, None
    for r in sec.rules:
        terms = []
        for c in r.conds:
            if c[0] == "interval":
                terms.append(("num", float(_value(instance, c[1])), c[2], c[3], sec.scales.get(c[1], 1.0)))
            elif c[0] == "set":
                terms.append(("cat", str(_value(instance, c[1])), c[2]))
            else:
                raise RuleSyntaxError("nearest-exemplar rules need interval or set conditions")
        d = exemplar_distance(terms)
        if best_d is None or d < best_d:
            best, best_d = r, d
    return best


def _fire(sec: _Section, instance) -> _Rule:
    if sec.nearest:
        return _nearest(sec, instance)
    for r in sec.rules:
        if all(_holds(c, instance) for c in r.conds):
            return r
    raise DataError(f"no rule fires in section {sec.tag!r}")


def interpret_rules(rule_text: str, instance: Mapping) -> str:
    """Predicted label for ``instance`` (attribute name -> value) under ``rule_text``.

    A single section uses its first matching rule (nearest rule for
    exemplar sections).  With several sections, each fired rule
    contributes its class distribution (from the listed counts, or
    one-hot when absent) and the averaged distribution decides.
    """
    sections = parse_rules(rule_text)
    fired = [_fire(s, instance) for s in sections]
    if len(fired) == 1:
        return fired[0].label
    order: list[str] = []
    for r in fired:
        for k in ([k for k, _ in r.counts] if r.counts else []) + [r.label]:
            if k not in order:
                order.append(k)
    dists = []
    for r in fired:
        counts = dict(r.counts) if r.counts else {}
        if counts:
            vec = [counts.get(k, 0.0) for k in order]
            dists.append(counts_to_distribution(vec, order.index(r.label)))
        else:
            dists.append(counts_to_distribution([0.0] * len(order), order.index(r.label)))
    return order[argmax_label(average_distributions(dists))]


__all__ = ["export_rules", "interpret_rules", "parse_rules", "format_number"]
