"""Factorial sentence suites with region-annotated token sequences.

An experiment is a set of items crossed with a full factorial design; each
cell holds one sentence whose tokens are partitioned into named measurement
regions. Regions are contiguous token spans; the distinguished region "end"
covers the final period and stands in for the end-of-sequence event as well.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field

# A condition is a tuple of level names, one per factor, in factor order.
Condition = tuple

_WS_RE = re.compile(r"\S+")


class ItemFileError(ValueError):
    """Malformed item file, with 1-based line/column position."""

    def __init__(self, message, line=None, col=None):
        self.line = line
        self.col = col
        pos = ""
        if line is not None:
            pos = f" (line {line}" + (f", col {col}" if col is not None else "") + ")"
        super().__init__(message + pos)


@dataclass(frozen=True)
class RegionedSentence:
    """Token sequence plus a mapping region-name -> half-open token span."""

    tokens: tuple
    regions: dict

    def region_span(self, name):
        return self.regions[name]

    def region_tokens(self, name):
        start, end = self.regions[name]
        return self.tokens[start:end]

    def text(self):
        return " ".join(self.tokens)


@dataclass(frozen=True)
class Item:
    id: int
    sentences: dict  # Condition -> RegionedSentence


@dataclass(frozen=True)
class Experiment:
    name: str
    factors: tuple  # ((factor_name, (level, ...)), ...)
    region_names: tuple
    items: tuple
    builtin_effects: tuple = ()

    def factor_names(self):
        return tuple(name for name, _ in self.factors)

    def levels_of(self, factor):
        for name, levels in self.factors:
            if name == factor:
                return levels
        raise KeyError(factor)

    def conditions(self):
        """All cells of the full crossing, in declared factor/level order."""
        return [tuple(c) for c in itertools.product(*(lv for _, lv in self.factors))]

    def level_of(self, condition, factor):
        return condition[self.factor_names().index(factor)]

    def condition_label(self, condition):
        return "[" + ",".join(condition) + "]"


def _check_token(tok):
    return bool(tok) and not any(ch.isspace() for ch in tok)


def validate_experiment(e: Experiment) -> list:
    """Return a list of invariant-violation descriptions (empty iff valid)."""
    problems = []
    expected = set(e.conditions())
    seen_ids = set()
    for item in e.items:
        if item.id in seen_ids:
            problems.append(f"item {item.id}: duplicate item id")
        seen_ids.add(item.id)
        got = set(item.sentences)
        for cond in sorted(expected - got):
            problems.append(
                f"item {item.id}: missing condition {'[' + ','.join(cond) + ']'}"
            )
        for cond in sorted(got - expected):
            problems.append(
                f"item {item.id}: condition {'[' + ','.join(cond) + ']'} "
                "is not a cell of the factorial crossing"
            )
        for cond in sorted(got & expected):
            label = "[" + ",".join(cond) + "]"
            sent = item.sentences[cond]
            n = len(sent.tokens)
            if n == 0:
                problems.append(f"item {item.id} {label}: empty sentence")
                continue
            for tok in sent.tokens:
                if not _check_token(tok):
                    problems.append(
                        f"item {item.id} {label}: bad token {tok!r} "
                        "(empty or contains whitespace)"
                    )
            spans = []
            for name, (start, end) in sent.regions.items():
                if name not in e.region_names:
                    problems.append(
                        f"item {item.id} {label}: undeclared region {name!r}"
                    )
                if not (0 <= start < end <= n):
                    problems.append(
                        f"item {item.id} {label}: region {name!r} span "
                        f"({start},{end}) out of bounds for {n} tokens"
                    )
                else:
                    spans.append((start, end, name))
            spans.sort()
            for (s1, e1, n1), (s2, e2, n2) in zip(spans, spans[1:]):
                if s2 < e1:
                    problems.append(
                        f"item {item.id} {label}: regions {n1!r} and {n2!r} overlap"
                    )
            if "end" not in sent.regions:
                problems.append(f"item {item.id} {label}: no 'end' region")
            elif sent.regions["end"][1] != n:
                problems.append(
                    f"item {item.id} {label}: 'end' region must cover the final token"
                )
    return problems


# ---------------------------------------------------------------------------
# Item-file format
#
#   experiment: NAME
#   factors: factor=level|level
#   regions: name,name
#   item N
#   [level,level] tok tok {region: tok tok} tok
#
# Lines starting with ";" are comments; blank lines are ignored.
# ---------------------------------------------------------------------------


def _parse_condition_line(line, lineno, n_factors):
    """Parse one "[levels] tokens" line into (condition, tokens, regions)."""
    m = re.match(r"\s*\[([^\]]*)\]", line)
    if not m:
        raise ItemFileError("expected condition line starting with [levels]", lineno, 1)
    cond = tuple(s.strip() for s in m.group(1).split(","))
    if len(cond) != n_factors or any(not c for c in cond):
        raise ItemFileError(
            f"condition {m.group(0).strip()} does not name {n_factors} factor level(s)",
            lineno,
            1,
        )
    tokens = []
    regions = {}
    open_region = None  # (name, start_index, col)
    for piece_m in _WS_RE.finditer(line, m.end()):
        piece, col = piece_m.group(0), piece_m.start() + 1
        while piece:
            if piece.startswith("{"):
                if open_region is not None:
                    raise ItemFileError("nested region markup", lineno, col)
                if not piece.endswith(":"):
                    raise ItemFileError(
                        "region opener must look like '{name:'", lineno, col
                    )
                name = piece[1:-1]
                if not name:
                    raise ItemFileError("empty region name", lineno, col)
                if name in regions:
                    raise ItemFileError(
                        f"region {name!r} opened twice (regions must be contiguous)",
                        lineno,
                        col,
                    )
                open_region = (name, len(tokens), col)
                piece = ""
            elif piece.endswith("}"):
                body = piece[:-1]
                if body:
                    tokens.append(body)
                if open_region is None:
                    raise ItemFileError("'}' without an open region", lineno, col)
                name, start, _ = open_region
                if len(tokens) == start:
                    raise ItemFileError(f"region {name!r} is empty", lineno, col)
                regions[name] = (start, len(tokens))
                open_region = None
                piece = ""
            else:
                tokens.append(piece)
                piece = ""
    if open_region is not None:
        raise ItemFileError(
            f"region {open_region[0]!r} never closed", lineno, open_region[2]
        )
    if not tokens:
        raise ItemFileError("condition line has no tokens", lineno, 1)
    for tok in tokens:
        if not _check_token(tok):
            raise ItemFileError(f"bad token {tok!r}", lineno, 1)
    return cond, tuple(tokens), regions


def parse_item_file(text: str) -> Experiment:
    """Parse the item-file format into a validated Experiment."""
    name = None
    factors = []
    region_names = None
    effects = []
    items = []
    cur_id = None
    cur_sentences = {}
    declared_levels = None

    def flush_item(lineno):
        nonlocal cur_id, cur_sentences
        if cur_id is not None:
            items.append(Item(id=cur_id, sentences=dict(cur_sentences)))
        cur_id = None
        cur_sentences = {}

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith(";"):
            continue
        if line.startswith("experiment:"):
            name = line[len("experiment:") :].strip()
            if not name:
                raise ItemFileError("empty experiment name", lineno, 1)
        elif line.startswith("factors:"):
            body = line[len("factors:") :].strip()
            if "=" not in body:
                raise ItemFileError("factors line must look like 'name=a|b'", lineno, 1)
            fname, _, lvls = body.partition("=")
            levels = tuple(s.strip() for s in lvls.split("|"))
            if not fname.strip() or any(not s for s in levels) or len(levels) < 1:
                raise ItemFileError("malformed factors line", lineno, 1)
            factors.append((fname.strip(), levels))
        elif line.startswith("regions:"):
            region_names = tuple(
                s.strip() for s in line[len("regions:") :].split(",") if s.strip()
            )
        elif line.startswith("effects:"):
            effects = [
                s.strip() for s in line[len("effects:") :].split(",") if s.strip()
            ]
        elif line.startswith("item"):
            m = re.match(r"item\s+(\d+)\s*$", line)
            if not m:
                raise ItemFileError("expected 'item N'", lineno, 1)
            flush_item(lineno)
            cur_id = int(m.group(1))
        elif line.startswith("["):
            if name is None or not factors or region_names is None:
                raise ItemFileError(
                    "condition line before experiment/factors/regions header", lineno, 1
                )
            if cur_id is None:
                raise ItemFileError("condition line outside an item block", lineno, 1)
            if declared_levels is None:
                declared_levels = [set(lv) for _, lv in factors]
            cond, tokens, regions = _parse_condition_line(raw, lineno, len(factors))
            for lvl, known in zip(cond, declared_levels):
                if lvl not in known:
                    raise ItemFileError(f"undeclared factor level {lvl!r}", lineno, 1)
            if cond in cur_sentences:
                raise ItemFileError(
                    f"duplicate condition {'[' + ','.join(cond) + ']'}", lineno, 1
                )
            cur_sentences[cond] = RegionedSentence(tokens=tokens, regions=regions)
        else:
            raise ItemFileError(f"unrecognized line {line.split()[0]!r}", lineno, 1)

    if name is None or not factors or region_names is None:
        raise ItemFileError("missing experiment/factors/regions header", 1, 1)
    flush_item(None)
    exp = Experiment(
        name=name,
        factors=tuple(factors),
        region_names=region_names,
        items=tuple(items),
        builtin_effects=tuple(effects),
    )
    problems = validate_experiment(exp)
    if problems:
        raise ItemFileError("invalid experiment: " + "; ".join(problems))
    return exp


def serialize_item_file(e: Experiment) -> str:
    """Inverse of parse_item_file; byte-deterministic for a given Experiment."""
    out = [f"experiment: {e.name}"]
    for fname, levels in e.factors:
        out.append(f"factors: {fname}=" + "|".join(levels))
    out.append("regions: " + ",".join(e.region_names))
    if e.builtin_effects:
        out.append("effects: " + ",".join(e.builtin_effects))
    for item in e.items:
        out.append(f"item {item.id}")
        for cond in e.conditions():
            if cond not in item.sentences:
                continue
            sent = item.sentences[cond]
            starts = {s: name for name, (s, _) in sent.regions.items()}
            ends = {en: name for name, (_, en) in sent.regions.items()}
            pieces = []
            for i, tok in enumerate(sent.tokens):
                if i in starts:
                    pieces.append("{" + starts[i] + ":")
                if i + 1 in ends:
                    pieces.append(tok + "}")
                else:
                    pieces.append(tok)
            out.append("[" + ",".join(cond) + "] " + " ".join(pieces))
    return "\n".join(out) + "\n"
