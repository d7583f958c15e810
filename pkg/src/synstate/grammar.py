"""PCFG representation, bracketed-treebank ingestion, and relative-frequency
estimation with unknown-word signatures.

Symbols are interned to integer ids for the chart parser; the public API
speaks in label strings. A label is a nonterminal iff it occurs as some
rule's left-hand side; all other symbols are terminals.
"""

from __future__ import annotations

import math
import re
from collections import Counter, defaultdict
from dataclasses import dataclass, field

NORM_TOL = 1e-9

UNK_SINGLE = "UNK"
# Signature classes: all-digits, else capitalization x suffix. At most 11 classes.
_UNK_SUFFIXES = ("ed", "ing", "ly", "s")


class GrammarError(ValueError):
    pass


class OovError(KeyError):
    """Token outside the lexicon under unk-policy 'none'."""


def unknown_signature(token: str) -> str:
    if token.isdigit():
        return "UNK-NUM"
    sig = "UNK"
    if token[:1].isupper():
        sig += "-CAP"
    for suf in _UNK_SUFFIXES:
        if token.endswith(suf):
            sig += "-" + suf.upper()
            break
    return sig


_ALL_SIGNATURES = frozenset(
    ["UNK-NUM"]
    + [
        "UNK" + cap + suf
        for cap in ("", "-CAP")
        for suf in ("",) + tuple("-" + s.upper() for s in _UNK_SUFFIXES)
    ]
)


@dataclass(frozen=True)
class Rule:
    lhs: int
    rhs: tuple  # symbol ids, length >= 1
    prob: float


@dataclass
class Pcfg:
    """Probabilistic CFG with per-LHS normalized rules.

    unk_policy is one of "none", "single", "signature" and controls how
    map_unknowns treats out-of-lexicon tokens.
    """

    labels: list  # id -> label
    is_nonterminal: list  # id -> bool
    start: int
    rules: list  # Rule list, stable order
    unk_policy: str = "none"
    _ids: dict = field(default_factory=dict, repr=False)
    _by_lhs: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self._ids = {lab: i for i, lab in enumerate(self.labels)}
        by_lhs = defaultdict(list)
        for r in self.rules:
            if len(r.rhs) == 0:
                raise GrammarError(f"epsilon rule for {self.labels[r.lhs]}")
            if not (r.prob > 0.0 and math.isfinite(r.prob)):
                raise GrammarError(
                    f"rule for {self.labels[r.lhs]} has non-positive probability"
                )
            by_lhs[r.lhs].append(r)
        for lhs, rs in by_lhs.items():
            total = sum(r.prob for r in rs)
            if abs(total - 1.0) > NORM_TOL:
                raise GrammarError(
                    f"rules for {self.labels[lhs]} sum to {total!r}, not 1"
                )
        self._by_lhs = dict(by_lhs)

    # -- lookups ----------------------------------------------------------
    def id_of(self, label):
        return self._ids[label]

    def label_of(self, sym_id):
        return self.labels[sym_id]

    def rules_for(self, lhs_id):
        return self._by_lhs.get(lhs_id, ())

    @property
    def nonterminal_ids(self):
        return [i for i, nt in enumerate(self.is_nonterminal) if nt]

    @property
    def lexicon(self):
        """Terminal labels derivable by some rule."""
        out = set()
        for r in self.rules:
            for s in r.rhs:
                if not self.is_nonterminal[s]:
                    out.add(self.labels[s])
        return out

    def check_proper(self):
        """Return problems: unreachable-with-no-rule nonterminals etc."""
        problems = []
        reachable = {self.start}
        frontier = [self.start]
        while frontier:
            nt = frontier.pop()
            for r in self.rules_for(nt):
                for s in r.rhs:
                    if self.is_nonterminal[s] and s not in reachable:
                        reachable.add(s)
                        frontier.append(s)
        for nt in sorted(reachable):
            if not self.rules_for(nt):
                problems.append(
                    f"nonterminal {self.labels[nt]} is reachable but has no rules"
                )
        return problems


def make_pcfg(start: str, rules, unk_policy: str = "none", nonterminals=()) -> Pcfg:
    """Build a Pcfg from (lhs, rhs_labels, prob) triples.

    A label is treated as a nonterminal iff it appears as some lhs or in
    the explicit `nonterminals` declaration (rule-less declared nonterminals
    are caught by check_proper).
    """
    lhs_labels = {lhs for lhs, _, _ in rules} | set(nonterminals)
    labels = []
    ids = {}

    def intern(lab):
        if lab not in ids:
            ids[lab] = len(labels)
            labels.append(lab)
        return ids[lab]

    intern(start)
    for lhs, rhs, _ in rules:
        intern(lhs)
        for s in rhs:
            intern(s)
    rule_objs = [
        Rule(lhs=ids[lhs], rhs=tuple(ids[s] for s in rhs), prob=float(p))
        for lhs, rhs, p in rules
    ]
    if start not in lhs_labels:
        raise GrammarError(f"start symbol {start!r} has no rules")
    return Pcfg(
        labels=labels,
        is_nonterminal=[lab in lhs_labels for lab in labels],
        start=ids[start],
        rules=rule_objs,
        unk_policy=unk_policy,
    )


# ---------------------------------------------------------------------------
# Bracketed trees
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TreebankTree:
    label: str
    children: tuple  # of TreebankTree, or a single terminal string

    @property
    def is_preterminal(self):
        return len(self.children) == 1 and isinstance(self.children[0], str)


def parse_bracketed_tree(text: str) -> TreebankTree:
    """Parse one bracketed s-expression like "(S (NP the dog) (VP barked))"."""
    pos = 0
    n = len(text)

    def error(msg):
        raise GrammarError(f"{msg} at offset {pos}")

    def skip_ws():
        nonlocal pos
        while pos < n and text[pos].isspace():
            pos += 1

    def read_atom():
        nonlocal pos
        start = pos
        while pos < n and not text[pos].isspace() and text[pos] not in "()":
            pos += 1
        if pos == start:
            error("expected a symbol")
        return text[start:pos]

    def read_node():
        nonlocal pos
        skip_ws()
        if pos >= n or text[pos] != "(":
            error("expected '('")
        pos += 1
        skip_ws()
        label = read_atom()
        children = []
        terminals = []
        while True:
            skip_ws()
            if pos >= n:
                error("unbalanced brackets")
            if text[pos] == ")":
                pos += 1
                break
            if text[pos] == "(":
                children.append(read_node())
            else:
                terminals.append(read_atom())
        if children and terminals:
            # Normalize mixed content: lift bare terminals to preterminal copies.
            error("mixed terminal/constituent children are not supported")
        if terminals:
            if len(terminals) == 1:
                return TreebankTree(label=label, children=(terminals[0],))
            return TreebankTree(
                label=label,
                children=tuple(TreebankTree(label=label, children=(t,)) for t in terminals),
            )
        if not children:
            error(f"empty constituent {label!r}")
        return TreebankTree(label=label, children=tuple(children))

    node = read_node()
    skip_ws()
    if pos != n:
        error("trailing material after tree")
    return node


def read_treebank(text: str):
    """Read a stream of bracketed trees (one per line or free-form)."""
    trees = []
    depth = 0
    buf = []
    for ch in text:
        if ch == "(":
            depth += 1
        if depth > 0:
            buf.append(ch)
        if ch == ")":
            depth -= 1
            if depth == 0:
                trees.append(parse_bracketed_tree("".join(buf)))
                buf = []
            elif depth < 0:
                raise GrammarError("unbalanced brackets in treebank stream")
    if depth != 0:
        raise GrammarError("unbalanced brackets in treebank stream")
    return trees


def estimate_pcfg(trees, unk_threshold: int = 0, unk_policy: str = None) -> Pcfg:
    """Relative-frequency PCFG from trees.

    Terminals with corpus frequency < unk_threshold are replaced by their
    unknown signature before counting. The default unk policy is "signature"
    when replacement is active, else "none".
    """
    trees = list(trees)
    if not trees:
        raise GrammarError("empty tree list")
    roots = {t.label for t in trees}
    if len(roots) > 1:
        trees = [TreebankTree(label="TOP", children=(t,)) for t in trees]

    term_freq = Counter()

    def count_terms(node):
        if node.is_preterminal:
            term_freq[node.children[0]] += 1
        else:
            for c in node.children:
                count_terms(c)

    for t in trees:
        count_terms(t)

    def mapped(term):
        if unk_threshold >= 2 and term_freq[term] < unk_threshold:
            return unknown_signature(term)
        return term

    rule_counts = Counter()
    lhs_counts = Counter()

    def count_rules(node):
        if node.is_preterminal:
            rhs = (mapped(node.children[0]),)
        else:
            rhs = tuple(c.label for c in node.children)
            for c in node.children:
                count_rules(c)
        rule_counts[(node.label, rhs)] += 1
        lhs_counts[node.label] += 1

    for t in trees:
        count_rules(t)

    rules = [
        (lhs, rhs, count / lhs_counts[lhs])
        for (lhs, rhs), count in sorted(rule_counts.items())
    ]
    if unk_policy is None:
        unk_policy = "signature" if unk_threshold >= 2 else "none"
    return make_pcfg(start=trees[0].label, rules=rules, unk_policy=unk_policy)


def map_unknowns(pcfg: Pcfg, tokens) -> list:
    """Replace out-of-lexicon tokens per the grammar's unk policy."""
    lexicon = pcfg.lexicon
    out = []
    for tok in tokens:
        if tok in lexicon or tok in _ALL_SIGNATURES or tok == UNK_SINGLE:
            out.append(tok)
        elif pcfg.unk_policy == "single":
            out.append(UNK_SINGLE)
        elif pcfg.unk_policy == "signature":
            out.append(unknown_signature(tok))
        else:
            raise OovError(f"token {tok!r} is not in the grammar lexicon")
    return out


# ---------------------------------------------------------------------------
# Grammar file format:
#   ; comment
#   start: SYMBOL
#   unk: none|single|signature
#   LHS -> SYM SYM ... # prob
# ---------------------------------------------------------------------------


def parse_grammar_file(text: str) -> Pcfg:
    start = None
    unk_policy = "none"
    rules = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith(";"):
            continue
        if line.startswith("start:"):
            start = line[len("start:") :].strip()
            continue
        if line.startswith("unk:"):
            unk_policy = line[len("unk:") :].strip()
            if unk_policy not in ("none", "single", "signature"):
                raise GrammarError(f"line {lineno}: bad unk policy {unk_policy!r}")
            continue
        m = re.match(r"(\S+)\s*->\s*(.+?)\s*#\s*(\S+)\s*$", line)
        if not m:
            raise GrammarError(f"line {lineno}: expected 'LHS -> SYM ... # prob'")
        lhs, rhs_text, prob_text = m.groups()
        rhs = tuple(rhs_text.split())
        try:
            prob = float(prob_text)
        except ValueError:
            raise GrammarError(f"line {lineno}: bad probability {prob_text!r}") from None
        rules.append((lhs, rhs, prob))
    if start is None:
        raise GrammarError("missing 'start:' header")
    if not rules:
        raise GrammarError("grammar file has no rules")
    return make_pcfg(start=start, rules=rules, unk_policy=unk_policy)


def serialize_grammar_file(pcfg: Pcfg) -> str:
    out = [f"start: {pcfg.label_of(pcfg.start)}", f"unk: {pcfg.unk_policy}"]
    for r in pcfg.rules:
        rhs = " ".join(pcfg.label_of(s) for s in r.rhs)
        out.append(f"{pcfg.label_of(r.lhs)} -> {rhs} # {r.prob!r}")
    return "\n".join(out) + "\n"
