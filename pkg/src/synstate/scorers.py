"""Scorer interface and the per-token surprisal table.

A scorer exposes a name and score(tokens) -> (per-token bits, eos bits).
Implementations wrap the exact chart parser, the word-synchronous beam
search, the n-gram model, and (in synstate.protocol) external endpoints.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from synstate import beam as beam_mod
from synstate.earley import EarleyParser, surprisals_from_chart
from synstate.grammar import OovError, Pcfg, map_unknowns
from synstate.ngram import NGramModel, ngram_surprisals

EOS_TOKEN = "</s>"


def format_bits(x: float) -> str:
    """Decimal with 9 significant digits; infinity as the literal 'inf'."""
    if math.isinf(x):
        return "inf"
    return "%.9g" % x


def parse_bits(text: str) -> float:
    return float("inf") if text == "inf" else float(text)


class ScorerFailure(RuntimeError):
    """A scorer could not produce surprisals for one sentence."""


@dataclass(frozen=True)
class SurprisalRow:
    scorer: str
    experiment: str
    item_id: int
    condition: tuple
    token_index: int
    token: str
    region: str  # containing region name, or ""
    is_eos: bool
    bits: float


class SurprisalTable:
    """Rows of per-token surprisal, including one eos row per sentence."""

    COLUMNS = (
        "scorer",
        "experiment",
        "item",
        "condition",
        "token_index",
        "token",
        "region",
        "is_eos",
        "bits",
    )

    def __init__(self, rows=()):
        self.rows = list(rows)

    def __len__(self):
        return len(self.rows)

    def scorer_names(self):
        seen = []
        for r in self.rows:
            if r.scorer not in seen:
                seen.append(r.scorer)
        return seen

    def for_scorer(self, scorer):
        return SurprisalTable([r for r in self.rows if r.scorer == scorer])

    def sentence_bits(self, scorer, experiment, item_id, condition):
        """(token bits in index order, eos bits) for one scored sentence."""
        toks = {}
        eos = None
        for r in self.rows:
            if (
                r.scorer == scorer
                and r.experiment == experiment
                and r.item_id == item_id
                and r.condition == condition
            ):
                if r.is_eos:
                    eos = r.bits
                else:
                    toks[r.token_index] = r.bits
        if eos is None and not toks:
            return None
        return [toks[i] for i in sorted(toks)], eos

    def to_tsv(self) -> str:
        lines = ["\t".join(self.COLUMNS)]
        for r in self.rows:
            lines.append(
                "\t".join(
                    (
                        r.scorer,
                        r.experiment,
                        str(r.item_id),
                        ",".join(r.condition),
                        str(r.token_index),
                        r.token,
                        r.region,
                        "1" if r.is_eos else "0",
                        format_bits(r.bits),
                    )
                )
            )
        return "\n".join(lines) + "\n"

    @classmethod
    def from_tsv(cls, text: str) -> "SurprisalTable":
        lines = text.splitlines()
        if not lines or tuple(lines[0].split("\t")) != cls.COLUMNS:
            raise ValueError("not a surprisal table")
        rows = []
        for line in lines[1:]:
            if not line:
                continue
            sc, exp, item, cond, idx, tok, region, is_eos, bits = line.split("\t")
            rows.append(
                SurprisalRow(
                    scorer=sc,
                    experiment=exp,
                    item_id=int(item),
                    condition=tuple(cond.split(",")),
                    token_index=int(idx),
                    token=tok,
                    region=region,
                    is_eos=is_eos == "1",
                    bits=parse_bits(bits),
                )
            )
        return cls(rows)


# -- scorer implementations ---------------------------------------------------


class EarleyScorer:
    """Exact prefix-probability surprisal under a Pcfg."""

    def __init__(self, pcfg: Pcfg, name="earley"):
        self.name = name
        self.pcfg = pcfg
        self._parser = EarleyParser(pcfg)

    def score(self, tokens):
        try:
            mapped = map_unknowns(self.pcfg, tokens)
        except OovError as exc:
            raise ScorerFailure(str(exc)) from exc
        log_prefix, log_complete = self._parser.chart(mapped)
        return surprisals_from_chart(log_prefix, log_complete)


class BeamScorer:
    """Word-synchronous beam-search surprisal with the PCFG action scorer."""

    def __init__(
        self,
        pcfg: Pcfg,
        name="beam",
        action_beam=beam_mod.DEFAULT_ACTION_BEAM,
        word_beam=beam_mod.DEFAULT_WORD_BEAM,
        max_actions_per_word=beam_mod.DEFAULT_MAX_ACTIONS_PER_WORD,
    ):
        self.name = name
        self.pcfg = pcfg
        self.action_beam = action_beam
        self.word_beam = word_beam
        self.max_actions_per_word = max_actions_per_word
        self._scorer = beam_mod.pcfg_action_scorer(pcfg)

    def score(self, tokens):
        try:
            mapped = map_unknowns(self.pcfg, tokens)
        except OovError as exc:
            raise ScorerFailure(str(exc)) from exc
        res = beam_mod.word_sync_beam_search(
            self._scorer,
            mapped,
            action_beam=self.action_beam,
            word_beam=self.word_beam,
            max_actions_per_word=self.max_actions_per_word,
        )
        return res.surprisals, res.eos_surprisal


class NgramScorer:
    def __init__(self, model: NGramModel, name="ngram"):
        self.name = name
        self.model = model

    def score(self, tokens):
        return ngram_surprisals(self.model, tokens)


class StubPieceScorer:
    """Deterministic stub: every <=4-character piece of a word costs
    log2(32) = 5 bits, as does the eos event. Shared with the external
    adapter's stub model so protocol transcripts are comparable bit-exactly.
    """

    name = "stub"
    PIECE_LEN = 4
    VOCAB_BITS = 5.0

    def score(self, tokens):
        surps = []
        for tok in tokens:
            pieces = max(1, -(-len(tok) // self.PIECE_LEN))
            surps.append(self.VOCAB_BITS * pieces)
        return surps, self.VOCAB_BITS


def score_experiment(scorer, experiment, workers: int = 1):
    """Score every sentence of an experiment.

    Returns (SurprisalTable, failures) where failures is a list of
    (item_id, condition, reason). Output order is deterministic regardless
    of worker count.
    """
    jobs = []
    for item in experiment.items:
        for cond in experiment.conditions():
            sent = item.sentences.get(cond)
            if sent is not None:
                jobs.append((item.id, cond, sent))

    def run(job):
        item_id, cond, sent = job
        try:
            surps, eos = scorer.score(list(sent.tokens))
        except ScorerFailure as exc:
            return item_id, cond, None, str(exc)
        except TimeoutError:
            return item_id, cond, None, "timeout"
        if len(surps) != len(sent.tokens):
            return item_id, cond, None, "length mismatch"
        return item_id, cond, (surps, eos), None

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, jobs))
    else:
        results = [run(j) for j in jobs]

    rows = []
    failures = []
    for (item_id, cond, sent), (rid, rcond, scored, reason) in zip(jobs, results):
        if scored is None:
            failures.append((item_id, cond, reason))
            continue
        surps, eos = scored
        region_of = {}
        for name, (start, end) in sent.regions.items():
            for i in range(start, end):
                region_of[i] = name
        for i, (tok, bits) in enumerate(zip(sent.tokens, surps)):
            rows.append(
                SurprisalRow(
                    scorer=scorer.name,
                    experiment=experiment.name,
                    item_id=item_id,
                    condition=cond,
                    token_index=i,
                    token=tok,
                    region=region_of.get(i, ""),
                    is_eos=False,
                    bits=bits,
                )
            )
        rows.append(
            SurprisalRow(
                scorer=scorer.name,
                experiment=experiment.name,
                item_id=item_id,
                condition=cond,
                token_index=len(sent.tokens),
                token=EOS_TOKEN,
                region="end" if "end" in sent.regions else "",
                is_eos=True,
                bits=eos,
            )
        )
    return SurprisalTable(rows), failures
