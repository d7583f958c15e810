"""Word-synchronous beam-search surprisal over a generative transition parser.

The search expands parser actions breadth-first between words, keeping the
top `action_beam` partial parses by log forward score. Parses whose latest
action generates the next word move to the word beam; once the word beam
holds `word_beam` entries that no fringe entry could outrank (or the fringe
empties, or the per-word action cap trips), the summed score of the kept
word-beam entries is the lower bound P_min on the prefix probability, and
per-word surprisal follows from successive bounds. The defaults follow the
reference procedure: action beam 100, word beam 10.

Action scorers are pluggable. The PCFG instantiation encodes leftmost
derivations: OPEN expands the top frontier nonterminal by one of its rules,
GEN emits the top frontier terminal with probability 1. CLOSE exists in the
action alphabet for scorers with explicit constituent closure but is never
produced by the PCFG scorer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from synstate.earley import NEG_INF, _logaddexp2
from synstate.grammar import Pcfg, map_unknowns

DEFAULT_ACTION_BEAM = 100
DEFAULT_WORD_BEAM = 10
DEFAULT_MAX_ACTIONS_PER_WORD = 40

# Actions are comparable tuples so score ties break on the action sequence:
#   ("open", rule_index) | ("gen", terminal) | ("close",)
OPEN, GEN, CLOSE = "open", "gen", "close"


@dataclass(frozen=True)
class ParserConfig:
    """Leftmost-derivation frontier: remaining symbols, top first."""

    frontier: tuple
    words_generated: int = 0

    @property
    def complete(self):
        return not self.frontier


@dataclass(frozen=True)
class BeamEntry:
    config: ParserConfig
    logscore: float  # log2 forward probability of the action sequence
    actions: tuple = ()

    def sort_key(self):
        return (-self.logscore, self.actions)


class PcfgActionScorer:
    """ActionScorer whose induced string distribution equals the Pcfg's.

    Stateless given a ParserConfig; safe for concurrent use.
    """

    def __init__(self, pcfg: Pcfg):
        self.pcfg = pcfg

    def initial_config(self):
        return ParserConfig(frontier=(self.pcfg.start,))

    def legal_actions(self, config):
        """Legal next actions with probabilities summing to 1."""
        if config.complete:
            return []
        top = config.frontier[0]
        if self.pcfg.is_nonterminal[top]:
            return [
                ((OPEN, rid), r.prob)
                for rid, r in enumerate(self.pcfg.rules)
                if r.lhs == top
            ]
        return [((GEN, self.pcfg.label_of(top)), 1.0)]

    def apply(self, config, action):
        kind = action[0]
        if kind == OPEN:
            rule = self.pcfg.rules[action[1]]
            return ParserConfig(
                frontier=rule.rhs + config.frontier[1:],
                words_generated=config.words_generated,
            )
        if kind == GEN:
            return ParserConfig(
                frontier=config.frontier[1:],
                words_generated=config.words_generated + 1,
            )
        raise ValueError(f"PCFG scorer does not use action {action!r}")


def pcfg_action_scorer(pcfg: Pcfg) -> PcfgActionScorer:
    return PcfgActionScorer(pcfg)


@dataclass
class BeamSearchResult:
    log_p_min: list  # per word, log2 lower bound on prefix probability
    surprisals: list  # bits per word
    eos_surprisal: float
    failed_at: int = None  # word index where the word beam emptied, if any
    cap_hit: bool = False  # an action cap tripped somewhere

    @property
    def ok(self):
        return self.failed_at is None


def _prune(entries, k):
    entries.sort(key=BeamEntry.sort_key)
    return entries[:k]


def word_sync_beam_search(
    scorer,
    sentence,
    action_beam: int = DEFAULT_ACTION_BEAM,
    word_beam: int = DEFAULT_WORD_BEAM,
    max_actions_per_word: int = DEFAULT_MAX_ACTIONS_PER_WORD,
) -> BeamSearchResult:
    """Estimate per-word surprisal for `sentence` under an action scorer.

    Requires action_beam >= word_beam >= 1 and max_actions_per_word >= 1.
    Surprisal_i = -log2(P_min(w_1..i) / P_min(w_1..i-1)) with P_min of the
    empty prefix = 1; from an unparseable word on, surprisals are +inf.
    """
    if not (action_beam >= word_beam >= 1):
        raise ValueError("need action_beam >= word_beam >= 1")
    if max_actions_per_word < 1:
        raise ValueError("need max_actions_per_word >= 1")

    result = BeamSearchResult(log_p_min=[], surprisals=[], eos_surprisal=float("inf"))
    fringe = [BeamEntry(config=scorer.initial_config(), logscore=0.0)]
    prev_log = 0.0

    for i, word in enumerate(sentence):
        found = []
        steps = 0
        while fringe:
            if len(found) >= word_beam:
                found.sort(key=BeamEntry.sort_key)
                kth = found[word_beam - 1].logscore
                if all(e.logscore <= kth for e in fringe):
                    break  # nothing left in the fringe can enter the word beam
            if steps >= max_actions_per_word:
                result.cap_hit = True
                break
            steps += 1
            grown = []
            for entry in fringe:
                for action, prob in scorer.legal_actions(entry.config):
                    if action[0] == GEN and action[1] != word:
                        continue  # mismatching terminal: dead hypothesis
                    child = BeamEntry(
                        config=scorer.apply(entry.config, action),
                        logscore=entry.logscore + math.log2(prob),
                        actions=entry.actions + (action,),
                    )
                    grown.append(child)
            grown = _prune(grown, action_beam)
            fringe = []
            for child in grown:
                if child.actions[-1][0] == GEN:
                    found.append(child)
                else:
                    fringe.append(child)

        found = _prune(found, word_beam)
        if not found:
            result.failed_at = i
            remaining = len(sentence) - i
            result.log_p_min.extend([NEG_INF] * remaining)
            result.surprisals.extend([float("inf")] * remaining)
            return result
        log_p = NEG_INF
        for e in found:
            log_p = _logaddexp2(log_p, e.logscore)
        result.log_p_min.append(log_p)
        result.surprisals.append(max(0.0, -(log_p - prev_log)))
        prev_log = log_p
        fringe = found

    # End of sentence: mass of completed configurations among survivors.
    # Scorers with CLOSE-style actions may need non-generating steps to
    # finish; expand those within the same beam and cap discipline.
    completed = NEG_INF
    steps = 0
    while True:
        done = [e for e in fringe if e.config.complete]
        for e in done:
            completed = _logaddexp2(completed, e.logscore)
        fringe = [e for e in fringe if not e.config.complete]
        if not fringe or steps >= max_actions_per_word:
            if fringe:
                result.cap_hit = True
            break
        steps += 1
        grown = []
        for entry in fringe:
            for action, prob in scorer.legal_actions(entry.config):
                if action[0] == GEN:
                    continue  # would start a longer sentence
                grown.append(
                    BeamEntry(
                        config=scorer.apply(entry.config, action),
                        logscore=entry.logscore + math.log2(prob),
                        actions=entry.actions + (action,),
                    )
                )
        fringe = _prune(grown, action_beam)

    if completed != NEG_INF:
        result.eos_surprisal = max(0.0, -(completed - prev_log))
    return result


def beam_word_surprisals(
    pcfg: Pcfg,
    sentence,
    action_beam: int = DEFAULT_ACTION_BEAM,
    word_beam: int = DEFAULT_WORD_BEAM,
    max_actions_per_word: int = DEFAULT_MAX_ACTIONS_PER_WORD,
):
    """Beam-search analogue of earley.word_surprisals for a Pcfg."""
    mapped = map_unknowns(pcfg, sentence)
    res = word_sync_beam_search(
        pcfg_action_scorer(pcfg),
        mapped,
        action_beam=action_beam,
        word_beam=word_beam,
        max_actions_per_word=max_actions_per_word,
    )
    return res.surprisals, res.eos_surprisal
