"""Exact prefix probabilities and per-word surprisal for a PCFG.

A probabilistic chart parser in the Earley style. Each chart state carries a
forward probability (sum over all derivation paths from the start reaching
the state) and an inner probability (sum over derivations of the spanned
substring). Left recursion is handled by folding the left-corner closure
R_L = (I - P_L)^-1 into prediction, and unit-production chains by folding
the unit closure R_U = (I - P_U)^-1 into completion. Unit rules therefore
never appear as chart states; their mass lives entirely in the closures,
which avoids double counting and terminates on cyclic grammars.

All chart arithmetic is in log2 space (surprisal is measured in bits);
closure matrices are solved densely in the probability domain.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from synstate.grammar import GrammarError, Pcfg, map_unknowns

NEG_INF = float("-inf")
CLOSURE_COND_MAX = 1e12


class InconsistentGrammarError(GrammarError):
    """(I - P) is singular or near-singular; closure mass diverges."""


def _logaddexp2(a, b):
    if a == NEG_INF:
        return b
    if b == NEG_INF:
        return a
    if a < b:
        a, b = b, a
    return a + math.log1p(2.0 ** (b - a)) / 0.6931471805599453


@dataclass(frozen=True)
class ClosureMatrices:
    """Left-corner and unit-production closures over the nonterminal alphabet.

    Entry [Z, Y] sums the probabilities of chains expanding Z to Y as
    leftmost child (R_L) or through unit productions (R_U); both include the
    empty chain, so the diagonal is >= 1.
    """

    nonterminals: tuple  # nonterminal ids in matrix order
    index: dict  # id -> row/col
    left_corner: np.ndarray
    unit: np.ndarray


def build_closures(pcfg: Pcfg) -> ClosureMatrices:
    nts = tuple(pcfg.nonterminal_ids)
    idx = {nt: i for i, nt in enumerate(nts)}
    n = len(nts)
    p_l = np.zeros((n, n))
    p_u = np.zeros((n, n))
    for r in pcfg.rules:
        first = r.rhs[0]
        if pcfg.is_nonterminal[first]:
            p_l[idx[r.lhs], idx[first]] += r.prob
            if len(r.rhs) == 1:
                p_u[idx[r.lhs], idx[first]] += r.prob
    eye = np.eye(n)
    mats = []
    for name, p in (("left-corner", p_l), ("unit-production", p_u)):
        m = eye - p
        if np.linalg.cond(m) > CLOSURE_COND_MAX:
            raise InconsistentGrammarError(
                f"{name} closure is singular or near-singular "
                "(cyclic expansion mass approaching 1)"
            )
        inv = np.linalg.inv(m)
        if not np.all(np.isfinite(inv)) or inv.min() < -1e-9:
            raise InconsistentGrammarError(f"{name} closure has invalid entries")
        mats.append(np.maximum(inv, 0.0))
    return ClosureMatrices(nonterminals=nts, index=idx, left_corner=mats[0], unit=mats[1])


def _is_unit(pcfg, rule):
    return len(rule.rhs) == 1 and pcfg.is_nonterminal[rule.rhs[0]]


class EarleyParser:
    """Chart parser bound to one grammar; reusable across sentences.

    Charts are per-sentence and independent; the parser itself is read-only
    after construction and safe to share across workers.
    """

    def __init__(self, pcfg: Pcfg):
        self.pcfg = pcfg
        self.closures = build_closures(pcfg)
        idx = self.closures.index
        r_l, r_u = self.closures.left_corner, self.closures.unit

        # Prediction tables per expected nonterminal Z: non-unit rules Y -> nu
        # with R_L[Z, Y] > 0, weighted by log2(R_L[Z, Y] * P(rule)). Rules whose
        # first symbol is a terminal are grouped by that terminal so prediction
        # can skip rules that could never scan the upcoming token.
        self._rules = [r for r in pcfg.rules if not _is_unit(pcfg, r)]
        self._pred_nt = defaultdict(list)  # Z -> [(rule_id, logw)]
        self._pred_lex = defaultdict(lambda: defaultdict(list))  # Z -> {term: [...]}
        for z in self.closures.nonterminals:
            for rid, rule in enumerate(self._rules):
                w = r_l[idx[z], idx[rule.lhs]] * rule.prob
                if w <= 0.0:
                    continue
                logw = math.log2(w)
                first = rule.rhs[0]
                if pcfg.is_nonterminal[first]:
                    self._pred_nt[z].append((rid, logw))
                else:
                    self._pred_lex[z][first].append((rid, logw))
        # Completion fan-out per completed lhs Y: customers expecting Z take
        # the completed inner mass times R_U[Z, Y].
        self._unit_parents = defaultdict(list)  # Y -> [(Z, log2 R_U[Z, Y])]
        for y in self.closures.nonterminals:
            for z in self.closures.nonterminals:
                w = r_u[idx[z], idx[y]]
                if w > 0.0:
                    self._unit_parents[y].append((z, math.log2(w)))
        self._rule_rhs = [r.rhs for r in self._rules]
        self._rule_lhs = [r.lhs for r in self._rules]
        self._term_ids = {
            lab: i for i, lab in enumerate(pcfg.labels) if not pcfg.is_nonterminal[i]
        }

    # -- chart ------------------------------------------------------------
    # State key: (rule_id, dot, origin); DUMMY (-1) is the start state whose
    # single-symbol "rhs" is the start nonterminal.
    DUMMY = -1

    def _rhs(self, rid):
        if rid == self.DUMMY:
            return (self.pcfg.start,)
        return self._rule_rhs[rid]

    def chart(self, tokens):
        """Run the full chart; returns (per-position log2 prefix list,
        per-position log2 complete-parse list, final column reachable flag).

        tokens must already be mapped through the grammar's unk policy.
        """
        pcfg = self.pcfg
        n = len(tokens)
        tok_ids = [self._term_ids.get(t) for t in tokens]
        log_prefix = [0.0]
        log_complete = []

        # Column state: dict key -> [forward, inner]; waiting maps the symbol
        # after the dot to state keys, for scans and completions.
        col = {(self.DUMMY, 0, 0): [0.0, 0.0]}
        columns = [col]
        waiting = defaultdict(list)
        waiting[pcfg.start].append((self.DUMMY, 0, 0))
        waitlists = [waiting]

        for pos in range(n + 1):
            col = columns[pos]
            waiting = waitlists[pos]

            # Complete, most recent origins first: a completer's inner mass is
            # final before it pops because contributions only flow from larger
            # origins to smaller ones (no epsilon rules, units folded away).
            pending = sorted(
                (k for k in col if k[0] != self.DUMMY and k[1] == len(self._rhs(k[0]))),
                key=lambda k: -k[2],
            )
            seen = set(pending)
            i = 0
            while i < len(pending):
                key = pending[i]
                i += 1
                rid, _, origin = key
                fwd, inr = col[key]
                for z, logw in self._unit_parents[self._rule_lhs[rid]]:
                    for ckey in waitlists[origin].get(z, ()):
                        crid, cdot, corigin = ckey
                        cfwd, cinr = columns[origin][ckey]
                        nkey = (crid, cdot + 1, corigin)
                        add_f = cfwd + inr + logw
                        add_i = cinr + inr + logw
                        cell = col.get(nkey)
                        if cell is not None:
                            cell[0] = _logaddexp2(cell[0], add_f)
                            cell[1] = _logaddexp2(cell[1], add_i)
                            continue
                        # First creation: register the state exactly once in
                        # the waiting/pending indexes (multiple completion
                        # paths only accumulate into the existing cell).
                        col[nkey] = [add_f, add_i]
                        if crid != self.DUMMY:
                            crhs = self._rhs(crid)
                            if cdot + 1 == len(crhs):
                                if nkey not in seen:
                                    seen.add(nkey)
                                    # Insertion keeps descending-origin order:
                                    # corigin < origin <= any pending origin.
                                    pending.append(nkey)
                            else:
                                waiting[crhs[cdot + 1]].append(nkey)
                        # DUMMY completion: nothing waits on it.

            # Record total parse probability of tokens[0:pos].
            done = col.get((self.DUMMY, 1, 0))
            log_complete.append(done[1] if done else NEG_INF)

            if pos == n:
                break

            # Predict (via left-corner closure), filtered by the next token so
            # lexical rules that could never scan are skipped. Prediction from
            # a column happens once; predicted states never need completion
            # here because no customer in this column can span zero tokens.
            next_tok = tok_ids[pos]
            predicted = {}
            for z, keys in list(waiting.items()):
                if not pcfg.is_nonterminal[z]:
                    continue
                alpha = NEG_INF
                for key in keys:
                    alpha = _logaddexp2(alpha, col[key][0])
                cands = self._pred_nt.get(z, ())
                lex = ()
                if next_tok is not None:
                    lex = self._pred_lex.get(z, {}).get(next_tok, ())
                for rid, logw in list(cands) + list(lex):
                    cell = predicted.get(rid)
                    if cell is None:
                        predicted[rid] = [alpha + logw, math.log2(self._rules[rid].prob)]
                    else:
                        cell[0] = _logaddexp2(cell[0], alpha + logw)
            for rid, (fwd, inr) in predicted.items():
                key = (rid, 0, pos)
                col[key] = [fwd, inr]
                waiting[self._rhs(rid)[0]].append(key)

            # Scan the next token.
            ncol = {}
            nwaiting = defaultdict(list)
            prefix = NEG_INF
            if next_tok is not None:
                for key in waiting.get(next_tok, ()):
                    rid, dot, origin = key
                    fwd, inr = col[key]
                    nkey = (rid, dot + 1, origin)
                    ncol[nkey] = [fwd, inr]
                    prefix = _logaddexp2(prefix, fwd)
                    rhs = self._rhs(rid)
                    if dot + 1 < len(rhs):
                        nwaiting[rhs[dot + 1]].append(nkey)
            log_prefix.append(prefix)
            columns.append(ncol)
            waitlists.append(nwaiting)
            if prefix == NEG_INF:
                # Dead prefix: every later prefix is dead too; keep appending
                # empty columns so indices line up.
                for _ in range(pos + 1, n):
                    log_prefix.append(NEG_INF)
                    columns.append({})
                    waitlists.append(defaultdict(list))
                log_complete.extend([NEG_INF] * (n - pos))
                break

        return log_prefix, log_complete


def prefix_probability(pcfg: Pcfg, tokens) -> float:
    """Total probability of complete sentences beginning with `tokens`.

    Exact for proper, consistent grammars; returns 0.0 when the prefix is
    not derivable.
    """
    mapped = map_unknowns(pcfg, tokens)
    log_prefix, _ = EarleyParser(pcfg).chart(mapped)
    return 2.0 ** log_prefix[len(tokens)] if log_prefix[len(tokens)] != NEG_INF else 0.0


def complete_probability(pcfg: Pcfg, tokens) -> float:
    """Total probability of full parses of exactly `tokens`."""
    mapped = map_unknowns(pcfg, tokens)
    _, log_complete = EarleyParser(pcfg).chart(mapped)
    lp = log_complete[len(tokens)]
    return 2.0 ** lp if lp != NEG_INF else 0.0


def surprisals_from_chart(log_prefix, log_complete):
    """Per-word surprisal in bits plus the end-of-sentence surprisal."""
    n = len(log_prefix) - 1
    surps = []
    for i in range(1, n + 1):
        prev, cur = log_prefix[i - 1], log_prefix[i]
        surps.append(float("inf") if cur == NEG_INF else -(cur - prev))
    final_prefix = log_prefix[n]
    final_complete = log_complete[n]
    if final_prefix == NEG_INF or final_complete == NEG_INF:
        eos = float("inf")
    else:
        eos = -(final_complete - final_prefix)
    # Guard tiny negative values from float round-off.
    surps = [0.0 if (s != float("inf") and abs(s) < 1e-12) else s for s in surps]
    if eos != float("inf") and abs(eos) < 1e-12:
        eos = 0.0
    return surps, eos


def word_surprisals(pcfg: Pcfg, sentence) -> tuple:
    """Surprisal in bits for each word of `sentence`, plus eos surprisal.

    surprisal_i = -log2(prefix(w_1..i) / prefix(w_1..i-1)); the eos event
    compares the total parse probability against the final prefix mass.
    Values are +inf from the first underivable word on.
    """
    mapped = map_unknowns(pcfg, sentence)
    log_prefix, log_complete = EarleyParser(pcfg).chart(mapped)
    return surprisals_from_chart(log_prefix, log_complete)
