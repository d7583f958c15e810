"""Backoff n-gram language model with absolute discounting.

Desk-scale stand-in for trained sequence models. Conditional probabilities
interpolate discounted counts with the next-lower order,

    P_k(w | c) = max(count(c w) - d, 0) / count(c)
                 + d * types(c) / count(c) * P_{k-1}(w | tail(c)),

bottoming out in the unigram relative frequencies, so every observed
context's distribution over vocabulary + EOS sums to exactly 1. Unseen
contexts defer entirely to the lower order. Out-of-vocabulary tokens score
against a reserved uniform floor slot below the unigram level; the floor
mass sits outside the normalized event space (it is a scoring floor, not a
vocabulary member).
"""

from __future__ import annotations

import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field

BOS = "<s>"
EOS = "</s>"
UNK = "<unk>"
_RESERVED = (BOS, EOS, UNK)


class NgramError(ValueError):
    pass


@dataclass
class NGramModel:
    order: int
    discount: float
    counts: dict  # (context tuple, word) -> int, for context lengths 0..order-1
    context_totals: dict  # context tuple -> total count
    context_types: dict  # context tuple -> number of distinct continuations
    vocabulary: frozenset  # observed tokens plus BOS/EOS markers

    def prob(self, word, context):
        """P(word | context); context is the preceding token tuple (any
        length; only the last order-1 tokens matter)."""
        if word not in self.vocabulary or word in (BOS, UNK):
            word = UNK
        ctx = tuple(context)[max(0, len(context) - (self.order - 1)) :]
        return self._p(word, ctx)

    def _p(self, word, ctx):
        if len(ctx) == 0:
            n = self.context_totals[()]
            t = self.context_types[()]
            if word == UNK:
                return (self.discount * t / n) * (1.0 / (t + 1))
            return self.counts.get(((), word), 0) / n
        if ctx not in self.context_totals:
            return self._p(word, ctx[1:])
        total = self.context_totals[ctx]
        types = self.context_types[ctx]
        c = self.counts.get((ctx, word), 0)
        backoff = (self.discount * types / total) * self._p(word, ctx[1:])
        return max(c - self.discount, 0.0) / total + backoff

    def surprisal(self, word, context):
        return -math.log2(self.prob(word, context))


def train_ngram(corpus, order: int, discount: float) -> NGramModel:
    """Estimate an NGramModel from a corpus of token lists.

    Sentences are padded with order-1 BOS markers and one EOS event.
    """
    corpus = [list(s) for s in corpus]
    if not corpus:
        raise NgramError("empty corpus")
    if not (1 <= order <= 5):
        raise NgramError("order must be in 1..5")
    if not (0.0 < discount < 1.0):
        raise NgramError("discount must be in (0, 1)")
    counts = Counter()
    vocab = set()
    for sent in corpus:
        for tok in sent:
            if tok in _RESERVED:
                raise NgramError(f"corpus contains reserved marker {tok!r}")
        vocab.update(sent)
        events = list(sent) + [EOS]
        padded = [BOS] * (order - 1) + events
        for i, word in enumerate(events):
            pos = i + order - 1
            for k in range(order):
                ctx = tuple(padded[pos - k : pos])
                counts[(ctx, word)] += 1
    totals = defaultdict(int)
    types = defaultdict(int)
    for (ctx, _), c in counts.items():
        totals[ctx] += c
        types[ctx] += 1
    return NGramModel(
        order=order,
        discount=discount,
        counts=dict(counts),
        context_totals=dict(totals),
        context_types=dict(types),
        vocabulary=frozenset(vocab | {BOS, EOS}),
    )


def ngram_surprisals(model: NGramModel, sentence):
    """Per-word surprisal in bits plus the EOS surprisal.

    OOV tokens are scored through the UNK floor; they also appear as UNK in
    later contexts so the chain rule stays exact.
    """
    sentence = list(sentence)
    mapped = [t if t in model.vocabulary else UNK for t in sentence]
    history = [BOS] * (model.order - 1)
    surps = []
    for raw, tok in zip(sentence, mapped):
        surps.append(model.surprisal(raw, tuple(history)))
        history.append(tok)
    eos = model.surprisal(EOS, tuple(history))
    return surps, eos


# -- save/load ---------------------------------------------------------------
# Deterministic text: header lines, then one n-gram per line, tab-separated,
# sorted; the gram is context tokens followed by the predicted word.


def save_ngram(model: NGramModel) -> str:
    lines = [f"order\t{model.order}", f"discount\t{model.discount!r}"]
    grams = sorted((ctx + (word,), c) for (ctx, word), c in model.counts.items())
    for gram, c in grams:
        lines.append("\t".join(gram) + f"\t{c}")
    return "\n".join(lines) + "\n"


def load_ngram(text: str) -> NGramModel:
    lines = text.splitlines()
    if len(lines) < 2 or not lines[0].startswith("order\t"):
        raise NgramError("bad model file: missing order header")
    order = int(lines[0].split("\t")[1])
    discount = float(lines[1].split("\t")[1])
    counts = {}
    vocab = set()
    for line in lines[2:]:
        if not line:
            continue
        parts = line.split("\t")
        gram, c = tuple(parts[:-1]), int(parts[-1])
        counts[(gram[:-1], gram[-1])] = c
        vocab.update(g for g in gram if g not in _RESERVED)
    totals = defaultdict(int)
    types = defaultdict(int)
    for (ctx, _), c in counts.items():
        totals[ctx] += c
        types[ctx] += 1
    return NGramModel(
        order=order,
        discount=discount,
        counts=counts,
        context_totals=dict(totals),
        context_types=dict(types),
        vocabulary=frozenset(vocab | {BOS, EOS}),
    )
