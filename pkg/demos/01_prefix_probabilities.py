"""Exact prefix probabilities and per-word surprisal for small PCFGs.

The chart parser computes, at every word, the total probability of all
complete sentences that begin with the tokens seen so far. Successive
prefix-probability ratios give per-word surprisal in bits, and the ratio of
the full-parse probability to the final prefix gives the end-of-sentence
surprisal.
"""

from synstate.earley import complete_probability, prefix_probability, word_surprisals
from synstate.grammar import make_pcfg


def show(pcfg, sentence):
    print(f"  sentence: {' '.join(sentence)}")
    for k in range(1, len(sentence) + 1):
        print(f"    prefix P({' '.join(sentence[:k])} ...) = "
              f"{prefix_probability(pcfg, sentence[:k]):.6f}")
    surps, eos = word_surprisals(pcfg, sentence)
    print(f"    complete-parse probability = {complete_probability(pcfg, sentence):.6f}")
    print(f"    word surprisals (bits): {['%.3f' % s for s in surps]}, eos {eos:.3f}")
    print()


print("Two-string grammar: S -> a a [0.5] | a b [0.5]")
g = make_pcfg("S", [("S", ("a", "a"), 0.5), ("S", ("a", "b"), 0.5)])
print("The first word is certain (0 bits); the second picks one of two")
print("equiprobable continuations (1 bit).")
show(g, ["a", "b"])

print("Left-recursive grammar: S -> S a [0.5] | a [0.5]")
print("Strings are a^k with probability 0.5^k. The left-corner closure")
print("matrix sums the infinite chain of left expansions, so prefix")
print("probabilities stay exact: P(a ...) = 1, P(a a ...) = 0.5.")
g = make_pcfg("S", [("S", ("S", "a"), 0.5), ("S", ("a",), 0.5)])
show(g, ["a", "a"])

print("Unit-production chain: S -> A [0.4] | a A [0.6], A -> B [0.5] | b [0.5], B -> c")
print("Unit rules never appear in the chart; their mass lives in the unit")
print("closure applied during completion.")
g = make_pcfg(
    "S",
    [
        ("S", ("A",), 0.4),
        ("S", ("a", "A"), 0.6),
        ("A", ("B",), 0.5),
        ("A", ("b",), 0.5),
        ("B", ("c",), 1.0),
    ],
)
show(g, ["a", "c"])

print("A prefix outside the language has probability 0 and infinite surprisal:")
g = make_pcfg("S", [("S", ("a", "b"), 1.0)])
show(g, ["a", "a"])
