"""Garden-path effects at the disambiguating word.

NP/Z: "When the dog scratched the vet ... took off ..." — without a comma,
the parser prefers attaching "the vet ..." as the object of "scratched"; the
main verb then forces reanalysis, and its surprisal spikes relative to the
comma condition. Transitive embedded verbs invite the object reading far
more strongly than intransitives, so the comma effect interacts with verb
transitivity.

MV/RR: "The woman brought the sandwich ... tripped ..." — "brought" is
locally a main verb, so the real main verb is a surprise unless "who was"
(or an unambiguous participle like "given") marks the relative clause.
"""

from synstate import stats
from synstate.scorers import EarleyScorer, score_experiment
from synstate.suites import builtin_suite
from synstate.toygrammars import grammar_for_suite


def word_profile(scorer, sent, highlight):
    surps, eos = scorer.score(list(sent.tokens))
    start, end = sent.regions[highlight]
    cells = []
    for i, (tok, s) in enumerate(zip(sent.tokens, surps)):
        mark = "*" if start <= i < end else " "
        cells.append(f"{tok}{mark}{s:.2f}")
    return "  ".join(cells)


for suite_name, factor in (("npz-transitivity", "comma"), ("mvrr", "reduction")):
    exp = builtin_suite(suite_name)
    scorer = EarleyScorer(grammar_for_suite(suite_name), name="earley")
    table, failures = score_experiment(scorer, exp)
    assert not failures
    records = stats.aggregate_regions(table, exp)

    print(f"== {exp.name} ({len(exp.items)} items) ==")
    gp = stats.garden_path_effect(records, exp, factor)
    overall = gp.pop("overall")
    est = overall.estimate
    print(f"  garden path ({factor}): {est.mean:+.3f} bits, "
          f"CI [{est.ci_low:+.3f}, {est.ci_high:+.3f}], p = {est.p_perm:.3g}, "
          f"positive on {sum(v > 0 for v in overall.values)}/{est.n_items} items")
    for (other, level), res in sorted(gp.items()):
        print(f"    at {other}={level:12s} {res.estimate.mean:+.3f} bits")
    other_factor = next(f for f, _ in exp.factors if f != factor)
    inter = stats.interaction_2x2(records, exp, factor, other_factor, "disambiguator")
    print(f"  {factor} x {other_factor} interaction: {inter.estimate.mean:+.3f} bits")
    print()

print("Word-by-word profile of NP/Z item 1 (* marks the disambiguator):")
exp = builtin_suite("npz-transitivity")
scorer = EarleyScorer(grammar_for_suite(exp.name), name="earley")
for cond in (("transitive", "nocomma"), ("transitive", "comma")):
    sent = exp.items[0].sentences[cond]
    print(f"  [{','.join(cond)}]")
    print(f"    {word_profile(scorer, sent, 'disambiguator')}")
print()
print("The nocomma profile concentrates its extra bits exactly on the")
print("disambiguating verb, the garden-path signature.")
