"""The subordination design under the exact symbolic scorer.

A subordinator ("As ...") obligates a matrix clause. The toy grammar knows
this, so on the built-in 2x2 suite it shows the two diagnostic effects with
the expected signs on every item:

  matrix licensing (negative): the matrix clause is cheaper after a
    subordinate clause than after a bare clause with a comma;
  no-matrix penalty (positive): ending the sentence right after the
    subordinate clause is expensive.

The modifier grid then shows that an exact symbolic model maintains this
expectation across arbitrary intervening postmodifiers: the licensing
interaction is flat across the grid rather than degrading.
"""

from synstate import stats
from synstate.scorers import EarleyScorer, score_experiment
from synstate.suites import builtin_suite
from synstate.toygrammars import subordination_grammar

exp = builtin_suite("subordination")
scorer = EarleyScorer(subordination_grammar(), name="earley")
table, failures = score_experiment(scorer, exp)
assert not failures
records = stats.aggregate_regions(table, exp)

lic = stats.matrix_licensing_effect(records, exp)
pen = stats.no_matrix_penalty(records, exp)
inter = stats.licensing_interaction(records, exp)
print(f"{len(exp.items)} items, 4 conditions each")
for res in (lic, pen, inter):
    est = res.estimate
    print(
        f"  {est.name:24s} {est.mean:+.3f} bits  "
        f"95% CI [{est.ci_low:+.3f}, {est.ci_high:+.3f}]  perm p = {est.p_perm:.3g}"
    )
neg = sum(v < 0 for v in lic.values)
pos = sum(v > 0 for v in pen.values)
print(f"  sign test: licensing negative on {neg}/{len(lic.values)} items, "
      f"penalty positive on {pos}/{len(pen.values)}")
print()

print("Condition means with within-item 95% CIs (matrix region):")
by_cond = {}
for cond in (("sub", "matrix"), ("nosub", "matrix")):
    by_cond[cond] = [
        r.bits
        for item in exp.items
        for r in records
        if r.item_id == item.id and r.condition == cond and r.region == "matrix"
    ]
for cond, (mean, lo, hi) in stats.within_item_ci(by_cond).items():
    print(f"  {'/'.join(cond):16s} {mean:7.3f} bits  [{lo:.3f}, {hi:.3f}]")
print()

print("Modifier grid (licensing interaction, bits): rows = subject modifier,")
print("columns = object modifier.")
grid_exp = builtin_suite("subordination-modifiers")
grid_table, _ = score_experiment(scorer, grid_exp)
grid_records = stats.aggregate_regions(grid_table, grid_exp)
results = {r.spec.name: r.estimate.mean for r in stats.evaluate_builtin_effects(grid_records, grid_exp)}
mods = ("none", "pp", "src", "orc")
print("        " + "".join(f"{m:>8s}" for m in mods))
for sm in mods:
    row = [results[f"licensing_interaction:{sm}:{om}"] for om in mods]
    print(f"  {sm:>5s} " + "".join(f"{v:8.3f}" for v in row))
print()
print("The exact parser's syntactic state never decays, so every cell shows")
print("the same positive interaction; sequence models without such state")
print("show smaller or noisier values as the intervening material grows.")
