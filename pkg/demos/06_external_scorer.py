"""Scoring through the external-scorer line protocol.

Any process that reads one JSON record per line and answers with surprisals
in bits can serve as a scorer. Here the package's own CLI serves the exact
parser over stdio in a subprocess, and the client scores a suite through the
wire; the result matches in-process scoring bit for bit (the wire uses
round-trip decimal).
"""

import sys

from synstate.protocol import ExternalScorerClient, score_batch
from synstate.scorers import EarleyScorer, score_experiment
from synstate.suites import builtin_suite
from synstate.toygrammars import mvrr_grammar

exp = builtin_suite("mvrr")

endpoint = f"cmd:{sys.executable} -m synstate serve --scorer grammar:toy:mvrr --transport stdio"
print("endpoint:", endpoint)
with ExternalScorerClient(endpoint, timeout=60, name="extern") as client:
    wire_table, failures = score_batch(client, exp)
print(f"scored {len({(r.item_id, r.condition) for r in wire_table.rows})} sentences "
      f"over the wire, {len(failures)} failures")

direct_table, _ = score_experiment(EarleyScorer(mvrr_grammar(), name="direct"), exp)
wire = {(r.item_id, r.condition, r.token_index): r.bits for r in wire_table.rows}
direct = {(r.item_id, r.condition, r.token_index): r.bits for r in direct_table.rows}
worst = max(abs(wire[k] - direct[k]) for k in direct)
print(f"max |wire - direct| over {len(direct)} surprisal values: {worst:.2e} bits")

item = exp.items[0]
cond = ("reduced", "ambig")
sent = item.sentences[cond]
print()
print(f"item 1 {'[' + ','.join(cond) + ']'}: {sent.text()}")
row_bits = [wire[(1, cond, i)] for i in range(len(sent.tokens))]
print("  " + "  ".join(f"{t}:{b:.2f}" for t, b in zip(sent.tokens, row_bits)))
