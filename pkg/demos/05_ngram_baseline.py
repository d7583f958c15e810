"""An n-gram baseline has little syntactic state to show.

Training a backoff bigram on the suite sentences themselves gives it perfect
vocabulary coverage, yet the summary table still shows what the paper's
small-capacity baseline showed: without a representation of the open clause
there is no garden-path revival at the disambiguator and no licensing
structure, so the basic-effect cells fail while the exact parser passes.
"""

import tempfile
from pathlib import Path

from synstate.ngram import ngram_surprisals, save_ngram, train_ngram
from synstate.pipeline import RunConfig, run_pipeline

corpus_suites = ("subordination", "npz-transitivity", "mvrr")

from synstate.suites import builtin_suite  # noqa: E402

corpus = [
    list(sent.tokens)
    for name in corpus_suites
    for item in builtin_suite(name).items
    for sent in item.sentences.values()
]
model = train_ngram(corpus, order=2, discount=0.75)

sent = builtin_suite("npz-transitivity").items[0].sentences[("transitive", "nocomma")]
surps, eos = ngram_surprisals(model, sent.tokens)
print("bigram word surprisals for NP/Z item 1 [transitive,nocomma]:")
print("  " + "  ".join(f"{t}:{s:.2f}" for t, s in zip(sent.tokens, surps)))
print()

with tempfile.TemporaryDirectory() as tmp:
    mpath = Path(tmp) / "bigram.ngram"
    mpath.write_text(save_ngram(model))
    config = RunConfig(
        experiments=corpus_suites,
        scorers=(
            "grammar:toy:subordination",
            "grammar:toy:npz",
            "grammar:toy:mvrr",
            f"ngram:{mpath}",
        ),
        out_dir=str(Path(tmp) / "out"),
    )
    result = run_pipeline(config)

print("summary table (basic / fine-grained evidence per phenomenon):")
print(f"  {'scorer':34s} {'phenomenon':18s} basic  fine")
for scorer, phen, basic, fine in result.summary_rows:
    label = scorer if not scorer.startswith("ngram:") else "ngram:bigram"
    if basic == "not-run":
        continue
    print(f"  {label:34s} {phen:18s} {basic:6s} {fine}")
