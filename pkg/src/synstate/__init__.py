"""Syntactic-state evaluation of incremental language models.

Provides factorial sentence suites, surprisal scorers (exact PCFG prefix
probabilities, word-synchronous beam search, backoff n-grams, external
scorers over a line protocol), and contrast statistics with within-item
confidence intervals and permutation tests.
"""

from synstate.items import (
    Experiment,
    Item,
    ItemFileError,
    RegionedSentence,
    parse_item_file,
    serialize_item_file,
    validate_experiment,
)

__version__ = "0.1.0"
