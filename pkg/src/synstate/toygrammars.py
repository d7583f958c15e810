"""Hand-constructed grammars that encode the syntactic-state phenomena.

Three small PCFGs cover the built-in suites. Their rule skeletons are fixed
here with chosen probabilities; lexical rules are filled from the word pools
shared with synstate.suites so coverage is guaranteed.

subordination: a subordinator opens a clause that obligates a matrix clause
  (high-probability continuation), while a bare clause followed by a comma
  competes with a low-content afterthought NP; a low-probability fragment
  rule keeps "<SC> clause ." parseable, so the no-matrix penalty is finite
  and positive while matrix licensing is negative.

npz: clause pairs join with an optional comma. Transitive verbs strongly
  prefer an object, so in no-comma sentences the post-verbal NP is mostly
  parsed as the object and dies at the disambiguating verb; intransitives
  carry only a small duration-NP expansion, giving a small positive effect
  and hence a positive transitivity interaction.

mvrr: a participial phrase can postmodify a subject NP directly (reduced
  relative, low probability) or with "who was"; past-tense homophones make
  the main-verb parse dominate in reduced/ambiguous sentences. Unambiguous
  participles keep a tiny past-tense lexical mass (a noisy morphological
  cue), so the unambiguous-level garden path is small but positive.
"""

from __future__ import annotations

from synstate import suites as S
from synstate.grammar import Pcfg, make_pcfg

MVRR_PAST_TENSE_LEAK = 0.02  # relative past-tense mass of unambiguous participles


def _lexical(cls, words, weights=None):
    words = sorted(set(words)) if weights is None else list(words)
    if weights is None:
        weights = [1.0] * len(words)
    total = float(sum(weights))
    return [(cls, (w,), wt / total) for w, wt in zip(words, weights)]


def subordination_grammar() -> Pcfg:
    nouns = set()
    vts = set()
    vis = set()
    preps = {"with"}
    sconjs = set()
    for sconj, subj, vt, obj, m_subj, m_vi, m_p, m_obj in S.SUBORDINATION_ITEMS:
        sconjs.add(sconj)
        nouns.update((subj, obj, m_subj, m_obj))
        vts.add(vt)
        vis.add(m_vi)
        preps.add(m_p)
    nouns.update(S.MOD_ANIMATE + S.MOD_THING + S.MOD_PLACE)
    vts.update(S.MOD_VT_DO + S.MOD_VT_PSYCH)
    preps.update(S.MOD_PREP)

    rules = [
        ("ROOT", ("CL", "."), 0.50),
        ("ROOT", ("SC", "CL", ",", "CL", "."), 0.30),
        ("ROOT", ("CL", ",", "CL", "."), 0.08),
        ("ROOT", ("CL", ",", "NP", "."), 0.08),
        ("ROOT", ("SC", "CL", "."), 0.04),
        ("CL", ("NP", "VP"), 1.0),
        ("NP", ("D", "NBAR"), 0.70),
        ("NP", ("D", "NBAR", "PP"), 0.10),
        ("NP", ("D", "NBAR", "SRC"), 0.10),
        ("NP", ("D", "NBAR", "ORC"), 0.10),
        ("NBAR", ("N",), 1.0),
        ("PP", ("P", "NP"), 1.0),
        ("SRC", ("R", "VP"), 1.0),
        ("ORC", ("R", "NP", "VT"), 1.0),
        ("VP", ("VT", "NP"), 0.55),
        ("VP", ("VI", "PP"), 0.35),
        ("VP", ("VI",), 0.10),
    ]
    rules += _lexical("SC", sconjs)
    rules += [("D", ("the",), 0.55), ("D", ("The",), 0.35), ("D", ("a",), 0.10)]
    rules += _lexical("N", nouns)
    rules += _lexical("VT", vts)
    rules += _lexical("VI", vis)
    rules += _lexical("P", preps)
    rules += [("R", ("who",), 0.5), ("R", ("that",), 0.5)]
    return make_pcfg("ROOT", rules)


def npz_grammar() -> Pcfg:
    nouns = set(
        S.NPZ_ANIMALS
        + S.NPZ_HUMANS
        + S.NPZ_COMPANION
        + S.NPZ_GEAR
        + S.DIG_SUBJECTS
        + S.DIG_RELICS
        + S.DIG_PLACES
        + S.DIG_WORKS
    )
    vts = set(S.NPZ_TRANSITIVE + S.DIG_WRITE)
    vis = set(S.NPZ_INTRANSITIVE + S.DIG_CHANGE)
    prt_verbs = sorted({v for v, _ in S.NPZ_PRT_VERBS})
    prts = sorted({p for _, p in S.NPZ_PRT_VERBS})

    rules = [
        ("ROOT", ("SC", "CL", ",", "CL", "."), 0.45),
        ("ROOT", ("SC", "CL", "CL", "."), 0.25),
        ("ROOT", ("CL", "."), 0.30),
        ("CL", ("NP", "VP"), 1.0),
        ("NP", ("D", "NBAR"), 0.60),
        ("NP", ("D", "NBAR", "PP"), 0.25),
        ("NP", ("D", "NBAR", "GERP"), 0.15),
        ("NBAR", ("N",), 0.75),
        ("NBAR", ("AJ", "N"), 0.25),
        ("PP", ("P", "NP"), 1.0),
        ("GERP", ("VG", "NP", "PP"), 0.5),
        ("GERP", ("VG", "NP"), 0.5),
        # Transitives strongly prefer an overt object; the bare expansion is
        # the zero-object reading. Intransitives allow a rare duration NP.
        ("VP", ("VT", "NP"), 0.50),
        ("VP", ("VT",), 0.12),
        ("VP", ("VI",), 0.15),
        ("VP", ("VI", "NP"), 0.04),
        ("VP", ("VPRT", "PRT", "NP"), 0.19),
    ]
    rules += _lexical("SC", S.NPZ_SCONJ)
    rules += [
        ("D", ("the",), 0.55),
        ("D", ("The",), 0.20),
        ("D", ("his",), 0.15),
        ("D", ("a",), 0.10),
    ]
    rules += _lexical("N", nouns)
    rules += _lexical("AJ", S.NPZ_ADJ)
    rules += _lexical("VT", vts)
    rules += _lexical("VI", vis)
    rules += _lexical("VG", S.DIG_GERUNDS)
    rules += _lexical("VPRT", prt_verbs)
    rules += _lexical("PRT", prts)
    rules += _lexical("P", {"with", "in", "near", "from", "beside"})
    return make_pcfg("ROOT", rules)


def mvrr_grammar() -> Pcfg:
    nouns = set(S.MVRR_SUBJECTS + S.MVRR_OBJECTS + S.MVRR_SOURCES + S.MVRR_GROUNDS)
    preps = set(S.MVRR_PREPS) | set(S.MVRR_P2)

    rules = [
        ("ROOT", ("CL", "."), 1.0),
        ("CL", ("NP", "VP"), 1.0),
        ("NP", ("D", "NBAR"), 0.72),
        ("NP", ("D", "NBAR", "PP"), 0.12),
        ("NP", ("D", "NBAR", "RC"), 0.10),
        ("NP", ("D", "NBAR", "RRC"), 0.06),
        ("NBAR", ("N",), 1.0),
        ("PP", ("P", "NP"), 1.0),
        ("RC", ("who", "was", "PARTP"), 1.0),
        ("RRC", ("PARTP",), 1.0),
        ("PARTP", ("VPART", "NP"), 0.40),
        ("PARTP", ("VPART", "NP", "PP"), 0.40),
        ("PARTP", ("VPART", "PP"), 0.10),
        ("PARTP", ("VPART",), 0.10),
        ("VP", ("VPAST", "NP"), 0.30),
        ("VP", ("VPAST", "NP", "PP"), 0.22),
        ("VP", ("VI", "PP"), 0.28),
        ("VP", ("VI",), 0.20),
    ]
    rules += [("D", ("the",), 0.6), ("D", ("The",), 0.4)]
    rules += _lexical("N", nouns)
    past_words = list(S.MVRR_AMBIGUOUS) + list(S.MVRR_UNAMBIGUOUS)
    past_weights = [1.0] * len(S.MVRR_AMBIGUOUS) + [MVRR_PAST_TENSE_LEAK] * len(
        S.MVRR_UNAMBIGUOUS
    )
    rules += _lexical("VPAST", past_words, past_weights)
    rules += _lexical("VPART", set(S.MVRR_AMBIGUOUS) | set(S.MVRR_UNAMBIGUOUS))
    rules += _lexical("VI", S.MVRR_FALL)
    rules += _lexical("P", preps)
    return make_pcfg("ROOT", rules)


_GRAMMAR_BUILDERS = {
    "subordination": subordination_grammar,
    "npz": npz_grammar,
    "mvrr": mvrr_grammar,
}

_SUITE_GRAMMAR = {
    "subordination": "subordination",
    "subordination-modifiers": "subordination",
    "npz-transitivity": "npz",
    "npz-length": "npz",
    "mvrr": "mvrr",
}


def toy_grammar(name: str) -> Pcfg:
    return _GRAMMAR_BUILDERS[name]()


def toy_grammar_names():
    return sorted(_GRAMMAR_BUILDERS)


def grammar_for_suite(suite_name: str) -> Pcfg:
    return toy_grammar(_SUITE_GRAMMAR[suite_name])


def grammar_name_for_suite(suite_name: str) -> str:
    return _SUITE_GRAMMAR[suite_name]
