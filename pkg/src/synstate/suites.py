"""Built-in factorial suites.

Reconstructions of the four published designs (subordination 2x2, NP/Z
transitivity 2x2, NP/Z length 2x2, MV/RR 2x2) with counts matched to the
originals (23/32/32/29 items), plus the subordinate-clause modifier grid
(the 2x2 crossed with subject/object postmodifier type). The item texts are
authored here from fixed per-item lexical fills; the word pools below are
shared with the toy grammars so every sentence is parseable.
"""

from __future__ import annotations

import itertools

from synstate.items import Experiment, Item, RegionedSentence

# -- word pools (shared with synstate.toygrammars) ---------------------------

SUBORDINATION_ITEMS = [
    # sconj   subject    verb       object    m_subj    m_vi      m_p     m_obj
    ("As", "doctor", "studied", "textbook", "nurse", "walked", "into", "office"),
    ("When", "lawyer", "reviewed", "contract", "clerk", "hurried", "into", "hall"),
    ("While", "teacher", "graded", "essay", "student", "wandered", "into", "library"),
    ("After", "chef", "tasted", "stew", "waiter", "rushed", "into", "kitchen"),
    ("Because", "editor", "checked", "article", "critic", "strolled", "into", "lobby"),
    ("As", "farmer", "repaired", "tractor", "neighbor", "marched", "toward", "barn"),
    ("When", "nurse", "prepared", "syringe", "surgeon", "hurried", "into", "ward"),
    ("While", "writer", "drafted", "novel", "agent", "walked", "into", "study"),
    ("After", "judge", "signed", "verdict", "bailiff", "marched", "into", "courtroom"),
    ("Because", "painter", "cleaned", "brush", "sculptor", "wandered", "into", "studio"),
    ("As", "banker", "counted", "money", "guard", "strolled", "past", "vault"),
    ("When", "pilot", "inspected", "engine", "mechanic", "rushed", "toward", "hangar"),
    ("While", "singer", "rehearsed", "song", "drummer", "walked", "into", "theater"),
    ("After", "tailor", "measured", "fabric", "customer", "hurried", "into", "shop"),
    ("Because", "barber", "sharpened", "razor", "client", "wandered", "into", "parlor"),
    ("As", "librarian", "sorted", "catalog", "visitor", "strolled", "into", "archive"),
    ("When", "plumber", "examined", "pipe", "landlord", "rushed", "into", "basement"),
    ("While", "gardener", "watered", "rose", "owner", "walked", "toward", "greenhouse"),
    ("After", "butcher", "trimmed", "roast", "shopper", "hurried", "past", "counter"),
    ("Because", "clerk", "stamped", "form", "manager", "marched", "into", "annex"),
    ("As", "coach", "planned", "drill", "athlete", "rushed", "toward", "field"),
    ("When", "dentist", "polished", "mirror", "patient", "walked", "into", "clinic"),
    ("While", "professor", "finished", "thesis", "scholar", "strolled", "into", "seminar"),
]

# Modifier fills for the Fig-2-style grid, cycled deterministically per item.
MOD_ANIMATE = ("intern", "cadet", "tenant", "porter", "usher", "aide", "deputy", "scout")
MOD_THING = ("folder", "ladder", "bucket", "kettle", "banner", "crate", "basket", "easel")
MOD_PLACE = ("shelf", "drawer", "cabinet", "pantry", "closet", "loft", "bench", "cart")
MOD_VT_DO = ("carried", "fetched", "hauled", "scrubbed", "folded", "stacked", "lifted", "dusted")
MOD_VT_PSYCH = ("trusted", "admired", "praised", "watched", "noticed", "respected", "assisted", "followed")
MOD_PREP = ("from", "near", "beside", "behind")


def _modifier_fills(i):
    return (
        MOD_ANIMATE[i % 8],
        MOD_THING[(i + 2) % 8],
        MOD_PLACE[(i + 5) % 8],
        MOD_VT_DO[(i + 1) % 8],
        MOD_VT_PSYCH[(i + 4) % 8],
        MOD_PREP[i % 4],
    )


NPZ_SCONJ = ("When", "As", "After", "While")
NPZ_ANIMALS = (
    "dog", "cat", "horse", "pony", "goat", "sheep", "pig", "bull",
    "mule", "colt", "lamb", "calf", "hound", "terrier", "parrot", "rabbit",
    "ferret", "falcon", "hawk", "mare", "foal", "kitten", "puppy", "donkey",
    "ox", "ram", "ewe", "gander", "rooster", "hen", "duck", "goose",
)
NPZ_TRANSITIVE = (
    "scratched", "kicked", "bit", "pushed", "pulled", "grabbed", "shoved", "licked",
    "nipped", "poked", "hugged", "nudged", "patted", "pinched", "slapped", "tapped",
    "squeezed", "chased", "bumped", "tickled", "butted", "pawed", "swatted", "prodded",
    "jabbed", "elbowed", "shook", "stroked", "brushed", "petted", "rubbed", "scrubbed",
)
NPZ_INTRANSITIVE = (
    "struggled", "slept", "yawned", "trembled", "fidgeted", "growled", "barked", "whined",
    "howled", "squirmed", "wriggled", "shivered", "stumbled", "panicked", "hesitated", "dozed",
    "snored", "sneezed", "coughed", "hiccuped", "limped", "paced", "crouched", "knelt",
    "blinked", "frowned", "smiled", "wept", "sighed", "groaned", "fainted", "fussed",
)
NPZ_HUMANS = ("vet", "trainer", "groomer", "keeper", "rider", "handler", "breeder", "warden")
NPZ_ADJ = ("new", "old", "young", "tired", "eager", "nervous", "quiet", "gentle")
NPZ_COMPANION = ("assistant", "apprentice", "partner", "colleague", "helper", "aide", "deputy", "escort")
NPZ_PRT_VERBS = (
    ("took", "off"), ("put", "down"), ("picked", "up"), ("set", "down"),
    ("held", "up"), ("lifted", "up"), ("strapped", "on"), ("yanked", "off"),
)
NPZ_GEAR = ("muzzle", "leash", "collar", "harness", "saddle", "blanket", "bridle", "halter")

DIG_SUBJECTS = ("author", "poet", "critic", "historian", "curator", "novelist", "scholar", "reporter")
DIG_GERUNDS = ("studying", "describing", "examining", "praising", "surveying", "sketching", "mocking", "charting")
DIG_RELICS = ("ruins", "relics", "murals", "scrolls", "tombs", "coins", "statues", "frescoes")
DIG_PLACES = ("archive", "museum", "vault", "cellar", "attic", "gallery", "crypt", "annex")
DIG_WRITE = ("wrote", "drafted", "revised", "copied", "composed", "edited", "typed", "penned")
DIG_WORKS = ("book", "memoir", "essay", "pamphlet", "chronicle", "poem", "sketch", "fable")
DIG_CHANGE = ("grew", "shrank", "vanished", "improved", "expanded", "faded", "aged", "crumbled")

MVRR_SUBJECTS = (
    "woman", "man", "boy", "girl", "actor", "dancer", "tourist", "soldier",
    "sailor", "driver", "waiter", "climber", "swimmer", "skater", "jogger", "cyclist",
    "hiker", "singer", "keeper", "guide", "guest", "priest", "mayor", "colonel",
    "senator", "clown", "magician", "juggler", "acrobat",
)
# Past tense identical to the participle: ambiguous between main verb and
# reduced relative.
MVRR_AMBIGUOUS = (
    "brought", "sent", "paid", "handed", "told", "fed", "sold", "lent",
    "mailed", "served", "offered", "awarded", "promised", "tossed", "passed", "shipped",
    "read", "taught", "wired", "loaned", "granted", "denied", "issued", "assigned",
    "allotted", "advanced", "extended", "furnished", "guaranteed",
)
# Distinct participle form: morphologically unambiguous cue to the relative.
MVRR_UNAMBIGUOUS = (
    "given", "shown", "thrown", "taken", "drawn", "written", "driven", "chosen",
    "stolen", "woven", "grown", "known", "flown", "eaten", "beaten", "bitten",
    "hidden", "forgiven", "frozen", "broken", "spoken", "woken", "ridden", "worn",
    "fallen", "sworn", "torn", "shaken", "blown",
)
MVRR_OBJECTS = ("sandwich", "letter", "parcel", "trophy", "ticket", "helmet", "lantern", "basket")
MVRR_PREPS = ("from", "near", "beside", "behind")
MVRR_SOURCES = ("kitchen", "lobby", "garden", "market", "harbor", "village", "station", "bakery")
MVRR_FALL = ("tripped", "stumbled", "fainted", "slipped", "wobbled", "tottered", "swayed", "lurched")
MVRR_P2 = ("on", "in", "near")
MVRR_GROUNDS = ("carpet", "hallway", "platform", "doorstep", "pavement", "terrace", "balcony", "staircase")


def _sentence(*segments):
    """Build a RegionedSentence from (tokens, region-or-None) segments."""
    tokens = []
    regions = {}
    for toks, region in segments:
        toks = list(toks)
        if region is not None:
            regions[region] = (len(tokens), len(tokens) + len(toks))
        tokens.extend(toks)
    return RegionedSentence(tokens=tuple(tokens), regions=regions)


# -- suite (1): subordination 2x2 ---------------------------------------------


def _subordination_sentences(row, subj_mod=(), obj_mod=()):
    sconj, subj, vt, obj, m_subj, m_vi, m_p, m_obj = row
    sub_clause = ["the", subj, *subj_mod, vt, "the", obj, *obj_mod]
    nosub_clause = ["The", subj, *subj_mod, vt, "the", obj, *obj_mod]
    matrix = ["the", m_subj, m_vi, m_p, "the", m_obj]
    return {
        ("sub", "matrix"): _sentence(
            ([sconj] + sub_clause + [","], None), (matrix, "matrix"), (["."], "end")
        ),
        ("sub", "nomatrix"): _sentence(
            ([sconj] + sub_clause, None), (["."], "end")
        ),
        ("nosub", "matrix"): _sentence(
            (nosub_clause + [","], None), (matrix, "matrix"), (["."], "end")
        ),
        ("nosub", "nomatrix"): _sentence((nosub_clause, None), (["."], "end")),
    }


def subordination_suite() -> Experiment:
    items = [
        Item(id=i + 1, sentences=_subordination_sentences(row))
        for i, row in enumerate(SUBORDINATION_ITEMS)
    ]
    return Experiment(
        name="subordination",
        factors=(
            ("subordinator", ("sub", "nosub")),
            ("continuation", ("matrix", "nomatrix")),
        ),
        region_names=("matrix", "end"),
        items=tuple(items),
        builtin_effects=(
            "matrix_licensing",
            "no_matrix_penalty",
            "licensing_interaction",
        ),
    )


# -- suite (2): the modifier grid ---------------------------------------------

MODIFIER_TYPES = ("none", "pp", "src", "orc")


def _subject_modifier(kind, fills):
    m_an, m_in, m_in2, vt_do, vt_psych, prep = fills
    if kind == "none":
        return ()
    if kind == "pp":
        return ("with", "the", m_in)
    if kind == "src":
        return ("who", vt_do, "the", m_in)
    return ("who", "the", m_an, vt_psych)  # orc


def _object_modifier(kind, fills):
    m_an, m_in, m_in2, vt_do, vt_psych, prep = fills
    if kind == "none":
        return ()
    if kind == "pp":
        return (prep, "the", m_in2)
    if kind == "src":
        return ("that", vt_psych, "the", m_an)
    return ("that", "the", m_an, vt_do)  # orc


def subordination_modifiers_suite() -> Experiment:
    items = []
    for i, row in enumerate(SUBORDINATION_ITEMS):
        fills = _modifier_fills(i)
        sentences = {}
        for sm, om in itertools.product(MODIFIER_TYPES, MODIFIER_TYPES):
            four = _subordination_sentences(
                row,
                subj_mod=_subject_modifier(sm, fills),
                obj_mod=_object_modifier(om, fills),
            )
            for (s_lvl, c_lvl), sent in four.items():
                sentences[(s_lvl, c_lvl, sm, om)] = sent
        items.append(Item(id=i + 1, sentences=sentences))
    effects = tuple(
        f"licensing_interaction:{sm}:{om}"
        for sm, om in itertools.product(MODIFIER_TYPES, MODIFIER_TYPES)
    )
    return Experiment(
        name="subordination-modifiers",
        factors=(
            ("subordinator", ("sub", "nosub")),
            ("continuation", ("matrix", "nomatrix")),
            ("submod", MODIFIER_TYPES),
            ("objmod", MODIFIER_TYPES),
        ),
        region_names=("matrix", "end"),
        items=tuple(items),
        builtin_effects=effects,
    )


# -- suite (3): NP/Z transitivity ----------------------------------------------


def npz_transitivity_suite() -> Experiment:
    items = []
    for i in range(32):
        sconj = NPZ_SCONJ[i % 4]
        subj = NPZ_ANIMALS[i]
        vt = NPZ_TRANSITIVE[i]
        vi = NPZ_INTRANSITIVE[i]
        human = NPZ_HUMANS[i % 8]
        pdet = "his" if i % 2 == 0 else "the"
        adj = NPZ_ADJ[i % 8]
        comp = NPZ_COMPANION[i % 8]
        vprt, prt = NPZ_PRT_VERBS[i % 8]
        gear = NPZ_GEAR[i % 8]
        amb = ["the", human, "with", pdet, adj, comp]
        tail_obj = ["the", gear]
        sentences = {}
        for trans_lvl, verb in (("transitive", vt), ("intransitive", vi)):
            for comma_lvl, sep in (("nocomma", []), ("comma", [","])):
                sentences[(trans_lvl, comma_lvl)] = _sentence(
                    ([sconj, "the", subj, verb] + sep, None),
                    (amb, "ambiguous"),
                    ([vprt, prt], "disambiguator"),
                    (tail_obj, None),
                    (["."], "end"),
                )
        items.append(Item(id=i + 1, sentences=sentences))
    return Experiment(
        name="npz-transitivity",
        factors=(
            ("transitivity", ("transitive", "intransitive")),
            ("comma", ("nocomma", "comma")),
        ),
        region_names=("ambiguous", "disambiguator", "end"),
        items=tuple(items),
        builtin_effects=(
            "garden_path",
            "garden_path:transitive",
            "garden_path:intransitive",
            "transitivity_interaction",
        ),
    )


# -- suite (4): NP/Z length (digging in) ---------------------------------------


def npz_length_suite() -> Experiment:
    items = []
    for i in range(32):
        sconj = NPZ_SCONJ[(i + 1) % 4]
        subj = DIG_SUBJECTS[i % 8]
        ger_s = DIG_GERUNDS[i % 8]
        ger_o = DIG_GERUNDS[(i + 3) % 8]
        relic = DIG_RELICS[i % 8]
        prep = ("in", "near", "from", "beside")[i % 4]
        place = DIG_PLACES[(i + 2) % 8]
        vt = DIG_WRITE[i % 8]
        work = DIG_WORKS[(i + 5) % 8]
        vi = DIG_CHANGE[(i + 4) % 8]
        modifier = ["the", relic, prep, "the", place]
        sentences = {}
        for length_lvl, pre_mod, amb in (
            ("short", [ger_s] + modifier, ["the", work]),
            ("long", [], ["the", work, ger_o] + modifier),
        ):
            for comma_lvl, sep in (("nocomma", []), ("comma", [","])):
                sentences[(length_lvl, comma_lvl)] = _sentence(
                    ([sconj, "the", subj] + pre_mod + [vt] + sep, None),
                    (amb, "ambiguous"),
                    ([vi], "disambiguator"),
                    (["."], "end"),
                )
        items.append(Item(id=i + 1, sentences=sentences))
    return Experiment(
        name="npz-length",
        factors=(
            ("length", ("short", "long")),
            ("comma", ("nocomma", "comma")),
        ),
        region_names=("ambiguous", "disambiguator", "end"),
        items=tuple(items),
        builtin_effects=(
            "garden_path",
            "garden_path:short",
            "garden_path:long",
            "length_interaction",
        ),
    )


# -- suite (5): MV/RR -----------------------------------------------------------


def mvrr_suite() -> Experiment:
    items = []
    for i in range(29):
        subj = MVRR_SUBJECTS[i]
        v_amb = MVRR_AMBIGUOUS[i]
        v_unamb = MVRR_UNAMBIGUOUS[i]
        obj = MVRR_OBJECTS[i % 8]
        prep = MVRR_PREPS[i % 4]
        source = MVRR_SOURCES[i % 8]
        vi = MVRR_FALL[i % 8]
        p2 = MVRR_P2[i % 3]
        ground = MVRR_GROUNDS[i % 8]
        amb_np = ["the", obj, prep, "the", source]
        sentences = {}
        for red_lvl, who_was in (("reduced", []), ("unreduced", ["who", "was"])):
            for amb_lvl, verb in (("ambig", v_amb), ("unambig", v_unamb)):
                sentences[(red_lvl, amb_lvl)] = _sentence(
                    (["The", subj] + who_was + [verb], None),
                    (amb_np, "ambiguous"),
                    ([vi], "disambiguator"),
                    ([p2, "the", ground], None),
                    (["."], "end"),
                )
        items.append(Item(id=i + 1, sentences=sentences))
    return Experiment(
        name="mvrr",
        factors=(
            ("reduction", ("reduced", "unreduced")),
            ("ambiguity", ("ambig", "unambig")),
        ),
        region_names=("ambiguous", "disambiguator", "end"),
        items=tuple(items),
        builtin_effects=(
            "garden_path",
            "garden_path:ambig",
            "garden_path:unambig",
            "reduction_ambiguity_interaction",
        ),
    )


def builtin_suites() -> list:
    """The five reconstructed suites, in presentation order."""
    return [
        subordination_suite(),
        subordination_modifiers_suite(),
        npz_transitivity_suite(),
        npz_length_suite(),
        mvrr_suite(),
    ]


def builtin_suite(name: str) -> Experiment:
    for exp in builtin_suites():
        if exp.name == name:
            return exp
    raise KeyError(f"no built-in suite named {name!r}")
