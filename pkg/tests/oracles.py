"""Independent oracles for the scorer tests.

Brute-force enumeration of leftmost derivations gives exact string and
prefix probabilities for small concentrated grammars; the enumerator tracks
an upper bound on pruned mass so tests can verify the truncation error is
far below the comparison tolerance.
"""

import numpy as np

from synstate.grammar import make_pcfg


def enumerate_language(pcfg, max_len=20, prob_cutoff=1e-15, max_nodes=400_000):
    """DFS over leftmost derivations.

    Returns (strings, lost) where strings maps token tuples to summed
    derivation probability and lost upper-bounds the unexplored mass
    (pruned by probability cutoff or the length bound). Exceeding the node
    budget sets lost to infinity, which downstream filters treat as a
    rejection.
    """
    strings = {}
    lost = 0.0
    nodes = 0
    # Each entry: (emitted tokens, remaining frontier symbols, probability).
    stack = [((), (pcfg.start,), 1.0)]
    while stack:
        nodes += 1
        if nodes > max_nodes:
            return strings, float("inf")
        tokens, frontier, p = stack.pop()
        if p < prob_cutoff or len(tokens) + len(frontier) > max_len:
            lost += p
            continue
        if not frontier:
            strings[tokens] = strings.get(tokens, 0.0) + p
            continue
        head, rest = frontier[0], frontier[1:]
        if not pcfg.is_nonterminal[head]:
            stack.append((tokens + (pcfg.label_of(head),), rest, p))
            continue
        for r in pcfg.rules_for(head):
            stack.append((tokens, r.rhs + rest, p * r.prob))
    return strings, lost


def oracle_prefix_probability(strings, prefix):
    prefix = tuple(prefix)
    k = len(prefix)
    return sum(p for s, p in strings.items() if s[:k] == prefix)


def oracle_surprisals(strings, sentence):
    """Per-word and eos surprisal in bits from an enumerated language."""
    sentence = tuple(sentence)
    surps = []
    prev = 1.0
    for i in range(1, len(sentence) + 1):
        cur = oracle_prefix_probability(strings, sentence[:i])
        surps.append(float("inf") if cur == 0.0 else -np.log2(cur / prev))
        prev = cur
    complete = strings.get(sentence, 0.0)
    eos = float("inf") if (complete == 0.0 or prev == 0.0) else -np.log2(complete / prev)
    return surps, eos


# ---------------------------------------------------------------------------
# Random proper PCFGs, filtered for concentrated mass so enumeration is an
# effectively exhaustive oracle.
# ---------------------------------------------------------------------------

MASS_TOL = 1e-11


def _accept(pcfg, max_len=20):
    strings, lost = enumerate_language(pcfg, max_len=max_len, max_nodes=60_000)
    total = sum(strings.values())
    if lost <= MASS_TOL and abs(total - 1.0) <= 1e-10:
        return strings
    return None


def _dirichlet(rng, n):
    w = rng.gamma(1.0, 1.0, size=n) + 1e-3
    w = w / w.sum()
    return [float(x) for x in w]


def _random_plain(rng):
    """Random grammar with terminal-heavy rule mass (keeps it consistent)."""
    n_nt = int(rng.integers(1, 4))
    n_t = int(rng.integers(1, 4))
    nts = ["S", "A", "B"][:n_nt]
    ts = ["a", "b", "c"][:n_t]
    rules = []
    budget = 8
    for nt in nts:
        n_rules = int(rng.integers(1, 4))
        n_rules = min(n_rules, budget - (len(nts) - nts.index(nt) - 1))
        n_rules = max(n_rules, 1)
        budget -= n_rules
        # First rule per LHS is all-terminal so every nonterminal terminates.
        rhss = [tuple(rng.choice(ts, size=rng.integers(1, 4)))]
        for _ in range(n_rules - 1):
            rhs = []
            for _ in range(int(rng.integers(1, 4))):
                pool = ts + nts if rng.random() < 0.45 else ts
                rhs.append(str(rng.choice(pool)))
            rhss.append(tuple(rhs))
        probs = _dirichlet(rng, len(rhss))
        # Downweight recursive alternatives to keep the language concentrated.
        weights = [
            p * (0.25 if any(s in nts for s in rhs) else 1.0)
            for p, rhs in zip(probs, rhss)
        ]
        z = sum(weights)
        rules.extend((nt, rhs, w / z) for rhs, w in zip(rhss, weights))
    return make_pcfg("S", rules)


def _template_left_recursive(rng, variant):
    p = float(rng.uniform(0.08, 0.25))
    if variant == 0:
        return make_pcfg("S", [("S", ("S", "a"), p), ("S", ("b",), 1 - p)])
    if variant == 1:
        q = float(rng.uniform(0.1, 0.4))
        return make_pcfg(
            "S",
            [
                ("S", ("S", "a"), p),
                ("S", ("a", "b"), (1 - p) * q),
                ("S", ("b",), (1 - p) * (1 - q)),
            ],
        )
    return make_pcfg(
        "S",
        [
            ("S", ("A", "b"), 0.6),
            ("S", ("b",), 0.4),
            ("A", ("A", "a"), p),
            ("A", ("a",), 1 - p),
        ],
    )


def _template_unit(rng, variant):
    p = float(rng.uniform(0.15, 0.45))
    if variant == 0:
        return make_pcfg(
            "S", [("S", ("A",), p), ("S", ("a",), 1 - p), ("A", ("b",), 1.0)]
        )
    if variant == 1:
        q = float(rng.uniform(0.1, 0.3))
        # Pure unit cycle S -> A -> S with mass p*q < 1; every string has a
        # linear chain of loop derivations, so enumeration stays cheap.
        return make_pcfg(
            "S",
            [
                ("S", ("A",), p),
                ("S", ("a",), 1 - p),
                ("A", ("S",), q),
                ("A", ("b",), 1 - q),
            ],
        )
    return make_pcfg(
        "S",
        [
            ("S", ("A",), p),
            ("S", ("c",), 1 - p),
            ("A", ("B",), 0.5),
            ("A", ("a", "B"), 0.5),
            ("B", ("b",), 1.0),
        ],
    )


def is_left_recursive(pcfg):
    for r in pcfg.rules:
        stack, seen = [r.rhs[0]], set()
        # direct or indirect: lhs =>* lhs ... via leftmost children
        while stack:
            s = stack.pop()
            if s == r.lhs:
                return True
            if s in seen or not pcfg.is_nonterminal[s]:
                continue
            seen.add(s)
            stack.extend(rr.rhs[0] for rr in pcfg.rules_for(s))
    return False


def has_unit_production(pcfg):
    return any(
        len(r.rhs) == 1 and pcfg.is_nonterminal[r.rhs[0]] for r in pcfg.rules
    )


def random_grammar_suite(seed=20240, n_grammars=50, max_len=20):
    """Generate accepted (pcfg, enumerated-strings) pairs: >= n_grammars total
    with at least 5 left-recursive and 5 unit-production members."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(6):
        for maker, variant in ((_template_left_recursive, i % 3), (_template_unit, i % 3)):
            g = maker(rng, variant)
            # Template languages grow linearly, so a deeper length bound is
            # cheap and keeps borderline recursion probabilities acceptable.
            strings = _accept(g, max_len=max(max_len, 34))
            assert strings is not None, "template grammar rejected by mass filter"
            out.append((g, strings))
    attempts = 0
    while len(out) < n_grammars:
        attempts += 1
        assert attempts < 4000, "random grammar generation stalled"
        try:
            g = _random_plain(rng)
        except Exception:
            continue
        strings = _accept(g, max_len=max_len)
        if strings is not None and len(strings) >= 2:
            out.append((g, strings))
    assert sum(is_left_recursive(g) for g, _ in out) >= 5
    assert sum(has_unit_production(g) for g, _ in out) >= 5
    return out


def sample_test_strings(strings, rng, n_top=6, n_random=4):
    """Representative strings from an enumerated language."""
    ranked = sorted(strings.items(), key=lambda kv: (-kv[1], kv[0]))
    picks = [s for s, _ in ranked[:n_top]]
    pool = [s for s, _ in ranked[n_top:]]
    if pool and n_random:
        idx = rng.choice(len(pool), size=min(n_random, len(pool)), replace=False)
        picks.extend(pool[i] for i in sorted(idx))
    return picks
