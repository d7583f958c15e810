"""Region aggregation, condition contrasts, within-item confidence
intervals, and sign-flip permutation tests.

Mixed-effects regressions are out of scope; every effect here is a by-item
paired contrast (a weighted sum of region surprisals over the design cells),
estimated by its item mean with a t-based CI and a two-sided sign-flip
permutation p-value, which is exact finite-sample inference for the same
condition contrasts.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy import stats as sp_stats

DEFAULT_CLAMP_BITS = 50.0
DEFAULT_N_PERM = 4096


class StatsError(ValueError):
    pass


@dataclass(frozen=True)
class RegionSurprisal:
    scorer: str
    experiment: str
    item_id: int
    condition: tuple
    region: str
    bits: float  # sum over region tokens; 'end' includes the eos event


@dataclass(frozen=True)
class ContrastSpec:
    """Named weighting of (condition, region) cells; difference-type
    contrasts have weights summing to zero."""

    name: str
    weights: tuple  # ((condition, region, weight), ...)

    def cells(self):
        return self.weights


@dataclass(frozen=True)
class EffectEstimate:
    name: str
    mean: float
    ci_low: float
    ci_high: float
    p_perm: float
    n_items: int
    n_infinite_clamped: int


@dataclass(frozen=True)
class EffectResult:
    spec: ContrastSpec
    item_ids: tuple
    values: tuple  # per-item contrast values, aligned with item_ids
    estimate: EffectEstimate


def aggregate_regions(table, experiment) -> list:
    """One RegionSurprisal per (scorer, item, condition, region).

    Validates that the table covers every cell of the experiment for each
    scorer present and that token counts line up.
    """
    records = []
    for scorer in table.scorer_names():
        for item in experiment.items:
            for cond in experiment.conditions():
                sent = item.sentences.get(cond)
                if sent is None:
                    continue
                scored = table.sentence_bits(scorer, experiment.name, item.id, cond)
                if scored is None:
                    raise StatsError(
                        f"table is missing {scorer} item {item.id} "
                        f"{experiment.condition_label(cond)}"
                    )
                token_bits, eos_bits = scored
                if len(token_bits) != len(sent.tokens):
                    raise StatsError(
                        f"token-count mismatch for {scorer} item {item.id} "
                        f"{experiment.condition_label(cond)}: table has "
                        f"{len(token_bits)}, experiment has {len(sent.tokens)}"
                    )
                for region, (start, end) in sent.regions.items():
                    bits = sum(token_bits[start:end])
                    if region == "end":
                        if eos_bits is None:
                            raise StatsError(
                                f"missing eos row for {scorer} item {item.id}"
                            )
                        bits += eos_bits
                    records.append(
                        RegionSurprisal(
                            scorer=scorer,
                            experiment=experiment.name,
                            item_id=item.id,
                            condition=cond,
                            region=region,
                            bits=bits,
                        )
                    )
    return records


# -- contrasts ----------------------------------------------------------------


def _cells_matching(experiment, fixed):
    """All condition tuples whose named factors take the given levels."""
    names = experiment.factor_names()
    out = []
    for cond in experiment.conditions():
        if all(cond[names.index(f)] == lvl for f, lvl in fixed.items()):
            out.append(cond)
    return out


def difference_contrast(
    experiment, name, factor, plus, minus, region, fixed=None
) -> ContrastSpec:
    """Contrast `factor`: plus-level minus minus-level on one region,
    averaged over the crossing of any remaining free factors."""
    if factor not in experiment.factor_names():
        raise StatsError(f"experiment has no factor {factor!r}")
    if region not in experiment.region_names:
        raise StatsError(f"experiment has no region {region!r}")
    fixed = dict(fixed or {})
    weights = []
    for sign, level in ((1.0, plus), (-1.0, minus)):
        cells = _cells_matching(experiment, {**fixed, factor: level})
        if not cells:
            raise StatsError(f"no cells with {factor}={level}")
        for cond in cells:
            weights.append((cond, region, sign / len(cells)))
    return ContrastSpec(name=name, weights=tuple(weights))


def combine_contrasts(name, spec_plus, spec_minus) -> ContrastSpec:
    """spec_plus - spec_minus as a single weighting."""
    acc = {}
    for cond, region, w in spec_plus.weights:
        acc[(cond, region)] = acc.get((cond, region), 0.0) + w
    for cond, region, w in spec_minus.weights:
        acc[(cond, region)] = acc.get((cond, region), 0.0) - w
    weights = tuple(
        (cond, region, w) for (cond, region), w in acc.items() if w != 0.0
    )
    return ContrastSpec(name=name, weights=weights)


def per_item_contrast(records, spec: ContrastSpec, clamp_bits=DEFAULT_CLAMP_BITS):
    """Per-item weighted sums. Infinite region values are clamped to
    clamp_bits; returns (item_ids, values, n_clamped_items)."""
    by_key = {}
    items = []
    for rec in records:
        if rec.item_id not in items:
            items.append(rec.item_id)
        by_key[(rec.item_id, rec.condition, rec.region)] = rec.bits
    values = []
    n_clamped = 0
    for item_id in items:
        total = 0.0
        clamped = False
        for cond, region, w in spec.weights:
            key = (item_id, cond, region)
            if key not in by_key:
                raise StatsError(
                    f"missing region record for item {item_id}, condition "
                    f"{','.join(cond)}, region {region!r}"
                )
            bits = by_key[key]
            if math.isinf(bits):
                bits = clamp_bits
                clamped = True
            total += w * bits
        values.append(total)
        n_clamped += clamped
    return tuple(items), tuple(values), n_clamped


# -- inference ----------------------------------------------------------------


def permutation_test(values, n_perm=DEFAULT_N_PERM, seed=0) -> float:
    """Two-sided sign-flip permutation p-value for mean(values) != 0.

    Exhaustive over all 2^n assignments when 2^n <= n_perm; otherwise
    uniform sampling with the given seed. Equality at the observed statistic
    counts (with a 1e-12 relative slack so exact ties are stable).
    """
    v = np.asarray(values, dtype=float)
    n = v.size
    if n < 1:
        raise StatsError("need at least one item")
    obs = abs(float(v.sum()))
    if 2**n <= n_perm:
        assignments = np.arange(2**n)
        signs = ((assignments[:, None] >> np.arange(n)) & 1) * 2 - 1
    else:
        rng = np.random.default_rng(seed)
        signs = rng.integers(0, 2, size=(n_perm, n)) * 2 - 1
    sums = np.abs(signs @ v)
    hits = np.count_nonzero(sums >= obs - 1e-12 * (1.0 + obs))
    return hits / signs.shape[0]


def _t_half_width(values):
    n = len(values)
    if n < 2:
        return float("inf")
    sd = float(np.std(values, ddof=1))
    return float(sp_stats.t.ppf(0.975, n - 1)) * sd / math.sqrt(n)


def estimate_effect(
    name, item_ids, values, n_clamped=0, n_perm=DEFAULT_N_PERM, seed=0
) -> EffectEstimate:
    """Mean with 95% t CI over items and a sign-flip permutation p."""
    if not values:
        raise StatsError("no per-item values")
    mean = float(np.mean(values))
    half = _t_half_width(values)
    return EffectEstimate(
        name=name,
        mean=mean,
        ci_low=mean - half,
        ci_high=mean + half,
        p_perm=permutation_test(values, n_perm=n_perm, seed=seed),
        n_items=len(values),
        n_infinite_clamped=n_clamped,
    )


def evaluate_contrast(
    records,
    spec: ContrastSpec,
    clamp_bits=DEFAULT_CLAMP_BITS,
    n_perm=DEFAULT_N_PERM,
    seed=0,
) -> EffectResult:
    item_ids, values, n_clamped = per_item_contrast(records, spec, clamp_bits)
    return EffectResult(
        spec=spec,
        item_ids=item_ids,
        values=values,
        estimate=estimate_effect(
            spec.name, item_ids, values, n_clamped, n_perm=n_perm, seed=seed
        ),
    )


def within_item_ci(condition_values: dict) -> dict:
    """Per-condition means with 95% CIs after subtracting by-item means.

    condition_values maps condition -> per-item values (aligned across
    conditions). The CI half-width uses the standard error of the centered
    values, so pure between-item variation does not widen the bars.
    """
    conds = list(condition_values)
    if not conds:
        return {}
    mat = np.asarray([condition_values[c] for c in conds], dtype=float)
    n_items = mat.shape[1]
    if n_items < 2:
        raise StatsError("need at least 2 items for within-item CIs")
    if any(len(condition_values[c]) != n_items for c in conds):
        raise StatsError("conditions have unequal item counts")
    centered = mat - mat.mean(axis=0, keepdims=True)
    tq = float(sp_stats.t.ppf(0.975, n_items - 1))
    out = {}
    for i, cond in enumerate(conds):
        mean = float(mat[i].mean())
        se = float(np.std(centered[i], ddof=1)) / math.sqrt(n_items)
        out[cond] = (mean, mean - tq * se, mean + tq * se)
    return out


# -- the paper's effects -------------------------------------------------------


def _licensing_spec(experiment, fixed=None, name="matrix_licensing"):
    return difference_contrast(
        experiment, name, "subordinator", "sub", "nosub", "matrix",
        fixed={**(fixed or {}), "continuation": "matrix"},
    )


def _penalty_spec(experiment, fixed=None, name="no_matrix_penalty"):
    return difference_contrast(
        experiment, name, "subordinator", "sub", "nosub", "end",
        fixed={**(fixed or {}), "continuation": "nomatrix"},
    )


def matrix_licensing_effect(records, experiment, **kw) -> EffectResult:
    """Surprisal of [sub, matrix] minus [nosub, matrix] on the matrix
    region; negative values mean the subordinator licenses the clause."""
    return evaluate_contrast(records, _licensing_spec(experiment), **kw)


def no_matrix_penalty(records, experiment, **kw) -> EffectResult:
    """Surprisal of [sub, nomatrix] minus [nosub, nomatrix] at sentence
    termination; positive values mean a matrix clause was required."""
    return evaluate_contrast(records, _penalty_spec(experiment), **kw)


def licensing_interaction(records, experiment, fixed=None, **kw) -> EffectResult:
    """No-matrix penalty minus matrix licensing."""
    name = "licensing_interaction"
    if fixed:
        name += ":" + ":".join(fixed[k] for k in sorted(fixed))
    spec = combine_contrasts(
        name,
        _penalty_spec(experiment, fixed),
        _licensing_spec(experiment, fixed),
    )
    return evaluate_contrast(records, spec, **kw)


_GP_FACTORS = {"comma": ("nocomma", "comma"), "reduction": ("reduced", "unreduced")}


def garden_path_effect(records, experiment, factor, **kw) -> dict:
    """Disambiguator surprisal: hard condition minus easy condition.

    Returns {"overall": EffectResult} plus one entry per level of the other
    factor of a 2x2 design, keyed (factor_name, level).
    """
    if factor not in _GP_FACTORS:
        raise StatsError(f"garden path factor must be one of {sorted(_GP_FACTORS)}")
    plus, minus = _GP_FACTORS[factor]
    out = {
        "overall": evaluate_contrast(
            records,
            difference_contrast(
                experiment, "garden_path", factor, plus, minus, "disambiguator"
            ),
            **kw,
        )
    }
    for other, levels in experiment.factors:
        if other == factor:
            continue
        for level in levels:
            spec = difference_contrast(
                experiment,
                f"garden_path:{level}",
                factor,
                plus,
                minus,
                "disambiguator",
                fixed={other: level},
            )
            out[(other, level)] = evaluate_contrast(records, spec, **kw)
    return out


def interaction_2x2(records, experiment, factor_a, factor_b, region, **kw) -> EffectResult:
    """Difference of differences: (a1-a2 at b1) minus (a1-a2 at b2)."""
    levels_a = experiment.levels_of(factor_a)
    levels_b = experiment.levels_of(factor_b)
    if len(levels_a) != 2 or len(levels_b) != 2:
        raise StatsError("interaction_2x2 needs two two-level factors")
    spec = combine_contrasts(
        f"{factor_a}_x_{factor_b}",
        difference_contrast(
            experiment, "d1", factor_a, levels_a[0], levels_a[1], region,
            fixed={factor_b: levels_b[0]},
        ),
        difference_contrast(
            experiment, "d2", factor_a, levels_a[0], levels_a[1], region,
            fixed={factor_b: levels_b[1]},
        ),
    )
    return evaluate_contrast(records, spec, **kw)


def builtin_effect_specs(experiment) -> list:
    """Resolve the experiment's declared effect names to ContrastSpecs."""
    specs = []
    for name in experiment.builtin_effects:
        if name == "matrix_licensing":
            specs.append(_licensing_spec(experiment))
        elif name == "no_matrix_penalty":
            specs.append(_penalty_spec(experiment))
        elif name == "licensing_interaction":
            specs.append(
                combine_contrasts(
                    name, _penalty_spec(experiment), _licensing_spec(experiment)
                )
            )
        elif name.startswith("licensing_interaction:"):
            _, sm, om = name.split(":")
            fixed = {"submod": sm, "objmod": om}
            specs.append(
                combine_contrasts(
                    name,
                    _penalty_spec(experiment, fixed),
                    _licensing_spec(experiment, fixed),
                )
            )
        elif name == "garden_path" or name.startswith("garden_path:"):
            factor = "reduction" if "reduction" in experiment.factor_names() else "comma"
            plus, minus = _GP_FACTORS[factor]
            fixed = {}
            if ":" in name:
                level = name.split(":", 1)[1]
                other = next(
                    f for f, lv in experiment.factors if f != factor and level in lv
                )
                fixed = {other: level}
            specs.append(
                difference_contrast(
                    experiment, name, factor, plus, minus, "disambiguator", fixed=fixed
                )
            )
        elif name == "transitivity_interaction":
            specs.append(
                _interaction_spec(experiment, name, "comma", "transitivity", "disambiguator")
            )
        elif name == "length_interaction":
            specs.append(
                _interaction_spec(experiment, name, "comma", "length", "disambiguator")
            )
        elif name == "reduction_ambiguity_interaction":
            specs.append(
                _interaction_spec(experiment, name, "reduction", "ambiguity", "disambiguator")
            )
        else:
            raise StatsError(f"unknown builtin effect {name!r}")
    return specs


def _interaction_spec(experiment, name, factor_a, factor_b, region):
    levels_a = experiment.levels_of(factor_a)
    levels_b = experiment.levels_of(factor_b)
    return combine_contrasts(
        name,
        difference_contrast(
            experiment, "d1", factor_a, levels_a[0], levels_a[1], region,
            fixed={factor_b: levels_b[0]},
        ),
        difference_contrast(
            experiment, "d2", factor_a, levels_a[0], levels_a[1], region,
            fixed={factor_b: levels_b[1]},
        ),
    )


def evaluate_builtin_effects(records, experiment, **kw) -> list:
    return [
        evaluate_contrast(records, spec, **kw)
        for spec in builtin_effect_specs(experiment)
    ]
