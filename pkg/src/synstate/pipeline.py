"""Pipeline orchestration and the persistent results bundle.

run_pipeline scores the selected experiments under every configured scorer,
aggregates regions, estimates the built-in effects, and writes a bundle of
tab-separated text files (one header line, fixed column order, 9-significant
-digit decimals) plus plot-record files. Output is byte-deterministic for a
given RunConfig, including the permutation seed; file writes are atomic.
"""

from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from synstate import stats
from synstate.grammar import parse_grammar_file
from synstate.items import Experiment, parse_item_file
from synstate.ngram import load_ngram
from synstate.protocol import ExternalScorerClient
from synstate.scorers import (
    BeamScorer,
    EarleyScorer,
    NgramScorer,
    SurprisalTable,
    format_bits,
    score_experiment,
)
from synstate.suites import builtin_suites
from synstate.toygrammars import toy_grammar, toy_grammar_names

DEFAULT_ALPHA = 0.05


class ConfigError(ValueError):
    pass


class TotalScorerFailure(RuntimeError):
    """An entire scorer produced zero successful sentences."""


@dataclass(frozen=True)
class RunConfig:
    experiments: tuple  # built-in names or item-file paths
    scorers: tuple  # scorer specs, see build_scorer
    action_beam: int = 100
    word_beam: int = 10
    max_actions_per_word: int = 40
    clamp_bits: float = stats.DEFAULT_CLAMP_BITS
    n_perm: int = stats.DEFAULT_N_PERM
    seed: int = 0
    alpha: float = DEFAULT_ALPHA
    out_dir: str = "results"
    workers: int = 1

    def validate(self):
        if not self.scorers:
            raise ConfigError("at least one scorer is required")
        if not self.experiments:
            raise ConfigError("at least one experiment is required")
        if not (self.action_beam >= self.word_beam >= 1):
            raise ConfigError("need action_beam >= word_beam >= 1")
        if self.max_actions_per_word < 1:
            raise ConfigError("max_actions_per_word must be >= 1")
        if self.clamp_bits <= 0:
            raise ConfigError("clamp_bits must be positive")
        if not (0 < self.alpha <= 1):
            raise ConfigError("alpha must be in (0, 1]")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.n_perm < 2:
            raise ConfigError("n_perm must be >= 2")


def load_experiment(selection: str) -> Experiment:
    for exp in builtin_suites():
        if exp.name == selection:
            return exp
    path = Path(selection)
    if path.exists():
        return parse_item_file(path.read_text())
    raise ConfigError(
        f"unknown experiment {selection!r} (not a built-in suite or file)"
    )


def _load_pcfg(ref: str):
    if ref.startswith("toy:"):
        name = ref[len("toy:") :]
        if name not in toy_grammar_names():
            raise ConfigError(f"unknown toy grammar {name!r}")
        return toy_grammar(name)
    path = Path(ref)
    if not path.exists():
        raise ConfigError(f"grammar file {ref!r} not found")
    return parse_grammar_file(path.read_text())


def build_scorer(spec: str, config: RunConfig):
    """Scorer specs: grammar:<path|toy:NAME>, beam:<path|toy:NAME>,
    ngram:<path>, extern:tcp:HOST:PORT, extern:cmd:<command>."""
    kind, _, ref = spec.partition(":")
    if not ref:
        raise ConfigError(f"bad scorer spec {spec!r}")
    if kind == "grammar":
        return EarleyScorer(_load_pcfg(ref), name=spec)
    if kind == "beam":
        return BeamScorer(
            _load_pcfg(ref),
            name=spec,
            action_beam=config.action_beam,
            word_beam=config.word_beam,
            max_actions_per_word=config.max_actions_per_word,
        )
    if kind == "ngram":
        path = Path(ref)
        if not path.exists():
            raise ConfigError(f"ngram model file {ref!r} not found")
        return NgramScorer(load_ngram(path.read_text()), name=spec)
    if kind == "extern":
        return ExternalScorerClient(ref, name=spec)
    raise ConfigError(f"unknown scorer kind {kind!r}")


@dataclass
class PipelineResult:
    config: RunConfig
    experiments: list
    table: SurprisalTable
    region_records: list  # stats.RegionSurprisal
    effects: list  # (scorer, experiment_name, stats.EffectResult)
    failures: list  # (scorer, experiment_name, item_id, condition, reason)
    summary_rows: list  # (scorer, phenomenon, basic, fine)

    @property
    def partial_failure(self):
        return bool(self.failures)


def _complete_items(table, experiment, scorer_name):
    """Items for which every condition was scored by this scorer."""
    scored = {
        (r.item_id, r.condition)
        for r in table.rows
        if r.scorer == scorer_name and r.experiment == experiment.name
    }
    conds = experiment.conditions()
    return tuple(
        item
        for item in experiment.items
        if all((item.id, c) in scored for c in conds)
    )


def analyze(table: SurprisalTable, experiments, config: RunConfig):
    """Aggregate regions and estimate each experiment's built-in effects for
    every scorer in the table; items with failed cells are dropped per
    scorer."""
    region_records = []
    effects = []
    for experiment in experiments:
        for scorer_name in table.scorer_names():
            items = _complete_items(table, experiment, scorer_name)
            if not items:
                continue
            sub_exp = dataclasses.replace(experiment, items=items)
            recs = stats.aggregate_regions(table.for_scorer(scorer_name), sub_exp)
            region_records.extend(recs)
            for res in stats.evaluate_builtin_effects(
                recs,
                sub_exp,
                clamp_bits=config.clamp_bits,
                n_perm=config.n_perm,
                seed=config.seed,
            ):
                effects.append((scorer_name, experiment.name, res))
    return region_records, effects


# -- summary table ---------------------------------------------------------------

PHENOMENA = (
    # name, experiment, (basic effect, wanted sign), (fine effect, wanted sign)
    ("subordination", "subordination", ("matrix_licensing", -1), ("no_matrix_penalty", +1)),
    ("npz-garden-path", "npz-transitivity", ("garden_path", +1), ("transitivity_interaction", +1)),
    ("mvrr-garden-path", "mvrr", ("garden_path", +1), ("reduction_ambiguity_interaction", +1)),
)


def summary_table(effects, scorer_names, alpha: float) -> list:
    """Rows (scorer, phenomenon, basic, fine); cells pass/fail/not-run.

    A cell passes when the effect has the wanted sign and p <= alpha,
    mirroring the two-check summary of syntactic-state evidence.
    """
    by_key = {}
    for scorer, exp_name, res in effects:
        by_key[(scorer, exp_name, res.spec.name)] = res.estimate

    def cell(scorer, exp_name, effect_name, sign):
        est = by_key.get((scorer, exp_name, effect_name))
        if est is None:
            return "not-run"
        ok = (est.mean * sign > 0) and est.p_perm <= alpha
        return "pass" if ok else "fail"

    rows = []
    for scorer in scorer_names:
        for phen, exp_name, basic, fine in PHENOMENA:
            rows.append(
                (
                    scorer,
                    phen,
                    cell(scorer, exp_name, *basic),
                    cell(scorer, exp_name, *fine),
                )
            )
    return rows


# -- plot data ---------------------------------------------------------------------


def emit_plot_data(effects):
    """Tabular records per figure type.

    bar records: (scorer, experiment, label, mean, ci_low, ci_high) for
    every estimated effect. heatmap records: (scorer, experiment, row_mod,
    col_mod, bits) for the modifier-grid interactions.
    """
    bars = []
    heat = []
    for scorer, exp_name, res in effects:
        est = res.estimate
        bars.append((scorer, exp_name, res.spec.name, est.mean, est.ci_low, est.ci_high))
        if res.spec.name.startswith("licensing_interaction:"):
            _, row_mod, col_mod = res.spec.name.split(":")
            heat.append((scorer, exp_name, row_mod, col_mod, est.mean))
    return bars, heat


# -- bundle writing -------------------------------------------------------------------


def _atomic_write(path: Path, text: str):
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def _tsv(header, rows):
    lines = ["\t".join(header)]
    for row in rows:
        lines.append("\t".join(row))
    return "\n".join(lines) + "\n"


def write_bundle(result: PipelineResult, out_dir=None):
    out = Path(out_dir or result.config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "plots").mkdir(exist_ok=True)

    _atomic_write(
        out / "config.json",
        json.dumps(dataclasses.asdict(result.config), sort_keys=True, indent=2) + "\n",
    )
    _atomic_write(out / "surprisals.tsv", result.table.to_tsv())
    _atomic_write(
        out / "regions.tsv",
        _tsv(
            ("scorer", "experiment", "item", "condition", "region", "bits"),
            (
                (r.scorer, r.experiment, str(r.item_id), ",".join(r.condition), r.region, format_bits(r.bits))
                for r in result.region_records
            ),
        ),
    )
    _atomic_write(
        out / "effects.tsv",
        _tsv(
            (
                "scorer", "experiment", "effect", "mean", "ci_low", "ci_high",
                "p_perm", "n_items", "n_infinite_clamped",
            ),
            (
                (
                    scorer, exp_name, res.spec.name,
                    format_bits(res.estimate.mean),
                    format_bits(res.estimate.ci_low),
                    format_bits(res.estimate.ci_high),
                    format_bits(res.estimate.p_perm),
                    str(res.estimate.n_items),
                    str(res.estimate.n_infinite_clamped),
                )
                for scorer, exp_name, res in result.effects
            ),
        ),
    )
    _atomic_write(
        out / "failures.tsv",
        _tsv(
            ("scorer", "experiment", "item", "condition", "reason"),
            (
                (scorer, exp_name, str(item_id), ",".join(cond), reason)
                for scorer, exp_name, item_id, cond, reason in result.failures
            ),
        ),
    )
    bars, heat = emit_plot_data(result.effects)
    _atomic_write(
        out / "plots" / "bar_effects.tsv",
        _tsv(
            ("scorer", "experiment", "label", "mean", "ci_low", "ci_high"),
            (
                (sc, ex, label, format_bits(m), format_bits(lo), format_bits(hi))
                for sc, ex, label, m, lo, hi in bars
            ),
        ),
    )
    _atomic_write(
        out / "plots" / "heatmap_interactions.tsv",
        _tsv(
            ("scorer", "experiment", "row_mod", "col_mod", "interaction_bits"),
            (
                (sc, ex, rm, cm, format_bits(b))
                for sc, ex, rm, cm, b in heat
            ),
        ),
    )
    _atomic_write(
        out / "summary.tsv",
        _tsv(("scorer", "phenomenon", "basic", "fine"), result.summary_rows),
    )
    return out


def run_pipeline(config: RunConfig) -> PipelineResult:
    """Score, analyze, summarize, and write the bundle under config.out_dir."""
    config.validate()
    experiments = [load_experiment(sel) for sel in config.experiments]
    scorers = [build_scorer(spec, config) for spec in config.scorers]

    all_rows = []
    failures = []
    for scorer in scorers:
        n_ok = 0
        # External clients are one request stream per connection; do not
        # interleave them across workers.
        workers = 1 if isinstance(scorer, ExternalScorerClient) else config.workers
        for experiment in experiments:
            table, fails = score_experiment(scorer, experiment, workers=workers)
            all_rows.extend(table.rows)
            n_ok += len({(r.item_id, r.condition) for r in table.rows})
            failures.extend(
                (scorer.name, experiment.name, item_id, cond, reason)
                for item_id, cond, reason in fails
            )
        if n_ok == 0:
            raise TotalScorerFailure(
                f"scorer {scorer.name!r} scored no sentences successfully"
            )
        close = getattr(scorer, "close", None)
        if close is not None:
            close()

    table = SurprisalTable(all_rows)
    region_records, effects = analyze(table, experiments, config)
    summary_rows = summary_table(effects, [s.name for s in scorers], config.alpha)
    result = PipelineResult(
        config=config,
        experiments=experiments,
        table=table,
        region_records=region_records,
        effects=effects,
        failures=failures,
        summary_rows=summary_rows,
    )
    write_bundle(result)
    return result
