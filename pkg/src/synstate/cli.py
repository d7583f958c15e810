"""Command-line interface.

Subcommands: suites (list/export built-ins), validate, score, analyze,
report, serve. Exit codes: 0 success, 1 config error, 2 partial scorer
failure, 3 total scorer failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from synstate import pipeline as pl
from synstate import stats
from synstate.grammar import serialize_grammar_file
from synstate.items import ItemFileError, serialize_item_file, validate_experiment
from synstate.protocol import ProtocolError, serve_stdio, serve_tcp
from synstate.scorers import SurprisalTable, format_bits
from synstate.suites import builtin_suites
from synstate.toygrammars import toy_grammar, toy_grammar_names

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_PARTIAL = 2
EXIT_TOTAL = 3


def _add_run_flags(p, with_alpha=True):
    p.add_argument("--experiment", action="append", default=[],
                   help="built-in suite name or item-file path (repeatable)")
    p.add_argument("--scorer", action="append", default=[],
                   help="grammar:<path|toy:NAME> | beam:<path|toy:NAME> | "
                        "ngram:<path> | extern:tcp:HOST:PORT | extern:cmd:CMD")
    p.add_argument("--action-beam", type=int, default=100)
    p.add_argument("--word-beam", type=int, default=10)
    p.add_argument("--max-actions-per-word", type=int, default=40)
    p.add_argument("--clamp-bits", type=float, default=stats.DEFAULT_CLAMP_BITS)
    p.add_argument("--n-perm", type=int, default=stats.DEFAULT_N_PERM)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", default="results")
    if with_alpha:
        p.add_argument("--alpha", type=float, default=pl.DEFAULT_ALPHA)


def _config_from_args(args) -> pl.RunConfig:
    return pl.RunConfig(
        experiments=tuple(args.experiment),
        scorers=tuple(args.scorer),
        action_beam=args.action_beam,
        word_beam=args.word_beam,
        max_actions_per_word=args.max_actions_per_word,
        clamp_bits=args.clamp_bits,
        n_perm=args.n_perm,
        seed=args.seed,
        alpha=getattr(args, "alpha", pl.DEFAULT_ALPHA),
        out_dir=args.out,
        workers=args.workers,
    )


def cmd_suites(args):
    if args.export:
        out = Path(args.export)
        out.mkdir(parents=True, exist_ok=True)
        for exp in builtin_suites():
            (out / f"{exp.name}.items").write_text(serialize_item_file(exp))
        for name in toy_grammar_names():
            (out / f"{name}.grammar").write_text(
                serialize_grammar_file(toy_grammar(name))
            )
        print(f"exported built-in suites and toy grammars to {out}")
        return EXIT_OK
    for exp in builtin_suites():
        factors = " x ".join(f"{n}({len(lv)})" for n, lv in exp.factors)
        print(f"{exp.name}\titems={len(exp.items)}\tfactors={factors}")
    return EXIT_OK


def cmd_validate(args):
    try:
        exp = pl.load_experiment(args.experiment)
    except (pl.ConfigError, ItemFileError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    problems = validate_experiment(exp)
    if problems:
        for p in problems:
            print(p)
        return EXIT_CONFIG
    print(f"{exp.name}: valid ({len(exp.items)} items, "
          f"{len(exp.conditions())} conditions)")
    return EXIT_OK


def cmd_score(args):
    config = _config_from_args(args)
    try:
        result = pl.run_pipeline(config)
    except (pl.ConfigError, ItemFileError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except pl.TotalScorerFailure as exc:
        print(f"scorer failure: {exc}", file=sys.stderr)
        return EXIT_TOTAL
    except ProtocolError as exc:
        print(f"scorer failure: {exc}", file=sys.stderr)
        return EXIT_TOTAL
    print(f"wrote bundle to {config.out_dir} "
          f"({len(result.table)} surprisal rows, {len(result.failures)} failures)")
    return EXIT_PARTIAL if result.partial_failure else EXIT_OK


def _read_bundle_config(out_dir) -> pl.RunConfig:
    path = Path(out_dir) / "config.json"
    if not path.exists():
        raise pl.ConfigError(f"no config.json under {out_dir!r}; run score first")
    return pl.RunConfig(**{
        k: tuple(v) if isinstance(v, list) else v
        for k, v in json.loads(path.read_text()).items()
    })


def cmd_analyze(args):
    try:
        config = _read_bundle_config(args.out)
        table_path = Path(args.out) / "surprisals.tsv"
        if not table_path.exists():
            raise pl.ConfigError(f"no surprisals.tsv under {args.out!r}")
        table = SurprisalTable.from_tsv(table_path.read_text())
        experiments = [pl.load_experiment(sel) for sel in config.experiments]
    except (pl.ConfigError, ItemFileError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    region_records, effects = pl.analyze(table, experiments, config)
    summary = pl.summary_table(effects, table.scorer_names(), config.alpha)
    result = pl.PipelineResult(
        config=config, experiments=experiments, table=table,
        region_records=region_records, effects=effects, failures=[],
        summary_rows=summary,
    )
    pl.write_bundle(result, args.out)
    print(f"analyzed {len(effects)} effects into {args.out}")
    return EXIT_OK


def cmd_report(args):
    effects_path = Path(args.out) / "effects.tsv"
    if not effects_path.exists():
        print(f"config error: no effects.tsv under {args.out!r}", file=sys.stderr)
        return EXIT_CONFIG
    lines = effects_path.read_text().splitlines()[1:]
    print("scorer\texperiment\teffect\tmean\tci95\tp_perm\tsignificant")
    for line in lines:
        if not line:
            continue
        sc, exp, eff, mean, lo, hi, p, n, nc = line.split("\t")
        sig = "yes" if float(p) <= args.alpha else "no"
        print(f"{sc}\t{exp}\t{eff}\t{mean}\t[{lo}, {hi}]\t{p}\t{sig}")
    summary_path = Path(args.out) / "summary.tsv"
    if summary_path.exists():
        print()
        print(summary_path.read_text(), end="")
    return EXIT_OK


def cmd_serve(args):
    config = _config_from_args(args)
    try:
        scorer = pl.build_scorer(args.scorer[0] if args.scorer else "", config)
    except pl.ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.transport == "stdio":
        serve_stdio(scorer)
        return EXIT_OK
    def ready(addr):
        print(f"listening on {addr[0]}:{addr[1]}", flush=True)
    serve_tcp(scorer, host=args.host, port=args.port, ready_callback=ready)
    return EXIT_OK


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="synstate",
        description="Syntactic-state surprisal evaluation for incremental language models",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("suites", help="list or export the built-in suites")
    p.add_argument("--export", metavar="DIR", default=None)
    p.set_defaults(func=cmd_suites)

    p = sub.add_parser("validate", help="check an experiment's invariants")
    p.add_argument("--experiment", required=True)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("score", help="score experiments and write the bundle")
    _add_run_flags(p)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("analyze", help="recompute regions/effects from a bundle")
    p.add_argument("--out", default="results")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("report", help="print effect estimates and the summary table")
    p.add_argument("--out", default="results")
    p.add_argument("--alpha", type=float, default=pl.DEFAULT_ALPHA)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("serve", help="serve a builtin scorer over the line protocol")
    _add_run_flags(p, with_alpha=False)
    p.add_argument("--transport", choices=("stdio", "tcp"), default="stdio")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=9337)
    p.set_defaults(func=cmd_serve)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
