"""Command-line front end.

Every subcommand writes ``config.resolved`` (the merged configuration that
produced the run) and ``report.tsv`` into ``--out``. Exit status is 0 on
success, 1 for pipeline or input errors, 2 for usage errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from dataclasses import asdict
from pathlib import Path

from .assoc import build_initial_lexicon, count_cooccurrences, read_lexicon, write_lexicon
from .corpus import PreprocessOptions, StemmerSpec, load_corpus, write_bitext
from .errors import LexcleanError, NotRegradedError
from .eval import (
    GeneratorConfig,
    apply_adjudication,
    concordance,
    format_concordance,
    generate_pairs,
    measure_recall,
    read_adjudication,
    read_gold,
    sample_for_precision,
    summarize_precision,
    write_adjudication,
    write_gold,
    write_precision_report,
    write_recall,
)
from .linker import align_lexicon
from .mixture import read_params, write_params
from .pipeline import CleanConfig, CutoffSpec, apply_cutoff, clean, greedy_baseline, regrade

log = logging.getLogger("lexclean")

DEFAULTS = {
    "corpus": None,
    "stoplist_src": None,
    "stoplist_tgt": None,
    "stemmer": "identity",
    "lowercase": False,
    "min_score": 0.0,
    "max_candidates": None,
    "max_pairs": None,
    "max_iter": 10,
    "param_tolerance": 1e-6,
    "plateau": None,
    "min_log_score": None,
    "gold": None,
    "seed": 42,
    "out": None,
    "workers": None,
    "dump_links": False,
    "lexicon": None,
    "params": None,
    "threshold": 0.0,
    "adjudication": None,
    "samples": 5,
    "sample_size": 100,
    "entry": None,
    "max_lines": 20,
    "segments": GeneratorConfig.n_segments,
    "pairs": GeneratorConfig.n_pairs,
    "zipf": GeneratorConfig.zipf_exponent,
    "min_length": GeneratorConfig.min_length,
    "max_length": GeneratorConfig.max_length,
    "p_trans": GeneratorConfig.p_trans,
    "p_drop": GeneratorConfig.p_drop,
    "p_indirect": GeneratorConfig.p_indirect,
    "p_collocate": GeneratorConfig.p_collocate,
}

# keys that only record where things came from; excluded from config.resolved
_VOLATILE = {"config", "verbose", "command"}


def _add_common(p: argparse.ArgumentParser, corpus=True) -> None:
    p.add_argument("--config", help="JSON file of defaults; flags override its keys")
    p.add_argument("--out", help="output directory")
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int, help="worker processes (env LEXCLEAN_WORKERS)")
    p.add_argument("-v", "--verbose", action="store_true")
    if corpus:
        p.add_argument("--corpus", help="bitext: source TAB target per line")
        p.add_argument("--stoplist-src")
        p.add_argument("--stoplist-tgt")
        p.add_argument("--stemmer", help="identity, or suffixes=s,es,ing;min_stem_len=3")
        p.add_argument("--lowercase", action="store_true", default=None)


def _add_lexicon_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--min-score", type=float)
    p.add_argument("--max-candidates", type=int)
    p.add_argument("--max-pairs", type=int)


def _add_cutoff(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group()
    g.add_argument("--plateau", choices=["1/1", "2/2", "3/3"])
    g.add_argument("--min-log-score", type=float)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lexclean", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("induce", help="count co-occurrences and write the initial lexicon")
    _add_common(p)
    _add_lexicon_options(p)

    p = sub.add_parser("clean", help="run the iterative cleaning loop")
    _add_common(p)
    _add_lexicon_options(p)
    p.add_argument("--max-iter", type=int)
    p.add_argument("--param-tolerance", type=float)
    p.add_argument("--dump-links", action="store_true", default=None)
    _add_cutoff(p)

    p = sub.add_parser("cutoff", help="threshold a regraded lexicon")
    _add_common(p, corpus=False)
    p.add_argument("--lexicon", required=True)
    p.add_argument("--params", help="params.txt; defaults to the one beside the lexicon")
    _add_cutoff(p)

    p = sub.add_parser("baseline", help="one-shot thresholded G-squared lexicon")
    _add_common(p)
    p.add_argument("--threshold", type=float)
    p.add_argument("--max-pairs", type=int)

    p = sub.add_parser("eval", help="recall and sampled precision of a lexicon")
    _add_common(p)
    p.add_argument("--lexicon", required=True)
    p.add_argument("--params")
    p.add_argument("--gold")
    p.add_argument("--adjudication", help="filled-in adjudication TSV from an earlier run")
    p.add_argument("--samples", type=int)
    p.add_argument("--sample-size", type=int)
    p.add_argument("--max-lines", type=int)
    _add_cutoff(p)

    p = sub.add_parser("concord", help="bilingual concordance for lexicon entries")
    _add_common(p)
    p.add_argument("--entry", nargs=2, action="append", metavar=("SOURCE", "TARGET"))
    p.add_argument("--lexicon", help="concordance every entry of this lexicon")
    p.add_argument("--max-lines", type=int)

    p = sub.add_parser("synth", help="generate a seeded synthetic bitext and its gold lexicon")
    _add_common(p, corpus=False)
    p.add_argument("--segments", type=int)
    p.add_argument("--pairs", type=int)
    p.add_argument("--zipf", type=float)
    p.add_argument("--min-length", type=int)
    p.add_argument("--max-length", type=int)
    p.add_argument("--p-trans", type=float)
    p.add_argument("--p-drop", type=float)
    p.add_argument("--p-indirect", type=float)
    p.add_argument("--p-collocate", type=float)
    return parser


def resolve(args: argparse.Namespace) -> dict:
    """Merge built-in defaults, the config file and explicit flags."""
    cfg = {k: v for k, v in DEFAULTS.items() if k in vars(args)}
    if getattr(args, "config", None):
        with open(args.config, encoding="utf-8") as fh:
            file_cfg = json.load(fh)
        unknown = set(file_cfg) - set(DEFAULTS)
        if unknown:
            raise LexcleanError(f"unknown config keys: {', '.join(sorted(unknown))}")
        cfg.update({k: v for k, v in file_cfg.items() if k in cfg})
    for k, v in vars(args).items():
        if k not in _VOLATILE and v is not None:
            cfg[k] = v
    if "workers" in cfg and cfg["workers"] is None:
        env = os.environ.get("LEXCLEAN_WORKERS")
        cfg["workers"] = int(env) if env else (os.cpu_count() or 1)
    cfg["command"] = args.command
    return cfg


def _out_dir(cfg) -> Path:
    if not cfg.get("out"):
        raise LexcleanError("--out is required")
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_json(obj, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(obj, fh, indent=1, sort_keys=True)
        fh.write("\n")


def _write_summary(rows, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("key\tvalue\n")
        for k, v in rows:
            fh.write(f"{k}\t{v}\n")


def _options(cfg) -> PreprocessOptions:
    return PreprocessOptions(
        cfg.get("stoplist_src"), cfg.get("stoplist_tgt"),
        StemmerSpec.parse(cfg.get("stemmer")), bool(cfg.get("lowercase")),
    )


def _corpus(cfg):
    if not cfg.get("corpus"):
        raise LexcleanError("--corpus is required")
    return load_corpus(cfg["corpus"], _options(cfg))


def _cutoff_spec(cfg) -> CutoffSpec | None:
    if cfg.get("plateau"):
        return CutoffSpec.parse(cfg["plateau"])
    if cfg.get("min_log_score") is not None:
        return CutoffSpec(min_log_score=float(cfg["min_log_score"]))
    return None


def _load_regraded(cfg):
    """Read a lexicon and its params; scores are recomputed from (k, n)."""
    path = Path(cfg["lexicon"])
    params_path = Path(cfg["params"]) if cfg.get("params") else path.parent / "params.txt"
    if not params_path.exists():
        return read_lexicon(path), None
    params = read_params(params_path)
    return regrade(read_lexicon(path, params=params), params), params


def cmd_induce(cfg, out: Path) -> None:
    corpus = _corpus(cfg)
    table = count_cooccurrences(corpus, cfg.get("max_pairs"), workers=cfg["workers"])
    lexicon = build_initial_lexicon(table, cfg["min_score"], cfg.get("max_candidates"))
    write_lexicon(lexicon, out / "lexicon.tsv")
    _write_summary([
        ("segment_pairs", len(corpus)),
        ("source_types", len(corpus.source_vocab)),
        ("target_types", len(corpus.target_vocab)),
        ("cooccurring_pairs", len(table)),
        ("N", table.N),
        ("entries", len(lexicon)),
    ], out / "report.tsv")


def cmd_clean(cfg, out: Path) -> None:
    corpus = _corpus(cfg)
    table = count_cooccurrences(corpus, cfg.get("max_pairs"), workers=cfg["workers"])
    initial = build_initial_lexicon(table, cfg["min_score"], cfg.get("max_candidates"))
    config = CleanConfig(max_iterations=cfg["max_iter"], param_tolerance=cfg["param_tolerance"],
                         cutoff=cfg.get("plateau"))
    lexicon, history = clean(corpus, initial, config, table=table, workers=cfg["workers"],
                             run_dir=out, dump_links=bool(cfg.get("dump_links")))
    spec = _cutoff_spec(cfg)
    if spec is not None:
        cut = apply_cutoff(lexicon, spec)
        write_lexicon(cut, out / "lexicon.cutoff.tsv")
    log.info("%d iterations, fixed point: %s, %d entries", len(history), history.converged, len(lexicon))


def cmd_cutoff(cfg, out: Path) -> None:
    spec = _cutoff_spec(cfg)
    if spec is None:
        raise LexcleanError("cutoff needs --plateau or --min-log-score")
    lexicon, params = _load_regraded(cfg)
    if params is None:
        raise NotRegradedError(f"lexicon not regraded: no params.txt for {cfg['lexicon']}")
    cut = apply_cutoff(lexicon, spec)
    write_lexicon(cut, out / "lexicon.tsv")
    write_params(params, out / "params.txt")
    _write_summary([
        ("cutoff", str(spec)),
        ("threshold", repr(spec.threshold(params))),
        ("entries_in", len(lexicon)),
        ("entries_out", len(cut)),
    ], out / "report.tsv")


def cmd_baseline(cfg, out: Path) -> None:
    corpus = _corpus(cfg)
    table = count_cooccurrences(corpus, cfg.get("max_pairs"), workers=cfg["workers"])
    lexicon = greedy_baseline(corpus, cfg["threshold"], table)
    write_lexicon(lexicon, out / "lexicon.tsv")
    _write_summary([("threshold", repr(cfg["threshold"])), ("entries", len(lexicon))], out / "report.tsv")


def cmd_eval(cfg, out: Path) -> None:
    corpus = _corpus(cfg)
    lexicon, params = _load_regraded(cfg)
    spec = _cutoff_spec(cfg)
    if spec is not None:
        if params is None:
            raise NotRegradedError("lexicon not regraded: a cutoff needs params.txt")
        lexicon = apply_cutoff(lexicon, spec)
    lexicon = align_lexicon(lexicon, corpus)
    recall = measure_recall(lexicon, corpus)
    write_recall(recall, out / "recall.tsv")

    stemmer = StemmerSpec.parse(cfg.get("stemmer"))
    gold = read_gold(cfg["gold"], stemmer, bool(cfg.get("lowercase"))) if cfg.get("gold") else set()
    rows = [("entries", len(lexicon))]
    rows += [(f"{name}_recall_percent", f"{pct:.4f}") for name, _, _, pct in recall.rows()]
    if len(lexicon):
        samples = sample_for_precision(lexicon, gold, cfg["samples"], cfg["sample_size"], cfg["seed"])
        if cfg.get("adjudication"):
            apply_adjudication(samples, read_adjudication(cfg["adjudication"]))
        summary = summarize_precision(samples)
        write_precision_report(summary, out / "precision.tsv")
        pending = write_adjudication(samples, out / "adjudication.tsv")
        if pending:
            bundle = []
            for s in samples:
                for pair, verdict in zip(s.entries, s.verdicts):
                    if verdict == "human-pending" and pair not in bundle:
                        bundle.append(pair)
            with open(out / "concordance.txt", "w", encoding="utf-8", newline="\n") as fh:
                for pair in sorted(bundle):
                    fh.write(format_concordance(pair, concordance(pair, corpus, cfg["max_lines"])))
        rows += [("precision_status", summary.status), ("pending_entries", pending)]
        if summary.mean is not None:
            rows += [("precision_mean", f"{summary.mean:.4f}"), ("precision_std", f"{summary.std:.4f}")]
    _write_summary(rows, out / "report.tsv")


def cmd_concord(cfg, out: Path) -> None:
    corpus = _corpus(cfg)
    entries = [tuple(e) for e in (cfg.get("entry") or [])]
    if cfg.get("lexicon"):
        entries += [(e.source, e.target) for e in read_lexicon(cfg["lexicon"]).sorted_entries()]
    if not entries:
        raise LexcleanError("concord needs --entry SOURCE TARGET or --lexicon")
    found = 0
    with open(out / "concordance.txt", "w", encoding="utf-8", newline="\n") as fh:
        for entry in entries:
            lines = concordance(entry, corpus, cfg["max_lines"])
            found += len(lines)
            fh.write(format_concordance(entry, lines))
    _write_summary([("entries", len(entries)), ("excerpts", found)], out / "report.tsv")


def cmd_synth(cfg, out: Path) -> None:
    gen = GeneratorConfig(
        n_segments=cfg["segments"], n_pairs=cfg["pairs"], zipf_exponent=cfg["zipf"],
        min_length=cfg["min_length"], max_length=cfg["max_length"], p_trans=cfg["p_trans"],
        p_drop=cfg["p_drop"], p_indirect=cfg["p_indirect"], p_collocate=cfg["p_collocate"],
        seed=cfg["seed"],
    )
    pairs, truth = generate_pairs(gen)
    write_bitext(pairs, out / "bitext.txt")
    write_gold(truth.pairs, out / "gold.tsv")
    _write_summary(
        [(k, v) for k, v in asdict(gen).items()]
        + [("source_tokens", sum(len(s) for s, _ in pairs)), ("target_tokens", sum(len(t) for _, t in pairs))],
        out / "report.tsv",
    )


COMMANDS = {
    "induce": cmd_induce,
    "clean": cmd_clean,
    "cutoff": cmd_cutoff,
    "baseline": cmd_baseline,
    "eval": cmd_eval,
    "concord": cmd_concord,
    "synth": cmd_synth,
}


def _jsonable(cfg: dict) -> dict:
    out = {}
    for k, v in cfg.items():
        if isinstance(v, float) and math.isinf(v):
            v = repr(v)
        out[k] = v
    return out


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve(args)
        out = _out_dir(cfg)
        _write_json(_jsonable(cfg), out / "config.resolved")
        COMMANDS[args.command](cfg, out)
    except LexcleanError as exc:
        print(f"lexclean {args.command}: error [{exc.module}]: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"lexclean {args.command}: error [input]: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
