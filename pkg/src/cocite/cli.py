"""Command-line pipeline with reproducible run manifests.

Every subcommand writes its outputs plus a ``run.manifest`` into the
directory given by ``--out``; ``rerun`` re-executes the argv recorded in
a manifest (optionally with a different worker count) and reproduces the
output CSVs byte for byte.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from pathlib import Path

from . import __version__
from .classify import (
    ClassifyConfig,
    classify_corpus,
    corpus_summaries,
    index_pair_stats,
    read_summaries_csv,
    write_summaries_csv,
)
from .corpus import Corpus, IngestConfig, IngestError, export_corpus, ingest, summarize
from .diverge import (
    composition_fold,
    kl_divergence,
    write_composition_csv,
    write_divergence_csv,
)
from .impact import (
    HitConfig,
    designate_hits,
    format_hit_grid,
    hit_report,
    write_hit_report_csv,
    write_hit_tests_json,
)
from .manifest import RunManifest, file_digest
from .pairs import observed_frequencies, write_pair_csv
from .shuffle import build_groups, repcs_shuffle, umsj_shuffle
from .simulate import (
    SimConfig,
    benchmark_algorithms,
    read_pair_stats_csv,
    run_simulations,
    undefined_pair_count,
    write_pair_means_csv,
    write_pair_stats_csv,
    zscores,
)
from .synth import SynthConfig, generate


def _default_workers() -> int:
    return os.cpu_count() or 1


def _int_or_list(text: str):
    if "," in text:
        return [int(v) for v in text.split(",") if v]
    return int(text)


def _add_out_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", required=True, help="output directory (created if missing)")
    p.add_argument("--tag", default="corpus", help="corpus label used in output rows")


def _add_corpus_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--pubs", required=True, help="publications TSV")
    p.add_argument("--refs", required=True, help="references TSV")
    p.add_argument("--cites", required=True, help="citations TSV")
    p.add_argument("--slice-year", type=int, default=None)


def _add_pool_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--pool-pubs", help="substitution-pool publications TSV")
    p.add_argument("--pool-refs", help="substitution-pool references TSV")
    p.add_argument("--pool-cites", help="substitution-pool citations TSV")


def _add_sim_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--background", choices=["local", "global"], default="local")
    p.add_argument("--algorithm", choices=["repcs", "umsj"], default="repcs")
    p.add_argument("--sims", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=_default_workers())
    p.add_argument("--max-retries", type=int, default=10)


def _load_corpus(args, digests: dict[str, str], tag: str = "local") -> Corpus:
    for path in (args.pubs, args.refs, args.cites):
        digests[str(path)] = file_digest(path)
    cfg = IngestConfig(slice_year=args.slice_year, background_tag=tag)
    return ingest(args.pubs, args.refs, args.cites, cfg)


def _load_pool(args, digests: dict[str, str]) -> Corpus | None:
    paths = (getattr(args, "pool_pubs", None), getattr(args, "pool_refs", None),
             getattr(args, "pool_cites", None))
    if not any(paths):
        return None
    if not all(paths):
        raise ValueError("--pool-pubs, --pool-refs, and --pool-cites must be given together")
    for path in paths:
        digests[str(path)] = file_digest(path)
    cfg = IngestConfig(slice_year=getattr(args, "slice_year", None), background_tag="global")
    return ingest(paths[0], paths[1], paths[2], cfg)


def _sim_config(args) -> SimConfig:
    return SimConfig(
        n_simulations=args.sims,
        master_seed=args.seed,
        background=args.background,
        algorithm=args.algorithm,
        workers=args.workers,
        umsj_max_retries=args.max_retries,
    )


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _finish(args, argv, out: Path, digests, timings, diagnostics, seed=None) -> None:
    RunManifest(
        tool_version=__version__,
        command=args.command,
        argv=list(argv),
        master_seed=seed,
        input_digests=digests,
        timings={k: round(v, 6) for k, v in timings.items()},
        diagnostics=diagnostics,
    ).save(out)


def cmd_ingest(args, argv) -> int:
    out = _out_dir(args)
    digests: dict[str, str] = {}
    t0 = time.perf_counter()
    corpus = _load_corpus(args, digests)
    export_corpus(corpus, out)
    diags = corpus.diagnostics
    diagnostics = {
        "dropped": dict(diags.dropped) if diags else {},
        "journal_aliases_collapsed": diags.journal_aliases_collapsed if diags else 0,
        "publications": len(corpus.publications),
        "references": len(corpus.references),
    }
    _finish(args, argv, out, digests, {"ingest": time.perf_counter() - t0}, diagnostics)
    print(f"ingested {len(corpus.publications)} publications, "
          f"{len(corpus.references)} references "
          f"({diags.total_dropped() if diags else 0} rows dropped)")
    return 0


def cmd_summarize(args, argv) -> int:
    out = _out_dir(args)
    digests: dict[str, str] = {}
    t0 = time.perf_counter()
    corpus = _load_corpus(args, digests)
    s = summarize(corpus)
    with open(out / "summary.csv", "w", encoding="utf-8", newline="") as fh:
        fh.write("corpus,unique_publications,unique_references,total_references,ratio\n")
        fh.write(f"{args.tag},{s.unique_publications},{s.unique_references},"
                 f"{s.total_references},{s.ratio!r}\n")
    _finish(args, argv, out, digests, {"summarize": time.perf_counter() - t0}, {})
    print(f"{args.tag}: pubs={s.unique_publications} ur={s.unique_references} "
          f"tr={s.total_references} tr/ur={s.ratio:.2f}")
    return 0


def cmd_observe(args, argv) -> int:
    out = _out_dir(args)
    digests: dict[str, str] = {}
    t0 = time.perf_counter()
    corpus = _load_corpus(args, digests)
    table = observed_frequencies(corpus)
    write_pair_csv(table, out / "observed_pairs.csv")
    _finish(args, argv, out, digests, {"observe": time.perf_counter() - t0},
            {"n_pairs": len(table), "total_pairs": table.total_pairs})
    print(f"observed {len(table)} distinct journal pairs, {table.total_pairs} total")
    return 0


def cmd_simulate(args, argv) -> int:
    out = _out_dir(args)
    digests: dict[str, str] = {}
    timings: dict[str, float] = {}
    t0 = time.perf_counter()
    corpus = _load_corpus(args, digests)
    pool = _load_pool(args, digests)
    timings["load"] = time.perf_counter() - t0
    cfg = _sim_config(args)
    t0 = time.perf_counter()
    sims = run_simulations(corpus, pool if cfg.background == "global" else None, cfg)
    timings["simulate"] = time.perf_counter() - t0
    write_pair_means_csv(sims, out / "pair_means.csv")
    _finish(args, argv, out, digests, timings, _sim_diagnostics(sims), seed=args.seed)
    print(f"simulated {cfg.n_simulations} shuffles, {len(sims)} pairs in support")
    return 0


def _sim_diagnostics(sims) -> dict:
    deleted = sims.per_sim_deleted
    return {
        "algorithm": sims.algorithm,
        "background": sims.background,
        "n_simulations": sims.n_simulations,
        "support_pairs": len(sims),
        "deleted_pubs_total": sum(deleted),
        "deleted_pubs_max": max(deleted) if deleted else 0,
        "retry_exhausted_total": sims.retry_exhausted_total,
    }


def cmd_zscore(args, argv) -> int:
    out = _out_dir(args)
    digests: dict[str, str] = {}
    timings: dict[str, float] = {}
    t0 = time.perf_counter()
    corpus = _load_corpus(args, digests)
    pool = _load_pool(args, digests)
    timings["load"] = time.perf_counter() - t0
    cfg = _sim_config(args)
    t0 = time.perf_counter()
    observed = observed_frequencies(corpus)
    sims = run_simulations(corpus, pool if cfg.background == "global" else None, cfg)
    stats = zscores(observed, sims)
    timings["zscore"] = time.perf_counter() - t0
    write_pair_stats_csv(stats, out / "pair_stats.csv")
    diagnostics = _sim_diagnostics(sims)
    diagnostics["sigma_zero_pairs"] = undefined_pair_count(stats)
    _finish(args, argv, out, digests, timings, diagnostics, seed=args.seed)
    print(f"z-scores for {len(stats)} pairs "
          f"({diagnostics['sigma_zero_pairs']} undefined)")
    return 0


def cmd_classify(args, argv) -> int:
    out = _out_dir(args)
    digests: dict[str, str] = {}
    t0 = time.perf_counter()
    corpus = _load_corpus(args, digests)
    digests[str(args.pair_stats)] = file_digest(args.pair_stats)
    stats = read_pair_stats_csv(args.pair_stats)
    summaries, excluded = corpus_summaries(corpus, index_pair_stats(stats))
    labeled, threshold = classify_corpus(summaries, ClassifyConfig(args.novelty_pct))
    write_summaries_csv(labeled, out / "classification.csv")
    _finish(args, argv, out, digests, {"classify": time.perf_counter() - t0},
            {"threshold": threshold, "classified": len(labeled),
             "excluded_no_defined_pairs": excluded})
    print(f"classified {len(labeled)} publications (threshold {threshold!r}, "
          f"{excluded} excluded)")
    return 0


def cmd_hits(args, argv) -> int:
    out = _out_dir(args)
    digests: dict[str, str] = {}
    t0 = time.perf_counter()
    corpus = _load_corpus(args, digests)
    digests[str(args.classification)] = file_digest(args.classification)
    labeled = read_summaries_csv(args.classification)
    hits = designate_hits(corpus.publications, HitConfig(args.hit_pct))
    report = hit_report(labeled, hits)
    write_hit_report_csv(report, out / "hit_report.csv")
    write_hit_tests_json(report, out / "hit_tests.json")
    _finish(args, argv, out, digests, {"hits": time.perf_counter() - t0},
            {"total_hits": report.total_hits, "hit_percentile": args.hit_pct})
    print(f"hit rates at top {args.hit_pct}% ({report.total_hits} hits):")
    print(format_hit_grid(report))
    return 0


def cmd_kld(args, argv) -> int:
    out = _out_dir(args)
    digests: dict[str, str] = {}
    timings: dict[str, float] = {}
    t0 = time.perf_counter()
    corpus = _load_corpus(args, digests)
    pool = _load_pool(args, digests)
    timings["load"] = time.perf_counter() - t0
    observed = observed_frequencies(corpus)
    journals = corpus.journals()
    rows = []
    t0 = time.perf_counter()
    local_cfg = _sim_config(args)
    local_cfg.background = "local"
    local_sims = run_simulations(corpus, None, local_cfg)
    rows.append(kl_divergence(observed, local_sims, journals, args.epsilon,
                              corpus_tag=args.tag, background="local",
                              year=corpus.slice_year))
    ratio = None
    if pool is not None:
        global_cfg = _sim_config(args)
        global_cfg.background = "global"
        global_sims = run_simulations(corpus, pool, global_cfg)
        rows.append(kl_divergence(observed, global_sims, journals, args.epsilon,
                                  corpus_tag=args.tag, background="global",
                                  year=corpus.slice_year))
        ratio = rows[1].kld / rows[0].kld if rows[0].kld > 0 else float("inf")
    timings["kld"] = time.perf_counter() - t0
    write_divergence_csv(rows, out / "kld.csv", ratio=ratio)
    _finish(args, argv, out, digests, timings,
            {"kld_local": rows[0].kld,
             "kld_global": rows[1].kld if len(rows) > 1 else None,
             "ratio": ratio},
            seed=args.seed)
    for row in rows:
        print(f"kld {row.corpus_tag} {row.background}: {row.kld:.4f} bits "
              f"({row.n_support} pairs)")
    if ratio is not None:
        print(f"global/local ratio: {ratio:.2f}")
    return 0


def cmd_compose(args, argv) -> int:
    out = _out_dir(args)
    digests: dict[str, str] = {}
    t0 = time.perf_counter()
    corpus = _load_corpus(args, digests)
    pool = _load_pool(args, digests)
    if args.background == "global" and pool is None:
        raise ValueError("global background requires --pool-* files")
    plan = build_groups(corpus, pool if args.background == "global" else None)
    if args.algorithm == "repcs":
        outcome = repcs_shuffle(plan, args.seed)
    else:
        outcome = umsj_shuffle(plan, args.seed, args.max_retries)
    rows = composition_fold(corpus, outcome, include_deleted=not args.survivors_only)
    write_composition_csv(rows, out / "composition.csv")
    if args.dump_shuffled:
        export_corpus(outcome.corpus, args.dump_shuffled)
    _finish(args, argv, out, digests, {"compose": time.perf_counter() - t0},
            {"deleted_pubs": len(outcome.deleted_pubs),
             "fixed_points": outcome.fixed_points,
             "retry_exhausted": outcome.retry_exhausted,
             "max_fold": max(r.fold for r in rows)},
            seed=args.seed)
    print(f"composition over {len(rows)} subjects, max fold "
          f"{max(r.fold for r in rows)}")
    return 0


def cmd_synth(args, argv) -> int:
    out = _out_dir(args)
    t0 = time.perf_counter()
    cfg = SynthConfig(
        n_disciplines=args.disciplines,
        journals_per_discipline=args.journals_per_discipline,
        pubs_per_discipline=args.pubs_per_discipline,
        ref_pool_per_discipline=args.ref_pool,
        refs_mean=args.refs_mean,
        refs_dispersion=args.refs_dispersion,
        p_intra=args.p_intra,
        skew=args.skew,
        slice_year=args.year,
        n_ref_years=args.ref_years,
        seed=args.seed,
    )
    result = generate(cfg)
    export_corpus(result.pool, out)
    for label, sub in result.by_discipline.items():
        export_corpus(sub, out / label)
    _finish(args, argv, out, {}, {"synth": time.perf_counter() - t0},
            {"publications": len(result.pool.publications),
             "references": len(result.pool.references),
             "citations": result.pool.n_citations(),
             "disciplines": sorted(result.by_discipline)},
            seed=args.seed)
    print(f"synthesized {len(result.pool.publications)} publications, "
          f"{result.pool.n_citations()} citations, "
          f"{args.disciplines} disciplines under {out}")
    return 0


def cmd_bench(args, argv) -> int:
    out = _out_dir(args)
    digests: dict[str, str] = {}
    corpus = _load_corpus(args, digests)
    pool = _load_pool(args, digests)
    algorithms = [a for a in args.algorithms.split(",") if a]
    timings = benchmark_algorithms(
        corpus, pool if args.background == "global" else None,
        algorithms=algorithms, n_simulations=args.sims, master_seed=args.seed,
        umsj_max_retries=args.max_retries,
    )
    with open(out / "bench.csv", "w", encoding="utf-8", newline="") as fh:
        fh.write("algorithm,n_simulations,seconds,sims_per_second\n")
        for alg in algorithms:
            secs = timings[alg]
            rate = args.sims / secs if secs > 0 else float("inf")
            fh.write(f"{alg},{args.sims},{secs!r},{rate!r}\n")
    _finish(args, argv, out, digests, timings, {"n_simulations": args.sims},
            seed=args.seed)
    print(f"{'algorithm':>10} {'sims':>6} {'seconds':>12}")
    for alg in algorithms:
        print(f"{alg:>10} {args.sims:>6} {timings[alg]:>12.3f}")
    return 0


def cmd_pipeline(args, argv) -> int:
    out = _out_dir(args)
    digests: dict[str, str] = {}
    timings: dict[str, float] = {}
    diagnostics: dict = {}

    t0 = time.perf_counter()
    corpus = _load_corpus(args, digests)
    pool = _load_pool(args, digests)
    timings["load"] = time.perf_counter() - t0
    if corpus.diagnostics:
        diagnostics["dropped"] = dict(corpus.diagnostics.dropped)

    t0 = time.perf_counter()
    observed = observed_frequencies(corpus)
    write_pair_csv(observed, out / "observed_pairs.csv")
    timings["observe"] = time.perf_counter() - t0

    cfg = _sim_config(args)
    t0 = time.perf_counter()
    sims = run_simulations(corpus, pool if cfg.background == "global" else None, cfg)
    timings["simulate"] = time.perf_counter() - t0
    diagnostics.update(_sim_diagnostics(sims))

    t0 = time.perf_counter()
    stats = zscores(observed, sims)
    write_pair_stats_csv(stats, out / "pair_stats.csv")
    diagnostics["sigma_zero_pairs"] = undefined_pair_count(stats)
    timings["zscore"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    summaries, excluded = corpus_summaries(corpus, index_pair_stats(stats))
    labeled, threshold = classify_corpus(summaries, ClassifyConfig(args.novelty_pct))
    write_summaries_csv(labeled, out / "classification.csv")
    diagnostics["threshold"] = threshold
    diagnostics["excluded_no_defined_pairs"] = excluded
    timings["classify"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    hits = designate_hits(corpus.publications, HitConfig(args.hit_pct))
    report = hit_report(labeled, hits)
    write_hit_report_csv(report, out / "hit_report.csv")
    write_hit_tests_json(report, out / "hit_tests.json")
    diagnostics["total_hits"] = report.total_hits
    timings["hits"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    row = kl_divergence(observed, sims, corpus.journals(), args.epsilon,
                        corpus_tag=args.tag, background=cfg.background,
                        year=corpus.slice_year)
    write_divergence_csv([row], out / "kld.csv")
    diagnostics["kld"] = row.kld
    timings["kld"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    plan = build_groups(corpus, pool if cfg.background == "global" else None)
    if cfg.algorithm == "repcs":
        outcome = repcs_shuffle(plan, cfg.master_seed)
    else:
        outcome = umsj_shuffle(plan, cfg.master_seed, cfg.umsj_max_retries)
    rows = composition_fold(corpus, outcome)
    write_composition_csv(rows, out / "composition.csv")
    timings["compose"] = time.perf_counter() - t0

    _finish(args, argv, out, digests, timings, diagnostics, seed=args.seed)
    print(f"pipeline complete: {len(labeled)} publications classified, "
          f"threshold {threshold:.4f}, kld({cfg.background}) {row.kld:.4f} bits")
    print(format_hit_grid(report))
    return 0


def cmd_rerun(args, argv) -> int:
    manifest = RunManifest.load(args.manifest)
    for path, digest in manifest.input_digests.items():
        if not Path(path).exists():
            raise ValueError(f"manifest input {path} is missing")
        if file_digest(path) != digest:
            raise ValueError(f"manifest input {path} has changed since the recorded run")
    new_argv = list(manifest.argv)
    if args.out:
        new_argv += ["--out", args.out]
    if args.workers is not None:
        new_argv += ["--workers", str(args.workers)]
    return main(new_argv)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cocite",
        description="Journal co-citation novelty analysis with constrained null models",
    )
    parser.add_argument("--version", action="version", version=f"cocite {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="validate and normalize a corpus")
    _add_corpus_args(p)
    _add_out_args(p)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("summarize", help="corpus size statistics")
    _add_corpus_args(p)
    _add_out_args(p)
    p.set_defaults(func=cmd_summarize)

    p = sub.add_parser("observe", help="observed journal-pair frequencies")
    _add_corpus_args(p)
    _add_out_args(p)
    p.set_defaults(func=cmd_observe)

    p = sub.add_parser("simulate", help="expected pair frequencies over N shuffles")
    _add_corpus_args(p)
    _add_pool_args(p)
    _add_sim_args(p)
    _add_out_args(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("zscore", help="pair z-scores against the null model")
    _add_corpus_args(p)
    _add_pool_args(p)
    _add_sim_args(p)
    _add_out_args(p)
    p.set_defaults(func=cmd_zscore)

    p = sub.add_parser("classify", help="novelty/conventionality categories")
    _add_corpus_args(p)
    p.add_argument("--pair-stats", required=True, help="pair_stats.csv from zscore")
    p.add_argument("--novelty-pct", type=int, choices=[10, 1], default=10)
    _add_out_args(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("hits", help="hit rates and goodness-of-fit tests")
    _add_corpus_args(p)
    p.add_argument("--classification", required=True, help="classification.csv from classify")
    p.add_argument("--hit-pct", type=int, choices=[1, 2, 5, 10], default=10)
    _add_out_args(p)
    p.set_defaults(func=cmd_hits)

    p = sub.add_parser("kld", help="observed-vs-simulated divergence per background")
    _add_corpus_args(p)
    _add_pool_args(p)
    _add_sim_args(p)
    p.add_argument("--epsilon", type=float, default=1e-12)
    _add_out_args(p)
    p.set_defaults(func=cmd_kld)

    p = sub.add_parser("compose", help="subject composition before/after one shuffle")
    _add_corpus_args(p)
    _add_pool_args(p)
    _add_sim_args(p)
    p.add_argument("--survivors-only", action="store_true",
                   help="count only publications surviving error correction")
    p.add_argument("--dump-shuffled", default=None,
                   help="directory for a TSV dump of the shuffled corpus")
    _add_out_args(p)
    p.set_defaults(func=cmd_compose)

    p = sub.add_parser("synth", help="generate a synthetic corpus")
    p.add_argument("--disciplines", type=int, default=3)
    p.add_argument("--journals-per-discipline", type=int, default=4)
    p.add_argument("--pubs-per-discipline", type=_int_or_list, default=200)
    p.add_argument("--ref-pool", type=_int_or_list, default=800)
    p.add_argument("--refs-mean", type=float, default=8.0)
    p.add_argument("--refs-dispersion", type=float, default=0.3)
    p.add_argument("--p-intra", type=float, default=0.9)
    p.add_argument("--skew", type=float, default=0.5)
    p.add_argument("--year", type=int, default=1995)
    p.add_argument("--ref-years", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    _add_out_args(p)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("bench", help="time the shuffle algorithms")
    _add_corpus_args(p)
    _add_pool_args(p)
    _add_sim_args(p)
    p.add_argument("--algorithms", default="repcs,umsj")
    _add_out_args(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("pipeline", help="run the whole chain")
    _add_corpus_args(p)
    _add_pool_args(p)
    _add_sim_args(p)
    p.add_argument("--novelty-pct", type=int, choices=[10, 1], default=10)
    p.add_argument("--hit-pct", type=int, choices=[1, 2, 5, 10], default=10)
    p.add_argument("--epsilon", type=float, default=1e-12)
    _add_out_args(p)
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("rerun", help="re-execute the run recorded in a manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", default=None, help="override the output directory")
    p.add_argument("--workers", type=int, default=None, help="override the worker count")
    p.set_defaults(func=cmd_rerun)

    return parser


def _apply_config_file(argv: list[str]) -> list[str]:
    """Expand --config key=value files in place; explicit flags win.

    Config entries are spliced in right after the subcommand so that
    anything the user typed later overrides them.
    """
    if "--config" not in argv:
        return argv
    i = argv.index("--config")
    if i + 1 >= len(argv):
        raise ValueError("--config requires a file path")
    path = argv[i + 1]
    expanded: list[str] = []
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}: config lines must be key=value, got {line!r}")
            key, value = line.split("=", 1)
            expanded += [f"--{key.strip()}", value.strip()]
    rest = argv[:i] + argv[i + 2:]
    if not rest:
        return expanded
    return [rest[0]] + expanded + rest[1:]


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        argv = _apply_config_file(argv)
        parser = build_parser()
        args = parser.parse_args(argv)
        return args.func(args, argv)
    except (IngestError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
