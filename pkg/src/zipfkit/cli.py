"""Command-line interface.

Every output file carries the toolkit version and the run configuration
(``# run: {...}`` comment lines in CSV, a ``run`` key in JSON) so that
``zipfkit rerun FILE`` can regenerate it byte for byte.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .corpus import PipelineConfig, TrimPolicy, build_corpus, compare, fetch_manifest, load_manifest, text_sizes, trim_to_size
from .errors import ConfigError, EmptyInputError, InputError, NumericError, ZipfkitError
from .fitting import FitWindow, detect_crossover, fit_power_law, goodness_report, log_binned
from .lexicon import (
    DisambiguationMode,
    PosTag,
    apply_review_file,
    lemma_fingerprint,
    lemmatize,
    load_lexicon,
    load_review_file,
    tag_tokens,
    write_queue,
)
from .ranking import RankedDistribution, class_sub_ranking, distribution_csv, extract_sub_ranking, rank, rank_stream, read_csv
from .synth import MonkeyParams, ZipfParams, monkey_text, write_stream, zipf_sample
from .text_ingest import (
    FilterPolicy,
    TokenizationRules,
    apply_dictionary_filter,
    load_dictionary,
    load_rules,
    read_raw_text,
    tokenize,
    write_rejects,
)

OUTPUT_DIR_ENV = "ZIPFKIT_OUTPUT_DIR"
FIGURES = ("fig1", "fig2", "fig3", "fig4a", "fig4b")

log = logging.getLogger("zipfkit")


def _run_config(args: argparse.Namespace, argv: list[str]) -> dict:
    return {"tool": "zipfkit", "version": __version__, "subcommand": args.command, "argv": _strip_output(argv)}


def _strip_output(argv: list[str]) -> list[str]:
    out, skip = [], False
    for a in argv:
        if skip:
            skip = False
            continue
        if a in ("-o", "--output-dir"):
            skip = True
            continue
        if a.startswith("--output-dir="):
            continue
        out.append(a)
    return out


def _csv_header(run: dict) -> str:
    return f"# zipfkit {__version__}\n# run: {json.dumps(run, ensure_ascii=False, sort_keys=True)}\n"


def _write_csv(path: Path, run: dict, body: str) -> None:
    path.write_text(_csv_header(run) + body, encoding="utf-8")


def _write_json(path: Path, run: dict, payload: dict) -> None:
    payload = {"run": run, **payload}
    path.write_text(json.dumps(payload, indent=2, ensure_ascii=False, sort_keys=False) + "\n", encoding="utf-8")


def read_run_config(path: str | Path) -> dict:
    """Recover the embedded run configuration from a CSV or JSON output file."""
    text = Path(path).read_text(encoding="utf-8")
    if text.lstrip().startswith("{"):
        return json.loads(text)["run"]
    for line in text.splitlines():
        if line.startswith("# run: "):
            return json.loads(line[len("# run: "):])
        if not line.startswith("#"):
            break
    raise InputError(f"{path}: no embedded run configuration")


# -- pipeline assembly ------------------------------------------------------


def _rules(args) -> TokenizationRules:
    return load_rules(args.rules) if args.rules else TokenizationRules()


def _pipeline(args) -> PipelineConfig:
    rules = _rules(args)
    dictionary = load_dictionary(args.dictionary, rules) if args.dictionary else None
    lexicon = load_lexicon(args.lexicon, rules) if getattr(args, "lexicon", None) else None
    form = getattr(args, "form", "surface")
    return PipelineConfig(rules, dictionary, FilterPolicy(args.filter_policy), lexicon, form)


def _ingest(path: str, args, rules: TokenizationRules):
    raw = read_raw_text(path, args.language)
    stream, rejects = tokenize(raw, rules)
    misses = []
    if args.dictionary:
        stream, misses = apply_dictionary_filter(stream, load_dictionary(args.dictionary, rules), args.filter_policy)
    if len(stream) == 0:
        raise EmptyInputError(f"{path}: no word tokens")
    return stream, rejects, misses


def _tag(stream, args, rules):
    if not args.lexicon:
        raise ConfigError(f"{args.figure if args.command == 'fig' else args.command} needs --lexicon")
    lexicon = load_lexicon(args.lexicon, rules)
    tagged, queue = tag_tokens(stream, lexicon, args.disambiguation)
    if args.review:
        tagged = apply_review_file(tagged, load_review_file(args.review))
    return tagged, queue, lemma_fingerprint(stream.fingerprint, lexicon)


def _series_csv(series: list[tuple[str, RankedDistribution]]) -> str:
    buf = io.StringIO()
    out = csv.writer(buf, lineterminator="\n")
    out.writerow(["series", "rank", "word", "frequency"])
    for name, dist in series:
        for e in dist:
            f = repr(float(e.frequency)) if isinstance(e.frequency, float) else e.frequency
            out.writerow([name, e.rank, e.word, f])
    return buf.getvalue()


def _binned_csv(series: list[tuple[str, RankedDistribution]], bins: int) -> str:
    buf = io.StringIO()
    out = csv.writer(buf, lineterminator="\n")
    out.writerow(["series", "rank", "frequency"])
    for name, dist in series:
        centers, values = log_binned(dist, bins)
        for c, v in zip(centers.tolist(), values.tolist()):
            out.writerow([name, repr(c), repr(v)])
    return buf.getvalue()


def _try_fit(dist, window):
    try:
        return fit_power_law(dist, window).to_dict()
    except NumericError as exc:
        return {"error": str(exc)}


def _crossover(dist, window):
    try:
        return detect_crossover(dist, FitWindow(*map(int, window))).to_dict()
    except NumericError as exc:
        return {"error": str(exc)}


def _outdir(args) -> Path:
    out = Path(args.output_dir or os.environ.get(OUTPUT_DIR_ENV) or ".")
    out.mkdir(parents=True, exist_ok=True)
    return out


# -- subcommands ------------------------------------------------------------


def cmd_rank(args, run) -> list[Path]:
    rules = _rules(args)
    stream, rejects, misses = _ingest(args.text, args, rules)
    outdir = _outdir(args)
    stem = Path(args.text).stem
    written = []
    if args.lexicon:
        tagged, queue, fp = _tag(stream, args, rules)
        if queue:
            qpath = outdir / f"{stem}.queue.tsv"
            write_queue(queue, qpath)
            written.append(qpath)
        if args.form == "lemma":
            stream = lemmatize(tagged, fp)
    dist = rank_stream(stream)
    summary = {"text": args.text, "tokens": dist.total, "vocabulary": dist.vocabulary, "fingerprint": dist.fingerprint,
               "rejects": len(rejects), "dictionary_misses": len(misses)}
    if args.window:
        fit = fit_power_law(dist, FitWindow.parse(args.window))
        summary["fit"] = fit.to_dict()
        summary["goodness"] = goodness_report(dist, fit).to_dict()
    if args.crossover:
        summary["crossover"] = detect_crossover(dist, FitWindow.parse(args.crossover)).to_dict()
    csv_path, json_path = outdir / f"{stem}.rank.csv", outdir / f"{stem}.summary.json"
    _write_csv(csv_path, run, distribution_csv(dist))
    _write_json(json_path, run, summary)
    written += [csv_path, json_path]
    if args.rejects:
        rpath = outdir / f"{stem}.rejects.tsv"
        write_rejects(rejects + misses, rpath)
        written.append(rpath)
    if args.log_binning:
        bpath = outdir / f"{stem}.binned.csv"
        _write_csv(bpath, run, _binned_csv([(stem, dist)], args.log_binning))
        written.append(bpath)
    return written


def _distribution_input(path: str, args, rules) -> tuple[RankedDistribution, object]:
    if path.endswith(".csv"):
        dist = read_csv(path)
        if dist.vocabulary == 0:
            raise EmptyInputError(f"{path}: empty distribution")
        return dist, None
    stream, _, _ = _ingest(path, args, rules)
    return rank_stream(stream), stream


def cmd_fig(args, run) -> list[Path]:
    rules = _rules(args)
    window = FitWindow.parse(args.window)
    fig = args.figure
    payload: dict = {"figure": fig, "window": [window.r_lo, window.r_hi]}
    series: list[tuple[str, RankedDistribution]] = []

    if fig == "fig1":
        if not args.inputs:
            raise ConfigError("fig1 needs at least one input")
        payload["fits"] = {}
        for path in args.inputs:
            dist, _ = _distribution_input(path, args, rules)
            name = Path(path).stem
            series.append((name, dist))
            entry = {"tokens": dist.total, "vocabulary": dist.vocabulary, "fit": _try_fit(dist, window)}
            if args.crossover:
                entry["crossover"] = _crossover(dist, args.crossover.split(":"))
            payload["fits"][name] = entry

    elif fig in ("fig2", "fig3"):
        if len(args.inputs) != 1:
            raise ConfigError(f"{fig} takes exactly one text")
        stream, _, _ = _ingest(args.inputs[0], args, rules)
        tagged, queue, fp = _tag(stream, args, rules)
        payload["ambiguous_tokens"] = len(queue)
        full = rank_stream(stream)
        if fig == "fig2":
            ref = fit_power_law(full, window)
            payload["reference"] = {"alpha": ref.alpha, "intercept": ref.intercept}
            payload["classes"] = {}
            for tag in PosTag:
                sub = class_sub_ranking(tagged, tag, args.form)
                series.append((tag.value, sub))
                payload["classes"][tag.value] = {"tokens": sub.total, "vocabulary": sub.vocabulary, "fit": _try_fit(sub, window)}
            for spec in args.approx or []:
                name, _, listfile = spec.partition("=")
                if not listfile:
                    raise ConfigError(f"--approx expects CLASS=wordlist, got {spec!r}")
                words = [w.strip().casefold() for w in Path(listfile).read_text(encoding="utf-8").splitlines() if w.strip()]
                sub = extract_sub_ranking(full, words)
                series.append((f"approx:{name}", sub))
                payload["classes"][f"approx:{name}"] = {"tokens": sub.total, "vocabulary": sub.vocabulary, "fit": _try_fit(sub, window)}
            longest = max(d.vocabulary for _, d in series)
            ranks = np.arange(1, longest + 1)
            ref_f = 10 ** ref.predict(ranks)
            series.append(("reference", RankedDistribution([""] * longest, ref_f, real_valued=True)))
        else:
            lemma = rank_stream(lemmatize(tagged, fp))
            series += [("inflected", full), ("lemma", lemma)]
            outer = args.crossover.split(":") if args.crossover else (10, max(lemma.vocabulary, 11))
            payload["inflected"] = {"vocabulary": full.vocabulary, "fit": _try_fit(full, window)}
            payload["lemma"] = {"vocabulary": lemma.vocabulary, "fit": _try_fit(lemma, window), "crossover": _crossover(lemma, outer)}

    else:  # fig4a / fig4b
        if not (args.manifest_a and args.manifest_b):
            raise ConfigError(f"{fig} needs --manifest-a and --manifest-b")
        config = _pipeline(args)
        ma, mb = load_manifest(args.manifest_a), load_manifest(args.manifest_b)
        if args.match_size:
            sa, sb = text_sizes(ma, config), text_sizes(mb, config)
            target = min(sum(sa.values()), sum(sb.values()))
            ma, _ = trim_to_size(ma, target, TrimPolicy.TRUNCATE_LAST, sa)
            mb, _ = trim_to_size(mb, target, TrimPolicy.TRUNCATE_LAST, sb)
        da, db = rank(build_corpus(ma, config)), rank(build_corpus(mb, config))
        da.label, db.label = ma.name, mb.name
        series += [(ma.name, da), (mb.name, db)]
        report = compare(da, db, args.per_decade, args.threshold)
        payload["comparison"] = report.to_dict()
        payload["fits"] = {ma.name: _try_fit(da, window), mb.name: _try_fit(db, window)}
        outdir = _outdir(args)
        _write_csv(outdir / f"{fig}.delta.csv", run, report.to_csv())

    outdir = _outdir(args)
    csv_path, json_path = outdir / f"{fig}.series.csv", outdir / f"{fig}.fit.json"
    _write_csv(csv_path, run, _series_csv(series))
    _write_json(json_path, run, payload)
    written = [csv_path, json_path]
    if args.log_binning:
        bpath = outdir / f"{fig}.binned.csv"
        _write_csv(bpath, run, _binned_csv([s for s in series if s[0] != "reference"], args.log_binning))
        written.append(bpath)
    return written


def cmd_synth(args, run) -> list[Path]:
    if args.model == "monkey":
        stream = monkey_text(MonkeyParams(args.alphabet, args.space_prob, args.length, args.seed))
    else:
        stream = zipf_sample(ZipfParams(args.alpha, args.vocabulary, args.tokens, args.seed))
    out = Path(args.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_stream(stream, out)
    # a sidecar keeps the text itself tokenizable
    side = out.with_name(out.name + ".run.json")
    _write_json(side, run, {"tokens": len(stream)})
    return [out, side]


def cmd_fetch(args, run) -> list[Path]:
    manifest = load_manifest(args.manifest)
    for line in fetch_manifest(manifest, overwrite=args.overwrite):
        print(line)
    return []


def cmd_rerun(args, run) -> list[Path]:
    config = read_run_config(args.file)
    if config.get("version") != __version__:
        log.warning("output was written by zipfkit %s, this is %s", config.get("version"), __version__)
    argv = list(config["argv"])
    if args.output_dir:
        argv += ["--output-dir", args.output_dir]
    code = main(argv)
    if code:
        raise ZipfkitError(f"rerun failed with exit code {code}")
    return []


# -- parser -----------------------------------------------------------------


def _add_pipeline_options(p: argparse.ArgumentParser, lexicon: bool = True) -> None:
    p.add_argument("--rules", help="INI file with a [tokenization] section")
    p.add_argument("--language", default="und")
    p.add_argument("--dictionary", help="one word per line")
    p.add_argument("--filter-policy", default=FilterPolicy.KEEP_MISSES.value, choices=[f.value for f in FilterPolicy])
    if lexicon:
        p.add_argument("--lexicon", help="TSV surface, lemma, pos")
        p.add_argument("--disambiguation", default=DisambiguationMode.PRIORITY.value, choices=[m.value for m in DisambiguationMode])
        p.add_argument("--review", help="TSV position, lemma, pos answering the ambiguity queue")
        p.add_argument("--form", default="surface", choices=["surface", "lemma"])
    p.add_argument("--log-binning", type=int, metavar="BINS_PER_DECADE", help="also write log-binned series (plots only)")
    p.add_argument("-o", "--output-dir", help=f"defaults to ${OUTPUT_DIR_ENV} or the current directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="zipfkit", description="Rank-frequency analysis of texts and corpora.")
    parser.add_argument("--version", action="version", version=f"zipfkit {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rank", help="rank-frequency table of one text")
    p.add_argument("text")
    _add_pipeline_options(p)
    p.add_argument("--window", help="fit alpha over r_lo:r_hi")
    p.add_argument("--crossover", metavar="R_LO:R_HI", help="two-segment fit over this outer window")
    p.add_argument("--rejects", action="store_true", help="write erased strings and dictionary misses as TSV")

    p = sub.add_parser("fig", help="data series for one of the figures")
    p.add_argument("figure", choices=FIGURES)
    p.add_argument("inputs", nargs="*", help="texts (or rank CSVs for fig1)")
    _add_pipeline_options(p)
    p.add_argument("--window", default="10:10000")
    p.add_argument("--crossover", metavar="R_LO:R_HI")
    p.add_argument("--approx", action="append", metavar="CLASS=WORDLIST", help="fig2: type-level sub-ranking")
    p.add_argument("--manifest-a")
    p.add_argument("--manifest-b")
    p.add_argument("--match-size", action="store_true", help="fig4: trim both corpora to the smaller total")
    p.add_argument("--threshold", type=float, default=0.05)
    p.add_argument("--per-decade", type=int, default=20)

    p = sub.add_parser("synth", help="generate a synthetic text")
    p.add_argument("model", choices=["monkey", "zipf"])
    p.add_argument("output")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--alphabet", type=int, default=26, help="monkey: letters M")
    p.add_argument("--space-prob", type=float, default=0.2, help="monkey: q")
    p.add_argument("--length", type=int, default=1_000_000, help="monkey: characters")
    p.add_argument("--alpha", type=float, default=1.0, help="zipf: exponent")
    p.add_argument("--vocabulary", type=int, default=10_000, help="zipf: V")
    p.add_argument("--tokens", type=int, default=1_000_000, help="zipf: N")

    p = sub.add_parser("fetch", help="download the texts of a manifest")
    p.add_argument("manifest")
    p.add_argument("--overwrite", action="store_true")

    p = sub.add_parser("rerun", help="regenerate an output from its embedded configuration")
    p.add_argument("file")
    p.add_argument("-o", "--output-dir")
    return parser


COMMANDS = {"rank": cmd_rank, "fig": cmd_fig, "synth": cmd_synth, "fetch": cmd_fetch, "rerun": cmd_rerun}


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        for path in COMMANDS[args.command](args, _run_config(args, argv)):
            log.info("wrote %s", path)
    except ZipfkitError as exc:
        print(f"zipfkit: {exc}", file=sys.stderr)
        return exc.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
