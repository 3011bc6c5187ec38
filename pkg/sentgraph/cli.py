import argparse, json, logging, os, random, sys
from concurrent.futures import ThreadPoolExecutor
from contextlib import ExitStack, contextmanager
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from dotenv import load_dotenv

from sentgraph import __version__
from sentgraph.annotation import annotation_records, write_annotations
from sentgraph.baselines import compute_idf
from sentgraph.evaluation import aggregate, compare, comparison_table, evaluate, load_reports, plot_distributions, \
    write_reports
from sentgraph.exceptions import EmptyDocument, InsufficientData, Invalid, NotFound, ParseError, RateLimited, \
    SentGraphException, Unauthorized, ValidationError
from sentgraph.multirank import write_trace
from sentgraph.objs.config import ManifestDocument, RunManifest, centrality_readings, graph_modes, idf_sources, \
    output_orders, summary_modes, systems
from sentgraph.objs.results import RougeReport, Summary
from sentgraph.pubmed import PubMedCentralAPI, write_corpus
from sentgraph.selection import load_summary, summary_text, write_summary
from sentgraph.summarizer import SentGraph
from sentgraph.util import atomic_write

logger = logging.getLogger("sentgraph")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_VALIDATION = 3

rng_entry_points = {
    random: ["random", "seed", "shuffle", "choice", "choices", "sample", "randint", "uniform", "gauss"],
    np.random: ["default_rng", "seed", "rand", "randn", "random", "randint", "choice", "shuffle", "permutation",
                "normal", "uniform", "RandomState"]
}


class RandomnessUsed(SentGraphException):
    """ A random number generator was called during a ``--seedless`` run. """
    pass


class ArgumentParser(argparse.ArgumentParser):
    """ Exits with the usage code 1 on argument errors. """

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@contextmanager
def no_randomness(enabled: bool = True):
    """ Makes every call to the :mod:`random` and :mod:`numpy.random` generators raise :class:`RandomnessUsed`. """
    if not enabled:
        yield
        return
    with ExitStack() as stack:
        for module, names in rng_entry_points.items():
            for name in names:
                original = getattr(module, name, None)
                if original is None:
                    continue

                def guard(*args, _name=f"{module.__name__}.{name}", **kwargs):
                    raise RandomnessUsed(f"{_name} was called during a --seedless run")

                setattr(module, name, guard)
                stack.callback(setattr, module, name, original)
        yield


def _abspath(value: Optional[str]) -> Optional[str]:
    return os.path.abspath(value) if value else None


def load_manifest(args) -> RunManifest:
    """ Run Manifest from ``--manifest`` with the command-line flags applied on top. """
    data = {}
    base_dir = None
    if getattr(args, "manifest", None):
        path = Path(args.manifest)
        if not path.exists():
            raise NotFound(f"Manifest not found: {path}")
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise ParseError(e.msg, path=path, line=e.lineno)
        if not isinstance(data, dict):
            raise ParseError("manifest must be a JSON object", path=path, line=1)
        base_dir = path.parent

    def section(name, overrides):
        merged = dict(data.get(name) or {})
        merged.update({k: v for k, v in overrides.items() if v is not None})
        data[name] = merged

    layers = args.layers.split(",") if args.layers else None
    section("summary", {
        "compression_rate": args.rate, "mode": args.mode, "gamma": args.gamma, "theta": args.theta,
        "output_order": args.output_order, "centrality": args.centrality,
        "allow_extreme_weights": True if args.allow_extreme_weights else None
    })
    section("graph", {
        "mode": args.graph, "threshold": args.threshold, "layers": layers, "ngram_word": args.ngram_word,
        "ngram_concept": args.ngram_concept, "stem": True if args.stem else None,
        "remove_stopwords": True if args.remove_stopwords else None
    })
    section("multirank", {"damping": args.damping, "tolerance": args.tolerance, "max_iterations": args.max_iter})
    section("rouge", {
        "stem": True if args.rouge_stem else None,
        "remove_stopwords": True if args.rouge_remove_stopwords else None
    })
    section("lexrank", {
        "cosine_threshold": args.cosine_threshold, "idf_source": args.idf_source,
        "continuous": True if args.continuous else None
    })
    flags = {
        "system": args.system,
        "layer_weights": [float(w) for w in args.layer_weights.split(",")] if args.layer_weights else None,
        "lexicon": _abspath(args.lexicon),
        "abbreviations": _abspath(args.abbreviations),
        "idf": _abspath(args.idf),
        "trace": True if getattr(args, "trace", False) else None,
        "corpus_dir": _abspath(getattr(args, "corpus_dir", None)),
        "output_dir": _abspath(getattr(args, "output_dir", None)),
        "jobs": getattr(args, "jobs", None)
    }
    data.update({k: v for k, v in flags.items() if v is not None})
    if "jobs" not in data and os.environ.get("SENTGRAPH_JOBS"):
        data["jobs"] = os.environ["SENTGRAPH_JOBS"]
    return RunManifest(data, base_dir=base_dir)


def summarizer_for(manifest: RunManifest, corpus_idf=None) -> SentGraph:
    return SentGraph(
        graph_config=manifest.graph,
        rank_params=manifest.multirank,
        summary_config=manifest.summary,
        lexrank_config=manifest.lexrank,
        lexicon=manifest.lexicon,
        abbreviations=manifest.abbreviations,
        corpus_idf=corpus_idf if corpus_idf is not None else manifest.idf,
        layer_weights=manifest.layer_weights
    )


def read_reference(path: Path) -> str:
    if not path.exists():
        raise NotFound(f"Reference not found: {path}")
    return path.read_text(encoding="utf-8")


def cmd_annotate(args) -> int:
    api = SentGraph(lexicon=args.lexicon, abbreviations=args.abbreviations)
    doc = api.load_document(args.input)
    annotated = api.annotate(doc, annotation_paths=args.annotations)
    if args.output:
        write_annotations(args.output, annotated)
    else:
        for record in annotation_records(annotated):
            sys.stdout.write(json.dumps(record, ensure_ascii=False, sort_keys=True) + "\n")
    logger.info(f"{annotated.doc_id}: {len(annotated.concept_mentions)} mentions, {len(annotated.coref_chains)} chains")
    return EXIT_OK


def cmd_summarize(args) -> int:
    manifest = load_manifest(args)
    api = summarizer_for(manifest)
    doc = api.load_document(args.input)
    if not doc.sentences:
        raise EmptyDocument(f"Document {doc.doc_id} has no sentences")
    annotated = api.annotate(doc, annotation_paths=args.annotations)
    summary, result = api.summarize(annotated, system=manifest.system)
    if result is not None and not result.converged:
        logger.warning(f"{doc.doc_id}: solver did not converge, summary written from the last iterate")
    if args.output:
        write_summary(summary, args.output)
    if args.output_dir:
        write_summary(summary, manifest.output_dir / f"{doc.doc_id}.json")
        write_summary(summary, manifest.output_dir / f"{doc.doc_id}.txt")
    if not args.output and not args.output_dir:
        sys.stdout.write(json.dumps(summary.to_dict(), indent=2, ensure_ascii=False) + "\n")
    if args.trace_file and result is not None:
        write_trace(result, args.trace_file)
    return EXIT_OK


def _system_text(path: Path):
    if path.suffix.lower() == ".json":
        summary = load_summary(path)
        return summary.sentences or summary.text, summary.doc_id
    if not path.exists():
        raise NotFound(f"Summary not found: {path}")
    lines = [line.strip() for line in path.read_text(encoding="utf-8").splitlines()]
    return [line for line in lines if line], path.stem


def cmd_evaluate(args) -> int:
    system, doc_id = _system_text(Path(args.summary))
    reference = read_reference(Path(args.reference))
    report = evaluate(system, reference, doc_id=args.doc_id or doc_id, stem=args.stem,
                      remove_stopwords=args.remove_stopwords)
    for warning in report.warnings:
        logger.warning(f"{report.doc_id}: {warning}")
    if args.output:
        write_reports([report], args.output)
    else:
        sys.stdout.write(json.dumps(report.rows(), indent=2) + "\n")
    return EXIT_OK


def _run_document(api: SentGraph, manifest: RunManifest, entry: ManifestDocument) -> Tuple[Summary, Optional[RougeReport]]:
    doc = api.load_document(entry.input, doc_id=entry.doc_id)
    annotated = api.annotate(doc, annotation_paths=entry.annotations or None)
    summary, result = api.summarize(annotated, system=manifest.system)
    summaries = manifest.output_dir / "summaries"
    write_summary(summary, summaries / f"{entry.doc_id}.json")
    write_summary(summary, summaries / f"{entry.doc_id}.txt")
    if manifest.trace and result is not None:
        write_trace(result, manifest.output_dir / "traces" / f"{entry.doc_id}.csv")
    report = None
    if entry.reference:
        report = evaluate(summary.sentences, read_reference(entry.reference), doc_id=entry.doc_id,
                          stem=manifest.rouge.stem, remove_stopwords=manifest.rouge.remove_stopwords)
        for warning in report.warnings:
            logger.warning(f"{entry.doc_id}: {warning}")
    logger.info(f"{entry.doc_id}: selected {summary.indices}")
    return summary, report


def _try_document(api: SentGraph, manifest: RunManifest, entry: ManifestDocument):
    try:
        return _run_document(api, manifest, entry)
    except (SentGraphException, OSError) as e:
        logger.error(f"{entry.doc_id}: {e}")
        return e


def run_corpus(manifest: RunManifest) -> Tuple[List[RougeReport], Dict[str, BaseException]]:
    """ Summarizes and evaluates every Document of ``manifest``, writing all outputs under its output directory.

        Documents are processed by ``manifest.jobs`` threads; reports are merged in doc_id order. A Document
        that fails is logged, listed under ``failures`` in ``config.json`` and skipped; the others still run.

        Returns:
            Tuple[List[RougeReport], Dict[str, BaseException]]: Reports, and the error of each failed doc_id.
    """
    manifest.check_paths()
    corpus_idf = None
    if manifest.system == "lexrank" and manifest.lexrank.idf_source == "corpus" and manifest.idf is None:
        loader = SentGraph(abbreviations=manifest.abbreviations)
        corpus_idf = compute_idf(loader.load_document(d.input, doc_id=d.doc_id) for d in manifest.documents)
    api = summarizer_for(manifest, corpus_idf=corpus_idf)
    if manifest.jobs > 1:
        with ThreadPoolExecutor(max_workers=manifest.jobs) as executor:
            outcomes = list(executor.map(lambda d: _try_document(api, manifest, d), manifest.documents))
    else:
        outcomes = [_try_document(api, manifest, d) for d in manifest.documents]
    failures = {d.doc_id: o for d, o in zip(manifest.documents, outcomes) if isinstance(o, BaseException)}
    reports = sorted((o[1] for o in outcomes if not isinstance(o, BaseException) and o[1] is not None),
                     key=lambda r: r.doc_id)
    settings = {k: v for k, v in manifest.to_dict().items() if k not in ("jobs", "output_dir")}
    settings["failures"] = [{"doc_id": doc_id, "error": str(e)} for doc_id, e in failures.items()]
    atomic_write(manifest.output_dir / "config.json", json.dumps(settings, indent=2) + "\n")
    if reports:
        rows = reports + [aggregate(reports)]
        write_reports(rows, manifest.output_dir / "reports.json")
        write_reports(rows, manifest.output_dir / "reports.csv")
    return reports, failures


def cmd_corpus_run(args) -> int:
    manifest = load_manifest(args)
    reports, failures = run_corpus(manifest)
    logger.info(f"Summarized {len(manifest.documents) - len(failures)} documents, {len(reports)} evaluated, "
                f"outputs in {manifest.output_dir}")
    if failures:
        logger.error(f"{len(failures)} document(s) failed: {', '.join(failures)}")
        return exit_code(next(iter(failures.values())))
    return EXIT_OK


def cmd_compare(args) -> int:
    reports_a = load_reports(args.reports_a)
    reports_b = load_reports(args.reports_b)
    cells = compare(reports_a, reports_b)
    sys.stdout.write(comparison_table(cells))
    if args.output:
        atomic_write(args.output, json.dumps([c.to_dict() for c in cells], indent=2) + "\n")
    if args.histogram:
        plot_distributions(reports_a, reports_b, args.histogram, labels=tuple(args.labels))
    return EXIT_OK


def cmd_fetch(args) -> int:
    api = PubMedCentralAPI(api_key=args.api_key or os.environ.get("SENTGRAPH_NCBI_API_KEY"),
                           email=args.email or os.environ.get("SENTGRAPH_NCBI_EMAIL"))
    ids = list(args.ids or [])
    if args.query:
        ids.extend(api.search_ids(args.query, retmax=args.retmax))
    if not ids:
        raise Invalid("fetch needs --ids or a --query with results")
    written = write_corpus(api.fetch_articles(ids), args.output_dir)
    for path in written:
        sys.stdout.write(f"{path}\n")
    return EXIT_OK


def _add_run_options(parser: argparse.ArgumentParser):
    group = parser.add_argument_group("run options")
    group.add_argument("--manifest", help="JSON run manifest; flags override its values")
    group.add_argument("--system", choices=systems, help="summarization system (default: multirank)")
    group.add_argument("--rate", type=float, help="compression rate in (0, 1] (default: 0.2)")
    group.add_argument("--mode", choices=summary_modes, help="selection mode (default: basic)")
    group.add_argument("--gamma", type=float, help="centrality weight of the enhanced mode")
    group.add_argument("--theta", type=float, help="concept-density weight of the enhanced mode")
    group.add_argument("--allow-extreme-weights", action="store_true", help="accept gamma and theta outside [-1, 1]")
    group.add_argument("--output-order", choices=output_orders, help="order of the selected sentences")
    group.add_argument("--centrality", choices=centrality_readings, help="centrality reading of the enhanced score")
    group.add_argument("--layers", help="comma-separated layers out of semantic,word,coref")
    group.add_argument("--graph", choices=graph_modes, help="graph mode (default: weighted)")
    group.add_argument("--threshold", type=float, help="link threshold of the unweighted mode")
    group.add_argument("--ngram-word", type=int, help="n-gram order of the word layer (default: 2)")
    group.add_argument("--ngram-concept", type=int, help="n-gram order of the semantic layer (default: 1)")
    group.add_argument("--stem", action="store_true", help="Porter-stem words for word similarity")
    group.add_argument("--remove-stopwords", action="store_true", help="drop stopwords for word similarity")
    group.add_argument("--rouge-stem", action="store_true", help="Porter-stem words for ROUGE")
    group.add_argument("--rouge-remove-stopwords", action="store_true", help="drop stopwords for ROUGE")
    group.add_argument("--damping", type=float, help="damping factor (default: 0.85)")
    group.add_argument("--tolerance", type=float, help="L1 convergence tolerance (default: 1e-9)")
    group.add_argument("--max-iter", type=int, help="iteration cap (default: 1000)")
    group.add_argument("--cosine-threshold", type=float, help="LexRank cosine threshold (default: 0.1)")
    group.add_argument("--idf-source", choices=idf_sources, help="LexRank IDF source (default: document)")
    group.add_argument("--continuous", action="store_true", help="continuous LexRank edge weights")
    group.add_argument("--idf", help="IDF sidecar TSV for --idf-source corpus")
    group.add_argument("--layer-weights", help="comma-separated layer weights of the average system")
    group.add_argument("--lexicon", help="lexicon TSV for dictionary annotation")
    group.add_argument("--abbreviations", help="abbreviation guard list")
    group.add_argument("--seedless", action="store_true", help="fail if any random number generator is used")


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(prog="sentgraph", description="Multi-layer sentence-graph extractive summarizer.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", default=None, help="diagnostics level on stderr (default: WARNING)")
    commands = parser.add_subparsers(dest="command", metavar="command")
    commands.required = True

    annotate = commands.add_parser("annotate", help="annotate a document with concepts and co-reference chains")
    annotate.add_argument("input", help="document (.txt or .json)")
    annotate.add_argument("--lexicon", help="lexicon TSV")
    annotate.add_argument("--annotations", nargs="+", help="annotation files to merge instead of the lexicon")
    annotate.add_argument("--abbreviations", help="abbreviation guard list")
    annotate.add_argument("-o", "--output", help="annotation JSONL (default: stdout)")
    annotate.set_defaults(func=cmd_annotate)

    summarize = commands.add_parser("summarize", help="summarize one document")
    summarize.add_argument("input", help="document (.txt or .json)")
    summarize.add_argument("--annotations", nargs="+", help="annotation files (default: lexicon annotation)")
    summarize.add_argument("-o", "--output", help="summary file, JSON for .json and plain text otherwise (default: stdout JSON)")
    summarize.add_argument("--output-dir", help="write <doc_id>.json and <doc_id>.txt summaries here")
    summarize.add_argument("--trace-file", help="write the convergence trace CSV here")
    _add_run_options(summarize)
    summarize.set_defaults(func=cmd_summarize)

    evaluate_cmd = commands.add_parser("evaluate", help="ROUGE scores of a summary against its reference")
    evaluate_cmd.add_argument("summary", help="summary (.json or plain text, one sentence per line)")
    evaluate_cmd.add_argument("reference", help="reference summary text")
    evaluate_cmd.add_argument("--doc-id", help="doc_id of the report")
    evaluate_cmd.add_argument("--stem", action="store_true", help="Porter-stem words")
    evaluate_cmd.add_argument("--remove-stopwords", action="store_true", help="drop stopwords")
    evaluate_cmd.add_argument("-o", "--output", help="report file, JSON for .json and CSV otherwise (default: stdout JSON)")
    evaluate_cmd.set_defaults(func=cmd_evaluate)

    corpus = commands.add_parser("corpus-run", help="summarize and evaluate a corpus")
    corpus.add_argument("--corpus-dir", help="corpus directory of <id>.txt, <id>.ref.txt and <id>.jsonl files")
    corpus.add_argument("--output-dir", help="output directory (default: output)")
    corpus.add_argument("--jobs", type=int, help="worker threads (default: SENTGRAPH_JOBS or 1)")
    corpus.add_argument("--trace", action="store_true", help="write convergence traces")
    _add_run_options(corpus)
    corpus.set_defaults(func=cmd_corpus_run)

    compare_cmd = commands.add_parser("compare", help="paired Wilcoxon comparison of two report sets")
    compare_cmd.add_argument("reports_a", help="reports of the first system")
    compare_cmd.add_argument("reports_b", help="reports of the second system")
    compare_cmd.add_argument("-o", "--output", help="comparison cells as JSON")
    compare_cmd.add_argument("--histogram", help="write F-measure histograms to this image")
    compare_cmd.add_argument("--labels", nargs=2, default=["A", "B"], help="system labels of the histograms")
    compare_cmd.set_defaults(func=cmd_compare)

    fetch = commands.add_parser("fetch", help="download open-access PMC articles as a corpus")
    fetch.add_argument("--ids", nargs="+", help="PMC IDs")
    fetch.add_argument("--query", help="Entrez query")
    fetch.add_argument("--retmax", type=int, default=20, help="maximum number of query results")
    fetch.add_argument("--output-dir", required=True, help="corpus directory")
    fetch.add_argument("--api-key", help="NCBI API key (default: SENTGRAPH_NCBI_API_KEY)")
    fetch.add_argument("--email", help="contact e-mail (default: SENTGRAPH_NCBI_EMAIL)")
    fetch.set_defaults(func=cmd_fetch)
    return parser


def exit_code(error: BaseException) -> int:
    """ Exit code of an error: 1 usage, 2 I/O, 3 validation. """
    if isinstance(error, (EmptyDocument, ParseError, ValidationError, InsufficientData)):
        return EXIT_VALIDATION
    if isinstance(error, Invalid):
        return EXIT_USAGE
    if isinstance(error, (NotFound, Unauthorized, RateLimited, OSError, SentGraphException)):
        return EXIT_IO
    return EXIT_IO


def main(argv: Optional[Sequence[str]] = None) -> int:
    load_dotenv()
    args = build_parser().parse_args(argv)
    level = (args.log_level or os.environ.get("SENTGRAPH_LOG_LEVEL") or "WARNING").upper()
    if not isinstance(logging.getLevelName(level), int):
        build_parser().error(f"unknown log level {level}")
    logging.basicConfig(stream=sys.stderr, level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        with no_randomness(getattr(args, "seedless", False)):
            return args.func(args)
    except (SentGraphException, OSError) as e:
        logger.error(str(e))
        return exit_code(e)


if __name__ == "__main__":
    sys.exit(main())
