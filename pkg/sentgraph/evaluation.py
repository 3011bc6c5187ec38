import csv, io, json, logging
from collections import Counter, OrderedDict
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.stats import norm, rankdata

from sentgraph.exceptions import Invalid, InsufficientData, NotFound, ParseError, ValidationError
from sentgraph.objs.results import (ComparisonCell, RougeReport, RougeScore, WilcoxonResult, facets, mean_doc_id,
                                    rouge_metrics)
from sentgraph.text import ngrams, segment_spans, terms, tokenize
from sentgraph.util import atomic_write

logger = logging.getLogger(__name__)

EXACT_LIMIT = 25
MIN_PAIRS = 5
SKIP_DISTANCE = 4
DIFFERENCE_DECIMALS = 12

TextInput = Union[str, Sequence[str]]


def rouge_sentences(text: TextInput, stem: bool = False, remove_stopwords: bool = False) -> List[List[str]]:
    """ Lowercased, punctuation-free term sequences of every sentence of ``text``.

        A string is segmented into sentences; a sequence is taken as already segmented. Sentences without
        terms are dropped.
    """
    if isinstance(text, str):
        text = [text[start:end] for start, end in segment_spans(text)]
    sentences = [terms(tokenize(s), stem=stem, remove_stopwords=remove_stopwords) for s in text]
    return [s for s in sentences if s]


def lcs_length(x: Sequence, y: Sequence) -> int:
    """ Length of the longest common subsequence of ``x`` and ``y``. """
    if len(x) < len(y):
        x, y = y, x
    previous = [0] * (len(y) + 1)
    for item in x:
        current = [0]
        for j, other in enumerate(y, start=1):
            current.append(previous[j - 1] + 1 if item == other else max(previous[j], current[j - 1]))
        previous = current
    return previous[-1]


def _lcs_hits(reference: Sequence, candidate: Sequence) -> List[int]:
    """ Positions of ``reference`` on one longest common subsequence with ``candidate``. """
    m, n = len(reference), len(candidate)
    table = [[0] * (n + 1) for _ in range(m + 1)]
    for i in range(1, m + 1):
        for j in range(1, n + 1):
            if reference[i - 1] == candidate[j - 1]:
                table[i][j] = table[i - 1][j - 1] + 1
            else:
                table[i][j] = max(table[i - 1][j], table[i][j - 1])
    hits = []
    i, j = m, n
    while i > 0 and j > 0:
        if reference[i - 1] == candidate[j - 1]:
            hits.append(i - 1)
            i, j = i - 1, j - 1
        elif table[i - 1][j] >= table[i][j - 1]:
            i -= 1
        else:
            j -= 1
    return hits


def _score(overlap: float, reference_count: float, system_count: float, warning: Optional[str] = None) -> RougeScore:
    return RougeScore({
        "recall": overlap / reference_count if reference_count > 0 else 0.0,
        "precision": overlap / system_count if system_count > 0 else 0.0,
        "warning": warning
    })


def _empty_warning(system: List[List[str]], reference: List[List[str]]) -> Optional[str]:
    if not reference and not system:
        return "empty system and reference"
    if not reference:
        return "empty reference"
    if not system:
        return "empty system"
    return None


def _clipped(system_grams: Counter, reference_grams: Counter, label: str, warning: Optional[str]) -> RougeScore:
    if warning:
        logger.warning(f"{label}: {warning}, score set to 0")
        return _score(0, 0, 0, warning=warning)
    overlap = sum((system_grams & reference_grams).values())
    return _score(overlap, sum(reference_grams.values()), sum(system_grams.values()))


def rouge_n(system: TextInput, reference: TextInput, n: int, stem: bool = False, remove_stopwords: bool = False) -> RougeScore:
    """ ROUGE-N: clipped n-gram overlap over reference (recall) and system (precision) n-gram counts.

        N-grams do not cross sentence boundaries.

        Raises:
            :class:`~sentgraph.exceptions.Invalid`: When ``n`` is less than 1.
    """
    sys_sents = rouge_sentences(system, stem=stem, remove_stopwords=remove_stopwords)
    ref_sents = rouge_sentences(reference, stem=stem, remove_stopwords=remove_stopwords)
    system_grams = sum((ngrams(s, n) for s in sys_sents), Counter())
    reference_grams = sum((ngrams(s, n) for s in ref_sents), Counter())
    return _clipped(system_grams, reference_grams, f"ROUGE-{n}", _empty_warning(sys_sents, ref_sents))


def skip_bigrams(items: Sequence, max_skip: int = SKIP_DISTANCE) -> Counter:
    """ Ordered pairs with at most ``max_skip`` items between them, with multiplicity. """
    pairs = Counter()
    for i in range(len(items)):
        for j in range(i + 1, min(len(items), i + max_skip + 2)):
            pairs[(items[i], items[j])] += 1
    return pairs


def rouge_su4(system: TextInput, reference: TextInput, stem: bool = False, remove_stopwords: bool = False) -> RougeScore:
    """ ROUGE-SU4: skip-bigrams with up to 4 intervening words plus unigrams, clipped overlap. """
    sys_sents = rouge_sentences(system, stem=stem, remove_stopwords=remove_stopwords)
    ref_sents = rouge_sentences(reference, stem=stem, remove_stopwords=remove_stopwords)
    system_grams = Counter()
    reference_grams = Counter()
    for sentences, grams in ((sys_sents, system_grams), (ref_sents, reference_grams)):
        for sentence in sentences:
            grams.update(skip_bigrams(sentence))
            grams.update(ngrams(sentence, 1))
    return _clipped(system_grams, reference_grams, "ROUGE-SU4", _empty_warning(sys_sents, ref_sents))


def rouge_l(system: TextInput, reference: TextInput, stem: bool = False, remove_stopwords: bool = False) -> RougeScore:
    """ Summary-level ROUGE-L.

        For every reference sentence the positions on a longest common subsequence with each system sentence
        are united; the hits, clipped by the unigram counts of both sides, are divided by the reference length
        (recall) and the system length (precision).
    """
    sys_sents = rouge_sentences(system, stem=stem, remove_stopwords=remove_stopwords)
    ref_sents = rouge_sentences(reference, stem=stem, remove_stopwords=remove_stopwords)
    warning = _empty_warning(sys_sents, ref_sents)
    if warning:
        logger.warning(f"ROUGE-L: {warning}, score set to 0")
        return _score(0, 0, 0, warning=warning)
    system_unigrams = Counter(t for s in sys_sents for t in s)
    reference_unigrams = Counter(t for s in ref_sents for t in s)
    overlap = 0
    for reference_sentence in ref_sents:
        hits = set()
        for system_sentence in sys_sents:
            hits.update(_lcs_hits(reference_sentence, system_sentence))
        for position in sorted(hits):
            token = reference_sentence[position]
            if system_unigrams[token] > 0 and reference_unigrams[token] > 0:
                system_unigrams[token] -= 1
                reference_unigrams[token] -= 1
                overlap += 1
    return _score(overlap, sum(len(s) for s in ref_sents), sum(len(s) for s in sys_sents))


def evaluate(system: TextInput, reference: TextInput, doc_id: str = "document", stem: bool = False,
             remove_stopwords: bool = False) -> RougeReport:
    """ ROUGE-1, ROUGE-2, ROUGE-L and ROUGE-SU4 of one system text against its reference. """
    options = {"stem": stem, "remove_stopwords": remove_stopwords}
    return RougeReport({"doc_id": doc_id, "scores": {
        "ROUGE-1": rouge_n(system, reference, 1, **options),
        "ROUGE-2": rouge_n(system, reference, 2, **options),
        "ROUGE-L": rouge_l(system, reference, **options),
        "ROUGE-SU4": rouge_su4(system, reference, **options)
    }})


def aggregate(reports: Sequence[RougeReport]) -> RougeReport:
    """ Macro average of ``reports`` with doc_id ``__mean__``, folded in doc_id order.

        Raises:
            :class:`~sentgraph.exceptions.Invalid`: When there is nothing to average.
    """
    reports = sorted((r for r in reports if r.doc_id != mean_doc_id), key=lambda r: r.doc_id)
    if not reports:
        raise Invalid("cannot aggregate an empty report set")
    scores = {}
    for metric in rouge_metrics:
        totals = {"recall": 0.0, "precision": 0.0, "f": 0.0}
        for report in reports:
            for facet in facets:
                totals[facet] += report[metric].facet(facet)
        scores[metric] = {facet: total / len(reports) for facet, total in totals.items()}
    return RougeReport({"doc_id": mean_doc_id, "scores": scores})


def write_reports(reports: Sequence[RougeReport], path: Union[str, Path]):
    """ Writes report rows ``doc_id, metric, recall, precision, f`` as JSON (``.json``) or CSV. """
    path = Path(path)
    rows = [row for report in reports for row in report.rows()]
    if path.suffix.lower() == ".json":
        atomic_write(path, json.dumps(rows, indent=2) + "\n")
    else:
        buffer = io.StringIO()
        writer = csv.DictWriter(buffer, fieldnames=["doc_id", "metric", "recall", "precision", "f"], lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})
        atomic_write(path, buffer.getvalue())


def load_reports(path: Union[str, Path]) -> List[RougeReport]:
    """ Loads reports written by :func:`write_reports`, in file order.

        Raises:
            :class:`~sentgraph.exceptions.NotFound`: When the file does not exist.
            :class:`~sentgraph.exceptions.ParseError`: When the file is malformed.
    """
    path = Path(path)
    if not path.exists():
        raise NotFound(f"Report file not found: {path}")
    if path.suffix.lower() == ".json":
        try:
            rows = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise ParseError(e.msg, path=path, line=e.lineno)
        if not isinstance(rows, list):
            raise ParseError("report file must hold a JSON list of rows", path=path)
        numbered = list(enumerate(rows, start=1))
    else:
        with path.open(encoding="utf-8", newline="") as handle:
            numbered = [(line, row) for line, row in enumerate(csv.DictReader(handle), start=2)]
    grouped = OrderedDict()
    for line, row in numbered:
        try:
            metric = row["metric"]
            if metric not in rouge_metrics:
                raise ParseError(f"unknown metric {metric!r}", path=path, line=line)
            grouped.setdefault(str(row["doc_id"]), {})[metric] = {
                "recall": float(row["recall"]), "precision": float(row["precision"]), "f": float(row["f"])
            }
        except (KeyError, TypeError, ValueError) as e:
            raise ParseError(f"malformed report row: {e}", path=path, line=line)
    try:
        return [RougeReport({"doc_id": doc_id, "scores": scores}) for doc_id, scores in grouped.items()]
    except ValidationError as e:
        raise ParseError(str(e), path=path)


def _signed_ranks(a: Sequence[float], b: Sequence[float]) -> Tuple[np.ndarray, np.ndarray]:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise Invalid(f"paired samples must have the same length, got {a.shape} and {b.shape}")
    differences = np.round(a - b, DIFFERENCE_DECIMALS)
    differences = differences[differences != 0]
    if len(differences) < MIN_PAIRS:
        raise InsufficientData(f"the signed-rank test needs at least {MIN_PAIRS} nonzero differences, got {len(differences)}")
    return differences, rankdata(np.abs(differences))


def _exact_p(ranks: np.ndarray, positive_sum: float) -> float:
    doubled = np.rint(ranks * 2).astype(int)
    total = int(doubled.sum())
    counts = np.zeros(total + 1)
    counts[0] = 1
    for rank in doubled:
        shifted = np.zeros_like(counts)
        shifted[rank:] = counts[:-rank]
        counts = counts + shifted
    observed = abs(int(round(positive_sum * 2)) * 2 - total)
    sums = np.arange(total + 1)
    extreme = np.abs(2 * sums - total) >= observed
    return float(counts[extreme].sum() / counts.sum())


def _normal_p(ranks: np.ndarray, positive_sum: float) -> float:
    n = len(ranks)
    mean = n * (n + 1) / 4.0
    _, ties = np.unique(ranks, return_counts=True)
    variance = n * (n + 1) * (2 * n + 1) / 24.0 - float(((ties ** 3) - ties).sum()) / 48.0
    if variance <= 0:
        return 1.0
    z = max(abs(positive_sum - mean) - 0.5, 0.0) / np.sqrt(variance)
    return float(min(1.0, 2 * norm.sf(z)))


def wilcoxon_signed_rank(a: Sequence[float], b: Sequence[float], method: str = "auto") -> WilcoxonResult:
    """ Two-sided Wilcoxon signed-rank test of paired samples.

        Zero differences are dropped (differences are compared at 12 decimals) and tied absolute differences
        get averaged ranks. The p-value is exact for at most 25 nonzero differences, enumerating the null
        distribution of the positive rank sum, and otherwise uses the normal approximation with continuity
        and tie corrections.

        Parameters:
            a (Sequence[float]): First sample.
            b (Sequence[float]): Second sample, paired with ``a``.
            method (str): ``auto``, ``exact`` or ``normal``.

        Returns:
            :class:`~sentgraph.objs.results.WilcoxonResult`: The statistic is the smaller rank sum.

        Raises:
            :class:`~sentgraph.exceptions.Invalid`: When the lengths differ or ``method`` is unknown.
            :class:`~sentgraph.exceptions.InsufficientData`: When fewer than 5 differences are nonzero.
    """
    if method not in ("auto", "exact", "normal"):
        raise Invalid(f"method: {method} is invalid. Options: auto, exact, normal")
    differences, ranks = _signed_ranks(a, b)
    positive_sum = float(ranks[differences > 0].sum())
    negative_sum = float(ranks[differences < 0].sum())
    if method == "auto":
        method = "exact" if len(ranks) <= EXACT_LIMIT else "normal"
    p_value = _exact_p(ranks, positive_sum) if method == "exact" else _normal_p(ranks, positive_sum)
    return WilcoxonResult({
        "statistic": min(positive_sum, negative_sum),
        "p_value": p_value,
        "n": len(ranks),
        "method": method
    })


def _paired(reports_a: Sequence[RougeReport], reports_b: Sequence[RougeReport]) -> List[Tuple[RougeReport, RougeReport]]:
    by_id_a = {r.doc_id: r for r in reports_a if r.doc_id != mean_doc_id}
    by_id_b = {r.doc_id: r for r in reports_b if r.doc_id != mean_doc_id}
    missing_b = sorted(set(by_id_a) - set(by_id_b))
    missing_a = sorted(set(by_id_b) - set(by_id_a))
    if missing_a or missing_b:
        problems = []
        if missing_b:
            problems.append(f"missing from the second set: {', '.join(missing_b)}")
        if missing_a:
            problems.append(f"missing from the first set: {', '.join(missing_a)}")
        raise ValidationError(f"Report sets do not cover the same documents; {'; '.join(problems)}")
    return [(by_id_a[d], by_id_b[d]) for d in sorted(by_id_a)]


def compare(reports_a: Sequence[RougeReport], reports_b: Sequence[RougeReport]) -> List[ComparisonCell]:
    """ Paired Wilcoxon comparison of two systems, one cell per metric and facet.

        Raises:
            :class:`~sentgraph.exceptions.ValidationError`: When the sets do not cover the same doc_ids.
    """
    pairs = _paired(reports_a, reports_b)
    cells = []
    for metric in rouge_metrics:
        for facet in facets:
            a = [x[metric].facet(facet) for x, _ in pairs]
            b = [y[metric].facet(facet) for _, y in pairs]
            try:
                result = wilcoxon_signed_rank(a, b)
                cells.append(ComparisonCell({"metric": metric, "facet": facet, "statistic": result.statistic,
                                             "p_value": result.p_value, "n": result.n}))
            except InsufficientData as e:
                logger.warning(f"{metric} {facet}: {e}")
                cells.append(ComparisonCell({"metric": metric, "facet": facet}))
    return cells


def comparison_table(cells: Sequence[ComparisonCell]) -> str:
    """ Metric by facet table of display values, tab-separated. """
    lines = ["\t".join(["metric"] + facets)]
    for metric in rouge_metrics:
        row = {c.facet: c.display for c in cells if c.metric == metric}
        lines.append("\t".join([metric] + [row.get(f, "n/a") for f in facets]))
    return "\n".join(lines) + "\n"


def plot_distributions(reports_a: Sequence[RougeReport], reports_b: Sequence[RougeReport], path: Union[str, Path],
                       labels: Tuple[str, str] = ("A", "B"), bins: int = 20):
    """ Draws the per-document F-measure histograms of two systems, one panel per metric. """
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig, axes = plt.subplots(nrows=2, ncols=2, figsize=(10, 8))
    edges = np.linspace(0.0, 1.0, bins + 1)
    for ax, metric in zip(axes.flat, rouge_metrics):
        for reports, label in zip((reports_a, reports_b), labels):
            values = [r[metric].f_measure for r in reports if r.doc_id != mean_doc_id]
            ax.hist(values, bins=edges, alpha=0.6, label=label)
        ax.set_title(metric)
        ax.set_xlabel("F-measure")
        ax.set_ylabel("documents")
        ax.legend()
    fig.tight_layout()
    fig.savefig(str(path), dpi=150)
    plt.close(fig)
    logger.debug(f"Wrote {path}")
