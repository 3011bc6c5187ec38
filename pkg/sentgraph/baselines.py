import csv, io, logging, math
from collections import Counter
from pathlib import Path
from typing import Dict, Iterable, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from sentgraph.exceptions import Invalid, NotFound, ParseError
from sentgraph.multirank import pagerank, pagerank_result
from sentgraph.objs.config import LexRankConfig, SummaryConfig
from sentgraph.objs.graph import MultiLayerGraph
from sentgraph.objs.results import CentralityResult, Summary
from sentgraph.objs.text import Document
from sentgraph.selection import min_max_normalize, select
from sentgraph.text import terms
from sentgraph.util import atomic_write

logger = logging.getLogger(__name__)


def document_frequencies(documents: Iterable[Document]) -> Tuple[Counter, int]:
    """ Number of Documents containing every term, and the number of Documents. """
    frequencies = Counter()
    size = 0
    for doc in documents:
        size += 1
        frequencies.update({t for s in doc.sentences for t in terms(s.tokens)})
    return frequencies, size


def compute_idf(documents: Iterable[Document]) -> Dict[str, float]:
    """ Corpus IDF ``log(N / df)`` where every Document counts as one document. """
    frequencies, size = document_frequencies(documents)
    return {term: math.log(size / df) for term, df in sorted(frequencies.items())}


def write_idf(path: Union[str, Path], documents: Iterable[Document]):
    """ Writes the IDF sidecar TSV with the columns ``term``, ``document_frequency`` and ``corpus_size``. """
    frequencies, size = document_frequencies(documents)
    buffer = io.StringIO()
    writer = csv.writer(buffer, delimiter="\t", lineterminator="\n", quoting=csv.QUOTE_NONE, escapechar="\\")
    writer.writerow(["term", "document_frequency", "corpus_size"])
    for term, df in sorted(frequencies.items()):
        writer.writerow([term, df, size])
    atomic_write(path, buffer.getvalue())


def load_idf(path: Union[str, Path]) -> Dict[str, float]:
    """ Loads an IDF sidecar TSV into ``term -> log(corpus_size / document_frequency)``.

        Raises:
            :class:`~sentgraph.exceptions.NotFound`: When the file does not exist.
            :class:`~sentgraph.exceptions.ParseError`: When a row is malformed.
    """
    path = Path(path)
    if not path.exists():
        raise NotFound(f"IDF file not found: {path}")
    idf = {}
    with path.open(encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle, delimiter="\t", quoting=csv.QUOTE_NONE, escapechar="\\")
        for line_number, row in enumerate(reader, start=1):
            if not row or (line_number == 1 and row[0] == "term"):
                continue
            if len(row) != 3:
                raise ParseError(f"expected 3 tab-separated columns, found {len(row)}", path=path, line=line_number)
            try:
                df, size = int(row[1]), int(row[2])
            except ValueError as e:
                raise ParseError(str(e), path=path, line=line_number)
            if df < 1 or size < df:
                raise ParseError(f"document_frequency {df} must be in [1, corpus_size {size}]", path=path, line=line_number)
            idf[row[0]] = math.log(size / df)
    logger.debug(f"Loaded {len(idf)} IDF terms from {path}")
    return idf


def tfidf_cosine(doc: Document, idf: Optional[Mapping[str, float]] = None) -> np.ndarray:
    """ TF-IDF cosine similarity between all Sentences.

        Without ``idf`` every Sentence counts as one document (``log(n / df)``). Terms missing from ``idf``
        get the largest IDF of the table.
    """
    bags = [Counter(terms(s.tokens)) for s in doc.sentences]
    vocabulary = sorted({t for bag in bags for t in bag})
    if idf is None:
        df = Counter(t for bag in bags for t in bag)
        weights = {t: math.log(len(bags) / df[t]) for t in vocabulary}
    else:
        unseen = max(idf.values()) if idf else 0.0
        weights = {t: idf.get(t, unseen) for t in vocabulary}
    column = {t: c for c, t in enumerate(vocabulary)}
    vectors = np.zeros((len(bags), len(vocabulary)))
    for row, bag in enumerate(bags):
        for term, count in bag.items():
            vectors[row, column[term]] = count * weights[term]
    norms = np.linalg.norm(vectors, axis=1)
    unit = np.divide(vectors, norms[:, None], out=np.zeros_like(vectors), where=norms[:, None] > 0)
    cosine = np.clip(unit @ unit.T, 0.0, 1.0)
    np.fill_diagonal(cosine, 0.0)
    return cosine


def lexrank_adjacency(doc: Document, idf: Optional[Mapping[str, float]] = None,
                      cfg: Optional[LexRankConfig] = None) -> np.ndarray:
    """ Thresholded LexRank graph: pairs with a positive cosine of at least ``cosine_threshold`` are linked
        with weight 1, or with their cosine when ``continuous`` is set. """
    cfg = cfg or LexRankConfig()
    cosine = tfidf_cosine(doc, idf)
    keep = (cosine >= cfg.cosine_threshold) & (cosine > 0)
    return np.where(keep, cosine if cfg.continuous else 1.0, 0.0)


def _idf_for(cfg: LexRankConfig, corpus_idf: Optional[Mapping[str, float]]) -> Optional[Mapping[str, float]]:
    if cfg.idf_source == "corpus":
        if corpus_idf is None:
            raise Invalid("idf_source is corpus but no IDF table was given")
        return corpus_idf
    if corpus_idf is not None:
        logger.debug("idf_source is document, corpus IDF ignored")
    return None


def lexrank_scores(doc: Document, corpus_idf: Optional[Mapping[str, float]] = None,
                   cfg: Optional[LexRankConfig] = None) -> CentralityResult:
    """ LexRank centrality of the Sentences of ``doc``.

        Raises:
            :class:`~sentgraph.exceptions.Invalid`: When ``doc`` is empty or a corpus IDF is required but missing.
    """
    cfg = cfg or LexRankConfig()
    if not doc.sentences:
        raise Invalid(f"Document {doc.doc_id} has no sentences")
    adjacency = lexrank_adjacency(doc, _idf_for(cfg, corpus_idf), cfg)
    logger.debug(f"Document {doc.doc_id}: lexrank graph has {int(np.count_nonzero(adjacency) / 2)} edges")
    return pagerank_result(adjacency, damping=cfg.damping)


def lexrank_summarize(doc: Document, corpus_idf: Optional[Mapping[str, float]] = None,
                      cfg: Optional[LexRankConfig] = None, rate: Union[float, SummaryConfig] = 0.2) -> Summary:
    """ LexRank Summary of ``doc``.

        Parameters:
            doc (:class:`~sentgraph.objs.text.Document`): Nonempty Document.
            corpus_idf (Optional[Mapping[str, float]]): Corpus IDF table, used when ``idf_source`` is ``corpus``.
            cfg (Optional[:class:`~sentgraph.objs.config.LexRankConfig`]): LexRank options.
            rate (Union[float, SummaryConfig]): Compression rate, or a full selection config.
    """
    summary_cfg = rate if isinstance(rate, SummaryConfig) else SummaryConfig({"compression_rate": rate})
    result = lexrank_scores(doc, corpus_idf=corpus_idf, cfg=cfg)
    return select(min_max_normalize(result.x), doc, summary_cfg)


def simple_weighted_average(graph: MultiLayerGraph, layer_weights: Optional[Sequence[float]] = None,
                            damping: float = 0.85) -> np.ndarray:
    """ Weighted average of the PageRank of every layer, ranked separately.

        Parameters:
            graph (:class:`~sentgraph.objs.graph.MultiLayerGraph`): Graph.
            layer_weights (Optional[Sequence[float]]): Nonnegative weight per layer, uniform by default.
            damping (float): PageRank damping factor.

        Returns:
            numpy.ndarray: Scores summing to 1.

        Raises:
            :class:`~sentgraph.exceptions.Invalid`: When the weights are negative, all zero or of the wrong length.
    """
    weights = np.ones(len(graph.layers)) if layer_weights is None else np.asarray(layer_weights, dtype=float)
    if weights.shape != (len(graph.layers),):
        raise Invalid(f"layer_weights must have one entry per layer ({len(graph.layers)}), got {weights.tolist()}")
    if np.any(weights < 0) or not np.any(weights > 0):
        raise Invalid(f"layer_weights must be nonnegative and not all zero, got {weights.tolist()}")
    ranks = np.stack([pagerank(matrix, damping=damping) for matrix in graph.adjacency])
    return weights @ ranks / weights.sum()
