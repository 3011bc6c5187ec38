import json, logging
from pathlib import Path
from typing import List, Optional, Sequence, Union

import numpy as np
from scipy.stats import rankdata

from sentgraph.exceptions import Invalid, NotFound, ParseError
from sentgraph.objs.annotation import AnnotatedDocument
from sentgraph.objs.config import SummaryConfig
from sentgraph.objs.results import Summary
from sentgraph.objs.text import Document
from sentgraph.util import atomic_write

logger = logging.getLogger(__name__)

TIE_DECIMALS = 12


def len_con(annotated: AnnotatedDocument) -> np.ndarray:
    """ Share of the Document's Concept Mentions found in every Sentence, all zeros without Mentions. """
    counts = np.array([len(m) for m in annotated.mentions_by_sentence()], dtype=float)
    total = counts.sum()
    return counts / total if total > 0 else np.zeros_like(counts)


def min_max_normalize(values: Sequence[float]) -> np.ndarray:
    """ Rescales ``values`` to [0, 1]; a constant vector maps to all zeros.

        Raises:
            :class:`~sentgraph.exceptions.Invalid`: When ``values`` is empty.
    """
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise Invalid("cannot normalize an empty vector")
    low, high = values.min(), values.max()
    if high == low:
        return np.zeros_like(values)
    return (values - low) / (high - low)


def rank_indices(scores: Sequence[float]) -> List[int]:
    """ Indices by descending score; scores equal to 12 decimals are tied and the smaller index comes first. """
    rounded = np.round(np.asarray(scores, dtype=float), TIE_DECIMALS)
    return sorted(range(len(rounded)), key=lambda i: (-rounded[i], i))


def score_basic(x: Sequence[float]) -> List[int]:
    """ Sentence ranking by centrality, highest first, ties broken by the smaller index. """
    return rank_indices(x)


def score_enhanced(x: Sequence[float], lencon: Sequence[float], gamma: float, theta: float,
                   centrality: str = "value") -> np.ndarray:
    """ Combined score ``minmax(gamma * c + theta * lencon)``.

        Parameters:
            x (Sequence[float]): Centralities.
            lencon (Sequence[float]): Concept density per Sentence, see :func:`len_con`.
            gamma (float): Centrality weight.
            theta (float): Concept-density weight.
            centrality (str): ``value`` uses ``c = minmax(x)``, ``rank`` uses the min-max normalized rank of
                ``x`` (ties averaged).

        Raises:
            :class:`~sentgraph.exceptions.Invalid`: When the lengths differ or ``centrality`` is unknown.
    """
    x = np.asarray(x, dtype=float)
    lencon = np.asarray(lencon, dtype=float)
    if x.shape != lencon.shape:
        raise Invalid(f"centrality and lencon lengths differ: {x.shape} vs {lencon.shape}")
    if centrality == "value":
        reading = min_max_normalize(x)
    elif centrality == "rank":
        reading = min_max_normalize(rankdata(x))
    else:
        raise Invalid(f"centrality: {centrality} is invalid. Options: value, rank")
    return min_max_normalize(gamma * reading + theta * lencon)


def target_count(n: int, rate: float) -> int:
    """ Number of Sentences kept: ``rate * n`` rounded half up, at least 1. """
    return max(1, int(np.floor(rate * n + 0.5)))


def select(scores: Sequence[float], doc: Document, cfg: Optional[SummaryConfig] = None,
           ranking: Optional[Sequence[int]] = None) -> Summary:
    """ Keeps the top Sentences under the compression rate.

        Parameters:
            scores (Sequence[float]): Score per Sentence.
            doc (:class:`~sentgraph.objs.text.Document`): Summarized Document.
            cfg (Optional[:class:`~sentgraph.objs.config.SummaryConfig`]): Compression rate and output order.
            ranking (Optional[Sequence[int]]): Precomputed ranking, defaults to :func:`rank_indices` of
                ``scores``.

        Raises:
            :class:`~sentgraph.exceptions.Invalid`: When ``scores`` does not have one entry per Sentence.
    """
    cfg = cfg or SummaryConfig()
    scores = np.asarray(scores, dtype=float)
    n = len(doc.sentences)
    if n == 0:
        raise Invalid(f"Document {doc.doc_id} has no sentences to select")
    if scores.shape != (n,):
        raise Invalid(f"Document {doc.doc_id}: expected {n} scores, got shape {scores.shape}")
    ranking = list(ranking) if ranking is not None else rank_indices(scores)
    k = target_count(n, cfg.compression_rate)
    chosen = ranking[:k]
    if cfg.output_order == "document":
        chosen = sorted(chosen)
    logger.debug(f"Document {doc.doc_id}: selected {chosen} of {n} sentences")
    return Summary({
        "doc_id": doc.doc_id,
        "k": k,
        "indices": chosen,
        "scores": [float(scores[i]) for i in chosen],
        "sentences": [doc.sentences[i].text for i in chosen]
    })


def summarize_centrality(annotated: AnnotatedDocument, x: Sequence[float], cfg: Optional[SummaryConfig] = None) -> Summary:
    """ Basic or Enhanced selection from centralities, as configured. """
    cfg = cfg or SummaryConfig()
    if cfg.mode == "enhanced":
        scores = score_enhanced(x, len_con(annotated), cfg.gamma, cfg.theta, centrality=cfg.centrality)
    else:
        scores = min_max_normalize(x)
    return select(scores, annotated.document, cfg)


def summary_text(summary: Summary) -> str:
    """ Plain-text Summary, one Sentence per line. """
    return "".join(f"{s}\n" for s in summary.sentences)


def write_summary(summary: Summary, path: Union[str, Path]):
    """ Writes ``summary`` atomically, as JSON for a ``.json`` path and as plain text otherwise. """
    path = Path(path)
    if path.suffix.lower() == ".json":
        atomic_write(path, json.dumps(summary.to_dict(), indent=2, ensure_ascii=False) + "\n")
    else:
        atomic_write(path, summary_text(summary))


def load_summary(path: Union[str, Path]) -> Summary:
    """ Loads a JSON Summary written by :func:`write_summary`.

        Raises:
            :class:`~sentgraph.exceptions.NotFound`: When the file does not exist.
            :class:`~sentgraph.exceptions.ParseError`: When the file is not valid JSON.
    """
    path = Path(path)
    if not path.exists():
        raise NotFound(f"Summary not found: {path}")
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, path=path, line=e.lineno)
    return Summary(data)
