import logging
from pathlib import Path
from typing import Dict, Optional, Sequence, Tuple, Union

from sentgraph import annotation, baselines, evaluation, graph, multirank, selection, text
from sentgraph.exceptions import EmptyDocument, Invalid
from sentgraph.objs.annotation import AnnotatedDocument, LexiconEntry
from sentgraph.objs.config import GraphBuildConfig, LexRankConfig, MultiRankParams, SummaryConfig, systems
from sentgraph.objs.graph import MultiLayerGraph
from sentgraph.objs.results import CentralityResult, RougeReport, Summary
from sentgraph.objs.text import Document

logger = logging.getLogger(__name__)


class SentGraph:
    """ Main Object Class

        Parameters:
            graph_config (Optional[Union[GraphBuildConfig, Dict]]): Graph construction options.
            rank_params (Optional[Union[MultiRankParams, Dict]]): MultiRank solver options.
            summary_config (Optional[Union[SummaryConfig, Dict]]): Sentence selection options.
            lexrank_config (Optional[Union[LexRankConfig, Dict]]): LexRank baseline options.
            lexicon (Optional[Union[str, Path, Mapping]]): Lexicon for dictionary annotation, or its TSV file.
            abbreviations (Optional[Union[str, Path, Iterable[str]]]): Abbreviation guard list, or its file.
            corpus_idf (Optional[Union[str, Path, Mapping[str, float]]]): Corpus IDF table, or its sidecar TSV.
            layer_weights (Optional[Sequence[float]]): Layer weights of the average baseline.

        Attributes:
            graph_config (GraphBuildConfig): Graph construction options.
            rank_params (MultiRankParams): MultiRank solver options.
            summary_config (SummaryConfig): Sentence selection options.
            lexrank_config (LexRankConfig): LexRank baseline options.
            lexicon (Dict[str, LexiconEntry]): Lexicon.
            abbreviations (frozenset): Abbreviation guard list.
    """
    def __init__(self, graph_config=None, rank_params=None, summary_config=None, lexrank_config=None,
                 lexicon=None, abbreviations=None, corpus_idf=None, layer_weights: Optional[Sequence[float]] = None):
        self.graph_config = graph_config
        self.rank_params = rank_params
        self.summary_config = summary_config
        self.lexrank_config = lexrank_config
        self.lexicon = lexicon
        self.abbreviations = abbreviations
        self.corpus_idf = corpus_idf
        self.layer_weights = layer_weights

    @staticmethod
    def _validate_config(value, config_class):
        if value is None:
            return config_class()
        elif isinstance(value, config_class):
            return value
        elif isinstance(value, dict):
            return config_class(value)
        else:
            raise Invalid(f"{config_class.__name__}: {value!r} must be a {config_class.__name__} or a dict")

    @staticmethod
    def _validate_system(system):
        if str(system).lower() not in systems:
            raise Invalid(f"system: {system} is invalid. Options: {', '.join(systems)}")
        return str(system).lower()

    @property
    def graph_config(self) -> GraphBuildConfig:
        return self._graph_config

    @graph_config.setter
    def graph_config(self, value):
        self._graph_config = self._validate_config(value, GraphBuildConfig)

    @property
    def rank_params(self) -> MultiRankParams:
        return self._rank_params

    @rank_params.setter
    def rank_params(self, value):
        self._rank_params = self._validate_config(value, MultiRankParams)

    @property
    def summary_config(self) -> SummaryConfig:
        return self._summary_config

    @summary_config.setter
    def summary_config(self, value):
        self._summary_config = self._validate_config(value, SummaryConfig)

    @property
    def lexrank_config(self) -> LexRankConfig:
        return self._lexrank_config

    @lexrank_config.setter
    def lexrank_config(self, value):
        self._lexrank_config = self._validate_config(value, LexRankConfig)

    @property
    def lexicon(self) -> Dict[str, LexiconEntry]:
        return self._lexicon

    @lexicon.setter
    def lexicon(self, value):
        if value is None:
            self._lexicon = {}
        elif isinstance(value, (str, Path)):
            self._lexicon = annotation.load_lexicon(value)
        else:
            self._lexicon = dict(value)

    @property
    def abbreviations(self) -> frozenset:
        return self._abbreviations

    @abbreviations.setter
    def abbreviations(self, value):
        if value is None:
            self._abbreviations = text.DEFAULT_ABBREVIATIONS
        elif isinstance(value, (str, Path)):
            self._abbreviations = text.load_abbreviations(value)
        else:
            self._abbreviations = frozenset(a.lower() for a in value)

    @property
    def corpus_idf(self) -> Optional[Dict[str, float]]:
        return self._corpus_idf

    @corpus_idf.setter
    def corpus_idf(self, value):
        if value is None:
            self._corpus_idf = None
        elif isinstance(value, (str, Path)):
            self._corpus_idf = baselines.load_idf(value)
        else:
            self._corpus_idf = dict(value)

    def document(self, raw_text: str, doc_id: str = "document") -> Document:
        """ Segments ``raw_text`` into a :class:`~sentgraph.objs.text.Document` with the configured abbreviations.

            Parameters:
                raw_text (str): Document text.
                doc_id (str): Document ID.
        """
        return text.build_document(doc_id, raw_text, abbreviations=self.abbreviations)

    def load_document(self, path: Union[str, Path], doc_id: Optional[str] = None) -> Document:
        """ Loads a ``.txt`` or ``.json`` Document, see :func:`sentgraph.text.load_document`. """
        return text.load_document(path, abbreviations=self.abbreviations, doc_id=doc_id)

    def annotate(self, doc: Document, annotation_paths: Optional[Sequence[Union[str, Path]]] = None) -> AnnotatedDocument:
        """ Annotates ``doc`` from interchange files, or with the configured Lexicon when none are given.

            Parameters:
                doc (:class:`~sentgraph.objs.text.Document`): Document.
                annotation_paths (Optional[Sequence[Union[str, Path]]]): Annotation files whose Mentions are merged.
        """
        return annotation.annotate(doc, lexicon=self.lexicon, annotation_paths=annotation_paths)

    def build_graph(self, annotated: AnnotatedDocument) -> MultiLayerGraph:
        """ Multi-Layer Graph of ``annotated`` under :attr:`graph_config`. """
        return graph.build_graph(annotated, self.graph_config)

    def rank(self, sentence_graph: MultiLayerGraph) -> CentralityResult:
        """ MultiRank centralities of ``sentence_graph`` under :attr:`rank_params`. """
        return multirank.multirank(sentence_graph, self.rank_params)

    def summarize(self, annotated: AnnotatedDocument, system: str = "multirank") -> Tuple[Summary, Optional[CentralityResult]]:
        """ Summarizes an Annotated Document.

            Parameters:
                annotated (:class:`~sentgraph.objs.annotation.AnnotatedDocument`): Annotated Document.
                system (str): ``multirank`` (Basic or Enhanced selection per :attr:`summary_config`), ``lexrank``
                    or ``average`` (weighted average of per-layer PageRanks).

            Returns:
                Tuple[Summary, Optional[CentralityResult]]: The centrality result is ``None`` for ``average``.

            Raises:
                :class:`~sentgraph.exceptions.Invalid`: When ``system`` is unknown.
                :class:`~sentgraph.exceptions.EmptyDocument`: When the Document has no Sentences.
        """
        system = self._validate_system(system)
        if system == "lexrank":
            if not annotated.document.sentences:
                raise EmptyDocument(f"Document {annotated.doc_id} has no sentences")
            result = baselines.lexrank_scores(annotated.document, corpus_idf=self.corpus_idf, cfg=self.lexrank_config)
            summary = selection.select(selection.min_max_normalize(result.x), annotated.document, self.summary_config)
            return summary, result
        sentence_graph = self.build_graph(annotated)
        if system == "average":
            scores = baselines.simple_weighted_average(sentence_graph, self.layer_weights, damping=self.rank_params.damping)
            return selection.summarize_centrality(annotated, scores, self.summary_config), None
        result = self.rank(sentence_graph)
        return selection.summarize_centrality(annotated, result.x, self.summary_config), result

    def evaluate(self, summary: Union[Summary, str], reference_text: Union[str, Sequence[str]]) -> RougeReport:
        """ ROUGE report of ``summary`` against ``reference_text``.

            Parameters:
                summary (Union[Summary, str]): Summary, or system text.
                reference_text (Union[str, Sequence[str]]): Reference text, or its sentences.
        """
        if isinstance(summary, Summary):
            return evaluation.evaluate(summary.sentences, reference_text, doc_id=summary.doc_id)
        return evaluation.evaluate(summary, reference_text)
