import pkg_resources

from sentgraph.summarizer import SentGraph
from sentgraph.pubmed import PubMedCentralAPI
from sentgraph.similarity import SimilarityKind
from sentgraph.objs.text import Token, Sentence, Document
from sentgraph.objs.annotation import LexiconEntry, ConceptMention, CorefChain, AnnotatedDocument
from sentgraph.objs.config import GraphBuildConfig, MultiRankParams, SummaryConfig, LexRankConfig, RougeConfig, \
    ManifestDocument, RunManifest
from sentgraph.objs.graph import MultiLayerGraph
from sentgraph.objs.results import DerivedNetworks, CentralityResult, Summary, RougeScore, RougeReport, \
    WilcoxonResult, ComparisonCell
from sentgraph.exceptions import SentGraphException, Invalid, EmptyDocument, NotFound, ParseError, ValidationError, \
    InsufficientData, Unauthorized, RateLimited

try:
    __version__ = pkg_resources.get_distribution("sentgraph").version
except pkg_resources.DistributionNotFound:
    __version__ = ""
__author__ = "SentGraph Contributors"
__credits__ = "SentGraph Contributors"
__package_name__ = "sentgraph"
__project_name__ = "SentGraph"
__description__ = "Extractive summarization of biomedical articles over a multi-layer sentence graph."
__url__ = "https://github.com/sentgraph/sentgraph"
__email__ = "sentgraph@users.noreply.github.com"
__license__ = "MIT License"
__all__ = [
    "SentGraph",
    "PubMedCentralAPI",
    "SimilarityKind",
    "Token",
    "Sentence",
    "Document",
    "LexiconEntry",
    "ConceptMention",
    "CorefChain",
    "AnnotatedDocument",
    "GraphBuildConfig",
    "MultiRankParams",
    "SummaryConfig",
    "LexRankConfig",
    "RougeConfig",
    "ManifestDocument",
    "RunManifest",
    "MultiLayerGraph",
    "DerivedNetworks",
    "CentralityResult",
    "Summary",
    "RougeScore",
    "RougeReport",
    "WilcoxonResult",
    "ComparisonCell",
    "SentGraphException",
    "Invalid",
    "EmptyDocument",
    "NotFound",
    "ParseError",
    "ValidationError",
    "InsufficientData",
    "Unauthorized",
    "RateLimited"
]
