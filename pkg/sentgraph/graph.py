import json, logging
from pathlib import Path
from typing import Optional, Union

import numpy as np

from sentgraph.exceptions import EmptyDocument, NotFound, ParseError
from sentgraph.objs.annotation import AnnotatedDocument
from sentgraph.objs.config import GraphBuildConfig
from sentgraph.objs.graph import MultiLayerGraph
from sentgraph.similarity import similarity_matrix
from sentgraph.util import atomic_write

logger = logging.getLogger(__name__)


def build_graph(annotated: AnnotatedDocument, cfg: Optional[GraphBuildConfig] = None) -> MultiLayerGraph:
    """ Builds the Multi-Layer Graph of an Annotated Document.

        Every selected layer holds the pairwise similarity of its kind. In the weighted mode the raw scores
        are stored, in the unweighted mode a pair is linked (weight 1) when its score is at least the
        threshold. Layers are computed independently, so adding layers never changes another layer.

        Parameters:
            annotated (:class:`~sentgraph.objs.annotation.AnnotatedDocument`): Annotated Document.
            cfg (Optional[:class:`~sentgraph.objs.config.GraphBuildConfig`]): Build options, defaults to a
                weighted graph with every layer.

        Raises:
            :class:`~sentgraph.exceptions.EmptyDocument`: When the Document has no Sentences.
    """
    cfg = cfg or GraphBuildConfig()
    if not annotated.document.sentences:
        raise EmptyDocument(f"Document {annotated.doc_id} has no sentences")
    adjacency = np.stack([similarity_matrix(annotated, kind, cfg) for kind in cfg.kinds])
    threshold = None
    if cfg.mode == "unweighted":
        threshold = cfg.threshold
        adjacency = (adjacency >= threshold).astype(float)
        for matrix in adjacency:
            np.fill_diagonal(matrix, 0.0)
    graph = MultiLayerGraph({"layers": cfg.layers, "adjacency": adjacency, "threshold": threshold})
    logger.debug(f"Document {annotated.doc_id}: built {graph}")
    return graph


def save_graph(graph: MultiLayerGraph, path: Union[str, Path]):
    """ Writes the JSON dump ``{n_nodes, layers: [{kind, edges: [[i, j, w], ...]}]}`` with ``i < j``. """
    atomic_write(path, json.dumps(graph.to_dict(), indent=2))


def load_graph(path: Union[str, Path]) -> MultiLayerGraph:
    """ Loads a graph written by :func:`save_graph`.

        Raises:
            :class:`~sentgraph.exceptions.NotFound`: When the file does not exist.
            :class:`~sentgraph.exceptions.ParseError`: When the file is not valid JSON.
    """
    path = Path(path)
    if not path.exists():
        raise NotFound(f"Graph file not found: {path}")
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, path=path, line=e.lineno)
    return MultiLayerGraph(data)
