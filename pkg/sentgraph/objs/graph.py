from typing import List, Optional, Sequence, Union

import numpy as np

from sentgraph.exceptions import Invalid, ValidationError
from sentgraph.objs.base import SentGraphObj, frozen_array
from sentgraph.similarity import SimilarityKind


class MultiLayerGraph(SentGraphObj):
    """ Represents a weighted, undirected Multi-Layer Graph over the Sentences of one Document.

        Built either from ``{"layers": [kind, ...], "adjacency": (M, n, n) array}`` or from the dump shape
        ``{"n_nodes": n, "layers": [{"kind": kind, "edges": [[i, j, w], ...]}, ...]}``.

        Attributes:
            n_nodes (int): Number of Sentences.
            layers (List[SimilarityKind]): Distinct layers in order.
            adjacency (numpy.ndarray): Read-only ``(M, n, n)`` tensor; every layer is symmetric, nonnegative
                and has a zero diagonal.
            threshold (Optional[float]): Link threshold when the graph is unweighted.
    """

    def _load(self, data):
        super()._load(data)
        layers = self._parse(attrs="layers", value_type="dict", is_list=True)
        if layers and isinstance(layers[0], dict):
            self.n_nodes = self._parse(attrs="n_nodes", value_type="int", required=True)
            self.layers = [SimilarityKind.parse(self._parse(data=layer, attrs="kind", required=True)) for layer in layers]
            adjacency = np.zeros((len(layers), self.n_nodes, self.n_nodes), dtype=float)
            for a, layer in enumerate(layers):
                for edge in self._parse(data=layer, attrs="edges", value_type="dict", is_list=True):
                    i, j, w = int(edge[0]), int(edge[1]), float(edge[2])
                    if not (0 <= i < self.n_nodes and 0 <= j < self.n_nodes):
                        raise ValidationError(f"MultiLayerGraph: edge ({i}, {j}) of layer {self.layers[a].value} "
                                              f"is out of range for {self.n_nodes} nodes")
                    adjacency[a, i, j] = adjacency[a, j, i] = w
            self.adjacency = frozen_array(adjacency)
        else:
            self.layers = [SimilarityKind.parse(layer) for layer in layers]
            self.adjacency = self._parse(attrs="adjacency", value_type="tensor", required=True)
            if self.adjacency.shape[0] != len(self.layers):
                raise Invalid(f"MultiLayerGraph: {len(self.layers)} layers but {self.adjacency.shape[0]} adjacency matrices")
            if self.adjacency.shape[1] != self.adjacency.shape[2]:
                raise Invalid(f"MultiLayerGraph: adjacency matrices must be square, got {self.adjacency.shape[1:]}")
            self.n_nodes = self.adjacency.shape[1]
        self.threshold = self._parse(attrs="threshold", value_type="float", default_is_none=True)
        if not self.layers:
            raise Invalid("MultiLayerGraph: at least one layer is required")
        if len(set(self.layers)) != len(self.layers):
            raise Invalid(f"MultiLayerGraph: layers must be distinct, got {', '.join(k.value for k in self.layers)}")
        for kind, matrix in zip(self.layers, self.adjacency):
            if not np.all(np.isfinite(matrix)) or np.any(matrix < 0):
                raise ValidationError(f"MultiLayerGraph: layer {kind.value} has negative or non-finite weights")
            if not np.array_equal(matrix, matrix.T):
                raise ValidationError(f"MultiLayerGraph: layer {kind.value} is not symmetric")
            if np.any(np.diag(matrix) != 0):
                raise ValidationError(f"MultiLayerGraph: layer {kind.value} has self-loops")
        self._finish(f"{self.n_nodes}x{','.join(k.value for k in self.layers)}")

    def __len__(self):
        return len(self.layers)

    def layer(self, kind: Union[str, SimilarityKind]) -> np.ndarray:
        """ Adjacency matrix of ``kind``.

            Raises:
                :class:`~sentgraph.exceptions.Invalid`: When the graph does not have that layer.
        """
        kind = SimilarityKind.parse(kind)
        if kind not in self.layers:
            raise Invalid(f"MultiLayerGraph has no {kind.value} layer")
        return self.adjacency[self.layers.index(kind)]

    def threshold_at(self, threshold: float) -> "MultiLayerGraph":
        """ Unweighted copy linking every pair whose weight is at least ``threshold``. """
        if not 0 < threshold < 1:
            raise Invalid(f"threshold must be in (0, 1), got {threshold}")
        return MultiLayerGraph({
            "layers": [k.value for k in self.layers],
            "adjacency": (self.adjacency >= threshold).astype(float),
            "threshold": threshold
        })

    def select_layers(self, kinds: Sequence[Union[str, SimilarityKind]]) -> "MultiLayerGraph":
        """ Sub-graph made of ``kinds``, in the given order. """
        kinds = [SimilarityKind.parse(k) for k in kinds]
        return MultiLayerGraph({
            "layers": [k.value for k in kinds],
            "adjacency": np.stack([self.layer(k) for k in kinds]) if kinds else np.zeros((0, self.n_nodes, self.n_nodes)),
            "threshold": self.threshold
        })

    def to_dict(self):
        data = {
            "n_nodes": self.n_nodes,
            "layers": [{
                "kind": kind.value,
                "edges": [[int(i), int(j), float(matrix[i, j])] for i, j in zip(*np.nonzero(np.triu(matrix, k=1)))]
            } for kind, matrix in zip(self.layers, self.adjacency)]
        }
        if self.threshold is not None:
            data["threshold"] = self.threshold
        return data
