from typing import Dict, List, Optional, Tuple

import numpy as np

from sentgraph.exceptions import Invalid, ValidationError
from sentgraph.objs.base import SentGraphObj
from sentgraph.similarity import SimilarityKind

rouge_metrics = ["ROUGE-1", "ROUGE-2", "ROUGE-L", "ROUGE-SU4"]
facets = ["recall", "precision", "f"]
mean_doc_id = "__mean__"


class DerivedNetworks(SentGraphObj):
    """ Represents the networks derived from a Multi-Layer Graph for one influence vector.

        Attributes:
            layer_weights (numpy.ndarray): Aggregate network, total weight of every layer.
            bipartite (numpy.ndarray): ``(M, n)`` layer-node participation; every row of a layer with positive
                weight sums to 1, rows of empty layers are zero.
            colored (numpy.ndarray): ``(n, n)`` influence-weighted adjacency.
    """

    def _load(self, data):
        super()._load(data)
        self.layer_weights = self._parse(attrs="layer_weights", value_type="vector", required=True)
        self.bipartite = self._parse(attrs="bipartite", value_type="matrix", required=True)
        self.colored = self._parse(attrs="colored", value_type="matrix", required=True)
        self._finish(f"{len(self.layer_weights)}x{self.colored.shape[0]}")

    def to_dict(self):
        return {
            "layer_weights": self.layer_weights.tolist(),
            "bipartite": self.bipartite.tolist(),
            "colored": self.colored.tolist()
        }


class CentralityResult(SentGraphObj):
    """ Represents the outcome of a centrality solver.

        Attributes:
            x (numpy.ndarray): Node centralities, nonnegative, summing to 1.
            z (numpy.ndarray): Layer influences, summing to the number of layers (empty for single-graph
                solvers such as LexRank).
            layers (List[SimilarityKind]): Layers ``z`` refers to.
            iterations (int): Iterations run.
            final_residual (float): Largest L1 change of the last iteration.
            converged (bool): Whether the tolerance was reached.
            trace (List[Tuple[int, float, float]]): ``(iteration, residual_x, residual_z)`` per iteration.
    """

    def _load(self, data):
        super()._load(data)
        self.x = self._parse(attrs="x", value_type="vector", required=True)
        self.z = self._parse(attrs="z", value_type="vector")
        if self.z is None:
            self.z = np.zeros(0)
        self.layers = [SimilarityKind.parse(k) for k in self._parse(attrs="layers", is_list=True)]
        self.iterations = self._parse(attrs="iterations", value_type="int")
        self.final_residual = self._parse(attrs="final_residual", value_type="float")
        self.converged = bool(self._parse(attrs="converged", value_type="bool"))
        self.trace = [(int(i), float(rx), float(rz)) for i, rx, rz in self._parse(attrs="trace", value_type="dict", is_list=True)]
        self._finish(f"{len(self.x)} nodes")

    @property
    def influences(self) -> Dict[str, float]:
        """ Layer influence by layer name. """
        return {k.value: float(z) for k, z in zip(self.layers, self.z)}

    def to_dict(self):
        return {
            "x": self.x.tolist(),
            "z": self.z.tolist(),
            "layers": [k.value for k in self.layers],
            "iterations": self.iterations,
            "final_residual": self.final_residual,
            "converged": self.converged,
            "trace": [list(t) for t in self.trace]
        }


class Summary(SentGraphObj):
    """ Represents an extractive Summary.

        Attributes:
            doc_id (str): Summarized Document.
            k (int): Number of selected Sentences.
            selected (List[Tuple[int, float]]): ``(sentence_index, score)`` in output order.
            sentences (List[str]): Selected Sentence texts in output order.
            text (str): Selected Sentence texts joined with single spaces.
    """

    def _load(self, data):
        super()._load(data)
        self.doc_id = self._parse(attrs="doc_id", required=True)
        indices = self._parse(attrs="indices", value_type="int", is_list=True)
        scores = self._parse(attrs="scores", value_type="float", is_list=True)
        if len(indices) != len(scores):
            raise ValidationError(f"Summary {self.doc_id}: {len(indices)} indices but {len(scores)} scores")
        if len(set(indices)) != len(indices):
            raise ValidationError(f"Summary {self.doc_id}: selected indices must be distinct")
        self.selected = list(zip(indices, scores))
        self.k = self._parse(attrs="k", value_type="int", default_is_none=True)
        if self.k is None:
            self.k = len(indices)
        elif self.k != len(indices):
            raise ValidationError(f"Summary {self.doc_id}: k is {self.k} but {len(indices)} sentences are selected")
        self.sentences = self._parse(attrs="sentences", is_list=True)
        self.text = self._parse(attrs="text")
        if self.text is None:
            self.text = " ".join(self.sentences)
        self._finish(self.doc_id)

    @property
    def indices(self) -> List[int]:
        return [i for i, _ in self.selected]

    @property
    def scores(self) -> List[float]:
        return [s for _, s in self.selected]

    def to_dict(self):
        return {
            "doc_id": self.doc_id,
            "k": self.k,
            "indices": self.indices,
            "scores": self.scores,
            "sentences": self.sentences,
            "text": self.text
        }


class RougeScore(SentGraphObj):
    """ Represents the recall, precision and F-measure of one ROUGE metric.

        Attributes:
            recall (float): Recall.
            precision (float): Precision.
            f_measure (float): Harmonic mean of recall and precision, 0 when both are 0.
            warning (Optional[str]): Set when an input was empty and the score defaulted to 0.
    """

    def _load(self, data):
        super()._load(data)
        self.recall = self._parse(attrs="recall", value_type="float")
        self.precision = self._parse(attrs="precision", value_type="float")
        for attr in ["recall", "precision"]:
            if not 0 <= getattr(self, attr) <= 1:
                raise ValidationError(f"RougeScore: {attr} must be in [0, 1], got {getattr(self, attr)}")
        if "f" in self._data:
            self.f_measure = self._parse(attrs="f", value_type="float")
        else:
            total = self.recall + self.precision
            self.f_measure = 2 * self.recall * self.precision / total if total > 0 else 0.0
        self.warning = self._parse(attrs="warning", default_is_none=True)
        self._finish(f"F={self.f_measure:.4f}")

    def facet(self, name: str) -> float:
        """ ``recall``, ``precision`` or ``f``. """
        if name not in facets:
            raise Invalid(f"facet: {name} is invalid. Options: {', '.join(facets)}")
        return self.f_measure if name == "f" else getattr(self, name)

    def to_dict(self):
        data = {"recall": self.recall, "precision": self.precision, "f": self.f_measure}
        if self.warning:
            data["warning"] = self.warning
        return data


class RougeReport(SentGraphObj):
    """ Represents the ROUGE-1, ROUGE-2, ROUGE-L and ROUGE-SU4 scores of one Document.

        Attributes:
            doc_id (str): Document ID, ``__mean__`` for a corpus aggregate.
            scores (Dict[str, :class:`RougeScore`]): Score per metric.
    """

    def _load(self, data):
        super()._load(data)
        self.doc_id = self._parse(attrs="doc_id", required=True)
        scores = self._parse(attrs="scores", value_type="dict", required=True)
        missing = [m for m in rouge_metrics if m not in scores]
        if missing:
            raise ValidationError(f"RougeReport {self.doc_id}: missing metric(s) {', '.join(missing)}")
        self.scores = {m: self._parse(data=scores[m], value_type=RougeScore) for m in rouge_metrics}
        self._finish(self.doc_id)

    def __getitem__(self, metric):
        return self.scores[metric]

    @property
    def warnings(self) -> List[str]:
        return [f"{m}: {s.warning}" for m, s in self.scores.items() if s.warning]

    def rows(self) -> List[dict]:
        """ One flat row per metric with the columns ``doc_id, metric, recall, precision, f``. """
        return [{"doc_id": self.doc_id, "metric": m, "recall": s.recall, "precision": s.precision, "f": s.f_measure}
                for m, s in self.scores.items()]

    def to_dict(self):
        return {"doc_id": self.doc_id, "scores": {m: s.to_dict() for m, s in self.scores.items()}}


class WilcoxonResult(SentGraphObj):
    """ Represents a two-sided Wilcoxon signed-rank test.

        Attributes:
            statistic (float): Smaller of the positive and negative rank sums.
            p_value (float): Two-sided p-value in (0, 1].
            n (int): Number of nonzero differences.
            method (str): ``exact`` or ``normal``.
    """

    def _load(self, data):
        super()._load(data)
        self.statistic = self._parse(attrs="statistic", value_type="float")
        self.p_value = self._parse(attrs="p_value", value_type="float")
        self.n = self._parse(attrs="n", value_type="int")
        self.method = self._parse(attrs="method") or "exact"
        self._finish(f"p={self.p_value:.3g}")

    def __iter__(self):
        return iter((self.statistic, self.p_value))

    def to_dict(self):
        return {"statistic": self.statistic, "p_value": self.p_value, "n": self.n, "method": self.method}


class ComparisonCell(SentGraphObj):
    """ Represents one cell of a paired system comparison.

        Attributes:
            metric (str): ROUGE metric.
            facet (str): ``recall``, ``precision`` or ``f``.
            statistic (Optional[float]): Wilcoxon statistic, ``None`` when data is insufficient.
            p_value (Optional[float]): Two-sided p-value, ``None`` when data is insufficient.
            n (int): Number of nonzero differences.
            display (str): ``*`` when not significant (p > 0.05), the p-value in scientific notation otherwise,
                ``n/a`` when data is insufficient.
    """

    def _load(self, data):
        super()._load(data)
        self.metric = self._parse(attrs="metric", required=True)
        self.facet = self._parse(attrs="facet", required=True)
        self.statistic = self._parse(attrs="statistic", value_type="float", default_is_none=True)
        self.p_value = self._parse(attrs="p_value", value_type="float", default_is_none=True)
        self.n = self._parse(attrs="n", value_type="int")
        if self.p_value is None:
            self.display = "n/a"
        elif self.p_value > 0.05:
            self.display = "*"
        else:
            self.display = f"{self.p_value:.2e}"
        self._finish(f"{self.metric}/{self.facet}")

    @property
    def significant(self) -> bool:
        return self.p_value is not None and self.p_value <= 0.05

    def to_dict(self):
        return {
            "metric": self.metric,
            "facet": self.facet,
            "statistic": self.statistic,
            "p_value": self.p_value,
            "n": self.n,
            "display": self.display
        }
