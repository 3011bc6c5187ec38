from pathlib import Path
from typing import List, Optional

from sentgraph.exceptions import Invalid, NotFound, ValidationError
from sentgraph.objs.base import SentGraphObj
from sentgraph.similarity import SimilarityKind

graph_modes = ["weighted", "unweighted"]
summary_modes = ["basic", "enhanced"]
output_orders = ["document", "score"]
centrality_readings = ["value", "rank"]
idf_sources = ["document", "corpus"]
systems = ["multirank", "lexrank", "average"]


class SentGraphConfig(SentGraphObj):
    """ Base object for validated configuration. """

    defaults = {}

    def _load(self, data):
        merged = dict(self.defaults)
        merged.update({k: v for k, v in (data or {}).items() if v is not None})
        unknown = sorted(set(merged) - set(self.defaults))
        if unknown:
            raise Invalid(f"{type(self).__name__}: unknown option(s) {', '.join(unknown)}")
        super()._load(merged)

    def _value(self, attr, value_type="str"):
        try:
            return self._parse(attrs=attr, value_type=value_type, default_is_none=True)
        except ValidationError as e:
            raise Invalid(str(e))

    def replace(self, **overrides):
        """ Copy of this configuration with ``overrides`` applied; ``None`` values are ignored. """
        data = self.to_dict()
        data.update({k: v for k, v in overrides.items() if v is not None})
        return type(self)(data)

    def to_dict(self):
        return {k: getattr(self, k) for k in self.defaults}


class GraphBuildConfig(SentGraphConfig):
    """ Multi-Layer Graph construction options.

        Attributes:
            mode (str): ``weighted`` keeps raw similarities, ``unweighted`` links pairs at or above ``threshold``.
            threshold (Optional[float]): Link threshold in (0, 1) for the unweighted mode.
            layers (List[str]): Selected layers, distinct, in layer order.
            ngram_word (int): N-gram order of the word layer.
            ngram_concept (int): N-gram order of the semantic layer.
            stem (bool): Porter-stem words before word similarity.
            remove_stopwords (bool): Drop stopwords before word similarity.
    """

    defaults = {
        "mode": "weighted",
        "threshold": None,
        "layers": ["semantic", "word", "coref"],
        "ngram_word": 2,
        "ngram_concept": 1,
        "stem": False,
        "remove_stopwords": False
    }

    def _load(self, data):
        super()._load(data)
        self.mode = str(self._value("mode")).lower()
        if self.mode not in graph_modes:
            raise Invalid(f"mode: {self.mode} is invalid. Options: {', '.join(graph_modes)}")
        self.threshold = self._value("threshold", "float")
        if self.mode == "unweighted":
            if self.threshold is None or not 0 < self.threshold < 1:
                raise Invalid(f"threshold must be in (0, 1) for the unweighted mode, got {self.threshold}")
        layers = self._data["layers"]
        if isinstance(layers, str):
            layers = [layer.strip() for layer in layers.split(",") if layer.strip()]
        self.layers = [SimilarityKind.parse(layer).value for layer in layers]
        if not self.layers:
            raise Invalid("layers must select at least one layer")
        if len(set(self.layers)) != len(self.layers):
            raise Invalid(f"layers must be distinct, got {', '.join(self.layers)}")
        self.ngram_word = self._value("ngram_word", "int")
        self.ngram_concept = self._value("ngram_concept", "int")
        for attr in ["ngram_word", "ngram_concept"]:
            if getattr(self, attr) < 1:
                raise Invalid(f"{attr} must be an integer >= 1")
        self.stem = self._value("stem", "bool")
        self.remove_stopwords = self._value("remove_stopwords", "bool")
        self._finish(f"{self.mode}:{','.join(self.layers)}")

    @property
    def kinds(self) -> List[SimilarityKind]:
        return [SimilarityKind(layer) for layer in self.layers]


class MultiRankParams(SentGraphConfig):
    """ MultiRank solver parameters.

        Attributes:
            damping (float): Damping factor, 0 < damping < 1.
            tolerance (float): L1 convergence tolerance on both X and Z.
            max_iterations (int): Iteration cap.
    """

    defaults = {"damping": 0.85, "tolerance": 1e-9, "max_iterations": 1000}

    def _load(self, data):
        super()._load(data)
        self.damping = self._value("damping", "float")
        self.tolerance = self._value("tolerance", "float")
        self.max_iterations = self._value("max_iterations", "int")
        if not 0 < self.damping < 1:
            raise Invalid(f"damping must be in (0, 1), got {self.damping}")
        if self.tolerance <= 0:
            raise Invalid(f"tolerance must be > 0, got {self.tolerance}")
        if self.max_iterations < 1:
            raise Invalid(f"max_iterations must be >= 1, got {self.max_iterations}")
        self._finish(f"damping={self.damping}")


class SummaryConfig(SentGraphConfig):
    """ Sentence selection options.

        Attributes:
            compression_rate (float): Fraction of sentences kept, in (0, 1].
            mode (str): ``basic`` ranks by centrality, ``enhanced`` combines centrality and concept density.
            gamma (float): Centrality weight of the enhanced mode.
            theta (float): Concept-density weight of the enhanced mode.
            output_order (str): ``document`` or ``score`` order of the selected sentences.
            centrality (str): ``value`` uses the min-max normalized centrality in the enhanced score,
                ``rank`` uses its normalized rank position.
            allow_extreme_weights (bool): Accept gamma and theta outside [-1, 1].
    """

    defaults = {
        "compression_rate": 0.20,
        "mode": "basic",
        "gamma": 1.0,
        "theta": 0.0,
        "output_order": "document",
        "centrality": "value",
        "allow_extreme_weights": False
    }

    def _load(self, data):
        super()._load(data)
        self.compression_rate = self._value("compression_rate", "float")
        if not 0 < self.compression_rate <= 1:
            raise Invalid(f"compression_rate must be in (0, 1], got {self.compression_rate}")
        self.mode = str(self._value("mode")).lower()
        if self.mode not in summary_modes:
            raise Invalid(f"mode: {self.mode} is invalid. Options: {', '.join(summary_modes)}")
        self.gamma = self._value("gamma", "float")
        self.theta = self._value("theta", "float")
        self.allow_extreme_weights = self._value("allow_extreme_weights", "bool")
        if not self.allow_extreme_weights:
            for attr in ["gamma", "theta"]:
                if not -1 <= getattr(self, attr) <= 1:
                    raise Invalid(f"{attr} must be in [-1, 1] unless allow_extreme_weights is set, got {getattr(self, attr)}")
        self.output_order = str(self._value("output_order")).lower()
        if self.output_order not in output_orders:
            raise Invalid(f"output_order: {self.output_order} is invalid. Options: {', '.join(output_orders)}")
        self.centrality = str(self._value("centrality")).lower()
        if self.centrality not in centrality_readings:
            raise Invalid(f"centrality: {self.centrality} is invalid. Options: {', '.join(centrality_readings)}")
        self._finish(f"{self.mode}@{self.compression_rate}")


class LexRankConfig(SentGraphConfig):
    """ LexRank baseline options.

        Attributes:
            cosine_threshold (float): Edge threshold on TF-IDF cosine, in [0, 1).
            damping (float): PageRank damping factor.
            idf_source (str): ``document`` computes IDF over the sentences of each document, ``corpus`` uses a
                corpus IDF table.
            continuous (bool): Keep the cosine as edge weight instead of 1.
    """

    defaults = {"cosine_threshold": 0.1, "damping": 0.85, "idf_source": "document", "continuous": False}

    def _load(self, data):
        super()._load(data)
        self.cosine_threshold = self._value("cosine_threshold", "float")
        if not 0 <= self.cosine_threshold < 1:
            raise Invalid(f"cosine_threshold must be in [0, 1), got {self.cosine_threshold}")
        self.damping = self._value("damping", "float")
        if not 0 < self.damping < 1:
            raise Invalid(f"damping must be in (0, 1), got {self.damping}")
        self.idf_source = str(self._value("idf_source")).lower()
        if self.idf_source not in idf_sources:
            raise Invalid(f"idf_source: {self.idf_source} is invalid. Options: {', '.join(idf_sources)}")
        self.continuous = self._value("continuous", "bool")
        self._finish(f"threshold={self.cosine_threshold}")


class RougeConfig(SentGraphConfig):
    """ ROUGE tokenization options of corpus runs, independent of the graph's word options.

        Attributes:
            stem (bool): Porter-stem words before counting.
            remove_stopwords (bool): Drop stopwords before counting.
    """

    defaults = {"stem": False, "remove_stopwords": False}

    def _load(self, data):
        super()._load(data)
        self.stem = self._value("stem", "bool")
        self.remove_stopwords = self._value("remove_stopwords", "bool")
        self._finish(f"stem={self.stem}")


class ManifestDocument(SentGraphObj):
    """ Represents one Document entry of a Run Manifest.

        Attributes:
            doc_id (str): Document ID.
            input (Path): Document file.
            annotations (List[Path]): Annotation interchange files, possibly empty.
            reference (Optional[Path]): Reference summary file.
    """

    def __init__(self, data, base_dir=None):
        self._base_dir = Path(base_dir) if base_dir else None
        super().__init__(data)

    def _resolve(self, value):
        path = Path(value)
        if self._base_dir is not None and not path.is_absolute():
            path = self._base_dir / path
        return path

    def _load(self, data):
        super()._load(data)
        try:
            self.input = self._resolve(self._parse(attrs="input", required=True))
            self.doc_id = self._parse(attrs="doc_id") or self.input.stem
            annotations = self._data.get("annotations") or []
            if isinstance(annotations, str):
                annotations = [annotations]
            self.annotations = [self._resolve(a) for a in annotations]
            reference = self._parse(attrs="reference", default_is_none=True)
            self.reference = self._resolve(reference) if reference else None
        except ValidationError as e:
            raise Invalid(str(e))
        self._finish(self.doc_id)

    def missing_paths(self) -> List[Path]:
        paths = [self.input] + self.annotations + ([self.reference] if self.reference else [])
        return [p for p in paths if not p.exists()]

    def to_dict(self):
        return {
            "doc_id": self.doc_id,
            "input": str(self.input),
            "annotations": [str(a) for a in self.annotations],
            "reference": str(self.reference) if self.reference else None
        }


class RunManifest(SentGraphObj):
    """ Represents a batch run: the corpus, every configuration and the output directory.

        Relative paths are resolved against ``base_dir`` (the manifest's directory), document paths against
        ``corpus_dir``. When ``documents`` is omitted the corpus directory is scanned: every ``<id>.txt`` or
        ``<id>.json`` (other than ``*.ref.txt``) is a document, ``<id>.ref.txt`` its reference and
        ``<id>.jsonl`` its annotations.

        Attributes:
            corpus_dir (Optional[Path]): Corpus directory.
            documents (List[:class:`ManifestDocument`]): Documents in doc_id order.
            output_dir (Path): Output directory.
            system (str): ``multirank``, ``lexrank`` or ``average``.
            summary (:class:`SummaryConfig`): Selection options.
            graph (:class:`GraphBuildConfig`): Graph options.
            multirank (:class:`MultiRankParams`): Solver options.
            lexrank (:class:`LexRankConfig`): LexRank options.
            rouge (:class:`RougeConfig`): ROUGE options of the per-document reports.
            layer_weights (Optional[List[float]]): Weights of the average baseline, uniform when omitted.
            lexicon (Optional[Path]): Lexicon TSV for dictionary annotation.
            abbreviations (Optional[Path]): Abbreviation guard list.
            idf (Optional[Path]): IDF sidecar TSV.
            jobs (int): Worker threads for corpus runs.
            trace (bool): Write convergence traces next to the summaries.
    """

    keys = ["corpus_dir", "documents", "output_dir", "system", "summary", "graph", "multirank", "lexrank",
            "layer_weights", "lexicon", "abbreviations", "idf", "jobs", "trace", "rouge"]

    def __init__(self, data, base_dir=None):
        self._base_dir = Path(base_dir) if base_dir else None
        super().__init__(data)

    def _path(self, attr):
        value = self._parse(attrs=attr, default_is_none=True)
        if not value:
            return None
        path = Path(value)
        if self._base_dir is not None and not path.is_absolute():
            path = self._base_dir / path
        return path

    def _load(self, data):
        super()._load(data)
        unknown = sorted(set(self._data) - set(self.keys))
        if unknown:
            raise Invalid(f"RunManifest: unknown key(s) {', '.join(unknown)}")
        self.corpus_dir = self._path("corpus_dir")
        self.output_dir = self._path("output_dir") or Path("output")
        self.system = str(self._parse(attrs="system") or "multirank").lower()
        if self.system not in systems:
            raise Invalid(f"system: {self.system} is invalid. Options: {', '.join(systems)}")
        self.summary = SummaryConfig(self._data.get("summary"))
        self.graph = GraphBuildConfig(self._data.get("graph"))
        self.multirank = MultiRankParams(self._data.get("multirank"))
        self.lexrank = LexRankConfig(self._data.get("lexrank"))
        self.rouge = RougeConfig(self._data.get("rouge"))
        weights = self._data.get("layer_weights")
        self.layer_weights = [float(w) for w in weights] if weights else None
        self.lexicon = self._path("lexicon")
        self.abbreviations = self._path("abbreviations")
        self.idf = self._path("idf")
        try:
            self.jobs = max(1, self._parse(attrs="jobs", value_type="int") or 1)
        except ValidationError as e:
            raise Invalid(str(e))
        self.trace = bool(self._parse(attrs="trace", value_type="bool"))
        entries = self._data.get("documents")
        if entries:
            base = self.corpus_dir or self._base_dir
            documents = [ManifestDocument(e, base_dir=base) for e in entries]
        else:
            documents = self._discover()
        doc_ids = [d.doc_id for d in documents]
        duplicates = sorted({d for d in doc_ids if doc_ids.count(d) > 1})
        if duplicates:
            raise Invalid(f"RunManifest: duplicate doc_id(s) {', '.join(duplicates)}")
        self.documents = sorted(documents, key=lambda d: d.doc_id)
        self._finish(str(self.corpus_dir or self.output_dir))

    def _discover(self) -> List[ManifestDocument]:
        if self.corpus_dir is None or not self.corpus_dir.is_dir():
            return []
        documents = []
        for path in sorted(self.corpus_dir.iterdir()):
            if path.suffix.lower() not in (".txt", ".json") or path.name.endswith(".ref.txt"):
                continue
            reference = path.with_name(f"{path.stem}.ref.txt")
            annotations = path.with_name(f"{path.stem}.jsonl")
            documents.append(ManifestDocument({
                "doc_id": path.stem,
                "input": str(path),
                "annotations": [str(annotations)] if annotations.exists() else [],
                "reference": str(reference) if reference.exists() else None
            }))
        return documents

    def check_paths(self):
        """ Verifies that every referenced path exists.

            Raises:
                :class:`~sentgraph.exceptions.NotFound`: Listing every missing path.
        """
        missing = [str(p) for d in self.documents for p in d.missing_paths()]
        missing += [str(p) for p in (self.lexicon, self.abbreviations, self.idf) if p is not None and not p.exists()]
        if self.corpus_dir is not None and not self.corpus_dir.is_dir():
            missing.insert(0, str(self.corpus_dir))
        if missing:
            raise NotFound(f"Missing path(s): {', '.join(missing)}")
        if not self.documents:
            raise NotFound("Run manifest lists no documents")

    def to_dict(self):
        return {
            "corpus_dir": str(self.corpus_dir) if self.corpus_dir else None,
            "documents": [d.to_dict() for d in self.documents],
            "output_dir": str(self.output_dir),
            "system": self.system,
            "summary": self.summary.to_dict(),
            "graph": self.graph.to_dict(),
            "multirank": self.multirank.to_dict(),
            "lexrank": self.lexrank.to_dict(),
            "rouge": self.rouge.to_dict(),
            "layer_weights": self.layer_weights,
            "lexicon": str(self.lexicon) if self.lexicon else None,
            "abbreviations": str(self.abbreviations) if self.abbreviations else None,
            "idf": str(self.idf) if self.idf else None,
            "jobs": self.jobs,
            "trace": self.trace
        }
