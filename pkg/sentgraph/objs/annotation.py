from typing import List, Set, Tuple

from sentgraph.exceptions import ValidationError
from sentgraph.objs.base import SentGraphObj
from sentgraph.objs.text import Document


def check_span(document: Document, record: str, sentence_index: int, span: Tuple[int, int]):
    """ Raises :class:`~sentgraph.exceptions.ValidationError` naming ``record`` when the span does not lie
        inside an existing Sentence of ``document``. """
    if sentence_index < 0 or sentence_index >= len(document.sentences):
        raise ValidationError(f"Document {document.doc_id}: {record} references sentence {sentence_index}, "
                              f"document has {len(document.sentences)}")
    length = len(document.sentences[sentence_index].text)
    if span[0] < 0 or span[1] > length or span[0] >= span[1]:
        raise ValidationError(f"Document {document.doc_id}: {record} span {span} lies outside sentence "
                              f"{sentence_index} (length {length})")


class LexiconEntry(SentGraphObj):
    """ Represents a single Lexicon row.

        Attributes:
            term (str): Surface term matched against text.
            concept_id (str): Concept identifier (e.g. a UMLS CUI).
            name (str): Preferred concept name.
            sem_type (str): Semantic type, may be empty.
    """

    def _load(self, data):
        super()._load(data)
        self.term = self._parse(attrs="term", required=True)
        self.concept_id = self._parse(attrs="concept_id", required=True)
        self.name = self._parse(attrs="name") or self.term
        self.sem_type = self._parse(attrs="sem_type") or ""
        if not self.term.strip():
            raise ValidationError("LexiconEntry: term cannot be empty")
        if not self.concept_id:
            raise ValidationError(f"LexiconEntry {self.term!r}: concept_id cannot be empty")
        self._finish(self.term)

    def to_dict(self):
        return {"term": self.term, "concept_id": self.concept_id, "name": self.name, "sem_type": self.sem_type}


class ConceptMention(SentGraphObj):
    """ Represents a single Concept Mention inside a Sentence.

        Attributes:
            sentence_index (int): Sentence containing the Mention.
            char_span (Tuple[int, int]): Offsets within the Sentence text.
            concept_id (str): Concept identifier.
            preferred_name (str): Preferred concept name.
            semantic_type (str): Semantic type, may be empty.
    """

    def _load(self, data):
        super()._load(data)
        self.sentence_index = self._parse(attrs="sentence_index", value_type="int", required=True)
        self.char_span = (self._parse(attrs="start", value_type="int", required=True),
                          self._parse(attrs="end", value_type="int", required=True))
        self.concept_id = self._parse(attrs="concept_id", required=True)
        self.preferred_name = self._parse(attrs="name") or ""
        self.semantic_type = self._parse(attrs="sem_type") or ""
        if not self.concept_id:
            raise ValidationError(f"ConceptMention in sentence {self.sentence_index}: concept_id cannot be empty")
        if self.char_span[0] < 0 or self.char_span[0] >= self.char_span[1]:
            raise ValidationError(f"ConceptMention {self.concept_id}: invalid span {self.char_span}")
        self._finish(self.concept_id)

    @property
    def start(self):
        return self.char_span[0]

    @property
    def end(self):
        return self.char_span[1]

    @property
    def key(self) -> Tuple[int, int, int, str]:
        """ Identity used for deduplication and ordering. """
        return self.sentence_index, self.start, self.end, self.concept_id

    def to_dict(self):
        return {
            "sentence_index": self.sentence_index,
            "start": self.start,
            "end": self.end,
            "concept_id": self.concept_id,
            "name": self.preferred_name,
            "sem_type": self.semantic_type
        }

    def __hash__(self):
        return hash(self.key)


class CorefChain(SentGraphObj):
    """ Represents a single Co-reference Chain.

        Attributes:
            chain_id (str): Chain ID.
            mentions (List[Tuple[int, Tuple[int, int]]]): ``(sentence_index, (start, end))`` pairs sorted by
                sentence then span start.
    """

    def _load(self, data):
        super()._load(data)
        self.chain_id = self._parse(attrs="chain_id", required=True)
        mentions = []
        for mention in self._parse(attrs="mentions", value_type="dict", is_list=True):
            if not isinstance(mention, dict):
                raise ValidationError(f"CorefChain {self.chain_id}: mentions must be objects")
            mentions.append((self._parse(data=mention, attrs="sentence_index", value_type="int", required=True),
                             (self._parse(data=mention, attrs="start", value_type="int", required=True),
                              self._parse(data=mention, attrs="end", value_type="int", required=True))))
        if len(mentions) < 2:
            raise ValidationError(f"CorefChain {self.chain_id}: a chain needs at least 2 mentions, found {len(mentions)}")
        self.mentions = sorted(mentions, key=lambda m: (m[0], m[1][0], m[1][1]))
        self._finish(self.chain_id)

    @property
    def sentence_indices(self) -> Set[int]:
        return {m[0] for m in self.mentions}

    def to_dict(self):
        return {
            "chain_id": self.chain_id,
            "mentions": [{"sentence_index": i, "start": s, "end": e} for i, (s, e) in self.mentions]
        }


class AnnotatedDocument(SentGraphObj):
    """ Represents a Document with its Concept Mentions and Co-reference Chains.

        Attributes:
            document (:class:`~sentgraph.objs.text.Document`): Annotated Document.
            concept_mentions (List[:class:`~sentgraph.objs.annotation.ConceptMention`]): Mentions sorted by position.
            coref_chains (List[:class:`~sentgraph.objs.annotation.CorefChain`]): Chains.
    """

    def _load(self, data):
        super()._load(data)
        self.document = self._parse(attrs="document", value_type=Document, required=True)
        mentions = self._parse(attrs="concept_mentions", value_type=ConceptMention, is_list=True)
        self.concept_mentions = sorted(mentions, key=lambda m: m.key)
        self.coref_chains = self._parse(attrs="coref_chains", value_type=CorefChain, is_list=True)
        for mention in self.concept_mentions:
            check_span(self.document, f"mention {mention.concept_id}", mention.sentence_index, mention.char_span)
        for chain in self.coref_chains:
            for sentence_index, span in chain.mentions:
                check_span(self.document, f"chain {chain.chain_id}", sentence_index, span)
        self._finish(self.document.doc_id)

    @property
    def doc_id(self):
        return self.document.doc_id

    def mentions_by_sentence(self) -> List[List[ConceptMention]]:
        """ Concept Mentions grouped per Sentence in span order. """
        grouped = [[] for _ in self.document.sentences]
        for mention in self.concept_mentions:
            grouped[mention.sentence_index].append(mention)
        return grouped

    def chain_sets(self) -> List[Set[str]]:
        """ Per Sentence, the IDs of the Chains with at least one Mention in it. """
        sets = [set() for _ in self.document.sentences]
        for chain in self.coref_chains:
            for sentence_index in chain.sentence_indices:
                sets[sentence_index].add(chain.chain_id)
        return sets

    def to_dict(self):
        return {
            "document": self.document.to_dict(),
            "concept_mentions": [m.to_dict() for m in self.concept_mentions],
            "coref_chains": [c.to_dict() for c in self.coref_chains]
        }
