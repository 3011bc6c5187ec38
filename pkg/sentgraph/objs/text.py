from typing import List

from sentgraph.exceptions import ValidationError
from sentgraph.objs.base import SentGraphObj


class Token(SentGraphObj):
    """ Represents a single Token.

        Attributes:
            surface (str): Token text as written.
            normalized (str): Case-folded surface.
            char_span (Tuple[int, int]): Offsets of the Token within its Sentence.
    """

    def _load(self, data):
        super()._load(data)
        self.surface = self._parse(attrs="surface", required=True)
        if not self.surface:
            raise ValidationError("Token: surface cannot be empty")
        self.normalized = self.surface.casefold()
        self.char_span = (self._parse(attrs="start", value_type="int", required=True),
                          self._parse(attrs="end", value_type="int", required=True))
        self._finish(self.surface)

    @property
    def start(self):
        return self.char_span[0]

    @property
    def end(self):
        return self.char_span[1]

    def to_dict(self):
        return {"surface": self.surface, "start": self.start, "end": self.end}


class Sentence(SentGraphObj):
    """ Represents a single Sentence of a Document.

        Attributes:
            index (int): Position of the Sentence in its Document.
            text (str): Sentence text.
            char_span (Tuple[int, int]): Offsets of the Sentence within the Document's raw text.
            tokens (List[:class:`~sentgraph.objs.text.Token`]): Tokens of the Sentence.
    """

    def _load(self, data):
        super()._load(data)
        self.index = self._parse(attrs="index", value_type="int", required=True)
        self.text = self._parse(attrs="text", required=True)
        self.char_span = (self._parse(attrs="start", value_type="int", required=True),
                          self._parse(attrs="end", value_type="int", required=True))
        if "tokens" in self._data:
            self.tokens = self._parse(attrs="tokens", value_type=Token, is_list=True)
        else:
            from sentgraph.text import tokenize
            self.tokens = tokenize(self.text)
        previous_end = 0
        for token in self.tokens:
            if token.start < previous_end or token.end > len(self.text) or token.start >= token.end:
                raise ValidationError(f"Sentence {self.index}: token {token.surface!r} has an invalid span {token.char_span}")
            previous_end = token.end
        self._finish(self.index)

    @property
    def normalized_tokens(self) -> List[str]:
        return [t.normalized for t in self.tokens]

    def to_dict(self):
        return {
            "index": self.index,
            "text": self.text,
            "start": self.char_span[0],
            "end": self.char_span[1],
            "tokens": [t.to_dict() for t in self.tokens]
        }

    def __str__(self):
        return f"[{self.index}:{self.text}]"


class Document(SentGraphObj):
    """ Represents a single Document, the unit of summarization.

        Attributes:
            doc_id (str): Document ID.
            raw_text (str): Original text.
            sentences (List[:class:`~sentgraph.objs.text.Sentence`]): Sentences in document order.
    """

    def _load(self, data):
        super()._load(data)
        self.doc_id = self._parse(attrs="doc_id", required=True)
        self.raw_text = self._parse(attrs="raw_text") or ""
        self.sentences = self._parse(attrs="sentences", value_type=Sentence, is_list=True)
        for i, sentence in enumerate(self.sentences):
            if sentence.index != i:
                raise ValidationError(f"Document {self.doc_id}: sentence indices must be contiguous from 0, found {sentence.index} at position {i}")
        self._finish(self.doc_id)

    def __len__(self):
        return len(self.sentences)

    def __iter__(self):
        return (s for s in self.sentences)

    def __getitem__(self, index):
        return self.sentences[index]

    def to_dict(self):
        return {"doc_id": self.doc_id, "raw_text": self.raw_text, "sentences": [s.to_dict() for s in self.sentences]}
