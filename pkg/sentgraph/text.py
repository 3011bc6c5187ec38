import json, logging, re
from collections import Counter
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Set, Tuple, Union

from nltk.stem.porter import PorterStemmer

from sentgraph.exceptions import Invalid, NotFound, ParseError, ValidationError
from sentgraph.objs.text import Document, Sentence, Token

logger = logging.getLogger(__name__)

DEFAULT_ABBREVIATIONS = frozenset([
    "al.", "approx.", "ca.", "cf.", "dr.", "e.g.", "eq.", "eqs.", "est.", "etc.", "fig.", "figs.", "i.e.",
    "inc.", "jr.", "ltd.", "mr.", "mrs.", "ms.", "no.", "nos.", "prof.", "ref.", "refs.", "resp.", "sr.",
    "st.", "suppl.", "tab.", "vol.", "vs.", "viz.", "d.c.", "e.u.", "n.y.", "u.k.", "u.n.", "u.s.", "u.s.a."
])

STOPWORDS = frozenset("""
a about above after again against all am an and any are as at be because been before being below between both
but by can could did do does doing down during each few for from further had has have having he her here hers
herself him himself his how i if in into is it its itself me more most my myself no nor not of off on once only
or other our ours ourselves out over own same she should so some such than that the their theirs them themselves
then there these they this those through to too under until up very was we were what when where which while who
whom why will with would you your yours yourself yourselves
""".split())

TOKEN_PATTERN = re.compile(r"\d+(?:[.,]\d+)+|\w+(?:-\w+)*")
BOUNDARY_PATTERN = re.compile(r"[.!?]+[\"')\]]*(?=\s+[\"'(\[]?[A-Z0-9])")
PARAGRAPH_PATTERN = re.compile(r"\n[^\S\n]*\n")
WHITESPACE_PATTERN = re.compile(r"\s")

_stemmer = PorterStemmer()


def load_abbreviations(path: Union[str, Path]) -> frozenset:
    """ Loads an abbreviation guard list, one entry per line.

        Blank lines and lines starting with ``#`` are ignored. Entries are matched case-insensitively
        against the whitespace-delimited chunk that ends at a candidate sentence boundary, so they
        should include their final period (e.g. ``e.g.``).

        Parameters:
            path (Union[str, Path]): Guard list file.

        Raises:
            :class:`~sentgraph.exceptions.NotFound`: When the file does not exist.
    """
    path = Path(path)
    if not path.exists():
        raise NotFound(f"Abbreviation list not found: {path}")
    entries = set()
    with path.open(encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if line and not line.startswith("#"):
                entries.add(line.lower())
    logger.debug(f"Loaded {len(entries)} abbreviations from {path}")
    return frozenset(entries)


def tokenize(sentence_text: str) -> List[Token]:
    """ Splits text into Tokens on whitespace and punctuation.

        Internal hyphens are kept so biomedical terms like ``tRNA-Ile`` stay one Token, and decimal
        numbers stay intact. Punctuation is never emitted as a Token.

        Parameters:
            sentence_text (str): Text to tokenize.

        Returns:
            List[:class:`~sentgraph.objs.text.Token`]
    """
    return [Token({"surface": m.group(0), "start": m.start(), "end": m.end()})
            for m in TOKEN_PATTERN.finditer(sentence_text)]


def _boundaries(raw_text: str, abbreviations: Set[str]) -> List[int]:
    ends = set()
    for match in BOUNDARY_PATTERN.finditer(raw_text):
        end = match.end()
        chunk_start = end
        while chunk_start > 0 and not WHITESPACE_PATTERN.match(raw_text, chunk_start - 1):
            chunk_start -= 1
        chunk = raw_text[chunk_start:end].lstrip("\"'([").lower()
        if chunk in abbreviations:
            continue
        ends.add(end)
    for match in PARAGRAPH_PATTERN.finditer(raw_text):
        ends.add(match.start())
    return sorted(ends)


def segment_spans(raw_text: str, abbreviations: Optional[Iterable[str]] = None) -> List[Tuple[int, int]]:
    """ Character spans of the sentences of ``raw_text``, whitespace-trimmed, before tokenization. """
    guard = DEFAULT_ABBREVIATIONS if abbreviations is None else frozenset(a.lower() for a in abbreviations)
    spans = []
    start = 0
    for end in _boundaries(raw_text, guard) + [len(raw_text)]:
        segment = raw_text[start:end]
        stripped = segment.strip()
        if stripped:
            offset = start + (len(segment) - len(segment.lstrip()))
            spans.append((offset, offset + len(stripped)))
        start = end
    return spans


def segment_sentences(raw_text: str, abbreviations: Optional[Iterable[str]] = None) -> List[Sentence]:
    """ Splits text into Sentences.

        A boundary is sentence-final punctuation (``.``, ``!``, ``?``, optionally followed by closing quotes
        or brackets) followed by whitespace and an uppercase letter or digit, unless the chunk ending at the
        punctuation is in the abbreviation guard list. Blank lines always end a sentence. Sentences without
        any Token are dropped and indices are assigned contiguously.

        Parameters:
            raw_text (str): Text to segment, may be empty.
            abbreviations (Optional[Iterable[str]]): Guard list, defaults to :data:`DEFAULT_ABBREVIATIONS`.

        Returns:
            List[:class:`~sentgraph.objs.text.Sentence`]
    """
    sentences = []
    for start, end in segment_spans(raw_text, abbreviations=abbreviations):
        text = raw_text[start:end]
        tokens = tokenize(text)
        if not tokens:
            continue
        sentences.append(Sentence({"index": len(sentences), "text": text, "start": start, "end": end, "tokens": tokens}))
    return sentences


def build_document(doc_id: str, raw_text: str, abbreviations: Optional[Iterable[str]] = None) -> Document:
    """ Segments ``raw_text`` into a :class:`~sentgraph.objs.text.Document`. """
    sentences = segment_sentences(raw_text, abbreviations=abbreviations)
    logger.debug(f"Document {doc_id}: {len(sentences)} sentences")
    return Document({"doc_id": doc_id, "raw_text": raw_text, "sentences": sentences})


def document_from_sentences(doc_id: str, sentence_texts: Sequence[str], raw_text: Optional[str] = None) -> Document:
    """ Builds a Document from externally segmented sentences, bypassing the segmenter.

        Each sentence is located in ``raw_text`` after the previous one; when ``raw_text`` is omitted the
        sentences are joined with single spaces.

        Raises:
            :class:`~sentgraph.exceptions.ValidationError`: When a sentence cannot be found in ``raw_text``.
    """
    if raw_text is None:
        raw_text = " ".join(s.strip() for s in sentence_texts)
    sentences = []
    cursor = 0
    for position, sentence_text in enumerate(sentence_texts):
        text = sentence_text.strip()
        start = raw_text.find(text, cursor)
        if start < 0:
            raise ValidationError(f"Document {doc_id}: sentence {position} not found in the text")
        cursor = start + len(text)
        tokens = tokenize(text)
        if not tokens:
            continue
        sentences.append(Sentence({"index": len(sentences), "text": text, "start": start, "end": cursor, "tokens": tokens}))
    return Document({"doc_id": doc_id, "raw_text": raw_text, "sentences": sentences})


def load_document(path: Union[str, Path], abbreviations: Optional[Iterable[str]] = None,
                  doc_id: Optional[str] = None) -> Document:
    """ Loads a Document from a UTF-8 ``.txt`` file or a ``.json`` file.

        JSON documents have the shape ``{"doc_id": str, "text": str, "sentences": [str, ...]}``; when
        ``sentences`` is present the segmenter is bypassed.

        Parameters:
            path (Union[str, Path]): Input file.
            abbreviations (Optional[Iterable[str]]): Guard list for segmentation.
            doc_id (Optional[str]): Document ID, defaults to the JSON ``doc_id`` or the file stem.

        Raises:
            :class:`~sentgraph.exceptions.NotFound`: When the file does not exist.
            :class:`~sentgraph.exceptions.ParseError`: When a JSON file is malformed.
    """
    path = Path(path)
    if not path.exists():
        raise NotFound(f"Document not found: {path}")
    content = path.read_text(encoding="utf-8")
    if path.suffix.lower() != ".json":
        return build_document(doc_id or path.stem, content, abbreviations=abbreviations)
    try:
        data = json.loads(content)
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, path=path, line=e.lineno)
    if not isinstance(data, dict):
        raise ParseError("document must be a JSON object", path=path, line=1)
    doc_id = doc_id or str(data.get("doc_id") or path.stem)
    if data.get("sentences"):
        return document_from_sentences(doc_id, [str(s) for s in data["sentences"]], raw_text=data.get("text"))
    return build_document(doc_id, str(data.get("text", "")), abbreviations=abbreviations)


def ngrams(items: Sequence, n: int) -> Counter:
    """ Multiset of the contiguous n-grams of ``items``.

        Parameters:
            items (Sequence): Ordered items.
            n (int): N-gram order, at least 1.

        Returns:
            Counter: n-tuple -> multiplicity; empty when ``items`` is shorter than ``n``.

        Raises:
            :class:`~sentgraph.exceptions.Invalid`: When ``n`` is less than 1.
    """
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise Invalid(f"n-gram order must be an integer >= 1, got {n!r}")
    items = list(items)
    return Counter(tuple(items[i:i + n]) for i in range(len(items) - n + 1))


def terms(tokens: Iterable[Union[Token, str]], stem: bool = False, remove_stopwords: bool = False) -> List[str]:
    """ Normalized term sequence used for similarity and ROUGE.

        Parameters:
            tokens (Iterable[Union[Token, str]]): Tokens or already normalized strings.
            stem (bool): Apply the Porter stemmer.
            remove_stopwords (bool): Drop :data:`STOPWORDS`.
    """
    output = []
    for token in tokens:
        term = token.normalized if isinstance(token, Token) else str(token).casefold()
        if remove_stopwords and term in STOPWORDS:
            continue
        output.append(_stemmer.stem(term) if stem else term)
    return output
