import csv, json, logging
from collections import OrderedDict
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from sentgraph.exceptions import NotFound, ParseError, ValidationError
from sentgraph.objs.annotation import AnnotatedDocument, ConceptMention, CorefChain, LexiconEntry, check_span
from sentgraph.objs.text import Document
from sentgraph.text import tokenize
from sentgraph.util import atomic_write

logger = logging.getLogger(__name__)

LexiconValue = Union[LexiconEntry, Tuple[str, str, str]]


def load_lexicon(path: Union[str, Path]) -> Dict[str, LexiconEntry]:
    """ Loads a Lexicon TSV with the columns ``term``, ``concept_id``, ``name`` and ``sem_type``.

        A first row equal to the column names is treated as a header. ``name`` and ``sem_type`` may be
        omitted.

        Parameters:
            path (Union[str, Path]): Lexicon file.

        Returns:
            Dict[str, :class:`~sentgraph.objs.annotation.LexiconEntry`]: term -> entry, in file order.

        Raises:
            :class:`~sentgraph.exceptions.NotFound`: When the file does not exist.
            :class:`~sentgraph.exceptions.ParseError`: When a row has fewer than 2 columns or an empty field.
    """
    path = Path(path)
    if not path.exists():
        raise NotFound(f"Lexicon not found: {path}")
    lexicon = OrderedDict()
    with path.open(encoding="utf-8", newline="") as handle:
        for line_number, row in enumerate(csv.reader(handle, delimiter="\t", quoting=csv.QUOTE_NONE), start=1):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if line_number == 1 and [c.strip().lower() for c in row[:2]] == ["term", "concept_id"]:
                continue
            if len(row) < 2:
                raise ParseError(f"expected at least 2 tab-separated columns, found {len(row)}", path=path, line=line_number)
            try:
                entry = LexiconEntry({
                    "term": row[0].strip(),
                    "concept_id": row[1].strip(),
                    "name": row[2].strip() if len(row) > 2 else None,
                    "sem_type": row[3].strip() if len(row) > 3 else None
                })
            except ValidationError as e:
                raise ParseError(str(e), path=path, line=line_number)
            if entry.term in lexicon:
                logger.debug(f"{path}:{line_number}: duplicate term {entry.term!r} ignored")
                continue
            lexicon[entry.term] = entry
    logger.debug(f"Loaded {len(lexicon)} lexicon terms from {path}")
    return lexicon


def _lexicon_entry(term: str, value: LexiconValue) -> LexiconEntry:
    if isinstance(value, LexiconEntry):
        return value
    concept_id, name, sem_type = value
    return LexiconEntry({"term": term, "concept_id": concept_id, "name": name, "sem_type": sem_type})


def annotate_concepts_dictionary(doc: Document, lexicon: Mapping[str, LexiconValue]) -> List[ConceptMention]:
    """ Dictionary concept annotation by greedy longest match.

        Terms are tokenized like sentences and matched case-insensitively on normalized Token sequences,
        so multi-word terms match across Token boundaries. Scanning is left to right; at each position the
        longest matching term wins and the scan resumes after it, so no returned Mention is a sub-span of
        another.

        Parameters:
            doc (:class:`~sentgraph.objs.text.Document`): Document to annotate.
            lexicon (Mapping[str, Union[LexiconEntry, Tuple[str, str, str]]]): term -> entry or
                ``(concept_id, name, semantic_type)``.

        Returns:
            List[:class:`~sentgraph.objs.annotation.ConceptMention`]
    """
    table = {}
    for term, value in lexicon.items():
        key = tuple(t.normalized for t in tokenize(term))
        if not key:
            logger.warning(f"Lexicon term {term!r} has no tokens and is ignored")
            continue
        if key not in table:
            table[key] = _lexicon_entry(term, value)
    if not table:
        return []
    longest = max(len(k) for k in table)

    mentions = []
    for sentence in doc.sentences:
        tokens = sentence.tokens
        normalized = sentence.normalized_tokens
        i = 0
        while i < len(tokens):
            for length in range(min(longest, len(tokens) - i), 0, -1):
                entry = table.get(tuple(normalized[i:i + length]))
                if entry is not None:
                    mentions.append(ConceptMention({
                        "sentence_index": sentence.index,
                        "start": tokens[i].start,
                        "end": tokens[i + length - 1].end,
                        "concept_id": entry.concept_id,
                        "name": entry.name,
                        "sem_type": entry.sem_type
                    }))
                    i += length
                    break
            else:
                i += 1
    logger.debug(f"Document {doc.doc_id}: {len(mentions)} dictionary mentions")
    return mentions


def derive_coref_chains_fallback(doc: Document, mentions: Sequence[ConceptMention]) -> List[CorefChain]:
    """ Co-reference Chains by concept identity.

        Mentions are grouped by ``concept_id``; every group spanning at least 2 distinct Sentences becomes a
        Chain whose ``chain_id`` is the concept ID. Chains are ordered by their first Mention.

        Parameters:
            doc (:class:`~sentgraph.objs.text.Document`): Annotated Document.
            mentions (Sequence[:class:`~sentgraph.objs.annotation.ConceptMention`]): Mentions valid for ``doc``.

        Returns:
            List[:class:`~sentgraph.objs.annotation.CorefChain`]
    """
    groups = OrderedDict()
    for mention in sorted(mentions, key=lambda m: m.key):
        check_span(doc, f"mention {mention.concept_id}", mention.sentence_index, mention.char_span)
        spans = groups.setdefault(mention.concept_id, [])
        if (mention.sentence_index, mention.char_span) not in spans:
            spans.append((mention.sentence_index, mention.char_span))
    chains = []
    for concept_id, spans in groups.items():
        if len({s[0] for s in spans}) < 2:
            continue
        chains.append(CorefChain({
            "chain_id": concept_id,
            "mentions": [{"sentence_index": i, "start": s, "end": e} for i, (s, e) in spans]
        }))
    chains.sort(key=lambda c: (c.mentions[0][0], c.mentions[0][1][0], c.chain_id))
    return chains


def merge_mentions(*mention_lists: Iterable[ConceptMention]) -> List[ConceptMention]:
    """ Union of Mention lists deduplicated by ``(sentence_index, span, concept_id)``, in position order. """
    merged = {}
    for mentions in mention_lists:
        for mention in mentions:
            merged.setdefault(mention.key, mention)
    return [merged[k] for k in sorted(merged)]


def char_span_of(doc: Document, record: str, sentence_index: int, span: Tuple[int, int]) -> Tuple[int, int]:
    """ Maps a UTF-8 byte span within a Sentence to the character span used in memory.

        Raises:
            :class:`~sentgraph.exceptions.ValidationError`: When the Sentence does not exist, the span lies
                outside its encoded text or an offset falls inside a multibyte character.
    """
    if sentence_index < 0 or sentence_index >= len(doc.sentences):
        raise ValidationError(f"Document {doc.doc_id}: {record} references sentence {sentence_index}, "
                              f"document has {len(doc.sentences)}")
    encoded = doc.sentences[sentence_index].text.encode("utf-8")
    start, end = span
    if start < 0 or end > len(encoded) or start >= end:
        raise ValidationError(f"Document {doc.doc_id}: {record} span {span} lies outside sentence "
                              f"{sentence_index} ({len(encoded)} bytes)")
    for offset in span:
        if offset < len(encoded) and encoded[offset] & 0xC0 == 0x80:
            raise ValidationError(f"Document {doc.doc_id}: {record} offset {offset} splits a multibyte character "
                                  f"in sentence {sentence_index}")
    return len(encoded[:start].decode("utf-8")), len(encoded[:end].decode("utf-8"))


def byte_span_of(doc: Document, sentence_index: int, span: Tuple[int, int]) -> Tuple[int, int]:
    """ Inverse of :func:`char_span_of`. """
    text = doc.sentences[sentence_index].text
    return len(text[:span[0]].encode("utf-8")), len(text[:span[1]].encode("utf-8"))


def load_annotations(path: Union[str, Path], doc: Optional[Document] = None) -> Tuple[List[ConceptMention], List[CorefChain]]:
    """ Loads an annotation interchange file (UTF-8 JSON Lines).

        Mention records look like ``{"kind": "mention", "doc_id", "sentence_index", "start", "end",
        "concept_id", "name", "sem_type"}`` and Chain records like ``{"kind": "chain", "doc_id", "chain_id",
        "mentions": [{"sentence_index", "start", "end"}, ...]}``. Offsets in the file are UTF-8 byte offsets
        within the Sentence text.

        Parameters:
            path (Union[str, Path]): Annotation file.
            doc (Optional[:class:`~sentgraph.objs.text.Document`]): Target Document; when given, records of
                other documents are skipped, every record is validated against it and offsets are converted
                to character offsets. Without it the file offsets are returned unchanged.

        Returns:
            Tuple[List[ConceptMention], List[CorefChain]]

        Raises:
            :class:`~sentgraph.exceptions.NotFound`: When the file does not exist.
            :class:`~sentgraph.exceptions.ParseError`: When a line is not a JSON object or has an unknown kind.
            :class:`~sentgraph.exceptions.ValidationError`: When a record is out of range for ``doc``.
    """
    path = Path(path)
    if not path.exists():
        raise NotFound(f"Annotation file not found: {path}")
    mentions = []
    chains = []
    skipped = 0
    with path.open(encoding="utf-8") as handle:
        for line_number, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as e:
                raise ParseError(e.msg, path=path, line=line_number)
            if not isinstance(record, dict):
                raise ParseError("record must be a JSON object", path=path, line=line_number)
            kind = record.get("kind")
            if kind not in ("mention", "chain"):
                raise ParseError(f"unknown record kind {kind!r}", path=path, line=line_number)
            if doc is not None and "doc_id" in record and str(record["doc_id"]) != doc.doc_id:
                skipped += 1
                continue
            try:
                if kind == "mention":
                    mention = ConceptMention(record)
                    if doc is not None:
                        start, end = char_span_of(doc, f"mention {mention.concept_id}", mention.sentence_index,
                                                  mention.char_span)
                        mention = ConceptMention({**mention.to_dict(), "start": start, "end": end})
                    mentions.append(mention)
                else:
                    chain = CorefChain(record)
                    if doc is not None:
                        spans = []
                        for sentence_index, span in chain.mentions:
                            start, end = char_span_of(doc, f"chain {chain.chain_id}", sentence_index, span)
                            spans.append({"sentence_index": sentence_index, "start": start, "end": end})
                        chain = CorefChain({"chain_id": chain.chain_id, "mentions": spans})
                    chains.append(chain)
            except ValidationError as e:
                raise ValidationError(f"{path}:{line_number}: {kind} record: {e}")
    if skipped:
        logger.debug(f"{path}: skipped {skipped} records of other documents")
    return mentions, chains


def annotation_records(annotated: AnnotatedDocument) -> List[dict]:
    """ Interchange records of ``annotated``, Mentions first, then Chains, with UTF-8 byte offsets. """
    doc = annotated.document
    records = []
    for mention in annotated.concept_mentions:
        start, end = byte_span_of(doc, mention.sentence_index, mention.char_span)
        records.append({"kind": "mention", "doc_id": annotated.doc_id, **mention.to_dict(), "start": start, "end": end})
    for chain in annotated.coref_chains:
        mentions = []
        for sentence_index, span in chain.mentions:
            start, end = byte_span_of(doc, sentence_index, span)
            mentions.append({"sentence_index": sentence_index, "start": start, "end": end})
        records.append({"kind": "chain", "doc_id": annotated.doc_id, "chain_id": chain.chain_id, "mentions": mentions})
    return records


def write_annotations(path: Union[str, Path], annotated: AnnotatedDocument):
    """ Writes ``annotated`` in the interchange format, atomically. """
    lines = [json.dumps(r, ensure_ascii=False, sort_keys=True) for r in annotation_records(annotated)]
    atomic_write(path, "".join(f"{line}\n" for line in lines))


def annotate(doc: Document, lexicon: Optional[Mapping[str, LexiconValue]] = None,
             annotation_paths: Optional[Sequence[Union[str, Path]]] = None) -> AnnotatedDocument:
    """ Builds an :class:`~sentgraph.objs.annotation.AnnotatedDocument`.

        With annotation files, their Mentions are merged and their Chains are used; when none of the files
        provides Chains, fallback Chains are derived from the merged Mentions. Without files, the Document
        is annotated with ``lexicon`` and fallback Chains.

        Parameters:
            doc (:class:`~sentgraph.objs.text.Document`): Document to annotate.
            lexicon (Optional[Mapping]): Lexicon for dictionary annotation.
            annotation_paths (Optional[Sequence[Union[str, Path]]]): Interchange files to ingest.
    """
    if annotation_paths:
        mention_lists = []
        chains = {}
        for path in annotation_paths:
            file_mentions, file_chains = load_annotations(path, doc=doc)
            mention_lists.append(file_mentions)
            for chain in file_chains:
                chains.setdefault(chain.chain_id, chain)
        mentions = merge_mentions(*mention_lists)
        chains = list(chains.values()) if chains else derive_coref_chains_fallback(doc, mentions)
    else:
        mentions = annotate_concepts_dictionary(doc, lexicon or {})
        chains = derive_coref_chains_fallback(doc, mentions)
    logger.debug(f"Document {doc.doc_id}: {len(mentions)} mentions, {len(chains)} chains")
    return AnnotatedDocument({"document": doc, "concept_mentions": mentions, "coref_chains": chains})
