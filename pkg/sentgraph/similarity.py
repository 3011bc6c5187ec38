import logging
from enum import Enum
from typing import TYPE_CHECKING, List, Optional, Sequence, Set, Union

import numpy as np

from sentgraph.exceptions import Invalid
from sentgraph.objs.annotation import AnnotatedDocument, ConceptMention, CorefChain
from sentgraph.objs.text import Sentence
from sentgraph.text import ngrams, terms

if TYPE_CHECKING:
    from sentgraph.objs.config import GraphBuildConfig

logger = logging.getLogger(__name__)


class SimilarityKind(Enum):
    """ Layers of a Multi-Layer Graph, in canonical layer order. """
    SEMANTIC = "semantic"
    WORD = "word"
    COREF = "coref"

    @classmethod
    def parse(cls, value: Union[str, "SimilarityKind"]) -> "SimilarityKind":
        """ Case-insensitive lookup by value.

            Raises:
                :class:`~sentgraph.exceptions.Invalid`: When ``value`` names no layer.
        """
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise Invalid(f"layer: {value} is invalid. Options: {', '.join(k.value for k in cls)}")


def ngram_similarity(a: Sequence, b: Sequence, n: int) -> float:
    """ Dice coefficient over the n-gram multisets of ``a`` and ``b``.

        The intersection keeps the minimum multiplicity of each n-gram. Returns 0 when both multisets are empty.

        Parameters:
            a (Sequence): First ordered sequence.
            b (Sequence): Second ordered sequence.
            n (int): N-gram order, at least 1.

        Raises:
            :class:`~sentgraph.exceptions.Invalid`: When ``n`` is less than 1.
    """
    grams_a = ngrams(a, n)
    grams_b = ngrams(b, n)
    total = sum(grams_a.values()) + sum(grams_b.values())
    if total == 0:
        return 0.0
    overlap = sum((grams_a & grams_b).values())
    return 2.0 * overlap / total


def concept_sequence(mentions: Sequence[Union[ConceptMention, str]]) -> List[str]:
    """ Concept IDs of ``mentions`` in span order. """
    if mentions and isinstance(mentions[0], ConceptMention):
        return [m.concept_id for m in sorted(mentions, key=lambda m: m.key)]
    return [str(m) for m in mentions]


def semantic_similarity(mentions_i: Sequence[Union[ConceptMention, str]],
                        mentions_j: Sequence[Union[ConceptMention, str]], n: int = 1) -> float:
    """ N-gram similarity of the concept ID sequences of two Sentences.

        Parameters:
            mentions_i (Sequence[Union[ConceptMention, str]]): Mentions (or concept IDs) of the first Sentence.
            mentions_j (Sequence[Union[ConceptMention, str]]): Mentions (or concept IDs) of the second Sentence.
            n (int): N-gram order.
    """
    seq_i = concept_sequence(mentions_i)
    seq_j = concept_sequence(mentions_j)
    if not seq_i or not seq_j:
        return 0.0
    return ngram_similarity(seq_i, seq_j, n)


def word_similarity(s_i: Sentence, s_j: Sentence, n: int = 2, stem: bool = False, remove_stopwords: bool = False) -> float:
    """ N-gram similarity of the normalized Token sequences of two Sentences. """
    return ngram_similarity(terms(s_i.tokens, stem=stem, remove_stopwords=remove_stopwords),
                            terms(s_j.tokens, stem=stem, remove_stopwords=remove_stopwords), n)


def chain_set(sentence_index: int, chains: Sequence[CorefChain]) -> Set[str]:
    return {c.chain_id for c in chains if sentence_index in c.sentence_indices}


def _chain_overlap(k_i: Set[str], k_j: Set[str]) -> float:
    if not k_i or not k_j:
        return 0.0
    return len(k_i & k_j) / max(len(k_i), len(k_j))


def coref_similarity(i: int, j: int, chains: Sequence[CorefChain]) -> float:
    """ Share of Co-reference Chains two Sentences have in common.

        With ``K_i`` the IDs of the Chains touching Sentence ``i``, the score is
        ``|K_i & K_j| / max(|K_i|, |K_j|)``, 0 when either set is empty.

        Parameters:
            i (int): First Sentence index.
            j (int): Second Sentence index.
            chains (Sequence[:class:`~sentgraph.objs.annotation.CorefChain`]): Chains of the Document.
    """
    return _chain_overlap(chain_set(i, chains), chain_set(j, chains))


def similarity_matrix(annotated: AnnotatedDocument, kind: Union[str, SimilarityKind],
                      cfg: Optional["GraphBuildConfig"] = None) -> np.ndarray:
    """ All-pairs similarity of one layer.

        Parameters:
            annotated (:class:`~sentgraph.objs.annotation.AnnotatedDocument`): Annotated Document.
            kind (Union[str, SimilarityKind]): Layer.
            cfg (Optional[:class:`~sentgraph.objs.config.GraphBuildConfig`]): N-gram orders and word options,
                defaults to ``GraphBuildConfig()`` defaults.

        Returns:
            numpy.ndarray: ``n x n`` symmetric matrix with a zero diagonal.
    """
    kind = SimilarityKind.parse(kind)
    n_word = cfg.ngram_word if cfg else 2
    n_concept = cfg.ngram_concept if cfg else 1
    stem = cfg.stem if cfg else False
    remove_stopwords = cfg.remove_stopwords if cfg else False

    sentences = annotated.document.sentences
    if kind is SimilarityKind.SEMANTIC:
        items = [concept_sequence(m) for m in annotated.mentions_by_sentence()]
        score = lambda a, b: ngram_similarity(a, b, n_concept) if a and b else 0.0
    elif kind is SimilarityKind.WORD:
        items = [terms(s.tokens, stem=stem, remove_stopwords=remove_stopwords) for s in sentences]
        score = lambda a, b: ngram_similarity(a, b, n_word)
    else:
        items = annotated.chain_sets()
        score = _chain_overlap

    n = len(sentences)
    matrix = np.zeros((n, n), dtype=float)
    for i in range(n):
        for j in range(i + 1, n):
            matrix[i, j] = matrix[j, i] = score(items[i], items[j])
    logger.debug(f"Document {annotated.doc_id}: {kind.value} layer has {int(np.count_nonzero(matrix) / 2)} nonzero pairs")
    return matrix
