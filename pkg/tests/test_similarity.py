import unittest

import numpy as np

from sentgraph.annotation import annotate
from sentgraph.exceptions import Invalid
from sentgraph.objs.annotation import CorefChain
from sentgraph.objs.config import GraphBuildConfig
from sentgraph.similarity import SimilarityKind, coref_similarity, ngram_similarity, semantic_similarity, \
    similarity_matrix, word_similarity
from sentgraph.text import build_document, segment_sentences, terms, tokenize

lexicon = {"aspirin": ("C1", "Aspirin", "phsu"), "heart attack": ("C2", "Myocardial infarction", "dsyn")}


def brute_force_dice(a, b, n):
    grams_a = [tuple(a[i:i + n]) for i in range(len(a) - n + 1)]
    grams_b = [tuple(b[i:i + n]) for i in range(len(b) - n + 1)]
    total = len(grams_a) + len(grams_b)
    if total == 0:
        return 0.0
    remaining = list(grams_b)
    overlap = 0
    for gram in grams_a:
        if gram in remaining:
            remaining.remove(gram)
            overlap += 1
    return 2 * overlap / total


def chain(chain_id, *sentences):
    return CorefChain({"chain_id": chain_id, "mentions": [{"sentence_index": s, "start": 0, "end": 1} for s in sentences]})


class SimilarityTests(unittest.TestCase):

    def test_book_bed_bigrams(self):
        a = terms(tokenize("the book was found under the bed"))
        b = terms(tokenize("the book was under the bed"))
        self.assertAlmostEqual(ngram_similarity(a, b, 2), 8 / 11, places=12)

    def test_ngram_similarity_bounds(self):
        self.assertEqual(ngram_similarity([], [], 1), 0.0)
        self.assertEqual(ngram_similarity(["a"], ["a"], 2), 0.0)
        self.assertEqual(ngram_similarity(["a", "b"], ["a", "b"], 2), 1.0)
        self.assertEqual(ngram_similarity(["a", "b"], ["c", "d"], 1), 0.0)
        with self.assertRaises(Invalid):
            ngram_similarity(["a"], ["a"], 0)

    def test_ngram_similarity_matches_enumeration(self):
        rng = np.random.default_rng(11)
        for _ in range(1000):
            a = [str(c) for c in rng.choice(list("abc"), size=int(rng.integers(0, 9)))]
            b = [str(c) for c in rng.choice(list("abc"), size=int(rng.integers(0, 9)))]
            n = int(rng.integers(1, 4))
            self.assertEqual(ngram_similarity(a, b, n), brute_force_dice(a, b, n))
            self.assertEqual(ngram_similarity(a, b, n), ngram_similarity(b, a, n))

    def test_word_similarity(self):
        first, second = segment_sentences("The book was found under the bed. The book was under the bed.")
        self.assertAlmostEqual(word_similarity(first, second, n=2), 8 / 11, places=12)
        self.assertEqual(word_similarity(first, first, n=2), 1.0)

    def test_semantic_similarity(self):
        self.assertEqual(semantic_similarity(["C1", "C2"], ["C2", "C1"], n=1), 1.0)
        self.assertEqual(semantic_similarity(["C1", "C2"], ["C2", "C1"], n=2), 0.0)
        self.assertEqual(semantic_similarity([], ["C1"], n=1), 0.0)
        self.assertAlmostEqual(semantic_similarity(["C1", "C2"], ["C1"], n=1), 2 / 3, places=12)

    def test_coref_similarity(self):
        chains = [chain("A", 0, 1), chain("B", 0, 2)]
        self.assertEqual(coref_similarity(0, 1, chains), 0.5)
        self.assertEqual(coref_similarity(1, 2, chains), 0.0)
        self.assertEqual(coref_similarity(0, 3, chains), 0.0)
        self.assertEqual(coref_similarity(1, 0, chains), coref_similarity(0, 1, chains))

    def test_similarity_kind(self):
        self.assertIs(SimilarityKind.parse("WORD"), SimilarityKind.WORD)
        self.assertIs(SimilarityKind.parse(SimilarityKind.COREF), SimilarityKind.COREF)
        with self.assertRaises(Invalid):
            SimilarityKind.parse("syntax")

    def test_similarity_matrix(self):
        doc = build_document("d", "Aspirin prevents heart attack. The heart attack risk fell. Aspirin is cheap.")
        annotated = annotate(doc, lexicon=lexicon)
        for kind in SimilarityKind:
            matrix = similarity_matrix(annotated, kind)
            self.assertEqual(matrix.shape, (3, 3))
            self.assertTrue(np.array_equal(matrix, matrix.T))
            self.assertTrue(np.all(np.diag(matrix) == 0))
            self.assertTrue(np.all((matrix >= 0) & (matrix <= 1)))
        semantic = similarity_matrix(annotated, "semantic")
        self.assertAlmostEqual(semantic[0, 1], 2 / 3, places=12)
        self.assertAlmostEqual(semantic[1, 2], 0.0)
        coref = similarity_matrix(annotated, "coref")
        self.assertEqual(coref[0, 1], 0.5)
        self.assertEqual(coref[0, 2], 0.5)
        unigram = similarity_matrix(annotated, "word", GraphBuildConfig({"ngram_word": 1}))
        self.assertGreater(unigram[0, 1], 0)


if __name__ == "__main__":
    unittest.main()
