import json, os, tempfile, unittest

import numpy as np

from sentgraph.annotation import annotate
from sentgraph.exceptions import Invalid
from sentgraph.objs.config import SummaryConfig
from sentgraph.selection import len_con, load_summary, min_max_normalize, rank_indices, score_basic, score_enhanced, \
    select, summarize_centrality, summary_text, target_count, write_summary
from sentgraph.summarizer import SentGraph
from sentgraph.text import build_document, document_from_sentences

lexicon = {"aspirin": ("C1", "Aspirin", "phsu"), "heart attack": ("C2", "Myocardial infarction", "dsyn")}
data_dir = os.path.join(os.path.dirname(os.path.abspath(__file__)), "data")


def numbered_document(n):
    return document_from_sentences("doc", [f"Sentence number {i} is here." for i in range(n)])


class SelectionTests(unittest.TestCase):

    def test_min_max_normalize(self):
        self.assertEqual(min_max_normalize([2.0, 4.0, 3.0]).tolist(), [0.0, 1.0, 0.5])
        self.assertEqual(min_max_normalize([0.3, 0.3]).tolist(), [0.0, 0.0])
        with self.assertRaises(Invalid):
            min_max_normalize([])

    def test_rank_indices_ties(self):
        self.assertEqual(score_basic([0.1, 0.5, 0.5, 0.2]), [1, 2, 3, 0])
        self.assertEqual(rank_indices([0.3, 0.3 + 1e-14, 0.1]), [0, 1, 2])
        self.assertEqual(rank_indices([0.3, 0.3 + 1e-9, 0.1]), [1, 0, 2])

    def test_target_count(self):
        self.assertEqual(target_count(10, 0.2), 2)
        self.assertEqual(target_count(10, 0.3), 3)
        self.assertEqual(target_count(7, 0.3), 2)
        self.assertEqual(target_count(3, 0.2), 1)
        self.assertEqual(target_count(1, 0.2), 1)
        self.assertEqual(target_count(4, 1.0), 4)

    def test_len_con(self):
        annotated = annotate(build_document("d", "Aspirin prevents heart attack. Aspirin is cheap. Rest."), lexicon=lexicon)
        self.assertTrue(np.allclose(len_con(annotated), [2 / 3, 1 / 3, 0.0]))
        plain = annotate(build_document("d", "Nothing here. Nor here."), lexicon=lexicon)
        self.assertEqual(len_con(plain).tolist(), [0.0, 0.0])

    def test_select(self):
        doc = numbered_document(10)
        scores = np.linspace(0.0, 1.0, 10)
        summary = select(scores, doc, SummaryConfig({"compression_rate": 0.3}))
        self.assertEqual(summary.indices, [7, 8, 9])
        self.assertEqual(summary.k, 3)
        self.assertEqual(summary.sentences, [doc[i].text for i in [7, 8, 9]])
        by_score = select(scores, doc, SummaryConfig({"compression_rate": 0.3, "output_order": "score"}))
        self.assertEqual(by_score.indices, [9, 8, 7])
        self.assertEqual(by_score.scores, sorted(by_score.scores, reverse=True))
        with self.assertRaises(Invalid):
            select(scores[:5], doc)

    def test_enhanced_collapses_to_basic(self):
        rng = np.random.default_rng(21)
        for _ in range(100):
            n = int(rng.integers(1, 21))
            x = rng.dirichlet(np.ones(n))
            lencon = rng.integers(0, 4, size=n).astype(float)
            lencon = lencon / lencon.sum() if lencon.sum() else lencon
            doc = numbered_document(n)
            cfg = SummaryConfig({"compression_rate": float(rng.choice([0.2, 0.3]))})
            enhanced = score_enhanced(x, lencon, 1.0, 0.0)
            self.assertTrue(np.array_equal(enhanced, min_max_normalize(x)))
            self.assertEqual(select(enhanced, doc, cfg).indices, select(min_max_normalize(x), doc, cfg).indices)

    def test_enhanced_collapse_on_annotated_document(self):
        annotated = annotate(build_document("d", "Aspirin prevents heart attack. Aspirin is cheap. Rest now. "
                                                 "Heart attack kills. Sleep well."), lexicon=lexicon)
        x = np.array([0.1, 0.3, 0.25, 0.2, 0.15])
        basic = summarize_centrality(annotated, x, SummaryConfig({"compression_rate": 0.4}))
        enhanced = summarize_centrality(annotated, x, SummaryConfig({"compression_rate": 0.4, "mode": "enhanced"}))
        self.assertEqual(enhanced.indices, basic.indices)
        dense = summarize_centrality(annotated, x, SummaryConfig({"compression_rate": 0.4, "mode": "enhanced",
                                                                  "gamma": 0.0, "theta": 1.0}))
        self.assertEqual(dense.indices, [0, 1])

    def test_theta_increases_concept_density(self):
        rng = np.random.default_rng(22)
        thetas = [-1.0, -0.5, 0.0, 0.5, 1.0]
        for _ in range(50):
            n = 15
            x = rng.dirichlet(np.ones(n))
            counts = rng.integers(0, 5, size=n).astype(float)
            lencon = counts / counts.sum()
            doc = numbered_document(n)
            densities = []
            for theta in thetas:
                summary = select(score_enhanced(x, lencon, 1.0, theta), doc, SummaryConfig())
                densities.append(float(lencon[summary.indices].sum()))
            for lower, higher in zip(densities, densities[1:]):
                self.assertGreaterEqual(higher, lower - 1e-12)

    def test_rank_reading(self):
        x = [0.1, 0.6, 0.3]
        self.assertEqual(score_enhanced(x, [0, 0, 0], 1.0, 0.0, centrality="rank").tolist(), [0.0, 1.0, 0.5])
        with self.assertRaises(Invalid):
            score_enhanced(x, [0, 0], 1.0, 0.0)
        with self.assertRaises(Invalid):
            score_enhanced(x, [0, 0, 0], 1.0, 0.0, centrality="degree")

    def test_write_and_load_summary(self):
        summary = select([0.2, 0.9, 0.5], numbered_document(3), SummaryConfig({"compression_rate": 0.5}))
        with tempfile.TemporaryDirectory() as directory:
            json_path = os.path.join(directory, "s.json")
            text_path = os.path.join(directory, "s.txt")
            write_summary(summary, json_path)
            write_summary(summary, text_path)
            self.assertEqual(load_summary(json_path), summary)
            with open(json_path) as handle:
                self.assertEqual(set(json.load(handle)), {"doc_id", "k", "indices", "scores", "sentences", "text"})
            with open(text_path) as handle:
                self.assertEqual(handle.read(), summary_text(summary))
        self.assertEqual(summary_text(summary), "Sentence number 1 is here.\nSentence number 2 is here.\n")


class CorpusDensityTests(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        sentgraph = SentGraph(lexicon=os.path.join(data_dir, "lexicon.tsv"))
        abstracts = os.path.join(data_dir, "abstracts")
        cls.corpus = [sentgraph.annotate(sentgraph.load_document(os.path.join(abstracts, name)))
                      for name in sorted(os.listdir(abstracts))]

    def test_mean_density_rises_with_theta(self):
        self.assertEqual(len(self.corpus), 20)
        means = []
        for theta in [-1.0, -0.5, 0.0, 0.5, 1.0]:
            sentgraph = SentGraph(summary_config={"compression_rate": 0.3, "mode": "enhanced", "gamma": 1.0, "theta": theta})
            densities = []
            for annotated in self.corpus:
                summary, _ = sentgraph.summarize(annotated)
                densities.append(float(len_con(annotated)[summary.indices].sum()))
            means.append(float(np.mean(densities)))
        for lower, higher in zip(means, means[1:]):
            self.assertGreaterEqual(higher, lower - 1e-9)
        self.assertGreater(means[-1], means[0])


if __name__ == "__main__":
    unittest.main()
