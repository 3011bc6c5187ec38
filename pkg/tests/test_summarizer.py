import os, tempfile, unittest

from sentgraph import SentGraph
from sentgraph.exceptions import EmptyDocument, Invalid
from sentgraph.objs.config import GraphBuildConfig, SummaryConfig

article = (
    "Aspirin reduces the risk of heart attack in adults. "
    "Heart attack remains a leading cause of death. "
    "Aspirin inhibits platelet aggregation. "
    "Platelet aggregation contributes to heart attack. "
    "Bleeding is the main risk of aspirin. "
    "Patients with ulcers face a higher bleeding risk. "
    "Statins lower cholesterol. "
    "Cholesterol deposits narrow the arteries. "
    "Narrow arteries raise the risk of heart attack. "
    "The trial enrolled two thousand patients."
)

lexicon = {
    "aspirin": ("C0004057", "Aspirin", "phsu"),
    "heart attack": ("C0027051", "Myocardial infarction", "dsyn"),
    "platelet aggregation": ("C0032176", "Platelet aggregation", "celf"),
    "bleeding": ("C0019080", "Hemorrhage", "patf"),
    "cholesterol": ("C0008377", "Cholesterol", "strd"),
    "statins": ("C0360714", "Statins", "phsu")
}


class SentGraphTests(unittest.TestCase):

    def setUp(self):
        self.sentgraph = SentGraph(lexicon=lexicon)
        self.annotated = self.sentgraph.annotate(self.sentgraph.document(article, doc_id="trial"))

    def test_defaults(self):
        sentgraph = SentGraph()
        self.assertEqual(sentgraph.graph_config, GraphBuildConfig())
        self.assertEqual(sentgraph.summary_config, SummaryConfig())
        self.assertEqual(sentgraph.lexicon, {})
        self.assertIsNone(sentgraph.corpus_idf)
        self.assertIn("e.g.", sentgraph.abbreviations)

    def test_multirank(self):
        summary, result = self.sentgraph.summarize(self.annotated)
        self.assertEqual(len(self.annotated.document), 10)
        self.assertEqual(summary.k, 2)
        self.assertEqual(summary.doc_id, "trial")
        self.assertEqual(summary.indices, sorted(summary.indices))
        self.assertAlmostEqual(float(result.x.sum()), 1.0)
        self.assertEqual(set(result.influences), {"semantic", "word", "coref"})
        self.assertAlmostEqual(sum(result.influences.values()), 3.0)

    def test_dict_configs(self):
        sentgraph = SentGraph(summary_config={"compression_rate": 0.3, "mode": "enhanced", "theta": 0.5},
                              graph_config={"layers": "word,coref"}, lexicon=lexicon)
        summary, result = sentgraph.summarize(self.annotated)
        self.assertEqual(summary.k, 3)
        self.assertEqual(set(result.influences), {"word", "coref"})
        sentgraph.summary_config = None
        self.assertEqual(sentgraph.summary_config, SummaryConfig())

    def test_baselines(self):
        summary, result = self.sentgraph.summarize(self.annotated, system="LexRank")
        self.assertEqual(summary.k, 2)
        self.assertEqual(len(result.z), 0)
        summary, result = self.sentgraph.summarize(self.annotated, system="average")
        self.assertEqual(summary.k, 2)
        self.assertIsNone(result)

    def test_corpus_idf(self):
        sentgraph = SentGraph(lexrank_config={"idf_source": "corpus"}, corpus_idf={"aspirin": 1.5})
        summary, _ = sentgraph.summarize(self.annotated, system="lexrank")
        self.assertEqual(summary.k, 2)
        with self.assertRaises(Invalid):
            SentGraph(lexrank_config={"idf_source": "corpus"}).summarize(self.annotated, system="lexrank")

    def test_files(self):
        with tempfile.TemporaryDirectory() as directory:
            lexicon_path = os.path.join(directory, "lexicon.tsv")
            with open(lexicon_path, "w") as handle:
                handle.write("term\tconcept_id\tname\tsem_type\naspirin\tC0004057\tAspirin\tphsu\n")
            abbreviations_path = os.path.join(directory, "abbreviations.txt")
            with open(abbreviations_path, "w") as handle:
                handle.write("approx.\n")
            sentgraph = SentGraph(lexicon=lexicon_path, abbreviations=abbreviations_path)
            self.assertEqual(list(sentgraph.lexicon), ["aspirin"])
            doc = sentgraph.document("It weighs approx. Ten grams. Aspirin helps.")
            self.assertEqual(len(doc), 2)
            self.assertEqual(len(sentgraph.annotate(doc).concept_mentions), 1)

    def test_errors(self):
        with self.assertRaises(Invalid):
            SentGraph(graph_config=5)
        with self.assertRaises(Invalid):
            self.sentgraph.summarize(self.annotated, system="textrank")
        empty = self.sentgraph.annotate(self.sentgraph.document("", doc_id="empty"))
        for system in ["multirank", "lexrank", "average"]:
            with self.assertRaises(EmptyDocument):
                self.sentgraph.summarize(empty, system=system)

    def test_evaluate(self):
        summary, _ = self.sentgraph.summarize(self.annotated)
        report = self.sentgraph.evaluate(summary, summary.text)
        self.assertEqual(report.doc_id, "trial")
        self.assertEqual(report["ROUGE-L"].f_measure, 1.0)
        self.assertEqual(self.sentgraph.evaluate("Aspirin helps.", "Aspirin helps.")["ROUGE-1"].recall, 1.0)


if __name__ == "__main__":
    unittest.main()
