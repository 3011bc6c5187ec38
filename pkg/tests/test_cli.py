import contextlib, io, json, os, tempfile, unittest

import numpy as np

from sentgraph.cli import RandomnessUsed, exit_code, main, no_randomness
from sentgraph.evaluation import evaluate, load_reports, write_reports
from sentgraph.exceptions import EmptyDocument, Invalid, NotFound, ParseError, SentGraphException
from sentgraph.objs.results import RougeReport, rouge_metrics
from sentgraph.selection import load_summary

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

lexicon_rows = [
    ("aspirin", "C0004057", "Aspirin", "phsu"),
    ("heart attack", "C0027051", "Myocardial infarction", "dsyn"),
    ("platelet aggregation", "C0032176", "Platelet aggregation", "celf"),
    ("bleeding", "C0019080", "Hemorrhage", "patf"),
    ("cholesterol", "C0008377", "Cholesterol", "strd")
]


class CLITestCase(unittest.TestCase):

    def setUp(self):
        self.temp = tempfile.TemporaryDirectory()
        self.lexicon = self.write("lexicon.tsv", "".join("\t".join(row) + "\n" for row in lexicon_rows))
        self.article = self.write("article.txt", article)

    def tearDown(self):
        self.temp.cleanup()

    def path(self, *parts):
        return os.path.join(self.temp.name, *parts)

    def write(self, name, content):
        path = self.path(name)
        os.makedirs(os.path.dirname(path), exist_ok=True)
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(content)
        return path

    def run_cli(self, *argv):
        stdout = io.StringIO()
        with contextlib.redirect_stdout(stdout):
            code = main(list(argv))
        return code, stdout.getvalue()


class SummarizeTests(CLITestCase):

    def summarize(self, name, *flags):
        output = self.path(name)
        code, _ = self.run_cli("summarize", self.article, "--lexicon", self.lexicon, "-o", output, *flags)
        self.assertEqual(code, 0)
        return load_summary(output)

    def test_basic(self):
        summary = self.summarize("basic.json", "--rate", "0.2")
        self.assertEqual(summary.k, 2)
        self.assertEqual(summary.doc_id, "article")

    def test_enhanced_collapses_to_basic(self):
        basic = self.summarize("basic.json")
        enhanced = self.summarize("enhanced.json", "--mode", "enhanced", "--gamma", "1", "--theta", "0")
        self.assertEqual(enhanced.indices, basic.indices)

    def test_layer_ablation(self):
        summary = self.summarize("ablation.json", "--layers", "word,coref", "--rate", "0.3")
        self.assertEqual(summary.k, 3)

    def test_text_output_and_trace(self):
        output = self.path("summary.txt")
        trace = self.path("trace.csv")
        code, _ = self.run_cli("summarize", self.article, "--lexicon", self.lexicon, "-o", output, "--trace-file", trace)
        self.assertEqual(code, 0)
        with open(output, encoding="utf-8") as handle:
            self.assertEqual(len(handle.read().splitlines()), 2)
        with open(trace) as handle:
            self.assertEqual(handle.readline().strip(), "iteration,residual_x,residual_z")

    def test_output_dir(self):
        output = self.path("summaries")
        code, stdout = self.run_cli("summarize", self.article, "--lexicon", self.lexicon, "--output-dir", output)
        self.assertEqual(code, 0)
        self.assertEqual(stdout, "")
        self.assertEqual(load_summary(os.path.join(output, "article.json")).k, 2)
        with open(os.path.join(output, "article.txt"), encoding="utf-8") as handle:
            self.assertEqual(len(handle.read().splitlines()), 2)

    def test_stdout_and_manifest(self):
        manifest = self.write("manifest.json", json.dumps({"summary": {"compression_rate": 0.3}, "system": "lexrank"}))
        code, stdout = self.run_cli("summarize", self.article, "--manifest", manifest)
        self.assertEqual(code, 0)
        self.assertEqual(json.loads(stdout)["k"], 3)
        code, stdout = self.run_cli("summarize", self.article, "--manifest", manifest, "--rate", "0.1")
        self.assertEqual(json.loads(stdout)["k"], 1)

    def test_exit_codes(self):
        empty = self.write("empty.txt", "  \n")
        self.assertEqual(self.run_cli("summarize", empty)[0], 3)
        self.assertEqual(self.run_cli("summarize", self.path("missing.txt"))[0], 2)
        self.assertEqual(self.run_cli("summarize", self.article, "--gamma", "2")[0], 1)
        self.assertEqual(self.run_cli("summarize", self.article, "--gamma", "2", "--allow-extreme-weights")[0], 0)
        bad_manifest = self.write("bad.json", "{")
        self.assertEqual(self.run_cli("summarize", self.article, "--manifest", bad_manifest)[0], 3)
        with contextlib.redirect_stderr(io.StringIO()):
            with self.assertRaises(SystemExit) as context:
                main(["summarize", self.article, "--bogus"])
        self.assertEqual(context.exception.code, 1)

    def test_exit_code_mapping(self):
        self.assertEqual(exit_code(EmptyDocument("empty")), 3)
        self.assertEqual(exit_code(ParseError("bad", line=1)), 3)
        self.assertEqual(exit_code(Invalid("bad")), 1)
        self.assertEqual(exit_code(NotFound("gone")), 2)
        self.assertEqual(exit_code(FileNotFoundError("gone")), 2)
        self.assertEqual(exit_code(SentGraphException("failed")), 2)

    def test_seedless(self):
        self.assertEqual(self.run_cli("summarize", self.article, "--lexicon", self.lexicon, "--seedless")[0], 0)
        original = np.random.default_rng
        with no_randomness():
            with self.assertRaises(RandomnessUsed):
                np.random.default_rng(0)
        self.assertIs(np.random.default_rng, original)
        np.random.default_rng(0)


class EvaluateTests(CLITestCase):

    def test_summary_equal_to_reference(self):
        reference = self.write("ref.txt", "Aspirin lowers heart attack risk.\nBleeding is the main risk.\n")
        summary = self.write("summary.txt", "Aspirin lowers heart attack risk.\nBleeding is the main risk.\n")
        output = self.path("report.json")
        self.assertEqual(self.run_cli("evaluate", summary, reference, "-o", output)[0], 0)
        report, = load_reports(output)
        self.assertEqual(report.doc_id, "summary")
        for metric in rouge_metrics:
            self.assertEqual(report[metric].f_measure, 1.0)

    def test_worked_example(self):
        reference = self.write("ref.txt", "The book was under the bed.")
        summary = self.write("s2.txt", "The little red book was found under the big funny bed.")
        code, stdout = self.run_cli("evaluate", summary, reference, "--doc-id", "book")
        self.assertEqual(code, 0)
        rows = {row["metric"]: row for row in json.loads(stdout)}
        self.assertEqual(rows["ROUGE-L"]["recall"], 1.0)
        self.assertAlmostEqual(rows["ROUGE-L"]["precision"], 6 / 11, delta=1e-12)


class CorpusTests(CLITestCase):

    def setUp(self):
        super().setUp()
        self.corpus = self.path("corpus")
        self.write("corpus/d1.txt", article)
        self.write("corpus/d1.ref.txt", "Aspirin reduces heart attack risk but raises bleeding risk.")
        self.write("corpus/d2.txt", "Statins lower cholesterol. Cholesterol narrows arteries. Exercise helps. "
                                    "Narrow arteries cause heart attack. Diet matters too.")
        self.write("corpus/d2.ref.txt", "Statins lower cholesterol and protect arteries.")
        self.write("corpus/d3.txt", "The weather was mild. Rain fell at night. The harvest was good.")
        self.write("corpus/d3.ref.txt", "A mild season gave a good harvest.")

    def corpus_run(self, output, *flags):
        code, _ = self.run_cli("corpus-run", "--corpus-dir", self.corpus, "--lexicon", self.lexicon,
                               "--output-dir", self.path(output), *flags)
        self.assertEqual(code, 0)
        return self.path(output)

    def read_tree(self, root):
        files = {}
        for directory, _, names in os.walk(root):
            for name in names:
                with open(os.path.join(directory, name), "rb") as handle:
                    files[os.path.relpath(os.path.join(directory, name), root)] = handle.read()
        return files

    def test_parallel_runs_are_identical(self):
        serial = self.read_tree(self.corpus_run("serial", "--jobs", "1", "--trace"))
        parallel = self.read_tree(self.corpus_run("parallel", "--jobs", "3", "--trace"))
        self.assertEqual(serial, parallel)
        self.assertIn(os.path.join("summaries", "d3.json"), serial)
        self.assertIn(os.path.join("traces", "d1.csv"), serial)
        self.assertIn("config.json", serial)

    def test_reports(self):
        output = self.corpus_run("run")
        reports = load_reports(os.path.join(output, "reports.csv"))
        self.assertEqual([r.doc_id for r in reports], ["d1", "d2", "d3", "__mean__"])
        self.assertEqual(load_reports(os.path.join(output, "reports.json")), reports)

    def test_layer_subsets(self):
        for name, layers in [("all", "semantic,word,coref"), ("sw", "semantic,word"), ("wc", "word,coref"),
                             ("word", "word")]:
            output = self.corpus_run(name, "--layers", layers)
            self.assertEqual(len(load_reports(os.path.join(output, "reports.json"))), 4)
            with open(os.path.join(output, "config.json")) as handle:
                self.assertEqual(json.load(handle)["graph"]["layers"], layers.split(","))

    def test_baseline_systems(self):
        for system in ["lexrank", "average"]:
            output = self.corpus_run(system, "--system", system)
            self.assertTrue(os.path.exists(os.path.join(output, "summaries", "d2.txt")))
        self.corpus_run("lexrank-corpus", "--system", "lexrank", "--idf-source", "corpus")

    def test_missing_corpus(self):
        code, _ = self.run_cli("corpus-run", "--corpus-dir", self.path("nowhere"), "--output-dir", self.path("out"))
        self.assertEqual(code, 2)

    def test_failed_document_does_not_stop_the_run(self):
        self.write("corpus/d0.txt", "  \n")
        output = self.path("partial")
        code, _ = self.run_cli("corpus-run", "--corpus-dir", self.corpus, "--lexicon", self.lexicon, "--output-dir", output)
        self.assertEqual(code, 3)
        reports = load_reports(os.path.join(output, "reports.json"))
        self.assertEqual([r.doc_id for r in reports], ["d1", "d2", "d3", "__mean__"])
        with open(os.path.join(output, "config.json")) as handle:
            failures = json.load(handle)["failures"]
        self.assertEqual([f["doc_id"] for f in failures], ["d0"])
        self.assertFalse(os.path.exists(os.path.join(output, "summaries", "d0.json")))

    def test_rouge_options_are_separate_from_graph_options(self):
        plain = self.corpus_run("plain")
        stemmed = self.corpus_run("rouge-stem", "--rouge-stem")
        graph_stem = self.corpus_run("graph-stem", "--stem")
        with open(os.path.join(graph_stem, "config.json")) as handle:
            settings = json.load(handle)
        self.assertEqual((settings["graph"]["stem"], settings["rouge"]["stem"]), (True, False))
        with open(os.path.join(stemmed, "config.json")) as handle:
            settings = json.load(handle)
        self.assertEqual((settings["graph"]["stem"], settings["rouge"]["stem"]), (False, True))
        for doc_id in ["d1", "d2", "d3"]:
            self.assertEqual(load_summary(os.path.join(plain, "summaries", f"{doc_id}.json")),
                             load_summary(os.path.join(stemmed, "summaries", f"{doc_id}.json")))
        summary = load_summary(os.path.join(stemmed, "summaries", "d1.json"))
        with open(os.path.join(self.corpus, "d1.ref.txt"), encoding="utf-8") as handle:
            expected = evaluate(summary.sentences, handle.read(), doc_id="d1", stem=True)
        report = load_reports(os.path.join(stemmed, "reports.json"))[0]
        for metric in rouge_metrics:
            self.assertAlmostEqual(report[metric].recall, expected[metric].recall, delta=1e-9)


class CompareTests(CLITestCase):

    def reports(self, name, offset):
        reports = []
        for i in range(8):
            value = 0.5 + offset * (i + 1)
            reports.append(RougeReport({"doc_id": f"d{i}", "scores": {
                m: {"recall": value, "precision": value} for m in rouge_metrics
            }}))
        path = self.path(name)
        write_reports(reports, path)
        return path

    def test_compare(self):
        reports_a = self.reports("a.csv", 0.03)
        reports_b = self.reports("b.json", 0.0)
        output = self.path("cells.json")
        histogram = self.path("hist.png")
        code, stdout = self.run_cli("compare", reports_a, reports_b, "-o", output, "--histogram", histogram,
                                    "--labels", "multirank", "lexrank")
        self.assertEqual(code, 0)
        lines = stdout.splitlines()
        self.assertEqual(lines[0], "metric\trecall\tprecision\tf")
        self.assertEqual(len(lines), 5)
        with open(output) as handle:
            cells = json.load(handle)
        self.assertEqual(len(cells), 12)
        self.assertAlmostEqual(cells[0]["p_value"], 2 / 256)
        self.assertGreater(os.path.getsize(histogram), 0)

    def test_missing_documents(self):
        reports_a = self.reports("a.json", 0.01)
        rows = load_reports(reports_a)[:-1]
        reports_b = self.path("b.json")
        write_reports(rows, reports_b)
        self.assertEqual(self.run_cli("compare", reports_a, reports_b)[0], 3)


class AnnotateTests(CLITestCase):

    def test_annotate(self):
        code, stdout = self.run_cli("annotate", self.article, "--lexicon", self.lexicon)
        self.assertEqual(code, 0)
        records = [json.loads(line) for line in stdout.splitlines()]
        kinds = {r["kind"] for r in records}
        self.assertEqual(kinds, {"mention", "chain"})
        chains = {r["chain_id"] for r in records if r["kind"] == "chain"}
        self.assertIn("C0004057", chains)
        output = self.path("article.jsonl")
        self.assertEqual(self.run_cli("annotate", self.article, "--lexicon", self.lexicon, "-o", output)[0], 0)
        with open(output, encoding="utf-8") as handle:
            self.assertEqual([json.loads(line) for line in handle], records)

    def test_missing_input(self):
        self.assertEqual(self.run_cli("annotate", self.path("missing.txt"))[0], 2)


if __name__ == "__main__":
    unittest.main()
