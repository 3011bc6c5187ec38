import json, os, tempfile, unittest

from sentgraph.exceptions import Invalid, NotFound, ParseError, ValidationError
from sentgraph.text import build_document, document_from_sentences, load_abbreviations, load_document, ngrams, \
    segment_sentences, terms, tokenize


class TextTests(unittest.TestCase):

    def setUp(self):
        self.temp = tempfile.TemporaryDirectory()
        self.dir = self.temp.name

    def tearDown(self):
        self.temp.cleanup()

    def _write(self, name, content):
        path = os.path.join(self.dir, name)
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(content)
        return path

    def test_tokenize(self):
        tokens = tokenize("The book was found under the bed.")
        self.assertEqual([t.surface for t in tokens], ["The", "book", "was", "found", "under", "the", "bed"])
        self.assertEqual(tokens[0].normalized, "the")
        self.assertEqual(tokens[-1].char_span, (29, 32))

    def test_tokenize_keeps_hyphens_and_decimals(self):
        tokens = tokenize("IL-6 rose by 2.5 fold (p<0.01).")
        self.assertEqual([t.surface for t in tokens], ["IL-6", "rose", "by", "2.5", "fold", "p", "0.01"])

    def test_ngrams(self):
        items = [t.normalized for t in tokenize("the book was found under the bed")]
        self.assertEqual(sum(ngrams(items, 2).values()), 6)
        self.assertEqual(ngrams(items, 1)[("the",)], 2)
        self.assertEqual(len(ngrams(["a"], 2)), 0)
        with self.assertRaises(Invalid):
            ngrams(items, 0)

    def test_segment_sentences(self):
        text = "Dr. Smith found it. The cat sat!"
        sentences = segment_sentences(text)
        self.assertEqual([s.text for s in sentences], ["Dr. Smith found it.", "The cat sat!"])
        self.assertEqual([s.index for s in sentences], [0, 1])
        for sentence in sentences:
            self.assertEqual(text[sentence.char_span[0]:sentence.char_span[1]], sentence.text)

    def test_segment_abbreviation_guard(self):
        text = "Drugs, e.g. Aspirin, help. Rest helps too."
        self.assertEqual(len(segment_sentences(text)), 2)
        self.assertEqual(len(segment_sentences(text, abbreviations=[])), 3)

    def test_segment_dotted_initialisms(self):
        sentences = segment_sentences("The U.S. Army left. The U.K. Parliament stayed.")
        self.assertEqual([s.text for s in sentences], ["The U.S. Army left.", "The U.K. Parliament stayed."])

    def test_segment_unicode_whitespace(self):
        for separator in ["\u00a0", "\r", "\r\n"]:
            text = f"Drugs,{separator}e.g. Aspirin, help. Rest helps too."
            self.assertEqual(len(segment_sentences(text)), 2, repr(separator))

    def test_segment_paragraphs(self):
        sentences = segment_sentences("first line without a period\n\nsecond line")
        self.assertEqual([s.text for s in sentences], ["first line without a period", "second line"])
        sentences = segment_sentences("first line without a period\r\n\r\nsecond line")
        self.assertEqual([s.text for s in sentences], ["first line without a period", "second line"])

    def test_segment_empty(self):
        self.assertEqual(segment_sentences(""), [])
        self.assertEqual(segment_sentences("  ...  "), [])
        self.assertEqual(len(build_document("empty", "")), 0)

    def test_sentences_are_frozen(self):
        sentence = segment_sentences("One sentence.")[0]
        with self.assertRaises(AttributeError):
            sentence.text = "changed"

    def test_load_abbreviations(self):
        path = self._write("abbr.txt", "# guard list\nFig.\n\nvs.\n")
        self.assertEqual(load_abbreviations(path), frozenset(["fig.", "vs."]))
        with self.assertRaises(NotFound):
            load_abbreviations(os.path.join(self.dir, "missing.txt"))

    def test_load_text_document(self):
        path = self._write("PMC1.txt", "Aspirin works. It is cheap.")
        doc = load_document(path)
        self.assertEqual(doc.doc_id, "PMC1")
        self.assertEqual(len(doc), 2)

    def test_load_json_document(self):
        path = self._write("doc.json", json.dumps({
            "doc_id": "d1", "text": "Alpha beta. Gamma delta.", "sentences": ["Alpha beta.", "Gamma delta."]
        }))
        doc = load_document(path)
        self.assertEqual(doc.doc_id, "d1")
        self.assertEqual([s.char_span for s in doc.sentences], [(0, 11), (12, 24)])

    def test_load_document_errors(self):
        with self.assertRaises(NotFound):
            load_document(os.path.join(self.dir, "nope.txt"))
        path = self._write("bad.json", "{\n\"doc_id\": ")
        with self.assertRaises(ParseError) as context:
            load_document(path)
        self.assertEqual(context.exception.line, 2)

    def test_document_from_sentences(self):
        doc = document_from_sentences("d", ["One.", "Two."])
        self.assertEqual(doc.raw_text, "One. Two.")
        with self.assertRaises(ValidationError):
            document_from_sentences("d", ["Missing."], raw_text="Other text.")

    def test_terms(self):
        tokens = tokenize("The patients were running")
        self.assertEqual(terms(tokens), ["the", "patients", "were", "running"])
        self.assertEqual(terms(tokens, remove_stopwords=True), ["patients", "running"])
        self.assertEqual(terms(tokens, stem=True, remove_stopwords=True), ["patient", "run"])


if __name__ == "__main__":
    unittest.main()
