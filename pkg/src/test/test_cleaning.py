import unittest

from driftwic.data.cleaning import SpanMap, TextCleaner, clean_text, prepare_split, validate_and_drop
from driftwic.data.instance import PairInstance, span_matches_word

GOLDEN = [
    ("@john hello <b>hi</b>", "@user hello hi"),
    ("plain text", "plain text"),
    ("A\U0001F600B", "AB"),
    ("I love NY \U0001F60D\U0001F60D #blessed", "I love NY #blessed"),
    ("Fish &amp; chips", "Fish & chips"),
    ("<a href=\"https://t.co/x\">link</a> here", "link here"),
    ("  spaced\tout\n text  ", "spaced out text"),
    ("thanks @Mary_Ann and @bob!", "thanks @user and @user!"),
    ("email me at a@b.com", "email me at a@b.com"),
    ("&lt;b&gt;bold&lt;/b&gt; \u2600\ufe0f rt @user", "bold rt @user"),
]


def _instance(text1, span1, text2="a bank here", span2=(2, 6), word="bank", id="x"):
    return PairInstance(id=id, word=word, text1=text1, span1=span1, text2=text2, span2=span2, label=True)


class TestCleaning(unittest.TestCase):
    def test_golden_fixtures(self):
        for raw, expected in GOLDEN:
            with self.subTest(raw=raw):
                self.assertEqual(expected, clean_text(raw)[0])

    def test_idempotent(self):
        for raw, _ in GOLDEN:
            with self.subTest(raw=raw):
                once = clean_text(raw)[0]
                self.assertEqual(once, clean_text(once)[0])

    def test_identity_mapping(self):
        text, span_map = clean_text("plain text")
        self.assertEqual(SpanMap.identity(len("plain text")), span_map)

    def test_emoji_remap_matches_rebuilt_string(self):
        raw = "A\U0001F600B c\U0001F680d"
        text, span_map = clean_text(raw)
        self.assertEqual(1, span_map.map(2))
        self.assertIsNone(span_map.map(1))
        for index, char in enumerate(raw):
            target = span_map.map(index)
            if target is not None:
                self.assertEqual(char, text[target])

    def test_remap_is_monotone(self):
        raw = "<i>x</i> @someone  said &amp; \U0001F600 the bank  is   open"
        _, span_map = clean_text(raw)
        targets = [target for target in span_map.targets if target is not None]
        self.assertEqual(sorted(targets), targets)

    def test_remap_span_through_cleaning(self):
        raw = "<b>the</b>  bank \U0001F600 closed"
        text, span_map = clean_text(raw)
        start = raw.index("bank")
        new_span = span_map.remap_span((start, start + 4))
        self.assertEqual("bank", text[new_span[0]:new_span[1]])

    def test_deleted_span_is_unmappable(self):
        _, span_map = clean_text("x \U0001F600 y")
        self.assertIsNone(span_map.remap_span((2, 3)))

    def test_substitution_counts(self):
        result = TextCleaner().clean("@john <b>hi</b> \U0001F600")
        self.assertEqual(1, result.substitutions["mentions"])
        self.assertEqual(2, result.substitutions["html_tags"])
        self.assertEqual(1, result.substitutions["emojis"])

    def test_custom_emoji_ranges(self):
        cleaner = TextCleaner(emoji_ranges=[(ord("z"), ord("z"))])
        self.assertEqual("pia", cleaner.clean("pizza").text)

    def test_invalid_emoji_range(self):
        self.assertRaisesRegex(ValueError, "Invalid emoji range", TextCleaner, [(0x20, 0x10)])


class TestValidation(unittest.TestCase):
    def test_span_tolerates_inflection(self):
        self.assertTrue(span_matches_word("Banks closed", (0, 5), "bank"))
        self.assertFalse(span_matches_word("bankruptcy", (0, 10), "bank"))
        self.assertFalse(span_matches_word("bank12", (0, 6), "bank"))

    def test_keeps_valid_instance(self):
        instance = _instance("the bank is open", (4, 8))
        kept, report = validate_and_drop([instance])
        self.assertEqual([instance], kept)
        self.assertEqual(0, report.n_dropped_bad_span)

    def test_drops_empty_span(self):
        kept, report = validate_and_drop([_instance("the bank is open", (5, 5))])
        self.assertEqual([], kept)
        self.assertEqual(1, report.n_dropped_bad_span)

    def test_drops_mismatched_word(self):
        kept, report = validate_and_drop([_instance("the river is wide", (4, 9))])
        self.assertEqual([], kept)
        self.assertEqual(1, report.n_dropped_bad_span)

    def test_survivors_keep_order_and_content(self):
        instances = [_instance("the bank is open", (4, 8), id="a"),
                     _instance("the river is wide", (4, 9), id="b"),
                     _instance("bank holiday", (0, 4), id="c")]
        kept, report = validate_and_drop(instances)
        self.assertEqual([instances[0], instances[2]], kept)
        self.assertEqual(report.n_input, report.n_kept + report.n_dropped_bad_span)

    def test_prepare_split_remaps_spans(self):
        raw = "@ann <b>the</b> bank \U0001F600 is open"
        start = raw.index("bank")
        kept, report = prepare_split([_instance(raw, (start, start + 4))])
        self.assertEqual(1, len(kept))
        self.assertEqual("@user the bank is open", kept[0].text1)
        self.assertEqual("bank", kept[0].target1())
        self.assertEqual(1, report.substitutions["mentions"])

    def test_prepare_split_drops_unmappable_span(self):
        kept, report = prepare_split([_instance("<bank> here bank", (1, 5))])
        self.assertEqual([], kept)
        self.assertEqual(1, report.n_dropped_bad_span)

    def test_lemma_rows_keep_irregular_forms(self):
        instances = [_instance("He carried the box .", (3, 10), "carry on", (0, 5), word="carry", id="w1"),
                     _instance("We went home .", (3, 7), "go away", (0, 2), word="go", id="w2")]
        kept, report = prepare_split(instances, name="wic", check_word=False)
        self.assertEqual(["w1", "w2"], [instance.id for instance in kept])
        self.assertEqual("went", kept[1].target1())
        self.assertEqual(0, report.n_dropped_bad_span)
        self.assertEqual(0, report.n_dropped_empty_span)
        _, checked = prepare_split(instances)
        self.assertEqual(2, checked.n_dropped_bad_span)

    def test_lemma_rows_drop_unmappable_spans(self):
        kept, report = prepare_split([_instance("<went> home", (1, 5), "go away", (0, 2), word="go")],
                                     check_word=False)
        self.assertEqual([], kept)
        self.assertEqual(0, report.n_dropped_bad_span)
        self.assertEqual(1, report.n_dropped_empty_span)
        self.assertEqual(report.n_input, report.n_kept + report.n_dropped_empty_span)


if __name__ == '__main__':
    unittest.main()
