import re
from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Optional, Tuple

MAX_INFLECTION_SUFFIX = 3
_ALPHA = re.compile(r"^[^\W\d_]*$")


@dataclass(frozen=True)
class PairInstance:
    """
    One labeled example: the same target word used in two texts.
    Spans are half-open character ranges [start, end) into their text.
    """
    id: str
    word: str
    text1: str
    span1: Tuple[int, int]
    text2: str
    span2: Tuple[int, int]
    label: bool
    date1: Optional[str] = None
    date2: Optional[str] = None

    def target1(self) -> str:
        return self.text1[self.span1[0]:self.span1[1]]

    def target2(self) -> str:
        return self.text2[self.span2[0]:self.span2[1]]

    def with_texts(self, text1: str, span1: Tuple[int, int], text2: str, span2: Tuple[int, int]) -> "PairInstance":
        return replace(self, text1=text1, span1=span1, text2=text2, span2=span2)

    def has_valid_spans(self, check_word: bool = True) -> bool:
        word = self.word if check_word else None
        return span_matches_word(self.text1, self.span1, word) and span_matches_word(self.text2, self.span2, word)


def span_matches_word(text: str, span: Tuple[int, int], word: Optional[str]) -> bool:
    """
    Checks that a span is inside its text and points at the target word
    Args:
        text: Text the span indexes into
        span: Half-open character range
        word: Target word, matched case-insensitively with a short alphabetic inflection suffix allowed;
            None only checks that the span is a non-empty range of the text
    Returns: True when the span satisfies the target span invariant
    """
    start, end = span
    if not (0 <= start < end <= len(text)):
        return False
    if word is None:
        return True
    surface = text[start:end].lower()
    lemma = word.lower()
    if not lemma or not surface.startswith(lemma):
        return False
    suffix = surface[len(lemma):]
    return len(suffix) <= MAX_INFLECTION_SUFFIX and _ALPHA.match(suffix) is not None


@dataclass
class CleaningReport:
    n_input: int = 0
    n_kept: int = 0
    n_dropped_bad_span: int = 0
    n_dropped_empty_span: int = 0
    substitutions: Counter = field(default_factory=Counter)

    def merge(self, other: "CleaningReport") -> "CleaningReport":
        return CleaningReport(self.n_input + other.n_input,
                              self.n_kept + other.n_kept,
                              self.n_dropped_bad_span + other.n_dropped_bad_span,
                              self.n_dropped_empty_span + other.n_dropped_empty_span,
                              self.substitutions + other.substitutions)

    def as_dict(self) -> dict:
        report = {"n_input": self.n_input, "n_kept": self.n_kept, "n_dropped_bad_span": self.n_dropped_bad_span,
                  "n_dropped_empty_span": self.n_dropped_empty_span}
        for rule in sorted(self.substitutions):
            report["substitutions." + rule] = self.substitutions[rule]
        return report

    def render(self) -> str:
        return "\n".join(key + "=" + str(value) for key, value in self.as_dict().items())
