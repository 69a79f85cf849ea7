import html
import re
from collections import Counter
from typing import Iterable, List, Optional, Sequence, Tuple

from driftwic import logger
from driftwic.data.instance import PairInstance, CleaningReport

PLACEHOLDER = "@user"

# Misc Symbols & Pictographs, Emoticons, Transport, Supplemental Symbols, flags and the joiners
# that glue emoji sequences together.
DEFAULT_EMOJI_RANGES = (
    (0x1F1E6, 0x1F1FF),  # regional indicators (flags)
    (0x1F300, 0x1F5FF),  # misc symbols and pictographs, skin tones
    (0x1F600, 0x1F64F),  # emoticons
    (0x1F680, 0x1F6FF),  # transport and map
    (0x1F700, 0x1F77F),  # alchemical symbols
    (0x1F780, 0x1F7FF),  # geometric shapes extended
    (0x1F800, 0x1F8FF),  # supplemental arrows-c
    (0x1F900, 0x1F9FF),  # supplemental symbols and pictographs
    (0x1FA70, 0x1FAFF),  # symbols and pictographs extended-a
    (0x2600, 0x26FF),    # misc symbols
    (0x2700, 0x27BF),    # dingbats
    (0xFE0E, 0xFE0F),    # variation selectors
    (0x200D, 0x200D),    # zero width joiner
    (0x20E3, 0x20E3),    # combining enclosing keycap
)

_TAG = re.compile(r"<[^>]+>")
_ENTITY = re.compile(r"&(?:#\d+|#[xX][0-9a-fA-F]+|[A-Za-z][A-Za-z0-9]*);")
_MENTION = re.compile(r"(?<![\w@])@\w+")
_MAX_PASSES = 10


class SpanMap:
    """
    Maps character offsets of an original text to offsets of its cleaned version.
    Deleted characters map to None.
    """

    def __init__(self, targets: Sequence[Optional[int]]):
        self.targets = tuple(targets)

    @classmethod
    def identity(cls, length: int) -> "SpanMap":
        return cls(range(length))

    def __len__(self):
        return len(self.targets)

    def __eq__(self, other):
        return isinstance(other, SpanMap) and self.targets == other.targets

    def __repr__(self):
        return "SpanMap(" + repr(self.targets) + ")"

    def map(self, index: int) -> Optional[int]:
        if 0 <= index < len(self.targets):
            return self.targets[index]
        return None

    def remap_span(self, span: Tuple[int, int]) -> Optional[Tuple[int, int]]:
        """
        Translates a half-open span through the map
        Args:
            span: (start, end) in original offsets
        Returns: The cleaned span, or None when its first or last character was deleted
        """
        start, end = span
        if not 0 <= start < end <= len(self.targets):
            return None
        new_start = self.map(start)
        new_last = self.map(end - 1)
        if new_start is None or new_last is None:
            return None
        return new_start, new_last + 1

    def then(self, after: "SpanMap") -> "SpanMap":
        return SpanMap(None if target is None else after.map(target) for target in self.targets)


class CleanResult:
    def __init__(self, text: str, span_map: SpanMap, substitutions: Counter):
        self.text = text
        self.span_map = span_map
        self.substitutions = substitutions


class TextCleaner:
    """
    Removes HTML tags and emojis, decodes HTML entities, replaces mentions with a placeholder
    and collapses whitespace, while keeping track of where every original character went.
    """

    def __init__(self, emoji_ranges: Iterable[Tuple[int, int]] = DEFAULT_EMOJI_RANGES,
                 placeholder: str = PLACEHOLDER):
        self.emoji_ranges = tuple((int(lo), int(hi)) for lo, hi in emoji_ranges)
        self.placeholder = placeholder
        for lo, hi in self.emoji_ranges:
            if lo > hi:
                raise ValueError("Invalid emoji range " + hex(lo) + "-" + hex(hi))

    def is_emoji(self, char: str) -> bool:
        code_point = ord(char)
        for lo, hi in self.emoji_ranges:
            if lo <= code_point <= hi:
                return True
        return False

    def clean(self, text: str) -> CleanResult:
        """
        Cleans a text until it no longer changes, so that cleaning is idempotent even when
        decoding an entity or removing a tag exposes a new tag or mention
        Args:
            text: Raw text
        Returns: The cleaned text, the offset map and per-rule substitution counts
        """
        span_map = SpanMap.identity(len(text))
        substitutions = Counter()
        current = text
        for _ in range(_MAX_PASSES):
            cleaned, step_map, step_counts = self._clean_once(current)
            span_map = span_map.then(step_map)
            substitutions.update(step_counts)
            if cleaned == current:
                break
            current = cleaned
        return CleanResult(current, span_map, substitutions)

    def _clean_once(self, text: str):
        counts = Counter()
        emitted: List[Tuple[str, Optional[int]]] = []
        i = 0
        while i < len(text):
            match = _TAG.match(text, i)
            if match:
                counts["html_tags"] += 1
                i = match.end()
                continue

            match = _ENTITY.match(text, i)
            if match:
                decoded = html.unescape(match.group())
                if decoded != match.group():
                    counts["html_entities"] += 1
                    emitted.extend((char, i if k == 0 else None) for k, char in enumerate(decoded))
                    i = match.end()
                    continue

            match = _MENTION.match(text, i)
            if match and match.group() != self.placeholder:
                counts["mentions"] += 1
                emitted.extend((char, i if k == 0 else None) for k, char in enumerate(self.placeholder))
                i = match.end()
                continue

            if self.is_emoji(text[i]):
                counts["emojis"] += 1
            else:
                emitted.append((text[i], i))
            i += 1

        collapsed: List[Tuple[str, Optional[int]]] = []
        for char, source in emitted:
            if char.isspace():
                if not collapsed or collapsed[-1][0] == " ":
                    counts["whitespace"] += 1
                    continue
                if char != " ":
                    counts["whitespace"] += 1
                collapsed.append((" ", source))
            else:
                collapsed.append((char, source))
        if collapsed and collapsed[-1][0] == " ":
            counts["whitespace"] += 1
            collapsed.pop()

        targets: List[Optional[int]] = [None] * len(text)
        for position, (_, source) in enumerate(collapsed):
            if source is not None:
                targets[source] = position
        return "".join(char for char, _ in collapsed), SpanMap(targets), counts


DEFAULT_CLEANER = TextCleaner()


def clean_text(text: str, cleaner: TextCleaner = None) -> Tuple[str, SpanMap]:
    """
    Applies the cleaning rules to one text
    Args:
        text: Raw unicode text
        cleaner: Cleaner to use, the default one covers the standard emoji blocks
    Returns: The cleaned text and the map from original to cleaned character offsets
    """
    result = (cleaner or DEFAULT_CLEANER).clean(text)
    return result.text, result.span_map


def validate_and_drop(instances: Sequence[PairInstance],
                      check_word: bool = True) -> Tuple[List[PairInstance], CleaningReport]:
    """
    Drops instances whose spans are empty, out of range or do not point at the target word
    Args:
        instances: Instances whose spans were already remapped through the cleaner
        check_word: Whether spans must spell the target word. WiC rows carry a lemma and gold token
            indices, so for them only empty or unmappable spans are dropped
    Returns: The surviving instances in their original order and the drop counts
    """
    kept = [instance for instance in instances if instance.has_valid_spans(check_word)]
    report = CleaningReport(n_input=len(instances), n_kept=len(kept))
    if check_word:
        report.n_dropped_bad_span = len(instances) - len(kept)
    else:
        report.n_dropped_empty_span = len(instances) - len(kept)
    return kept, report


def prepare_split(instances: Sequence[PairInstance], cleaner: TextCleaner = None, name: str = "split",
                  check_word: bool = True) -> Tuple[List[PairInstance], CleaningReport]:
    """
    Cleans both texts of every instance, remaps the target spans and drops wrongly labeled spans
    Args:
        instances: Raw instances
        cleaner: Cleaner to use
        name: Split name used in the log
        check_word: Whether spans must spell the target word, see validate_and_drop
    Returns: The cleaned instances and a report with drop and substitution counts
    """
    cleaner = cleaner or DEFAULT_CLEANER
    substitutions = Counter()
    cleaned = []
    for instance in instances:
        first = cleaner.clean(instance.text1)
        second = cleaner.clean(instance.text2)
        substitutions.update(first.substitutions)
        substitutions.update(second.substitutions)
        span1 = first.span_map.remap_span(instance.span1) or (0, 0)
        span2 = second.span_map.remap_span(instance.span2) or (0, 0)
        cleaned.append(instance.with_texts(first.text, span1, second.text, span2))

    kept, report = validate_and_drop(cleaned, check_word)
    report.substitutions = substitutions
    logger.info(name + ": kept " + str(report.n_kept) + "/" + str(report.n_input) +
                " instances, dropped " + str(report.n_dropped_bad_span + report.n_dropped_empty_span) +
                " with a bad target span")
    return kept, report
