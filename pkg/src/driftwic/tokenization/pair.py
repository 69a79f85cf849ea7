from enum import Enum
from typing import List, NamedTuple, Tuple

from driftwic.data.instance import PairInstance
from driftwic.errors import DataError, TargetTruncated
from driftwic.tokenization.tokenizer import Token, TokenizerInterface

N_SPECIAL_TOKENS = 3


class Source(Enum):
    CLS = "cls"
    TEXT1 = "text1"
    SEP = "sep"
    TEXT2 = "text2"


class TokenOffset(NamedTuple):
    start: int
    end: int
    source: Source


class TokenizedPair:
    """
    The pair laid out as [CLS] text1 [SEP] text2 [SEP], with the token ranges of both targets.
    """

    def __init__(self, token_ids: List[int], offsets: List[TokenOffset], span_tokens1: Tuple[int, int],
                 span_tokens2: Tuple[int, int], cls_index: int = 0):
        self.token_ids = token_ids
        self.offsets = offsets
        self.span_tokens1 = span_tokens1
        self.span_tokens2 = span_tokens2
        self.cls_index = cls_index

    def __len__(self):
        return len(self.token_ids)

    def region(self, source: Source) -> Tuple[int, int]:
        positions = [i for i, offset in enumerate(self.offsets) if offset.source == source]
        if not positions:
            return 0, 0
        return positions[0], positions[-1] + 1


def _target_tokens(tokens: List[Token], span: Tuple[int, int]) -> Tuple[int, int]:
    covering = [i for i, token in enumerate(tokens) if token.start < span[1] and span[0] < token.end]
    if not covering:
        return 0, 0
    return covering[0], covering[-1] + 1


def tokenize_pair(instance: PairInstance, tokenizer: TokenizerInterface, max_len: int = 256) -> TokenizedPair:
    """
    Tokenizes both texts into one sequence and locates the target tokens.
    When the pair is too long, tokens are removed from the end of the longer text first,
    never from inside or before a target span.
    Args:
        instance: Cleaned instance
        tokenizer: Tokenizer providing ids, offsets and special ids
        max_len: Maximum sequence length, special tokens included
    Returns: The tokenized pair
    Raises:
        TargetTruncated: No split of max_len keeps both target spans
    """
    tokens1 = tokenizer.tokenize(instance.text1)
    tokens2 = tokenizer.tokenize(instance.text2)
    target1 = _target_tokens(tokens1, instance.span1)
    target2 = _target_tokens(tokens2, instance.span2)
    if target1[0] == target1[1]:
        raise DataError("instance " + instance.id + ": no token covers the target span of text1")
    if target2[0] == target2[1]:
        raise DataError("instance " + instance.id + ": no token covers the target span of text2")

    length1, length2 = len(tokens1), len(tokens2)
    budget = max_len - N_SPECIAL_TOKENS
    if target1[1] + target2[1] > budget:
        raise TargetTruncated(instance.id, "text1" if target1[1] >= target2[1] else "text2", max_len)
    while length1 + length2 > budget:
        if length1 > target1[1] and (length1 >= length2 or length2 == target2[1]):
            length1 -= 1
        else:
            length2 -= 1

    token_ids = [tokenizer.cls_id]
    offsets = [TokenOffset(0, 0, Source.CLS)]
    for token in tokens1[:length1]:
        token_ids.append(token.id)
        offsets.append(TokenOffset(token.start, token.end, Source.TEXT1))
    token_ids.append(tokenizer.sep_id)
    offsets.append(TokenOffset(0, 0, Source.SEP))
    text2_base = len(token_ids)
    for token in tokens2[:length2]:
        token_ids.append(token.id)
        offsets.append(TokenOffset(token.start, token.end, Source.TEXT2))
    token_ids.append(tokenizer.sep_id)
    offsets.append(TokenOffset(0, 0, Source.SEP))

    return TokenizedPair(token_ids, offsets,
                         (1 + target1[0], 1 + target1[1]),
                         (text2_base + target2[0], text2_base + target2[1]))
