import re
from abc import abstractmethod
from typing import List, NamedTuple

from driftwic.tokenization.vocabulary import Vocabulary

_WORD = re.compile(r"\S+")


class Token(NamedTuple):
    id: int
    start: int
    end: int


class TokenizerInterface:
    """
    Anything that turns a text into ids with character offsets can feed the encoder.
    Subword tokenizers plug in by implementing this interface.
    """

    @property
    @abstractmethod
    def cls_id(self) -> int:
        pass

    @property
    @abstractmethod
    def sep_id(self) -> int:
        pass

    @property
    @abstractmethod
    def pad_id(self) -> int:
        pass

    @property
    @abstractmethod
    def vocab_size(self) -> int:
        pass

    @abstractmethod
    def tokenize(self, text: str) -> List[Token]:
        """
        Extend this method to split a text into tokens
        Args:
            text: Text to tokenize
        Returns: Tokens with their half-open character ranges, in text order
        """
        pass


def split_words(text: str) -> List[str]:
    return _WORD.findall(text)


def word_offsets(text: str) -> List[tuple]:
    return [(match.start(), match.end()) for match in _WORD.finditer(text)]


class WhitespaceTokenizer(TokenizerInterface):
    def __init__(self, vocabulary: Vocabulary, lowercase: bool = True):
        self.vocabulary = vocabulary
        self.lowercase = lowercase

    @property
    def cls_id(self) -> int:
        return self.vocabulary.cls_id

    @property
    def sep_id(self) -> int:
        return self.vocabulary.sep_id

    @property
    def pad_id(self) -> int:
        return self.vocabulary.pad_id

    @property
    def vocab_size(self) -> int:
        return len(self.vocabulary)

    def tokenize(self, text: str) -> List[Token]:
        tokens = []
        for match in _WORD.finditer(text):
            surface = match.group().lower() if self.lowercase else match.group()
            tokens.append(Token(self.vocabulary.id_of(surface), match.start(), match.end()))
        return tokens
