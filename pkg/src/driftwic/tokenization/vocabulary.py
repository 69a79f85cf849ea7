from collections import Counter
from typing import Dict, Iterable, List

CLS = "[CLS]"
SEP = "[SEP]"
PAD = "[PAD]"
OOV = "[OOV]"
RESERVED = (CLS, SEP, PAD, OOV)


class Vocabulary:
    """
    Token to id mapping, ids 0 to 3 are reserved for CLS, SEP, PAD and OOV.
    """

    def __init__(self, tokens: Iterable[str] = ()):
        self.tokens: List[str] = list(RESERVED)
        self.ids: Dict[str, int] = {token: i for i, token in enumerate(self.tokens)}
        for token in tokens:
            self.add(token)

    @property
    def cls_id(self) -> int:
        return self.ids[CLS]

    @property
    def sep_id(self) -> int:
        return self.ids[SEP]

    @property
    def pad_id(self) -> int:
        return self.ids[PAD]

    @property
    def oov_id(self) -> int:
        return self.ids[OOV]

    def __len__(self):
        return len(self.tokens)

    def __contains__(self, token: str):
        return token in self.ids

    def __eq__(self, other):
        return isinstance(other, Vocabulary) and self.tokens == other.tokens

    def add(self, token: str) -> int:
        if token not in self.ids:
            self.ids[token] = len(self.tokens)
            self.tokens.append(token)
        return self.ids[token]

    def id_of(self, token: str) -> int:
        return self.ids.get(token, self.oov_id)

    @classmethod
    def build(cls, texts: Iterable[str], split=str.split, lowercase: bool = True, min_count: int = 1) -> "Vocabulary":
        """
        Builds a vocabulary from training texts
        Args:
            texts: Texts to count tokens in
            split: Function splitting a text into tokens
            lowercase: Whether tokens are lowercased first
            min_count: Minimum number of occurrences to get an id
        Returns: The vocabulary, tokens ordered by decreasing count then alphabetically
        """
        counts = Counter()
        for text in texts:
            counts.update(token.lower() if lowercase else token for token in split(text))
        kept = sorted((token for token, count in counts.items() if count >= min_count and token not in RESERVED),
                      key=lambda token: (-counts[token], token))
        return cls(kept)

    def save(self, path: str):
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            for token in self.tokens:
                f.write(token + "\n")

    @classmethod
    def load(cls, path: str) -> "Vocabulary":
        with open(path, "r", encoding="utf-8") as f:
            tokens = [line.rstrip("\n") for line in f]
        if tokens and tokens[-1] == "":
            tokens.pop()
        if tuple(tokens[:len(RESERVED)]) != RESERVED:
            raise ValueError(path + ": the first lines should be " + ", ".join(RESERVED))
        return cls(tokens[len(RESERVED):])
