import os
import re
import zlib
from abc import abstractmethod
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import torch
from torch import nn
from torch.nn.utils.rnn import pack_padded_sequence, pad_packed_sequence

from driftwic import logger
from driftwic.errors import ConfigError, DataError

UPOS_TAGS = ("ADJ", "ADP", "ADV", "AUX", "CCONJ", "DET", "INTJ", "NOUN", "NUM", "PART", "PRON", "PROPN",
             "PUNCT", "SCONJ", "SYM", "VERB", "X")
FALLBACK_TAG = "X"
DEFAULT_LEXICON = os.path.join(os.path.dirname(os.path.dirname(__file__)), "resources", "pos_lexicon.tsv")

# Checked in order after the lexicon lookup failed.
DEFAULT_RULES = (
    (re.compile(r"^(https?://|www\.)\S+$", re.IGNORECASE), "X"),
    (re.compile(r"^@\w+$"), "PROPN"),
    (re.compile(r"^#\w+$"), "X"),
    (re.compile(r"^[+-]?\d+([.,:/]\d+)*%?$"), "NUM"),
    (re.compile(r"^[$%+=<>^|~€£¥©®°&*]+$"), "SYM"),
    (re.compile(r"^[^\w\s]+$"), "PUNCT"),
    (re.compile(r"^[a-z]{2,}(ing|ed)$", re.IGNORECASE), "VERB"),
    (re.compile(r"^[a-z]{2,}ly$", re.IGNORECASE), "ADV"),
    (re.compile(r"^[a-z]{2,}(tion|sion|ness|ment|ity|ship|ism|ence|ance)s?$", re.IGNORECASE), "NOUN"),
    (re.compile(r"^[a-z]{2,}(ous|ful|able|ible|ive|less|ical)$", re.IGNORECASE), "ADJ"),
    (re.compile(r"^[A-Z][a-z]+$"), "PROPN"),
)
_EDGE_PUNCTUATION = "\"'()[]{}.,;:!?"


class PosSequence:
    def __init__(self, tags: List[int], tagset: Sequence[str] = UPOS_TAGS):
        self.tags = tags
        self.tagset = tuple(tagset)

    def __len__(self):
        return len(self.tags)

    def names(self) -> List[str]:
        return [self.tagset[tag] for tag in self.tags]


class TaggerInterface:
    name = "tagger"

    @abstractmethod
    def tag(self, words: Sequence[str]) -> List[str]:
        """
        Extend this method to tag a word sequence
        Args:
            words: Whitespace words of one text
        Returns: One tag of the 17-tag universal set per word
        """
        pass


class LexiconTagger(TaggerInterface):
    """
    Deterministic tagger: a word lookup table, then regular-expression rules, then the fallback tag X.
    """
    name = "lexicon"

    def __init__(self, lexicon: Dict[str, str], rules=DEFAULT_RULES):
        unknown = sorted({tag for tag in lexicon.values() if tag not in UPOS_TAGS})
        if unknown:
            raise ValueError("Unknown POS tags in lexicon: " + ", ".join(unknown))
        self.lexicon = dict(lexicon)
        self.rules = rules

    @classmethod
    def from_file(cls, path: str = DEFAULT_LEXICON) -> "LexiconTagger":
        lexicon = {}
        with open(path, "r", encoding="utf-8") as f:
            for line_no, line in enumerate(f, 1):
                if not line.strip() or line.startswith("#"):
                    continue
                fields = line.rstrip("\n").split("\t")
                if len(fields) != 2:
                    raise DataError(path + ":" + str(line_no) + ": expected 'word<TAB>TAG'")
                lexicon[fields[0].lower()] = fields[1].strip()
        return cls(lexicon)

    def tag_word(self, word: str) -> str:
        lowered = word.lower()
        if lowered in self.lexicon:
            return self.lexicon[lowered]
        stripped = lowered.strip(_EDGE_PUNCTUATION)
        if stripped and stripped in self.lexicon:
            return self.lexicon[stripped]
        for pattern, tag in self.rules:
            if pattern.match(word):
                return tag
        return FALLBACK_TAG

    def tag(self, words: Sequence[str]) -> List[str]:
        return [self.tag_word(word) for word in words]


class NltkTagger(TaggerInterface):
    """
    Adapter around the NLTK perceptron tagger with the universal tagset (install the `nltk` extra).
    """
    name = "nltk"
    _MAPPING = {".": "PUNCT", "CONJ": "CCONJ", "PRT": "PART"}

    def __init__(self):
        try:
            import nltk
        except ImportError:
            raise ConfigError("model.tagger=nltk needs the nltk package (pip install DriftWiC[nltk])")
        self._nltk = nltk

    def tag(self, words: Sequence[str]) -> List[str]:
        tagged = self._nltk.pos_tag(list(words), tagset="universal")
        tags = []
        for _, tag in tagged:
            tag = self._MAPPING.get(tag, tag)
            tags.append(tag if tag in UPOS_TAGS else FALLBACK_TAG)
        return tags


def make_tagger(name: str) -> TaggerInterface:
    if name == LexiconTagger.name:
        return LexiconTagger.from_file()
    if name == NltkTagger.name:
        return NltkTagger()
    raise ConfigError("model.tagger should be 'lexicon' or 'nltk', got '" + str(name) + "'")


def pos_tag(words: Sequence[str], tagger: TaggerInterface = None) -> PosSequence:
    """
    Tags the words of one text
    Args:
        words: Non-empty word list
        tagger: Tag provider, the bundled lexicon tagger by default
    Returns: Tag ids into the universal tagset
    """
    if not words:
        raise ValueError("Cannot tag an empty word sequence")
    tagger = tagger or default_tagger()
    return PosSequence([UPOS_TAGS.index(tag) for tag in tagger.tag(words)])


_DEFAULT_TAGGER: Optional[LexiconTagger] = None


def default_tagger() -> LexiconTagger:
    global _DEFAULT_TAGGER
    if _DEFAULT_TAGGER is None:
        _DEFAULT_TAGGER = LexiconTagger.from_file()
    return _DEFAULT_TAGGER


class OovPolicy(Enum):
    ZERO = "zero"
    RANDOM = "random"


class StaticEmbeddingTable:
    def __init__(self, vectors: Dict[str, np.ndarray], dim: int, oov_policy: OovPolicy = OovPolicy.ZERO,
                 seed: int = 0):
        self.vectors = vectors
        self.dim = dim
        self.oov_policy = oov_policy
        self.seed = seed

    def __len__(self):
        return len(self.vectors)

    def __contains__(self, word: str):
        return word in self.vectors or word.lower() in self.vectors

    def lookup(self, word: str) -> np.ndarray:
        vector = self.vectors.get(word)
        if vector is None:
            vector = self.vectors.get(word.lower())
        if vector is not None:
            return vector
        if self.oov_policy is OovPolicy.ZERO:
            return np.zeros(self.dim)
        # Seeded per word so a word always gets the same random vector.
        rng = np.random.RandomState((self.seed * 1000003 + zlib.crc32(word.encode("utf-8"))) % (2 ** 32))
        return rng.normal(0.0, 0.1, self.dim)

    def matrix_for(self, tokens: Sequence[str], reserved: int = 4) -> torch.Tensor:
        """
        Builds an embedding matrix for a vocabulary
        Args:
            tokens: Vocabulary tokens in id order
            reserved: Number of leading special tokens, their rows stay zero
        Returns: (len(tokens), dim) float tensor
        """
        matrix = np.zeros((len(tokens), self.dim))
        for i, token in enumerate(tokens):
            if i >= reserved:
                matrix[i] = self.lookup(token)
        return torch.tensor(matrix, dtype=torch.float32)


def load_static_embeddings(path: str, dim: int, oov_policy: OovPolicy = OovPolicy.ZERO,
                           seed: int = 0) -> StaticEmbeddingTable:
    """
    Loads word vectors in the GloVe text format
    Args:
        path: One `word v1 ... vdim` per line, an optional word2vec `<count> <dim>` header is skipped
        dim: Expected vector dimension
        oov_policy: Vector given to unknown words
        seed: Seed of the random OOV policy
    Returns: The table, malformed lines are counted and skipped
    Raises:
        DataError: A well-formed line has a vector of the wrong dimension
    """
    vectors = {}
    malformed = 0
    with open(path, "r", encoding="utf-8", errors="replace") as f:
        for line_no, line in enumerate(f, 1):
            fields = line.rstrip().split(" ")
            if line_no == 1 and len(fields) == 2 and fields[0].isdigit() and fields[1].isdigit():
                continue
            if len(fields) < 2 or not fields[0]:
                malformed += 1
                continue
            try:
                values = np.asarray(fields[1:], dtype=np.float64)
            except ValueError:
                malformed += 1
                continue
            if len(values) != dim:
                raise DataError(path + ":" + str(line_no) + ": expected " + str(dim) + " values, got " +
                                str(len(values)))
            vectors.setdefault(fields[0], values)

    if malformed:
        logger.warning(path + ": skipped " + str(malformed) + " malformed lines")
    return StaticEmbeddingTable(vectors, dim, oov_policy, seed)


@dataclass
class ExpertBundle:
    """
    Aligned encodings of one target occurrence, each of dimension m.
    Disabled experts are None.
    """
    e_ctx: torch.Tensor
    e_pos: Optional[torch.Tensor] = None
    e_glove: Optional[torch.Tensor] = None

    def names(self) -> List[str]:
        return [name for name, value in (("ctx", self.e_ctx), ("pos", self.e_pos), ("glove", self.e_glove))
                if value is not None]

    def stacked(self) -> torch.Tensor:
        members = [value for value in (self.e_ctx, self.e_pos, self.e_glove) if value is not None]
        dims = {member.shape[-1] for member in members}
        if len(dims) != 1:
            raise ValueError("Expert encodings have different dimensions: " + str(sorted(dims)))
        return torch.stack(members, dim=-2)


class BiLstmExpert(nn.Module):
    """
    Embeds a word-level sequence, runs a bidirectional LSTM over it and projects the states at the
    target word to the common expert dimension.
    """

    def __init__(self, n_embeddings: int, input_dim: int, hidden_size: int, output_dim: int,
                 initial_embeddings: Optional[torch.Tensor] = None):
        super().__init__()
        self.embedding = nn.Embedding(n_embeddings, input_dim)
        if initial_embeddings is not None:
            if tuple(initial_embeddings.shape) != (n_embeddings, input_dim):
                raise ValueError("Initial embeddings of shape " + str(tuple(initial_embeddings.shape)) +
                                 " do not match (" + str(n_embeddings) + ", " + str(input_dim) + ")")
            with torch.no_grad():
                self.embedding.weight.copy_(initial_embeddings)
        self.lstm = nn.LSTM(input_dim, hidden_size, batch_first=True, bidirectional=True)
        self.projection = nn.Linear(2 * hidden_size, output_dim)

    @property
    def hidden_size(self) -> int:
        return self.lstm.hidden_size

    @property
    def output_dim(self) -> int:
        return self.projection.out_features

    def target_states(self, inputs: torch.Tensor, lengths: torch.Tensor, target_index: torch.Tensor) -> torch.Tensor:
        """
        Runs the recurrence and gathers [h_fwd(t); h_bwd(t)] at each target position
        Args:
            inputs: (batch, max_words, input_dim)
            lengths: (batch,) number of real words per sequence
            target_index: (batch,) target word position
        Returns: (batch, 2 * hidden_size)
        """
        if bool((target_index < 0).any()) or bool((target_index >= lengths).any()):
            raise ValueError("Target word index outside its sequence")
        packed = pack_padded_sequence(inputs, lengths.cpu(), batch_first=True, enforce_sorted=False)
        states, _ = self.lstm(packed)
        states, _ = pad_packed_sequence(states, batch_first=True, total_length=inputs.shape[1])
        rows = torch.arange(inputs.shape[0], device=inputs.device)
        return states[rows, target_index]

    def encode(self, inputs: torch.Tensor, lengths: torch.Tensor, target_index: torch.Tensor) -> torch.Tensor:
        return self.projection(self.target_states(inputs, lengths, target_index))

    def bilstm_encode(self, input_vectors: torch.Tensor, target_word_index: int) -> torch.Tensor:
        """
        Encodes a single sequence of input vectors
        Args:
            input_vectors: (n_words, input_dim)
            target_word_index: Position of the target word
        Returns: The projected target encoding of dimension output_dim
        """
        n_words = input_vectors.shape[0]
        if not 0 <= target_word_index < n_words:
            raise ValueError("Target word index " + str(target_word_index) + " outside a sequence of " +
                             str(n_words) + " words")
        lengths = torch.tensor([n_words])
        index = torch.tensor([target_word_index])
        return self.encode(input_vectors.unsqueeze(0), lengths, index)[0]

    def forward(self, ids: torch.Tensor, lengths: torch.Tensor, target_index: torch.Tensor) -> torch.Tensor:
        return self.encode(self.embedding(ids), lengths, target_index)


def target_word_index(offsets: Sequence[Tuple[int, int]], span: Tuple[int, int]) -> int:
    """
    Finds the first word whose characters overlap the target span
    Args:
        offsets: Character ranges of the words of a text
        span: Target span
    Returns: The word position
    """
    for i, (start, end) in enumerate(offsets):
        if start < span[1] and span[0] < end:
            return i
    raise DataError("No word overlaps the target span " + str(tuple(span)))
