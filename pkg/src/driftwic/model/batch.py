from dataclasses import dataclass
from typing import List, Sequence

import torch

from driftwic.data.instance import PairInstance
from driftwic.model.experts import TaggerInterface, UPOS_TAGS, default_tagger, pos_tag, target_word_index
from driftwic.tokenization.pair import tokenize_pair
from driftwic.tokenization.tokenizer import TokenizerInterface, word_offsets
from driftwic.tokenization.vocabulary import Vocabulary

POS_PAD_ID = len(UPOS_TAGS)


@dataclass
class WordSequence:
    word_ids: List[int]
    pos_ids: List[int]
    target: int


@dataclass
class Example:
    id: str
    token_ids: List[int]
    span1: tuple
    span2: tuple
    label: int
    words1: WordSequence = None
    words2: WordSequence = None


@dataclass
class WordBatch:
    word_ids: torch.Tensor
    pos_ids: torch.Tensor
    lengths: torch.Tensor
    targets: torch.Tensor


@dataclass
class Batch:
    ids: List[str]
    token_ids: torch.Tensor
    attention_mask: torch.Tensor
    spans1: torch.Tensor
    spans2: torch.Tensor
    labels: torch.Tensor
    words1: WordBatch = None
    words2: WordBatch = None

    def __len__(self):
        return len(self.ids)


class Featurizer:
    """
    Turns instances into model inputs: the tokenized pair for the encoder and, when experts are used,
    the word-level sequences with their POS tags and target positions.
    """

    def __init__(self, tokenizer: TokenizerInterface, word_vocabulary: Vocabulary, tagger: TaggerInterface = None,
                 max_len: int = 256, with_words: bool = True, lowercase: bool = True):
        self.tokenizer = tokenizer
        self.word_vocabulary = word_vocabulary
        self.tagger = tagger or default_tagger()
        self.max_len = max_len
        self.with_words = with_words
        self.lowercase = lowercase

    def _words(self, text: str, span: tuple) -> WordSequence:
        offsets = word_offsets(text)
        words = [text[start:end] for start, end in offsets]
        word_ids = [self.word_vocabulary.id_of(word.lower() if self.lowercase else word) for word in words]
        return WordSequence(word_ids, pos_tag(words, self.tagger).tags, target_word_index(offsets, span))

    def featurize(self, instance: PairInstance) -> Example:
        pair = tokenize_pair(instance, self.tokenizer, self.max_len)
        example = Example(instance.id, pair.token_ids, pair.span_tokens1, pair.span_tokens2, int(instance.label))
        if self.with_words:
            example.words1 = self._words(instance.text1, instance.span1)
            example.words2 = self._words(instance.text2, instance.span2)
        return example

    def featurize_all(self, instances: Sequence[PairInstance]) -> List[Example]:
        return [self.featurize(instance) for instance in instances]

    def _word_batch(self, sequences: Sequence[WordSequence]) -> WordBatch:
        width = max(len(sequence.word_ids) for sequence in sequences)
        pad = self.word_vocabulary.pad_id
        word_ids = [sequence.word_ids + [pad] * (width - len(sequence.word_ids)) for sequence in sequences]
        pos_ids = [sequence.pos_ids + [POS_PAD_ID] * (width - len(sequence.pos_ids)) for sequence in sequences]
        return WordBatch(torch.tensor(word_ids, dtype=torch.long),
                         torch.tensor(pos_ids, dtype=torch.long),
                         torch.tensor([len(sequence.word_ids) for sequence in sequences], dtype=torch.long),
                         torch.tensor([sequence.target for sequence in sequences], dtype=torch.long))

    def collate(self, examples: Sequence[Example]) -> Batch:
        """
        Pads a list of examples into one batch
        Args:
            examples: Featurized examples
        Returns: The batch, padding positions have attention mask 0
        """
        width = max(len(example.token_ids) for example in examples)
        pad = self.tokenizer.pad_id
        token_ids = [example.token_ids + [pad] * (width - len(example.token_ids)) for example in examples]
        mask = [[1] * len(example.token_ids) + [0] * (width - len(example.token_ids)) for example in examples]
        batch = Batch(ids=[example.id for example in examples],
                      token_ids=torch.tensor(token_ids, dtype=torch.long),
                      attention_mask=torch.tensor(mask, dtype=torch.long),
                      spans1=torch.tensor([example.span1 for example in examples], dtype=torch.long),
                      spans2=torch.tensor([example.span2 for example in examples], dtype=torch.long),
                      labels=torch.tensor([example.label for example in examples], dtype=torch.long))
        if self.with_words:
            batch.words1 = self._word_batch([example.words1 for example in examples])
            batch.words2 = self._word_batch([example.words2 for example in examples])
        return batch
