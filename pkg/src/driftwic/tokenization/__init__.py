from driftwic.tokenization.vocabulary import Vocabulary
from driftwic.tokenization.tokenizer import TokenizerInterface, WhitespaceTokenizer, Token, split_words, word_offsets
from driftwic.tokenization.pair import TokenizedPair, TokenOffset, Source, tokenize_pair
from driftwic.tokenization.representation import ReprMode, extract_target, extract_targets
