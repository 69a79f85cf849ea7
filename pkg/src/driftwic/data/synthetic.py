import random
from typing import List, Sequence, Tuple

from driftwic.data.instance import PairInstance


def _sentence(rng: random.Random, word: str, pool: Sequence[str], context_len: int) -> Tuple[str, Tuple[int, int]]:
    words = [rng.choice(pool) for _ in range(context_len)]
    words.insert(rng.randrange(context_len + 1), word)
    text = " ".join(words)
    position = words.index(word)
    start = len(" ".join(words[:position])) + (1 if position else 0)
    return text, (start, start + len(word))


def make_separable_dataset(n: int = 64, seed: int = 0, n_words: int = 4, pool_size: int = 6,
                           context_len: int = 4) -> List[PairInstance]:
    """
    Generates a word-in-context dataset that a model can separate perfectly.
    Every pseudo-word has two senses, each realized by its own pool of context words; pools never overlap,
    and the label says whether both texts draw their context from the same sense.
    Args:
        n: Number of instances, labels alternate so the set is balanced
        seed: Seed of the generator
        n_words: Number of pseudo-words
        pool_size: Context words per sense
        context_len: Context words per text
    Returns: The instances
    """
    rng = random.Random(seed)
    words = ["tok" + chr(ord("a") + k) for k in range(n_words)]
    pools = {word: [["c" + word[-1] + str(sense) + "x" + str(j) for j in range(pool_size)] for sense in range(2)]
             for word in words}

    instances = []
    for i in range(n):
        word = words[(i // 2) % n_words]
        label = i % 2 == 0
        sense1 = rng.randrange(2)
        sense2 = sense1 if label else 1 - sense1
        text1, span1 = _sentence(rng, word, pools[word][sense1], context_len)
        text2, span2 = _sentence(rng, word, pools[word][sense2], context_len)
        instances.append(PairInstance(id="syn-" + str(i), word=word, text1=text1, span1=span1,
                                      text2=text2, span2=span2, label=label))
    return instances
