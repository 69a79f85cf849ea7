import os
import re
from typing import List, Optional, Tuple

from driftwic import logger
from driftwic.data.instance import PairInstance
from driftwic.errors import DataError

_TOKEN = re.compile(r"\S+")
_LABELS = {"T": True, "F": False}


def token_span(sentence: str, index: int) -> Optional[Tuple[int, int]]:
    """
    Gets the character span of the index-th whitespace token of a sentence
    Args:
        sentence: Tokenized sentence as distributed with WiC
        index: Zero-based token index
    Returns: The (start, end) span, None when the index is out of range
    """
    if index < 0:
        return None
    for position, match in enumerate(_TOKEN.finditer(sentence)):
        if position == index:
            return match.start(), match.end()
    return None


def gold_path_for(data_path: str) -> str:
    directory, name = os.path.split(data_path)
    if "data" not in name:
        raise DataError("Cannot locate the label file next to " + data_path)
    return os.path.join(directory, name.replace("data", "gold"))


def load_wic_augmentation(path: str, gold_path: str = None) -> List[PairInstance]:
    """
    Loads a WiC split and converts it to pair instances
    Args:
        path: The `*.data.txt` file (word, pos, index pair, sentence1, sentence2 separated by tabs)
        gold_path: The labels file (`T`/`F` per line), defaults to the sibling `*.gold.txt`
    Returns: One instance per row, rows whose token indices fall outside their sentence are skipped
    """
    gold_path = gold_path or gold_path_for(path)
    with open(gold_path, "r", encoding="utf-8") as f:
        labels = [line.strip() for line in f if line.strip()]

    split = os.path.basename(path).split(".")[0]
    instances = []
    skipped = 0
    with open(path, "r", encoding="utf-8") as f:
        rows = [line.rstrip("\n") for line in f if line.strip()]

    if len(rows) != len(labels):
        raise DataError(path + ": " + str(len(rows)) + " rows but " + str(len(labels)) + " labels in " + gold_path)

    for line_no, (row, label) in enumerate(zip(rows, labels), 1):
        fields = row.split("\t")
        if len(fields) != 5:
            raise DataError(path + ":" + str(line_no) + ": expected 5 tab-separated fields, got " + str(len(fields)))
        word, _, indices, sentence1, sentence2 = fields
        try:
            index1, index2 = (int(index) for index in indices.split("-"))
        except ValueError:
            raise DataError(path + ":" + str(line_no) + ": malformed index pair '" + indices + "'")
        if label not in _LABELS:
            raise DataError(gold_path + ":" + str(line_no) + ": label should be T or F, got '" + label + "'")

        span1 = token_span(sentence1, index1)
        span2 = token_span(sentence2, index2)
        if span1 is None or span2 is None:
            skipped += 1
            continue

        instances.append(PairInstance(id="wic-" + split + "-" + str(line_no), word=word,
                                      text1=sentence1, span1=span1, text2=sentence2, span2=span2,
                                      label=_LABELS[label]))

    if skipped:
        logger.warning(path + ": skipped " + str(skipped) + " rows with a token index out of range")
    return instances
