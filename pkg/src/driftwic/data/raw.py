import json
from typing import Dict, List

from driftwic.data.instance import PairInstance
from driftwic.errors import DataError


def _load_labels(path: str) -> Dict[str, bool]:
    labels = {}
    with open(path, "r", encoding="utf-8") as f:
        for line_no, line in enumerate(f, 1):
            if not line.strip():
                continue
            fields = line.rstrip("\n").split("\t")
            if len(fields) != 2 or fields[1].strip() not in ("0", "1"):
                raise DataError(path + ":" + str(line_no) + ": expected 'id<TAB>0|1'")
            labels[fields[0].strip()] = fields[1].strip() == "1"
    return labels


def _tweet(entry: dict, key: str, record_id: str, path: str, line_no: int):
    tweet = entry.get(key)
    if not isinstance(tweet, dict) or "text" not in tweet:
        raise DataError(path + ":" + str(line_no) + ": record " + record_id + " has no '" + key + "' text")
    start = tweet.get("text_start", tweet.get("start"))
    end = tweet.get("text_end", tweet.get("end"))
    if not isinstance(start, int) or not isinstance(end, int):
        raise DataError(path + ":" + str(line_no) + ": record " + record_id + " has no span for '" + key + "'")
    return tweet["text"], (start, end), tweet.get("date")


def load_tempowic_raw(data_path: str, labels_path: str) -> List[PairInstance]:
    """
    Loads a split of the official release
    Args:
        data_path: JSON lines file, one object per pair with `id`, `word`, `tweet1` and `tweet2`
        labels_path: Tab-separated `id` and 0/1 label per line
    Returns: The instances in file order, texts and spans untouched
    """
    labels = _load_labels(labels_path)
    instances = []
    with open(data_path, "r", encoding="utf-8") as f:
        for line_no, line in enumerate(f, 1):
            if not line.strip():
                continue
            try:
                entry = json.loads(line)
            except json.JSONDecodeError as e:
                raise DataError(data_path + ":" + str(line_no) + ": invalid JSON (" + e.msg + ")")
            record_id = str(entry.get("id", ""))
            if not record_id or "word" not in entry:
                raise DataError(data_path + ":" + str(line_no) + ": record without 'id' or 'word'")
            if record_id not in labels:
                raise DataError(labels_path + ": no label for record " + record_id)
            text1, span1, date1 = _tweet(entry, "tweet1", record_id, data_path, line_no)
            text2, span2, date2 = _tweet(entry, "tweet2", record_id, data_path, line_no)
            instances.append(PairInstance(id=record_id, word=entry["word"], text1=text1, span1=span1,
                                          text2=text2, span2=span2, label=labels[record_id],
                                          date1=date1, date2=date2))
    return instances
