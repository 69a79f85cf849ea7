import json
from typing import Iterable, List

from driftwic.data.instance import PairInstance
from driftwic.errors import DataError, SchemaError

FIELDS = ("id", "word", "text1", "start1", "end1", "date1", "text2", "start2", "end2", "date2", "label")
_REQUIRED = ("id", "word", "text1", "start1", "end1", "text2", "start2", "end2", "label")


def to_record(instance: PairInstance) -> dict:
    values = (instance.id, instance.word,
              instance.text1, instance.span1[0], instance.span1[1], instance.date1,
              instance.text2, instance.span2[0], instance.span2[1], instance.date2,
              1 if instance.label else 0)
    return dict(zip(FIELDS, values))


def from_record(record: dict) -> PairInstance:
    """
    Builds an instance from one canonical record
    Args:
        record: Decoded record
    Returns: The instance
    Raises:
        SchemaError: A field is missing or has the wrong type, the error names the record id and the field
    """
    record_id = record.get("id", "<unknown>")
    for name in _REQUIRED:
        if name not in record or record[name] is None:
            raise SchemaError(record_id, name)
    for name in ("start1", "end1", "start2", "end2"):
        if not isinstance(record[name], int) or isinstance(record[name], bool):
            raise SchemaError(record_id, name, "expected an integer for")
    for name in ("id", "word", "text1", "text2"):
        if not isinstance(record[name], str):
            raise SchemaError(record_id, name, "expected a string for")
    for name in ("date1", "date2"):
        if record.get(name) is not None and not isinstance(record[name], str):
            raise SchemaError(record_id, name, "expected an ISO date string or null for")
    if record["label"] not in (0, 1) or isinstance(record["label"], float):
        raise SchemaError(record_id, "label", "expected 0 or 1 for")
    unknown = sorted(set(record) - set(FIELDS))
    if unknown:
        raise SchemaError(record_id, unknown[0], "unknown field")

    return PairInstance(id=record["id"], word=record["word"],
                        text1=record["text1"], span1=(record["start1"], record["end1"]),
                        text2=record["text2"], span2=(record["start2"], record["end2"]),
                        label=record["label"] == 1,
                        date1=record.get("date1"), date2=record.get("date2"))


def save_canonical(instances: Iterable[PairInstance], path: str):
    """
    Writes instances as one JSON record per line, fields always in the same order
    Args:
        instances: Instances to write
        path: Destination file
    """
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for instance in instances:
            f.write(json.dumps(to_record(instance), ensure_ascii=False) + "\n")


def load_canonical(path: str) -> List[PairInstance]:
    """
    Reads a canonical dataset file
    Args:
        path: File written by save_canonical
    Returns: The instances in file order
    """
    instances = []
    with open(path, "r", encoding="utf-8") as f:
        for line_no, line in enumerate(f, 1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as e:
                raise DataError(path + ":" + str(line_no) + ": invalid record (" + e.msg + ")")
            if not isinstance(record, dict):
                raise DataError(path + ":" + str(line_no) + ": record is not an object")
            instances.append(from_record(record))
    return instances
