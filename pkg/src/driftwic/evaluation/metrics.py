from typing import Dict, Sequence

from sklearn.metrics import accuracy_score, confusion_matrix, precision_recall_fscore_support

from driftwic.errors import DataError

CLASS_NAMES = ("false", "true")


class MetricsReport:
    def __init__(self, accuracy: float, macro_f1: float, precision: Dict[str, float], recall: Dict[str, float],
                 f1: Dict[str, float], confusion: Dict[str, int]):
        self.accuracy = accuracy
        self.macro_f1 = macro_f1
        self.precision = precision
        self.recall = recall
        self.f1 = f1
        self.confusion = confusion

    @property
    def n(self) -> int:
        return sum(self.confusion.values())

    def as_dict(self) -> dict:
        values = {"accuracy": self.accuracy, "macro_f1": self.macro_f1}
        for name in CLASS_NAMES:
            values["precision." + name] = self.precision[name]
            values["recall." + name] = self.recall[name]
            values["f1." + name] = self.f1[name]
        for key in ("tp", "fp", "fn", "tn"):
            values[key] = self.confusion[key]
        return values

    def render(self) -> str:
        lines = []
        for key, value in self.as_dict().items():
            lines.append(key + "=" + (format(value, ".6f") if isinstance(value, float) else str(value)))
        return "\n".join(lines)


def score(preds: Sequence, golds: Sequence) -> MetricsReport:
    """
    Accuracy, per-class precision/recall/F1 and macro-F1 of binary predictions.
    A class whose precision or recall is undefined gets F1 = 0.
    Args:
        preds: Predicted labels (bool or 0/1)
        golds: Gold labels (bool or 0/1)
    Returns: The metrics, the confusion counts are for the "true" class
    """
    if len(preds) != len(golds):
        raise DataError("Cannot score " + str(len(preds)) + " predictions against " + str(len(golds)) + " labels")
    if not preds:
        raise DataError("Cannot score an empty prediction set")
    y_pred = [int(bool(pred)) for pred in preds]
    y_true = [int(bool(gold)) for gold in golds]

    precision, recall, f1, _ = precision_recall_fscore_support(y_true, y_pred, labels=[0, 1], zero_division=0)
    tn, fp, fn, tp = confusion_matrix(y_true, y_pred, labels=[0, 1]).ravel()
    return MetricsReport(accuracy=float(accuracy_score(y_true, y_pred)),
                         macro_f1=float(sum(f1)) / 2,
                         precision={name: float(value) for name, value in zip(CLASS_NAMES, precision)},
                         recall={name: float(value) for name, value in zip(CLASS_NAMES, recall)},
                         f1={name: float(value) for name, value in zip(CLASS_NAMES, f1)},
                         confusion={"tp": int(tp), "fp": int(fp), "fn": int(fn), "tn": int(tn)})
