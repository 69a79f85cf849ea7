import math
from enum import Enum
from typing import List, Sequence

from driftwic.errors import DataError
from driftwic.evaluation.predictions import PredictionRecord

_LOGIT_CLAMP = 1e-7


class Averaging(Enum):
    PROBABILITY = "probability"
    LOGIT = "logit"


def _logit(probability: float) -> float:
    probability = min(max(probability, _LOGIT_CLAMP), 1.0 - _LOGIT_CLAMP)
    return math.log(probability / (1.0 - probability))


def ensemble(prediction_sets: Sequence[Sequence[PredictionRecord]],
             averaging: Averaging = Averaging.PROBABILITY) -> List[PredictionRecord]:
    """
    Averages the scores of several models per id and thresholds the mean at 0.5.
    Sums are exact (math.fsum) so the result does not depend on the order of the models.
    Args:
        prediction_sets: One prediction set per model, all with the same ids
        averaging: Mean of probabilities, or mean of logits mapped back through the sigmoid
    Returns: The ensembled records, in the record order of the first set
    """
    if not prediction_sets:
        raise DataError("Cannot ensemble zero prediction sets")
    by_id = []
    for records in prediction_sets:
        scores = {record.id: record.prob_true for record in records}
        if len(scores) != len(records):
            raise DataError("Prediction set contains duplicate ids")
        by_id.append(scores)

    reference = set(by_id[0])
    for k, scores in enumerate(by_id[1:], 2):
        missing = sorted(reference.symmetric_difference(scores))
        if missing:
            raise DataError("Prediction set " + str(k) + " does not cover the same ids, differing ids: " +
                            ", ".join(missing))

    combined = []
    for record in prediction_sets[0]:
        values = [scores[record.id] for scores in by_id]
        if averaging is Averaging.LOGIT:
            mean = 1.0 / (1.0 + math.exp(-math.fsum(_logit(value) for value in values) / len(values)))
        else:
            mean = math.fsum(values) / len(values)
        combined.append(PredictionRecord.from_probability(record.id, mean))
    return combined
