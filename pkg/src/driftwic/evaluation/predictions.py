from typing import List, Sequence

import torch

from driftwic.errors import DataError

DECIMALS = 6
THRESHOLD = 0.5


class PredictionRecord:
    def __init__(self, id: str, prob_true: float, predicted: bool):
        if not 0.0 <= prob_true <= 1.0:
            raise ValueError("Probability of record " + str(id) + " outside [0, 1]: " + str(prob_true))
        if predicted != (prob_true >= THRESHOLD):
            raise ValueError("Record " + str(id) + " predicts " + str(predicted) + " with probability " +
                             str(prob_true))
        self.id = id
        self.prob_true = prob_true
        self.predicted = predicted

    @classmethod
    def from_probability(cls, id: str, prob_true: float) -> "PredictionRecord":
        """
        Builds a record, the probability is rounded to the precision of the prediction file first
        so that written and re-read records make the same decision
        """
        prob_true = round(min(max(float(prob_true), 0.0), 1.0), DECIMALS)
        return cls(id, prob_true, prob_true >= THRESHOLD)

    def __eq__(self, other):
        return isinstance(other, PredictionRecord) and \
            (self.id, self.prob_true, self.predicted) == (other.id, other.prob_true, other.predicted)

    def __repr__(self):
        return "PredictionRecord(" + repr(self.id) + ", " + repr(self.prob_true) + ", " + repr(self.predicted) + ")"


def write_predictions(records: Sequence[PredictionRecord], path: str):
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for record in records:
            f.write(record.id + "\t" + str(int(record.predicted)) + "\t" +
                    format(record.prob_true, "." + str(DECIMALS) + "f") + "\n")


def read_predictions(path: str) -> List[PredictionRecord]:
    records = []
    with open(path, "r", encoding="utf-8") as f:
        for line_no, line in enumerate(f, 1):
            if not line.strip():
                continue
            fields = line.rstrip("\n").split("\t")
            if len(fields) != 3 or fields[1] not in ("0", "1"):
                raise DataError(path + ":" + str(line_no) + ": expected 'id<TAB>0|1<TAB>probability'")
            try:
                records.append(PredictionRecord(fields[0], float(fields[2]), fields[1] == "1"))
            except ValueError as e:
                raise DataError(path + ":" + str(line_no) + ": " + str(e))
    return records


@torch.no_grad()
def predict_probabilities(model, featurizer, examples, batch_size: int = 32) -> List[float]:
    """
    Runs the model over featurized examples
    Args:
        model: Trained model
        featurizer: Featurizer that produced the examples, used to collate them
        examples: Featurized examples
        batch_size: Inference batch size
    Returns: The probability of the "same meaning" class per example, in order
    """
    was_training = model.training
    model.eval()
    probabilities = []
    for start in range(0, len(examples), batch_size):
        batch = featurizer.collate(examples[start:start + batch_size])
        probabilities.extend(float(value) for value in model.predict_proba(batch))
    model.train(was_training)
    return probabilities


def predict_records(model, featurizer, examples, batch_size: int = 32) -> List[PredictionRecord]:
    probabilities = predict_probabilities(model, featurizer, examples, batch_size)
    return [PredictionRecord.from_probability(example.id, probability)
            for example, probability in zip(examples, probabilities)]
