from driftwic.evaluation.metrics import MetricsReport, score
from driftwic.evaluation.predictions import (PredictionRecord, read_predictions, write_predictions,
                                             predict_probabilities, predict_records)
from driftwic.evaluation.ensemble import Averaging, ensemble
from driftwic.evaluation.report import RunResult, Table, report_table
