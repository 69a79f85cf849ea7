import os
from typing import List, Optional, Sequence, Tuple

from driftwic import logger
from driftwic.config import RunConfig
from driftwic.data.canonical import load_canonical
from driftwic.data.instance import PairInstance
from driftwic.errors import DataError
from driftwic.evaluation.metrics import MetricsReport, score
from driftwic.evaluation.predictions import PredictionRecord, predict_records
from driftwic.model.batch import Featurizer
from driftwic.model.experts import load_static_embeddings, make_tagger
from driftwic.model.wic_model import ModelConfig, WiCModel
from driftwic.tokenization.tokenizer import WhitespaceTokenizer, split_words
from driftwic.tokenization.vocabulary import Vocabulary
from driftwic.training.checkpoint import Checkpoint, save_checkpoint
from driftwic.training.trainer import HISTORY, History, train

CHECKPOINT_DIR = "checkpoint"
CONFIG_SNAPSHOT = "config.yaml"


def build_featurizer(model_config: ModelConfig, vocabulary: Vocabulary, word_vocabulary: Vocabulary,
                     max_len: int = 256, lowercase: bool = True) -> Featurizer:
    tagger = make_tagger(model_config.tagger) if model_config.uses_experts and model_config.use_pos else None
    return Featurizer(WhitespaceTokenizer(vocabulary, lowercase), word_vocabulary, tagger, max_len,
                      with_words=model_config.uses_experts, lowercase=lowercase)


def checkpoint_featurizer(checkpoint: Checkpoint) -> Featurizer:
    """
    Rebuilds the featurizer a checkpoint was trained with
    """
    snapshot = checkpoint.config_snapshot or {}
    max_len = snapshot.get("training", {}).get("max_len", 256)
    lowercase = snapshot.get("data", {}).get("lowercase", True)
    return build_featurizer(checkpoint.model_config, checkpoint.vocabulary, checkpoint.word_vocabulary, max_len,
                            lowercase)


def predict_instances(checkpoint: Checkpoint, instances: Sequence[PairInstance],
                      batch_size: int = 32) -> List[PredictionRecord]:
    """
    Scores instances with a trained checkpoint
    Args:
        checkpoint: Trained checkpoint
        instances: Canonical instances, labels are ignored
        batch_size: Inference batch size
    Returns: One prediction record per instance, in order
    """
    featurizer = checkpoint_featurizer(checkpoint)
    return predict_records(checkpoint.build_model(), featurizer, featurizer.featurize_all(instances), batch_size)


def score_records(records: Sequence[PredictionRecord], instances: Sequence[PairInstance]) -> MetricsReport:
    """
    Scores prediction records against the gold labels of canonical instances, matched by id
    """
    gold = {instance.id: instance.label for instance in instances}
    missing = [record.id for record in records if record.id not in gold]
    if missing:
        raise DataError("No gold label for ids: " + ", ".join(missing))
    if len(records) != len(gold):
        unscored = sorted(set(gold) - {record.id for record in records})
        raise DataError("No prediction for ids: " + ", ".join(unscored))
    return score([record.predicted for record in records], [gold[record.id] for record in records])


class Runner:
    def __init__(self, config: RunConfig, train_set: Optional[List[PairInstance]] = None,
                 dev_set: Optional[List[PairInstance]] = None):
        self.config = config
        self.train_set = train_set
        self.dev_set = dev_set
        self.checkpoint = None
        self.history = None

    def start(self) -> Tuple[str, History]:
        """
        Runs training end to end and writes the checkpoint, the history and the configuration snapshot
        Returns: The checkpoint directory and the training history
        """
        logger.info("=========== Training started ===========")
        train_set, dev_set = self._load_splits()
        model_config = self.config.model_config()
        train_config = self.config.train_config()
        fgm_config = self.config.fgm_config()

        lowercase = self.config.get("data.lowercase")
        texts = [text for instance in train_set for text in (instance.text1, instance.text2)]
        vocabulary = Vocabulary.build(texts, split_words, lowercase, self.config.get("data.min_count"))
        word_vocabulary = Vocabulary.build(texts, split_words, lowercase)
        featurizer = build_featurizer(model_config, vocabulary, word_vocabulary, train_config.max_len, lowercase)

        model = WiCModel(model_config, len(vocabulary), len(word_vocabulary),
                         self._glove_init(model_config, word_vocabulary))
        self.checkpoint, self.history = train(model, featurizer.featurize_all(train_set),
                                              featurizer.featurize_all(dev_set), train_config, featurizer,
                                              fgm_config, self.config.output_dir, self.config.as_dict())

        output_dir = self.config.output_dir
        checkpoint_path = os.path.join(output_dir, CHECKPOINT_DIR)
        save_checkpoint(self.checkpoint, checkpoint_path)
        self.history.save(os.path.join(output_dir, HISTORY))
        with open(os.path.join(output_dir, CONFIG_SNAPSHOT), "w", encoding="utf-8") as f:
            f.write(self.config.dump())
        self._post_run_log(checkpoint_path, len(train_set), len(dev_set))
        return checkpoint_path, self.history

    def _load_splits(self) -> Tuple[List[PairInstance], List[PairInstance]]:
        if self.train_set is None or self.dev_set is None:
            self.config.require_data()
        train_set = self.train_set if self.train_set is not None else load_canonical(self.config.data_path("train"))
        dev_set = self.dev_set if self.dev_set is not None else load_canonical(self.config.data_path("dev"))
        augment = self.config.data_path("augment")
        if augment is not None:
            extra = load_canonical(augment)
            logger.info("Adding " + str(len(extra)) + " augmentation pairs to the training split")
            train_set = list(train_set) + extra
        if not train_set or not dev_set:
            raise DataError("Training needs non-empty train and dev splits")
        return train_set, dev_set

    def _glove_init(self, model_config: ModelConfig, word_vocabulary: Vocabulary):
        path = self.config.data_path("glove")
        if path is None or not (model_config.uses_experts and model_config.use_glove):
            return None
        table = load_static_embeddings(path, model_config.glove_dim, self.config.oov_policy(), self.config.seed)
        logger.info("Loaded " + str(len(table)) + " static word vectors from " + path)
        return table.matrix_for(word_vocabulary.tokens)

    def _post_run_log(self, checkpoint_path: str, n_train: int, n_dev: int):
        logger.info("=========== Training complete ===========")
        logger.info("Training pairs : " + str(n_train))
        logger.info("Dev pairs : " + str(n_dev))
        logger.info("Epochs run : " + str(len(self.history)))
        logger.info("Best epoch : " + str(self.checkpoint.metrics.get("epoch")))
        logger.log_metrics("Best dev :", {"accuracy": self.checkpoint.metrics.get("accuracy"),
                                          "macro_f1": self.checkpoint.metrics.get("macro_f1")})
        logger.info("Checkpoint : " + checkpoint_path)
