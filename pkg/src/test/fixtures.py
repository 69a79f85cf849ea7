from typing import List, Sequence

from driftwic.data.instance import PairInstance
from driftwic.model.batch import Example, Featurizer
from driftwic.model.wic_model import ModelConfig, WiCModel
from driftwic.runner import build_featurizer
from driftwic.tokenization.representation import ReprMode
from driftwic.tokenization.tokenizer import split_words
from driftwic.tokenization.vocabulary import Vocabulary


def small_model_config(**overrides) -> ModelConfig:
    values = dict(repr_mode=ReprMode.FIRST_LAST, d=16, n_layers=2, pos_dim=8, glove_dim=8, bilstm_hidden=8,
                  gate_task_dim=8, mlp_hidden=32, seed=0)
    values.update(overrides)
    return ModelConfig(**values)


def build_model(instances: Sequence[PairInstance], model_config: ModelConfig):
    """
    Vocabularies, featurizer and a fresh model for a set of instances
    Returns: (model, featurizer, featurized examples)
    """
    texts = [text for instance in instances for text in (instance.text1, instance.text2)]
    vocabulary = Vocabulary.build(texts, split_words)
    featurizer: Featurizer = build_featurizer(model_config, vocabulary, vocabulary)
    model = WiCModel(model_config, len(vocabulary), len(vocabulary))
    examples: List[Example] = featurizer.featurize_all(instances)
    return model, featurizer, examples
