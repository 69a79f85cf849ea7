from driftwic.model.encoder import EncoderConfig, EncoderOutput, EncoderInterface, ReferenceEncoder
from driftwic.model.experts import (UPOS_TAGS, PosSequence, LexiconTagger, NltkTagger, pos_tag, OovPolicy,
                                    StaticEmbeddingTable, load_static_embeddings, ExpertBundle, BiLstmExpert)
from driftwic.model.moe import GateVariant, GateWeights, SGate, JGate, MoeFusion, s_gate, j_gate, mix
from driftwic.model.matching import MatchConfig, ClassifierHead, match_features, classify, loss
from driftwic.model.batch import Batch, Example, Featurizer
from driftwic.model.wic_model import ModelConfig, WiCModel
