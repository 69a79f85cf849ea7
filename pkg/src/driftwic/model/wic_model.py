from typing import Dict, List, Optional

import torch
from torch import nn

from driftwic.errors import ConfigError
from driftwic.model.batch import Batch, WordBatch
from driftwic.model.encoder import EncoderConfig, ReferenceEncoder
from driftwic.model.experts import BiLstmExpert, ExpertBundle, UPOS_TAGS
from driftwic.model.matching import ClassifierHead, MatchConfig, match_features
from driftwic.model.moe import GateVariant, MoeFusion
from driftwic.tokenization.representation import ReprMode, extract_targets


class ModelConfig:
    def __init__(self, repr_mode: ReprMode = ReprMode.FIRST_LAST, d: int = 64, n_layers: int = 2,
                 variant: GateVariant = GateVariant.NONE, use_pos: bool = True, use_glove: bool = True,
                 pos_dim: int = 32, glove_dim: int = 50, bilstm_hidden: int = 64, gate_task_dim: int = 64,
                 match: MatchConfig = None, mlp_hidden: int = 256, tagger: str = "lexicon", seed: int = 0):
        self.repr_mode = ReprMode(repr_mode)
        self.d = d
        self.n_layers = n_layers
        self.variant = GateVariant(variant)
        self.use_pos = use_pos
        self.use_glove = use_glove
        self.pos_dim = pos_dim
        self.glove_dim = glove_dim
        self.bilstm_hidden = bilstm_hidden
        self.gate_task_dim = gate_task_dim
        self.match = match or MatchConfig()
        self.mlp_hidden = mlp_hidden
        self.tagger = tagger
        self.seed = seed
        self._validate()

    def _validate(self):
        for name in ("pos_dim", "glove_dim", "bilstm_hidden", "gate_task_dim", "mlp_hidden"):
            if getattr(self, name) is None or getattr(self, name) <= 0:
                raise ConfigError("model." + name + " should be positive")
        if self.uses_experts and not (self.use_pos or self.use_glove):
            raise ConfigError("moe.variant " + self.variant.value + " needs moe.use_pos or moe.use_glove")

    @property
    def uses_experts(self) -> bool:
        return self.variant is not GateVariant.NONE

    @property
    def target_dim(self) -> int:
        return self.repr_mode.output_dim(self.d)

    def as_dict(self) -> dict:
        return {"repr_mode": self.repr_mode.value, "d": self.d, "n_layers": self.n_layers,
                "variant": self.variant.value, "use_pos": self.use_pos, "use_glove": self.use_glove,
                "pos_dim": self.pos_dim, "glove_dim": self.glove_dim, "bilstm_hidden": self.bilstm_hidden,
                "gate_task_dim": self.gate_task_dim, "match": self.match.as_dict(), "mlp_hidden": self.mlp_hidden,
                "tagger": self.tagger, "seed": self.seed}

    @classmethod
    def from_dict(cls, values: dict) -> "ModelConfig":
        values = dict(values)
        match = MatchConfig(**values.pop("match", {}))
        return cls(match=match, **values)


class WiCModel(nn.Module):
    """
    Encoder, target extraction, optional POS and word-semantic experts fused by two gating networks
    (one per text), matching layer and classifier head.
    """

    def __init__(self, config: ModelConfig, vocab_size: int, n_words: int = 4,
                 glove_init: Optional[torch.Tensor] = None):
        super().__init__()
        self.config = config
        self.encoder = ReferenceEncoder(EncoderConfig(vocab_size, config.d, config.n_layers, config.seed))
        m = config.target_dim

        with torch.random.fork_rng(devices=[]):
            torch.manual_seed(config.seed + 1)
            self.pos_expert = None
            self.glove_expert = None
            self.moe1 = None
            self.moe2 = None
            if config.uses_experts:
                if config.use_pos:
                    self.pos_expert = BiLstmExpert(len(UPOS_TAGS) + 1, config.pos_dim, config.bilstm_hidden, m)
                if config.use_glove:
                    self.glove_expert = BiLstmExpert(n_words, config.glove_dim, config.bilstm_hidden, m, glove_init)
                self.moe1 = MoeFusion(config.variant, m, config.use_pos, config.use_glove, config.gate_task_dim)
                self.moe2 = MoeFusion(config.variant, m, config.use_pos, config.use_glove, config.gate_task_dim)
            self.head = ClassifierHead(config.match.feature_dim(m, config.d), config.mlp_hidden)

    def _bundle(self, e_ctx: torch.Tensor, words: WordBatch) -> ExpertBundle:
        if words is None:
            raise ValueError("Expert models need word-level inputs in the batch")
        e_pos = None
        e_glove = None
        if self.pos_expert is not None:
            e_pos = self.pos_expert(words.pos_ids, words.lengths, words.targets)
        if self.glove_expert is not None:
            e_glove = self.glove_expert(words.word_ids, words.lengths, words.targets)
        return ExpertBundle(e_ctx, e_pos, e_glove)

    def target_encodings(self, batch: Batch):
        """
        Encodes the pair and returns the (fused) target encodings of both texts and the CLS embedding
        """
        output = self.encoder.encode(batch.token_ids, batch.attention_mask)
        e1 = extract_targets(output.hidden, batch.spans1, self.config.repr_mode)
        e2 = extract_targets(output.hidden, batch.spans2, self.config.repr_mode)
        if self.config.uses_experts:
            e1 = self.moe1(self._bundle(e1, batch.words1))
            e2 = self.moe2(self._bundle(e2, batch.words2))
        return e1, e2, output.e_cls

    def forward(self, batch: Batch) -> torch.Tensor:
        e1, e2, e_cls = self.target_encodings(batch)
        return self.head(match_features(e1, e2, e_cls, self.config.match))

    def predict_proba(self, batch: Batch) -> torch.Tensor:
        """
        Returns: The probability of the "same meaning" class for every pair of the batch
        """
        return torch.softmax(self.forward(batch), dim=-1)[:, 1]

    def expert_modules(self) -> List[nn.Module]:
        return [module for module in (self.pos_expert, self.glove_expert, self.moe1, self.moe2) if module is not None]

    def perturbable_tables(self, include_experts: bool = False) -> Dict[str, nn.Parameter]:
        tables = {"encoder.token_embedding.weight": self.encoder.embedding_table()}
        if include_experts:
            if self.pos_expert is not None:
                tables["pos_expert.embedding.weight"] = self.pos_expert.embedding.weight
            if self.glove_expert is not None:
                tables["glove_expert.embedding.weight"] = self.glove_expert.embedding.weight
        return tables

    def parameter_groups(self, lr_encoder: float, lr_bilstm: float, weight_decay: float = 0.01) -> List[dict]:
        """
        Splits the parameters for differential learning rates: encoder and head on one rate,
        recurrent experts and gates on the other. Biases and normalisation parameters are not decayed.
        Args:
            lr_encoder: Learning rate of the encoder and classifier head
            lr_bilstm: Learning rate of the experts and gates
            weight_decay: Decoupled weight decay of the remaining parameters
        Returns: Parameter groups for the optimizer, empty groups omitted
        """
        expert_ids = {id(parameter) for module in self.expert_modules() for parameter in module.parameters()}
        groups = {}
        for name, parameter in self.named_parameters():
            if not parameter.requires_grad:
                continue
            family = "experts" if id(parameter) in expert_ids else "encoder"
            no_decay = name.endswith("bias") or "norm" in name
            key = (family, no_decay)
            if key not in groups:
                groups[key] = {"params": [], "names": [],
                               "lr": lr_bilstm if family == "experts" else lr_encoder,
                               "weight_decay": 0.0 if no_decay else weight_decay,
                               "group": family}
            groups[key]["params"].append(parameter)
            groups[key]["names"].append(name)
        return [groups[key] for key in sorted(groups)]
