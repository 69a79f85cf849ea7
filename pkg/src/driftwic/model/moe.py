from enum import Enum
from typing import List, Optional, Sequence

import torch
from torch import nn

from driftwic.errors import ConfigError
from driftwic.model.experts import ExpertBundle

EXPERT_NAMES = ("ctx", "pos", "glove")


class GateVariant(Enum):
    NONE = "none"
    S_GATE = "s_gate"
    J_GATE = "j_gate"


class GateWeights:
    """
    Expert weights produced by a gate, last dimension follows `names`.
    """

    def __init__(self, weights: torch.Tensor, names: Sequence[str]):
        self.weights = weights
        self.names = list(names)

    def weight_of(self, name: str) -> Optional[torch.Tensor]:
        if name not in self.names:
            return None
        return self.weights[..., self.names.index(name)]

    @property
    def w_ctx(self) -> Optional[torch.Tensor]:
        return self.weight_of("ctx")

    @property
    def w_pos(self) -> Optional[torch.Tensor]:
        return self.weight_of("pos")

    @property
    def w_glove(self) -> Optional[torch.Tensor]:
        return self.weight_of("glove")


def _check_dims(experts: torch.Tensor, n_experts: int, dim: int):
    if experts.shape[-2:] != (n_experts, dim):
        raise ValueError("Gate expects " + str(n_experts) + " experts of dimension " + str(dim) +
                         ", got shape " + str(tuple(experts.shape)))


class SGate(nn.Module):
    """
    Separate gate: w_i = sigmoid(theta [V_t; e_i]) for every expert i on its own.
    """

    def __init__(self, n_experts: int, dim: int, task_dim: int = 64):
        super().__init__()
        self.n_experts = n_experts
        self.dim = dim
        self.task_vector = nn.Parameter(torch.empty(task_dim).normal_(0.0, 0.02))
        self.theta = nn.Linear(task_dim + dim, 1, bias=False)

    def forward(self, experts: torch.Tensor) -> torch.Tensor:
        _check_dims(experts, self.n_experts, self.dim)
        task = self.task_vector.to(experts.dtype).expand(*experts.shape[:-1], -1)
        return torch.sigmoid(self.theta(torch.cat([task, experts], dim=-1))).squeeze(-1)


class JGate(nn.Module):
    """
    Joint gate: W = softmax(theta [e_1; ...; e_n]) over all experts at once.
    """

    def __init__(self, n_experts: int, dim: int):
        super().__init__()
        self.n_experts = n_experts
        self.dim = dim
        self.theta = nn.Linear(n_experts * dim, n_experts, bias=False)

    def logits(self, experts: torch.Tensor) -> torch.Tensor:
        _check_dims(experts, self.n_experts, self.dim)
        return self.theta(experts.flatten(start_dim=-2))

    @staticmethod
    def weights_from_logits(logits: torch.Tensor) -> torch.Tensor:
        return torch.softmax(logits, dim=-1)

    def forward(self, experts: torch.Tensor) -> torch.Tensor:
        return self.weights_from_logits(self.logits(experts))


def s_gate(bundle: ExpertBundle, params: SGate) -> GateWeights:
    return GateWeights(params(bundle.stacked()), bundle.names())


def j_gate(bundle: ExpertBundle, params: JGate) -> GateWeights:
    return GateWeights(params(bundle.stacked()), bundle.names())


def mix(bundle: ExpertBundle, weights: GateWeights) -> torch.Tensor:
    """
    Weighted sum of the expert encodings, weights are used as given (no renormalisation)
    Args:
        bundle: Expert encodings of equal dimension
        weights: One weight per enabled expert
    Returns: The fused target encoding
    """
    if weights.names != bundle.names():
        raise ValueError("Gate weights for " + str(weights.names) + " do not match experts " + str(bundle.names()))
    return (weights.weights.unsqueeze(-1) * bundle.stacked()).sum(dim=-2)


class MoeFusion(nn.Module):
    """
    One gating network over the enabled experts of one text.
    """

    def __init__(self, variant: GateVariant, dim: int, use_pos: bool = True, use_glove: bool = True,
                 task_dim: int = 64):
        super().__init__()
        if variant is GateVariant.NONE:
            raise ConfigError("MoeFusion needs moe.variant s_gate or j_gate")
        if not use_pos and not use_glove:
            raise ConfigError("moe.variant " + variant.value + " needs moe.use_pos or moe.use_glove")
        self.variant = variant
        self.expert_names: List[str] = ["ctx"] + (["pos"] if use_pos else []) + (["glove"] if use_glove else [])
        if variant is GateVariant.S_GATE:
            self.gate = SGate(len(self.expert_names), dim, task_dim)
        else:
            self.gate = JGate(len(self.expert_names), dim)

    def gate_weights(self, bundle: ExpertBundle) -> GateWeights:
        if bundle.names() != self.expert_names:
            raise ValueError("Expected experts " + str(self.expert_names) + ", got " + str(bundle.names()))
        if self.variant is GateVariant.S_GATE:
            return s_gate(bundle, self.gate)
        return j_gate(bundle, self.gate)

    def forward(self, bundle: ExpertBundle) -> torch.Tensor:
        return mix(bundle, self.gate_weights(bundle))
