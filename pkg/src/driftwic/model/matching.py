from typing import Optional

import torch
from torch import nn
from torch.nn import functional as F

from driftwic import logger

DEFAULT_EPSILON = 1e-12


class MatchConfig:
    def __init__(self, use_cls: bool = True, use_diff_prod: bool = True):
        self.use_cls = use_cls
        self.use_diff_prod = use_diff_prod

    def feature_dim(self, m: int, d: int) -> int:
        return 2 * m + (2 * m if self.use_diff_prod else 0) + (d if self.use_cls else 0)

    def as_dict(self) -> dict:
        return {"use_cls": self.use_cls, "use_diff_prod": self.use_diff_prod}


def match_features(e1: torch.Tensor, e2: torch.Tensor, e_cls: Optional[torch.Tensor],
                   config: MatchConfig = None) -> torch.Tensor:
    """
    Builds [E1; E2; E1-E2; E1*E2; E_CLS], the last three segments can be dropped by the config
    Args:
        e1: Target encoding in the first text, (..., m)
        e2: Target encoding in the second text, (..., m)
        e_cls: Classification token embedding, (..., d)
        config: Which optional segments to keep
    Returns: The matching features
    """
    config = config or MatchConfig()
    if e1.shape != e2.shape:
        raise ValueError("Target encodings differ in shape: " + str(tuple(e1.shape)) + " vs " + str(tuple(e2.shape)))
    segments = [e1, e2]
    if config.use_diff_prod:
        segments += [e1 - e2, e1 * e2]
    if config.use_cls:
        if e_cls is None:
            raise ValueError("match.use_cls needs the classification embedding")
        if e_cls.shape[:-1] != e1.shape[:-1]:
            raise ValueError("Classification embedding batch shape " + str(tuple(e_cls.shape)) +
                             " does not match " + str(tuple(e1.shape)))
        segments.append(e_cls)
    return torch.cat(segments, dim=-1)


class ClassifierHead(nn.Module):
    """
    Two affine layers with tanh in between, 2 output logits.
    """

    def __init__(self, input_dim: int, hidden_size: int = 256):
        super().__init__()
        if hidden_size <= 0:
            raise ValueError("Classifier hidden size should be positive")
        self.input_dim = input_dim
        self.hidden = nn.Linear(input_dim, hidden_size)
        self.output = nn.Linear(hidden_size, 2)

    def forward(self, features: torch.Tensor) -> torch.Tensor:
        if features.shape[-1] != self.input_dim:
            raise ValueError("Classifier expects " + str(self.input_dim) + " features, got " +
                             str(features.shape[-1]))
        return self.output(torch.tanh(self.hidden(features)))

    def classify(self, features: torch.Tensor) -> torch.Tensor:
        return torch.softmax(self.forward(features), dim=-1)


def classify(features: torch.Tensor, head: ClassifierHead) -> torch.Tensor:
    """
    Class probabilities y_o = softmax(MLP(features)), index 1 is the "same meaning" class
    """
    return head.classify(features)


def loss(y_o: torch.Tensor, y_true: torch.Tensor, epsilon: float = DEFAULT_EPSILON) -> torch.Tensor:
    """
    Cross-entropy of probabilities, -log y_o[y_true] averaged over the batch
    Args:
        y_o: (..., 2) probabilities
        y_true: Gold class indices
        epsilon: Lower clamp of the true-class probability
    Returns: Scalar loss
    """
    picked = y_o.gather(-1, y_true.long().unsqueeze(-1)).squeeze(-1)
    if bool((picked < epsilon).any()):
        logger.warning("True-class probability below " + str(epsilon) + ", clamped in the loss")
        picked = picked.clamp(min=epsilon)
    return -torch.log(picked).mean()


def loss_from_logits(logits: torch.Tensor, y_true: torch.Tensor) -> torch.Tensor:
    return F.cross_entropy(logits, y_true.long())
