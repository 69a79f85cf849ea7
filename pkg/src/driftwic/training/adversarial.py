from enum import Enum
from typing import Callable, Dict

import torch
from torch import nn

from driftwic.errors import ConfigError, NumericError

MIN_GRAD_NORM = 1e-12


class NormScope(Enum):
    GLOBAL = "global"
    PER_ROW = "per_row"


class FgmConfig:
    def __init__(self, enabled: bool = True, epsilon: float = 1.0, norm_scope: NormScope = NormScope.GLOBAL,
                 perturb_experts: bool = False):
        self.enabled = enabled
        self.epsilon = epsilon
        self.norm_scope = NormScope(norm_scope)
        self.perturb_experts = perturb_experts
        if not isinstance(epsilon, (int, float)) or isinstance(epsilon, bool):
            raise ConfigError("fgm.epsilon should be a number, got " + repr(epsilon))
        if epsilon < 0:
            raise ConfigError("fgm.epsilon should be positive or 0")

    def as_dict(self) -> dict:
        return {"enabled": self.enabled, "epsilon": self.epsilon, "norm_scope": self.norm_scope.value,
                "perturb_experts": self.perturb_experts}


def fgm_perturbation(grad: torch.Tensor, epsilon: float, norm_scope: NormScope = NormScope.GLOBAL) -> torch.Tensor:
    """
    Scales a gradient to an epsilon-sized step in its own direction
    Args:
        grad: Gradient of the loss with respect to an embedding table
        epsilon: Perturbation radius
        norm_scope: L2 norm over the whole tensor, or over each row separately
    Returns: The perturbation, zero where the gradient norm is below 1e-12
    """
    if norm_scope is NormScope.PER_ROW and grad.dim() > 1:
        norms = grad.norm(dim=-1, keepdim=True)
        safe = torch.where(norms < MIN_GRAD_NORM, torch.ones_like(norms), norms)
        return torch.where(norms < MIN_GRAD_NORM, torch.zeros_like(grad), epsilon * grad / safe)

    norm = grad.norm()
    if not torch.isfinite(norm) or float(norm) < MIN_GRAD_NORM:
        return torch.zeros_like(grad)
    return epsilon * grad / norm


class FGM:
    """
    Fast gradient method on embedding tables: attack() moves each table along its gradient,
    restore() puts the exact original values back.
    """

    def __init__(self, tables: Dict[str, nn.Parameter], config: FgmConfig):
        self.tables = tables
        self.config = config
        self.backup: Dict[str, torch.Tensor] = {}
        self.last_deltas: Dict[str, torch.Tensor] = {}

    def attack(self):
        for name, parameter in self.tables.items():
            if parameter.grad is None:
                continue
            self.backup[name] = parameter.data.clone()
            delta = fgm_perturbation(parameter.grad, self.config.epsilon, self.config.norm_scope)
            self.last_deltas[name] = delta
            parameter.data.add_(delta)

    def restore(self):
        for name, parameter in self.tables.items():
            if name not in self.backup:
                continue
            parameter.data.copy_(self.backup[name])
            if not torch.equal(parameter.data, self.backup[name]):
                raise NumericError("FGM could not restore " + name + " exactly, aborting the step")
        self.backup = {}


def fgm_step(model: nn.Module, batch, loss_fn: Callable, fgm: FGM) -> torch.Tensor:
    """
    Adversarial half of a training step. Gradients of the clean pass must already be populated;
    the adversarial gradients are accumulated on top of them and the tables are restored before returning.
    Args:
        model: Model whose embedding tables fgm perturbs
        batch: Batch of the clean pass
        loss_fn: Maps (model output, batch) to a scalar loss
        fgm: Attack holding the tables
    Returns: The adversarial loss (detached)
    """
    fgm.attack()
    try:
        adversarial_loss = loss_fn(model(batch), batch)
        adversarial_loss.backward()
    finally:
        fgm.restore()
    return adversarial_loss.detach()
