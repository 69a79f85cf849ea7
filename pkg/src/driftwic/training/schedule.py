from torch.optim import Optimizer
from torch.optim.lr_scheduler import LambdaLR


def lr_schedule(step: int, total_steps: int, base_lr: float, warmup_ratio: float = 0.1) -> float:
    """
    Linear warmup from 0 to base_lr, then linear decay to 0 at total_steps
    Args:
        step: Current optimizer step, between 0 and total_steps
        total_steps: Number of optimizer steps of the run
        base_lr: Peak learning rate
        warmup_ratio: Share of the steps spent warming up
    Returns: The learning rate at this step
    """
    warmup_steps = warmup_ratio * total_steps
    if step < warmup_steps:
        return base_lr * step / warmup_steps
    if total_steps <= warmup_steps:
        return base_lr
    return base_lr * max(0.0, (total_steps - step) / (total_steps - warmup_steps))


def warmup_scheduler(optimizer: Optimizer, total_steps: int, warmup_ratio: float) -> LambdaLR:
    """
    Applies lr_schedule to every parameter group, each keeping its own base rate
    """
    return LambdaLR(optimizer, lambda step: lr_schedule(min(step, total_steps), total_steps, 1.0, warmup_ratio))
