from enum import Enum

import torch


class ReprMode(Enum):
    FIRST = "first"
    MEAN = "mean"
    FIRST_LAST = "first_last"

    def output_dim(self, hidden_size: int) -> int:
        return 2 * hidden_size if self is ReprMode.FIRST_LAST else hidden_size


def extract_target(embeddings: torch.Tensor, span, mode: ReprMode = ReprMode.FIRST_LAST) -> torch.Tensor:
    """
    Builds the target word vector from the per-token embeddings of its span
    Args:
        embeddings: (seq_len, d) contextual embeddings
        span: Half-open token range of the target
        mode: First token, mean over the span, or first and last tokens concatenated
    Returns: A vector of size d, or 2d for FIRST_LAST
    """
    start, end = int(span[0]), int(span[1])
    if end <= start:
        raise ValueError("Cannot extract a target from the empty span [" + str(start) + ", " + str(end) + ")")
    if start < 0 or end > embeddings.shape[0]:
        raise ValueError("Span [" + str(start) + ", " + str(end) + ") is outside the " +
                         str(embeddings.shape[0]) + " embedding rows")

    if mode is ReprMode.FIRST:
        return embeddings[start]
    if mode is ReprMode.MEAN:
        return embeddings[start:end].mean(dim=0)
    return torch.cat([embeddings[start], embeddings[end - 1]], dim=-1)


def extract_targets(embeddings: torch.Tensor, spans: torch.Tensor, mode: ReprMode = ReprMode.FIRST_LAST) -> torch.Tensor:
    """
    Batched extract_target
    Args:
        embeddings: (batch, seq_len, d)
        spans: (batch, 2) long tensor of half-open token ranges
        mode: Representation mode
    Returns: (batch, d) or (batch, 2d)
    """
    starts, ends = spans[:, 0], spans[:, 1]
    if bool((ends <= starts).any()):
        raise ValueError("Cannot extract a target from an empty span")
    rows = torch.arange(embeddings.shape[0], device=embeddings.device)
    first = embeddings[rows, starts]
    if mode is ReprMode.FIRST:
        return first
    if mode is ReprMode.FIRST_LAST:
        return torch.cat([first, embeddings[rows, ends - 1]], dim=-1)

    positions = torch.arange(embeddings.shape[1], device=embeddings.device).unsqueeze(0)
    mask = ((positions >= starts.unsqueeze(1)) & (positions < ends.unsqueeze(1))).to(embeddings.dtype)
    total = (embeddings * mask.unsqueeze(-1)).sum(dim=1)
    return total / (ends - starts).to(embeddings.dtype).unsqueeze(-1)
