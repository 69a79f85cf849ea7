import math
from abc import abstractmethod
from typing import NamedTuple, Optional

import torch
from torch import nn

from driftwic.errors import ConfigError


class EncoderConfig:
    def __init__(self, vocab_size: int, d: int = 64, n_layers: int = 2, seed: int = 0, max_positions: int = 512):
        self.vocab_size = vocab_size
        self.d = d
        self.n_layers = n_layers
        self.seed = seed
        self.max_positions = max_positions
        self._validate()

    def _validate(self):
        if self.vocab_size is None or self.vocab_size < 1:
            raise ConfigError("encoder vocab_size should be positive")
        if self.d is None or self.d < 2 or self.d % 2 != 0:
            raise ConfigError("encoder.d should be a positive even number")
        if self.n_layers is None or self.n_layers < 1:
            raise ConfigError("encoder.n_layers should be at least 1")
        if self.max_positions < 1:
            raise ConfigError("encoder.max_positions should be positive")

    def as_dict(self) -> dict:
        return {"vocab_size": self.vocab_size, "d": self.d, "n_layers": self.n_layers, "seed": self.seed,
                "max_positions": self.max_positions}


class EncoderOutput(NamedTuple):
    hidden: torch.Tensor
    e_cls: torch.Tensor


class EncoderInterface(nn.Module):
    """
    Contextual encoder producing one vector per token.
    Pre-trained language models plug in by implementing this interface.
    """

    @property
    @abstractmethod
    def hidden_size(self) -> int:
        pass

    @abstractmethod
    def encode(self, token_ids: torch.Tensor, attention_mask: Optional[torch.Tensor] = None,
               cls_index: int = 0) -> EncoderOutput:
        """
        Extend this method to encode token ids
        Args:
            token_ids: (seq_len,) or (batch, seq_len) ids
            attention_mask: 1 for real tokens, 0 for padding, same shape as token_ids
            cls_index: Position of the classification token
        Returns: Per-token embeddings and the classification token embedding
        """
        pass

    @abstractmethod
    def embedding_table(self) -> nn.Parameter:
        """
        Extend this method to expose the token embedding parameters perturbed by adversarial training
        """
        pass

    def forward(self, token_ids, attention_mask=None):
        return self.encode(token_ids, attention_mask)


def sinusoidal_positions(max_positions: int, d: int) -> torch.Tensor:
    position = torch.arange(max_positions, dtype=torch.float32).unsqueeze(1)
    frequency = torch.exp(torch.arange(0, d, 2, dtype=torch.float32) * (-math.log(10000.0) / d))
    table = torch.zeros(max_positions, d)
    table[:, 0::2] = torch.sin(position * frequency)
    table[:, 1::2] = torch.cos(position * frequency)
    return table


class ReferenceEncoder(EncoderInterface):
    """
    Small trainable encoder: token embeddings plus sinusoidal positions, then n_layers of
    h <- h + tanh(W h + U mean(h)) where the mean runs over the non-padding tokens.
    """

    def __init__(self, config: EncoderConfig):
        super().__init__()
        self.config = config
        with torch.random.fork_rng(devices=[]):
            torch.manual_seed(config.seed)
            self.token_embedding = nn.Embedding(config.vocab_size, config.d)
            self.token_mixers = nn.ModuleList(nn.Linear(config.d, config.d) for _ in range(config.n_layers))
            self.context_mixers = nn.ModuleList(nn.Linear(config.d, config.d, bias=False)
                                                for _ in range(config.n_layers))
        self.register_buffer("positions", sinusoidal_positions(config.max_positions, config.d), persistent=False)

    @property
    def hidden_size(self) -> int:
        return self.config.d

    def embedding_table(self) -> nn.Parameter:
        return self.token_embedding.weight

    def encode(self, token_ids: torch.Tensor, attention_mask: Optional[torch.Tensor] = None,
               cls_index: int = 0) -> EncoderOutput:
        single = token_ids.dim() == 1
        if single:
            token_ids = token_ids.unsqueeze(0)
            attention_mask = None if attention_mask is None else attention_mask.unsqueeze(0)
        if token_ids.numel() and (int(token_ids.min()) < 0 or int(token_ids.max()) >= self.config.vocab_size):
            raise ValueError("Token id out of range [0, " + str(self.config.vocab_size) + ")")
        if token_ids.shape[1] > self.config.max_positions:
            raise ValueError("Sequence of length " + str(token_ids.shape[1]) + " exceeds max_positions=" +
                             str(self.config.max_positions))
        if attention_mask is None:
            attention_mask = torch.ones_like(token_ids)

        mask = attention_mask.to(self.token_embedding.weight.dtype).unsqueeze(-1)
        hidden = self.token_embedding(token_ids) + self.positions[:token_ids.shape[1]].to(mask.dtype)
        for token_mixer, context_mixer in zip(self.token_mixers, self.context_mixers):
            context = (hidden * mask).sum(dim=1) / mask.sum(dim=1).clamp(min=1.0)
            hidden = hidden + torch.tanh(token_mixer(hidden) + context_mixer(context).unsqueeze(1))
        hidden = hidden * mask

        if single:
            return EncoderOutput(hidden[0], hidden[0, cls_index])
        return EncoderOutput(hidden, hidden[:, cls_index])
