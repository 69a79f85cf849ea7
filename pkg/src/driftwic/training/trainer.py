import copy
import json
import math
import os
from typing import List, Optional, Sequence, Tuple

import torch
from torch.optim import AdamW
from torch.utils.data import DataLoader

from driftwic import logger
from driftwic.errors import ConfigError, DataError, NumericError
from driftwic.evaluation.metrics import score
from driftwic.evaluation.predictions import THRESHOLD, predict_probabilities
from driftwic.model.batch import Batch, Example, Featurizer
from driftwic.model.matching import loss_from_logits
from driftwic.model.wic_model import WiCModel
from driftwic.training.adversarial import FGM, FgmConfig, fgm_step
from driftwic.training.checkpoint import Checkpoint
from driftwic.training.schedule import warmup_scheduler

DIAGNOSTIC = "diagnostic.json"
HISTORY = "history.json"


class TrainConfig:
    def __init__(self, batch_size: int = 8, max_len: int = 256, lr_encoder: float = 1e-6, lr_bilstm: float = 1e-4,
                 warmup_ratio: float = 0.1, epochs: int = 20, seed: int = 13, early_stop_patience: int = 5,
                 weight_decay: float = 0.01):
        self.batch_size = batch_size
        self.max_len = max_len
        self.lr_encoder = lr_encoder
        self.lr_bilstm = lr_bilstm
        self.warmup_ratio = warmup_ratio
        self.epochs = epochs
        self.seed = seed
        self.early_stop_patience = early_stop_patience
        self.weight_decay = weight_decay
        self._validate()

    def _validate(self):
        for name in ("batch_size", "max_len", "epochs", "early_stop_patience"):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool) or value <= 0:
                raise ConfigError("training." + name + " should be a positive integer")
        for name in ("lr_encoder", "lr_bilstm", "warmup_ratio", "weight_decay"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise ConfigError("training." + name + " should be a number, got " + repr(value))
        for name in ("lr_encoder", "lr_bilstm"):
            if getattr(self, name) <= 0:
                raise ConfigError("training." + name + " should be positive")
        if not 0 <= self.warmup_ratio < 1:
            raise ConfigError("training.warmup_ratio should be in [0, 1)")
        if self.weight_decay < 0:
            raise ConfigError("training.weight_decay should be positive or 0")

    def as_dict(self) -> dict:
        return {"batch_size": self.batch_size, "max_len": self.max_len, "lr_encoder": self.lr_encoder,
                "lr_bilstm": self.lr_bilstm, "warmup_ratio": self.warmup_ratio, "epochs": self.epochs,
                "seed": self.seed, "early_stop_patience": self.early_stop_patience,
                "weight_decay": self.weight_decay}


class History:
    """
    Per-epoch training log
    """

    def __init__(self, entries: Optional[List[dict]] = None):
        self.entries = entries or []

    def __len__(self):
        return len(self.entries)

    def __eq__(self, other):
        return isinstance(other, History) and self.entries == other.entries

    def append(self, entry: dict):
        self.entries.append(entry)

    @property
    def best_epoch(self) -> Optional[int]:
        best = None
        for entry in self.entries:
            if best is None or entry["dev_macro_f1"] > best["dev_macro_f1"]:
                best = entry
        return best["epoch"] if best else None

    def to_json(self) -> str:
        return json.dumps(self.entries, indent=2) + "\n"

    def save(self, path: str):
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(self.to_json())

    @classmethod
    def load(cls, path: str) -> "History":
        with open(path, "r", encoding="utf-8") as f:
            return cls(json.load(f))


def build_optimizer(model: WiCModel, config: TrainConfig) -> AdamW:
    return AdamW(model.parameter_groups(config.lr_encoder, config.lr_bilstm, config.weight_decay),
                 lr=config.lr_encoder)


class Trainer:
    """
    Mini-batch training of a pair classifier: AdamW over the differential learning rate groups,
    linear warmup then decay, optional FGM adversarial step, model selection on dev macro-F1.
    """

    def __init__(self, model: WiCModel, featurizer: Featurizer, config: TrainConfig,
                 fgm_config: Optional[FgmConfig] = None, output_dir: Optional[str] = None):
        self.model = model
        self.featurizer = featurizer
        self.config = config
        self.fgm_config = fgm_config
        self.output_dir = output_dir
        self.optimizer = None
        self.scheduler = None
        self.fgm = None
        if fgm_config is not None and fgm_config.enabled:
            self.fgm = FGM(model.perturbable_tables(fgm_config.perturb_experts), fgm_config)

    def _loader(self, examples: Sequence[Example]) -> DataLoader:
        generator = torch.Generator()
        generator.manual_seed(self.config.seed)
        return DataLoader(list(examples), batch_size=self.config.batch_size, shuffle=True, generator=generator,
                          collate_fn=self.featurizer.collate)

    @staticmethod
    def _loss(logits: torch.Tensor, batch: Batch) -> torch.Tensor:
        return loss_from_logits(logits, batch.labels)

    def _dump_diagnostic(self, epoch: int, step: int, batch: Batch, loss: torch.Tensor):
        state = {"epoch": epoch, "step": step, "batch_ids": list(batch.ids), "loss": float(loss),
                 "parameter_norms": {name: float(parameter.detach().norm())
                                     for name, parameter in self.model.named_parameters()}}
        if self.output_dir is None:
            logger.error("Diagnostic state: " + json.dumps(state))
            return
        os.makedirs(self.output_dir, exist_ok=True)
        path = os.path.join(self.output_dir, DIAGNOSTIC)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(state, f, indent=2)
        logger.error("Diagnostic state written to " + path)

    def _zero_gradient_rows(self) -> List[Tuple[torch.nn.Parameter, torch.Tensor, torch.Tensor]]:
        """
        Embedding rows absent from the batch, with their values before the optimizer step.
        Adam moments would otherwise keep moving them.
        """
        frozen = []
        for table in self.model.perturbable_tables(include_experts=True).values():
            if table.grad is None:
                continue
            rows = (table.grad == 0).all(dim=-1)
            if bool(rows.any()):
                frozen.append((table, rows, table.detach()[rows].clone()))
        return frozen

    @staticmethod
    @torch.no_grad()
    def _restore_rows(frozen: List[Tuple[torch.nn.Parameter, torch.Tensor, torch.Tensor]]):
        for table, rows, values in frozen:
            table[rows] = values

    def train_step(self, batch: Batch, epoch: int = 0, step: int = 0) -> Tuple[float, int]:
        """
        One optimizer step on a batch
        Returns: The clean loss and the number of correctly classified pairs
        """
        self.optimizer.zero_grad(set_to_none=True)
        logits = self.model(batch)
        loss = self._loss(logits, batch)
        if not torch.isfinite(loss):
            self._dump_diagnostic(epoch, step, batch, loss)
            raise NumericError("Non-finite loss at epoch " + str(epoch) + ", step " + str(step))
        loss.backward()
        if self.fgm is not None:
            adversarial_loss = fgm_step(self.model, batch, self._loss, self.fgm)
            if not torch.isfinite(adversarial_loss):
                self._dump_diagnostic(epoch, step, batch, adversarial_loss)
                raise NumericError("Non-finite adversarial loss at epoch " + str(epoch) + ", step " + str(step))
        frozen = self._zero_gradient_rows()
        self.optimizer.step()
        self._restore_rows(frozen)
        self.scheduler.step()
        correct = int((logits.detach().argmax(dim=-1) == batch.labels).sum())
        return float(loss.detach()) * len(batch), correct

    def evaluate(self, examples: Sequence[Example]) -> dict:
        probabilities = predict_probabilities(self.model, self.featurizer, examples, self.config.batch_size)
        report = score([probability >= THRESHOLD for probability in probabilities],
                       [example.label for example in examples])
        return report.as_dict()

    def fit(self, train_examples: Sequence[Example], dev_examples: Sequence[Example]) -> Tuple[dict, History]:
        """
        Trains until the epoch budget or early stopping, then restores the best parameters
        Args:
            train_examples: Featurized training pairs
            dev_examples: Featurized dev pairs used for model selection
        Returns: The dev metrics of the best epoch and the training history
        """
        if not train_examples or not dev_examples:
            raise DataError("Training needs non-empty train and dev sets")
        loader = self._loader(train_examples)
        total_steps = self.config.epochs * len(loader)
        self.optimizer = build_optimizer(self.model, self.config)
        self.scheduler = warmup_scheduler(self.optimizer, total_steps, self.config.warmup_ratio)

        history = History()
        best_state = None
        best_metrics = None
        best_f1 = -math.inf
        stale = 0
        step = 0
        for epoch in range(1, self.config.epochs + 1):
            self.model.train()
            total_loss = 0.0
            correct = 0
            for batch in loader:
                batch_loss, batch_correct = self.train_step(batch, epoch, step)
                total_loss += batch_loss
                correct += batch_correct
                step += 1

            dev_metrics = self.evaluate(dev_examples)
            entry = {"epoch": epoch,
                     "train_loss": total_loss / len(train_examples),
                     "train_accuracy": correct / len(train_examples),
                     "lr": self.optimizer.param_groups[0]["lr"],
                     "dev_accuracy": dev_metrics["accuracy"],
                     "dev_macro_f1": dev_metrics["macro_f1"]}
            history.append(entry)
            logger.log_metrics("epoch " + str(epoch), entry)

            if dev_metrics["macro_f1"] > best_f1:
                best_f1 = dev_metrics["macro_f1"]
                best_metrics = dict(dev_metrics, epoch=epoch)
                best_state = copy.deepcopy(self.model.state_dict())
                stale = 0
            else:
                stale += 1
                if stale >= self.config.early_stop_patience:
                    logger.info("Early stopping at epoch " + str(epoch) + ", best dev macro-F1 at epoch " +
                                str(best_metrics["epoch"]))
                    break

        self.model.load_state_dict(best_state)
        self.model.eval()
        return best_metrics, history


def train(model: WiCModel, train_set: Sequence[Example], dev_set: Sequence[Example], config: TrainConfig,
          featurizer: Featurizer, fgm_config: Optional[FgmConfig] = None, output_dir: Optional[str] = None,
          config_snapshot: Optional[dict] = None) -> Tuple[Checkpoint, History]:
    """
    Trains a model and returns its best-on-dev checkpoint
    Args:
        model: Freshly built model, trained in place
        train_set: Featurized training pairs
        dev_set: Featurized dev pairs
        config: Training regime
        featurizer: Featurizer of both sets, its vocabularies go into the checkpoint
        fgm_config: Adversarial training settings, None or disabled for plain training
        output_dir: Where the diagnostic state goes if the loss diverges
        config_snapshot: Run configuration stored in the checkpoint manifest
    Returns: The best checkpoint and the per-epoch history
    """
    trainer = Trainer(model, featurizer, config, fgm_config, output_dir)
    best_metrics, history = trainer.fit(train_set, dev_set)
    checkpoint = Checkpoint.from_model(model, featurizer.tokenizer.vocabulary, featurizer.word_vocabulary,
                                       best_metrics, config_snapshot)
    return checkpoint, history
