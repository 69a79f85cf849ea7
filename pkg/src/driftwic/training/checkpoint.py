import json
import os
from collections import OrderedDict
from typing import Dict, Optional

import numpy as np
import torch

from driftwic.errors import CheckpointError
from driftwic.model.wic_model import ModelConfig, WiCModel
from driftwic.tokenization.vocabulary import Vocabulary

MANIFEST = "manifest.json"
PARAMS = "params.bin"
VOCAB = "vocab.txt"
WORDS = "words.txt"
FORMAT_VERSION = 1
_DTYPE = np.dtype("<f4")


class Checkpoint:
    """
    Everything needed to rebuild a trained model: its configuration, parameters and vocabularies.
    """

    def __init__(self, model_config: ModelConfig, state: Dict[str, torch.Tensor], vocabulary: Vocabulary,
                 word_vocabulary: Vocabulary, metrics: Optional[dict] = None, config_snapshot: Optional[dict] = None):
        self.model_config = model_config
        self.state = state
        self.vocabulary = vocabulary
        self.word_vocabulary = word_vocabulary
        self.metrics = metrics or {}
        self.config_snapshot = config_snapshot or {}

    @classmethod
    def from_model(cls, model: WiCModel, vocabulary: Vocabulary, word_vocabulary: Vocabulary,
                   metrics: Optional[dict] = None, config_snapshot: Optional[dict] = None) -> "Checkpoint":
        state = OrderedDict((name, tensor.detach().clone()) for name, tensor in model.state_dict().items())
        return cls(model.config, state, vocabulary, word_vocabulary, metrics, config_snapshot)

    def build_model(self) -> WiCModel:
        model = WiCModel(self.model_config, len(self.vocabulary), len(self.word_vocabulary))
        expected = model.state_dict()
        missing = sorted(set(expected) - set(self.state))
        unexpected = sorted(set(self.state) - set(expected))
        if missing or unexpected:
            raise CheckpointError("checkpoint parameters do not match the model", missing + unexpected)
        wrong_shape = sorted(name for name in expected if tuple(expected[name].shape) != tuple(self.state[name].shape))
        if wrong_shape:
            raise CheckpointError("checkpoint parameter shapes do not match the model", wrong_shape)
        model.load_state_dict({name: tensor.to(expected[name].dtype) for name, tensor in self.state.items()})
        model.eval()
        return model

    def gate_groups(self) -> Dict[str, list]:
        groups = {}
        for gate in ("moe1", "moe2"):
            names = [name for name in self.state if name.startswith(gate + ".")]
            if names:
                groups[gate] = names
        return groups


def save_checkpoint(checkpoint: Checkpoint, path: str):
    """
    Writes a checkpoint directory: the manifest, the raw parameters as little-endian float32 in manifest
    order, and both vocabularies
    Args:
        checkpoint: Checkpoint to write
        path: Directory, created when missing
    """
    os.makedirs(path, exist_ok=True)
    entries = []
    offset = 0
    with open(os.path.join(path, PARAMS), "wb") as f:
        for name, tensor in checkpoint.state.items():
            payload = np.ascontiguousarray(tensor.detach().cpu().numpy(), dtype=_DTYPE).tobytes()
            entries.append({"name": name, "shape": list(tensor.shape), "dtype": "float32", "offset": offset,
                            "numel": int(tensor.numel())})
            f.write(payload)
            offset += len(payload)

    manifest = {"format_version": FORMAT_VERSION,
                "parameters": entries,
                "gates": checkpoint.gate_groups(),
                "model": checkpoint.model_config.as_dict(),
                "config": checkpoint.config_snapshot,
                "metrics": checkpoint.metrics}
    with open(os.path.join(path, MANIFEST), "w", encoding="utf-8") as f:
        json.dump(manifest, f, indent=2)
        f.write("\n")
    checkpoint.vocabulary.save(os.path.join(path, VOCAB))
    checkpoint.word_vocabulary.save(os.path.join(path, WORDS))


def read_manifest(path: str) -> dict:
    manifest_path = os.path.join(path, MANIFEST)
    if not os.path.exists(manifest_path):
        raise CheckpointError("no " + MANIFEST + " in " + path)
    with open(manifest_path, "r", encoding="utf-8") as f:
        return json.load(f)


def load_checkpoint(path: str) -> Checkpoint:
    """
    Reads a checkpoint directory written by save_checkpoint
    Args:
        path: Checkpoint directory
    Returns: The checkpoint
    Raises:
        CheckpointError: The payload is shorter than the manifest says, or the parameters do not fit the model;
            the error lists the offending parameter names
    """
    manifest = read_manifest(path)
    if manifest.get("format_version") != FORMAT_VERSION:
        raise CheckpointError("unsupported checkpoint format " + str(manifest.get("format_version")))
    with open(os.path.join(path, PARAMS), "rb") as f:
        payload = f.read()

    entries = manifest["parameters"]
    truncated = [entry["name"] for entry in entries
                 if entry["offset"] + entry["numel"] * _DTYPE.itemsize > len(payload)]
    if truncated:
        raise CheckpointError("truncated parameter payload", truncated)
    expected_size = sum(entry["numel"] * _DTYPE.itemsize for entry in entries)
    if expected_size != len(payload):
        raise CheckpointError("parameter payload has " + str(len(payload) - expected_size) + " unexpected bytes")

    state = OrderedDict()
    for entry in entries:
        values = np.frombuffer(payload, dtype=_DTYPE, count=entry["numel"], offset=entry["offset"])
        state[entry["name"]] = torch.from_numpy(values.astype(np.float32)).reshape(entry["shape"])

    try:
        vocabulary = Vocabulary.load(os.path.join(path, VOCAB))
        word_vocabulary = Vocabulary.load(os.path.join(path, WORDS))
    except ValueError as e:
        raise CheckpointError(str(e))
    checkpoint = Checkpoint(ModelConfig.from_dict(manifest["model"]), state, vocabulary, word_vocabulary,
                            manifest.get("metrics"), manifest.get("config"))
    checkpoint.build_model()
    return checkpoint
