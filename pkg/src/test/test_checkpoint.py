import json
import os
import tempfile
import unittest

import torch

from driftwic.data.synthetic import make_separable_dataset
from driftwic.errors import CheckpointError
from driftwic.evaluation.predictions import predict_probabilities
from driftwic.training.checkpoint import MANIFEST, PARAMS, Checkpoint, load_checkpoint, read_manifest, \
    save_checkpoint
from test.fixtures import build_model, small_model_config


def _checkpoint(variant: str = "none"):
    instances = make_separable_dataset(8, seed=0)
    model, featurizer, examples = build_model(instances, small_model_config(variant=variant))
    checkpoint = Checkpoint.from_model(model, featurizer.tokenizer.vocabulary, featurizer.word_vocabulary,
                                       {"accuracy": 0.5, "macro_f1": 0.25}, {"seed": 0})
    return checkpoint, model, featurizer, examples


class TestCheckpoint(unittest.TestCase):
    def test_round_trip_predictions(self):
        for variant in ("none", "s_gate", "j_gate"):
            with self.subTest(variant=variant):
                checkpoint, model, featurizer, examples = _checkpoint(variant)
                with tempfile.TemporaryDirectory() as directory:
                    save_checkpoint(checkpoint, directory)
                    restored = load_checkpoint(directory)
                before = predict_probabilities(model, featurizer, examples)
                after = predict_probabilities(restored.build_model(), featurizer, examples)
                self.assertLessEqual(max(abs(a - b) for a, b in zip(before, after)), 1e-7)
                self.assertEqual(checkpoint.vocabulary, restored.vocabulary)
                self.assertEqual({"accuracy": 0.5, "macro_f1": 0.25}, restored.metrics)
                self.assertEqual({"seed": 0}, restored.config_snapshot)

    def test_manifest_lists_gates(self):
        checkpoint, _, _, _ = _checkpoint("s_gate")
        with tempfile.TemporaryDirectory() as directory:
            save_checkpoint(checkpoint, directory)
            manifest = read_manifest(directory)
        self.assertEqual(["moe1", "moe2"], sorted(manifest["gates"]))
        self.assertIn("moe1.gate.task_vector", manifest["gates"]["moe1"])
        self.assertIn("moe2.gate.task_vector", manifest["gates"]["moe2"])
        offsets = [entry["offset"] for entry in manifest["parameters"]]
        self.assertEqual(sorted(offsets), offsets)
        self.assertEqual("float32", manifest["parameters"][0]["dtype"])

    def test_base_model_has_no_gates(self):
        checkpoint, _, _, _ = _checkpoint("none")
        self.assertEqual({}, checkpoint.gate_groups())

    def test_truncated_payload(self):
        checkpoint, _, _, _ = _checkpoint()
        with tempfile.TemporaryDirectory() as directory:
            save_checkpoint(checkpoint, directory)
            path = os.path.join(directory, PARAMS)
            with open(path, "rb") as f:
                payload = f.read()
            with open(path, "wb") as f:
                f.write(payload[:-4])
            with self.assertRaises(CheckpointError) as context:
                load_checkpoint(directory)
        last = list(checkpoint.state)[-1]
        self.assertIn(last, context.exception.names)
        self.assertIn(last, str(context.exception))

    def test_shape_mismatch(self):
        checkpoint, _, _, _ = _checkpoint()
        with tempfile.TemporaryDirectory() as directory:
            save_checkpoint(checkpoint, directory)
            path = os.path.join(directory, MANIFEST)
            with open(path, "r", encoding="utf-8") as f:
                manifest = json.load(f)
            manifest["model"]["mlp_hidden"] = 16
            with open(path, "w", encoding="utf-8") as f:
                json.dump(manifest, f)
            with self.assertRaisesRegex(CheckpointError, "head"):
                load_checkpoint(directory)

    def test_missing_manifest(self):
        with tempfile.TemporaryDirectory() as directory:
            self.assertRaisesRegex(CheckpointError, "manifest.json", load_checkpoint, directory)

    def test_unknown_parameter(self):
        checkpoint, _, _, _ = _checkpoint()
        checkpoint.state["extra.weight"] = torch.zeros(2)
        self.assertRaisesRegex(CheckpointError, "extra.weight", checkpoint.build_model)


if __name__ == '__main__':
    unittest.main()
