import json
import os
import tempfile
import unittest
from unittest import mock

import torch

from driftwic.data.synthetic import make_separable_dataset
from driftwic.errors import ConfigError, NumericError
from driftwic.training.adversarial import FgmConfig
from driftwic.training.schedule import lr_schedule, warmup_scheduler
from driftwic.training.trainer import DIAGNOSTIC, History, Trainer, TrainConfig, build_optimizer, train
from test.fixtures import build_model, small_model_config

FAST = dict(batch_size=8, lr_encoder=1e-2, lr_bilstm=1e-2, weight_decay=0.0)


class TestSchedule(unittest.TestCase):
    def test_start(self):
        self.assertEqual(0.0, lr_schedule(0, 100, 1e-3, 0.1))

    def test_peak(self):
        self.assertAlmostEqual(1e-3, lr_schedule(10, 100, 1e-3, 0.1), places=12)

    def test_decay(self):
        self.assertAlmostEqual(0.5e-3, lr_schedule(55, 100, 1e-3, 0.1), places=12)
        self.assertEqual(0.0, lr_schedule(100, 100, 1e-3, 0.1))

    def test_no_warmup(self):
        self.assertEqual(2.0, lr_schedule(0, 10, 2.0, 0.0))

    def test_scheduler_keeps_group_rates(self):
        a, b = torch.nn.Parameter(torch.zeros(1)), torch.nn.Parameter(torch.zeros(1))
        optimizer = torch.optim.SGD([{"params": [a], "lr": 1.0}, {"params": [b], "lr": 100.0}], lr=1.0)
        scheduler = warmup_scheduler(optimizer, 10, 0.5)
        for _ in range(5):
            optimizer.step()
            scheduler.step()
        self.assertAlmostEqual(1.0, optimizer.param_groups[0]["lr"])
        self.assertAlmostEqual(100.0, optimizer.param_groups[1]["lr"])


class TestTrainConfig(unittest.TestCase):
    def test_defaults(self):
        config = TrainConfig()
        self.assertEqual((8, 256, 1e-6, 1e-4, 0.1), (config.batch_size, config.max_len, config.lr_encoder,
                                                      config.lr_bilstm, config.warmup_ratio))

    def test_invalid_values(self):
        self.assertRaisesRegex(ConfigError, "training.lr_encoder", TrainConfig, lr_encoder=0)
        self.assertRaisesRegex(ConfigError, "training.warmup_ratio", TrainConfig, warmup_ratio=1.0)
        self.assertRaisesRegex(ConfigError, "training.batch_size", TrainConfig, batch_size=0)


class TestTrainer(unittest.TestCase):
    def test_overfits_separable_data(self):
        instances = make_separable_dataset(64, seed=0)
        for variant in ("none", "s_gate", "j_gate"):
            with self.subTest(variant=variant):
                model, featurizer, examples = build_model(instances, small_model_config(d=32, variant=variant))
                config = TrainConfig(epochs=200, early_stop_patience=200, **FAST)
                checkpoint, history = train(model, examples, examples, config, featurizer)
                self.assertLessEqual(len(history), 200)
                self.assertGreaterEqual(max(entry["train_accuracy"] for entry in history.entries), 0.95)
                self.assertGreaterEqual(checkpoint.metrics["accuracy"], 0.95)

    def test_deterministic(self):
        instances = make_separable_dataset(24, seed=1)
        histories = []
        states = []
        for _ in range(2):
            model, featurizer, examples = build_model(instances, small_model_config(variant="j_gate"))
            checkpoint, history = train(model, examples[:16], examples[16:], TrainConfig(epochs=3, **FAST),
                                        featurizer, FgmConfig(epsilon=0.5))
            histories.append(history.to_json())
            states.append(checkpoint.state)
        self.assertEqual(histories[0], histories[1])
        for name in states[0]:
            self.assertTrue(torch.equal(states[0][name], states[1][name]), name)

    def test_disabled_fgm_matches_plain_training(self):
        instances = make_separable_dataset(16, seed=1)
        histories = []
        for fgm_config in (None, FgmConfig(enabled=False)):
            model, featurizer, examples = build_model(instances, small_model_config())
            _, history = train(model, examples, examples, TrainConfig(epochs=2, **FAST), featurizer, fgm_config)
            histories.append(history)
        self.assertEqual(histories[0], histories[1])

    def test_early_stopping(self):
        instances = make_separable_dataset(16, seed=4)
        model, featurizer, examples = build_model(instances, small_model_config())
        config = TrainConfig(epochs=30, early_stop_patience=2, lr_encoder=1e-9, lr_bilstm=1e-9)
        _, history = train(model, examples, examples, config, featurizer)
        self.assertLessEqual(len(history), history.best_epoch + 2)
        self.assertLess(len(history), 30)

    def test_differential_learning_rates(self):
        instances = make_separable_dataset(8, seed=0)
        model, _, _ = build_model(instances, small_model_config(variant="s_gate"))
        config = TrainConfig(lr_encoder=1e-5, lr_bilstm=1e-3, weight_decay=0.0)
        optimizer = build_optimizer(model, config)
        before = {name: parameter.detach().clone() for name, parameter in model.named_parameters()}
        for parameter in model.parameters():
            parameter.grad = torch.ones_like(parameter)
        optimizer.step()
        expert_names = set()
        for group in optimizer.param_groups:
            if group["group"] == "experts":
                expert_names.update(group["names"])
        self.assertIn("moe1.gate.task_vector", expert_names)
        self.assertIn("pos_expert.lstm.weight_ih_l0", expert_names)
        encoder_step = (model.encoder.embedding_table().detach() - before["encoder.token_embedding.weight"]).abs()
        expert_step = (model.pos_expert.lstm.weight_ih_l0.detach() - before["pos_expert.lstm.weight_ih_l0"]).abs()
        ratio = float(expert_step.mean()) / float(encoder_step.mean())
        self.assertAlmostEqual(100.0, ratio, delta=1.0)

    def test_zero_gradient_rows_do_not_move(self):
        instances = make_separable_dataset(16, seed=0)
        model, featurizer, examples = build_model(instances, small_model_config())
        config = TrainConfig(lr_encoder=1e-2, weight_decay=0.0)
        trainer = Trainer(model, featurizer, config)
        trainer.optimizer = build_optimizer(model, config)
        trainer.scheduler = warmup_scheduler(trainer.optimizer, 10, 0.0)
        batch = featurizer.collate(examples[:2])
        table = model.encoder.embedding_table()
        before = table.detach().clone()
        trainer.train_step(batch)
        used = set(batch.token_ids[batch.attention_mask.bool()].tolist())
        for row in range(table.shape[0]):
            if row in used:
                self.assertFalse(torch.equal(before[row], table[row].detach()), row)
            else:
                self.assertTrue(torch.equal(before[row], table[row].detach()), row)

    def test_rows_from_earlier_batches_do_not_move(self):
        instances = make_separable_dataset(16, seed=0)
        model, featurizer, examples = build_model(instances, small_model_config(variant="s_gate"))
        config = TrainConfig(lr_encoder=1e-2, lr_bilstm=1e-2, weight_decay=0.0)
        trainer = Trainer(model, featurizer, config)
        trainer.optimizer = build_optimizer(model, config)
        trainer.scheduler = warmup_scheduler(trainer.optimizer, 10, 0.0)
        first = featurizer.collate(examples[:2])
        second = featurizer.collate(examples[2:4])
        trainer.train_step(first)

        tokens = model.encoder.embedding_table()
        words = model.glove_expert.embedding.weight
        tokens_before = tokens.detach().clone()
        words_before = words.detach().clone()
        trainer.train_step(second)

        used_tokens = set(second.token_ids[second.attention_mask.bool()].tolist())
        used_words = set(second.words1.word_ids.flatten().tolist()) | set(second.words2.word_ids.flatten().tolist())
        first_only = set(first.token_ids[first.attention_mask.bool()].tolist()) - used_tokens
        self.assertTrue(first_only)
        for row in range(tokens.shape[0]):
            if row not in used_tokens:
                self.assertTrue(torch.equal(tokens_before[row], tokens[row].detach()), row)
        for row in range(words.shape[0]):
            if row not in used_words:
                self.assertTrue(torch.equal(words_before[row], words[row].detach()), row)
        self.assertFalse(torch.equal(tokens_before, tokens.detach()))

    def test_non_finite_loss(self):
        instances = make_separable_dataset(8, seed=0)
        model, featurizer, examples = build_model(instances, small_model_config())
        nan_loss = torch.tensor(float("nan"), requires_grad=True)
        with tempfile.TemporaryDirectory() as directory, \
                mock.patch("driftwic.training.trainer.loss_from_logits", return_value=nan_loss):
            self.assertRaises(NumericError, train, model, examples, examples, TrainConfig(epochs=1), featurizer,
                              None, directory)
            with open(os.path.join(directory, DIAGNOSTIC), "r", encoding="utf-8") as f:
                diagnostic = json.load(f)
        self.assertEqual(1, diagnostic["epoch"])
        self.assertEqual(8, len(diagnostic["batch_ids"]))
        self.assertIn("encoder.token_embedding.weight", diagnostic["parameter_norms"])

    def test_history_file(self):
        history = History([{"epoch": 1, "train_loss": 0.5, "dev_macro_f1": 0.25}])
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, "history.json")
            history.save(path)
            self.assertEqual(history, History.load(path))
        self.assertEqual(1, history.best_epoch)


if __name__ == '__main__':
    unittest.main()
