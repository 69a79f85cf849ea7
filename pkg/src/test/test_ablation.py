import os
import tempfile
import unittest

from driftwic.ablation import GRIDS, GRID_NAMES, Ablation, run_ablation
from driftwic.config import RunConfig
from driftwic.data.canonical import save_canonical
from driftwic.data.synthetic import make_separable_dataset
from driftwic.errors import ConfigError

TINY = {"model": {"d": 16, "pos_dim": 8, "glove_dim": 8, "bilstm_hidden": 8, "gate_task_dim": 8, "mlp_hidden": 16},
        "training": {"epochs": 1}}


class TestGrids(unittest.TestCase):
    def test_grid_shapes(self):
        self.assertEqual(["First", "Mean", "First + Last"], [label for label, _ in GRIDS["repr"].rows])
        self.assertEqual(["E1 + E2", "+ E_CLS", "+ E_CLS + [E1-E2] + [E1*E2]"],
                         [label for label, _ in GRIDS["matching"].rows])
        self.assertEqual(7, len(GRIDS["moe"].rows))
        self.assertEqual(["Base", "+ Data Aug", "+ Data Aug + FGM"], [label for label, _ in GRIDS["strategies"].rows])
        self.assertEqual(("repr", "matching", "moe", "strategies", "ensemble"), GRID_NAMES)

    def test_rows_are_valid_configurations(self):
        for name, grid in GRIDS.items():
            for label, overrides in grid.rows:
                with self.subTest(grid=name, row=label):
                    config = RunConfig(TINY).with_overrides(overrides)
                    config.model_config()
                    config.fgm_config()


class TestAblation(unittest.TestCase):
    def setUp(self):
        self.directory = tempfile.TemporaryDirectory()
        instances = make_separable_dataset(20, seed=6)
        self.train_set, self.dev_set, self.test_set = instances[:12], instances[12:16], instances[16:]
        self.config = RunConfig(TINY).with_overrides({"output_dir": self.directory.name})

    def tearDown(self):
        self.directory.cleanup()

    def test_matching_grid(self):
        table = run_ablation(self.config, "matching", self.train_set, self.dev_set)
        self.assertEqual("Matching layer", table.header)
        self.assertEqual([label for label, _ in GRIDS["matching"].rows], table.labels)
        for _, accuracy, macro_f1 in table.rows:
            self.assertTrue(0.0 <= accuracy <= 1.0)
            self.assertTrue(0.0 <= macro_f1 <= 1.0)
        with open(os.path.join(self.directory.name, "matching.tsv"), "r", encoding="utf-8") as f:
            self.assertEqual(table.to_tsv(), f.read())
        self.assertTrue(os.path.isdir(os.path.join(self.directory.name, "matching", "e1_e2", "checkpoint")))

    def test_ensemble_grid(self):
        table = Ablation(self.config, self.train_set, self.dev_set, self.test_set).run("ensemble")
        self.assertEqual("Dataset", table.header)
        self.assertEqual(["Dev", "Test"], table.labels)

    def test_strategies_need_augmentation(self):
        ablation = Ablation(self.config, self.train_set, self.dev_set)
        self.assertRaisesRegex(ConfigError, "data.augment", ablation.run, "strategies")

    def test_strategies_grid(self):
        augment = os.path.join(self.directory.name, "augment.jsonl")
        save_canonical(make_separable_dataset(4, seed=9), augment)
        config = self.config.with_overrides({"data": {"augment": augment}})
        table = run_ablation(config, "strategies", self.train_set, self.dev_set)
        self.assertEqual(["Base", "+ Data Aug", "+ Data Aug + FGM"], table.labels)

    def test_unknown_grid(self):
        ablation = Ablation(self.config, self.train_set, self.dev_set)
        self.assertRaisesRegex(ConfigError, "Unknown ablation grid 'tables'", ablation.run, "tables")


if __name__ == '__main__':
    unittest.main()
