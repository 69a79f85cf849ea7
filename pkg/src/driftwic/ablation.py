import os
import re
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

from driftwic import logger
from driftwic.config import RunConfig
from driftwic.data.canonical import load_canonical
from driftwic.data.instance import PairInstance
from driftwic.errors import ConfigError
from driftwic.evaluation.ensemble import ensemble
from driftwic.evaluation.report import RunResult, Table, report_table
from driftwic.runner import Runner, predict_instances, score_records


class Grid(NamedTuple):
    header: str
    title: str
    rows: List[Tuple[str, dict]]


def _moe(variant: str, use_pos: bool, use_glove: bool) -> dict:
    return {"moe": {"variant": variant, "use_pos": use_pos, "use_glove": use_glove}}


BASE = ("Base", _moe("none", True, True))
S_GATE_FULL = ("S-Gate + POS + GloVe", _moe("s_gate", True, True))
J_GATE_FULL = ("J-Gate + POS + GloVe", _moe("j_gate", True, True))

GRIDS: Dict[str, Grid] = {
    "repr": Grid("Target word", "Results of different target word representations", [
        ("First", {"model": {"repr_mode": "first"}}),
        ("Mean", {"model": {"repr_mode": "mean"}}),
        ("First + Last", {"model": {"repr_mode": "first_last"}}),
    ]),
    "matching": Grid("Matching layer", "Results of different components of matching layer", [
        ("E1 + E2", {"match": {"use_cls": False, "use_diff_prod": False}}),
        ("+ E_CLS", {"match": {"use_cls": True, "use_diff_prod": False}}),
        ("+ E_CLS + [E1-E2] + [E1*E2]", {"match": {"use_cls": True, "use_diff_prod": True}}),
    ]),
    "moe": Grid("Model", "Results of MoE-based models on dev dataset", [
        BASE,
        S_GATE_FULL,
        ("S-Gate + POS", _moe("s_gate", True, False)),
        ("S-Gate + GloVe", _moe("s_gate", False, True)),
        J_GATE_FULL,
        ("J-Gate + POS", _moe("j_gate", True, False)),
        ("J-Gate + GloVe", _moe("j_gate", False, True)),
    ]),
    "strategies": Grid("Model", "Results of different training strategies on dev dataset", [
        ("Base", {"data": {"augment": None}, "fgm": {"enabled": False}}),
        ("+ Data Aug", {"fgm": {"enabled": False}}),
        ("+ Data Aug + FGM", {"fgm": {"enabled": True}}),
    ]),
}
ENSEMBLE_MEMBERS = [BASE, S_GATE_FULL, J_GATE_FULL]
ENSEMBLE_HEADER = "Dataset"
ENSEMBLE_TITLE = "Results of the ensemble model"
GRID_NAMES = tuple(GRIDS) + ("ensemble",)


def _slug(label: str) -> str:
    return re.sub(r"[^a-z0-9]+", "_", label.lower()).strip("_") or "run"


class Ablation:
    """
    Trains one model per row of a configuration grid on shared data splits and reports the dev scores.
    """

    def __init__(self, config: RunConfig, train_set: Optional[List[PairInstance]] = None,
                 dev_set: Optional[List[PairInstance]] = None, test_set: Optional[List[PairInstance]] = None):
        self.config = config
        if train_set is None or dev_set is None:
            config.require_data()
        self.train_set = train_set if train_set is not None else load_canonical(config.data_path("train"))
        self.dev_set = dev_set if dev_set is not None else load_canonical(config.data_path("dev"))
        if test_set is None and config.data_path("test") is not None:
            test_set = load_canonical(config.data_path("test"))
        self.test_set = test_set

    def _train_row(self, grid_name: str, label: str, overrides: dict) -> Runner:
        output_dir = os.path.join(self.config.output_dir, grid_name, _slug(label))
        config = self.config.with_overrides(overrides).with_overrides({"output_dir": output_dir})
        logger.info("Ablation " + grid_name + ": " + label)
        runner = Runner(config, self.train_set, self.dev_set)
        runner.start()
        return runner

    def run(self, grid_name: str) -> Table:
        """
        Runs every row of a grid
        Args:
            grid_name: One of repr, matching, moe, strategies, ensemble
        Returns: The report table, also written as <output_dir>/<grid_name>.tsv
        """
        if grid_name == "ensemble":
            table = self._run_ensemble()
        elif grid_name in GRIDS:
            table = self._run_grid(grid_name, GRIDS[grid_name])
        else:
            raise ConfigError("Unknown ablation grid '" + str(grid_name) + "', expected one of " +
                              ", ".join(GRID_NAMES))
        os.makedirs(self.config.output_dir, exist_ok=True)
        with open(os.path.join(self.config.output_dir, grid_name + ".tsv"), "w", encoding="utf-8") as f:
            f.write(table.to_tsv())
        return table

    def _run_grid(self, grid_name: str, grid: Grid) -> Table:
        if grid_name == "strategies" and self.config.get("data.augment") is None:
            raise ConfigError("Configuration key 'data.augment' is required by the strategies grid")
        runs = []
        for label, overrides in grid.rows:
            runner = self._train_row(grid_name, label, overrides)
            records = predict_instances(runner.checkpoint, self.dev_set)
            runs.append(RunResult(label, score_records(records, self.dev_set)))
        return report_table(runs, grid.header, grid.title)

    def _run_ensemble(self) -> Table:
        splits: List[Tuple[str, Sequence[PairInstance]]] = [("Dev", self.dev_set)]
        if self.test_set:
            splits.append(("Test", self.test_set))
        predictions = {name: [] for name, _ in splits}
        for label, overrides in ENSEMBLE_MEMBERS:
            runner = self._train_row("ensemble", label, overrides)
            for name, instances in splits:
                predictions[name].append(predict_instances(runner.checkpoint, instances))
        runs = [RunResult(name, score_records(ensemble(predictions[name]), instances)) for name, instances in splits]
        return report_table(runs, ENSEMBLE_HEADER, ENSEMBLE_TITLE)


def run_ablation(config: RunConfig, grid_name: str, train_set: Optional[List[PairInstance]] = None,
                 dev_set: Optional[List[PairInstance]] = None,
                 test_set: Optional[List[PairInstance]] = None) -> Table:
    return Ablation(config, train_set, dev_set, test_set).run(grid_name)
