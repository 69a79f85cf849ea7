import argparse
import os
import sys
from typing import List, Optional

from driftwic import __version__, logger
from driftwic.ablation import GRID_NAMES, run_ablation
from driftwic.config import RunConfig
from driftwic.data.canonical import load_canonical, save_canonical
from driftwic.data.cleaning import TextCleaner, prepare_split
from driftwic.data.instance import CleaningReport
from driftwic.data.raw import load_tempowic_raw
from driftwic.data.remote import WIC_URL, download_wic
from driftwic.data.wic import load_wic_augmentation
from driftwic.errors import DriftWiCError
from driftwic.evaluation.ensemble import Averaging, ensemble
from driftwic.evaluation.predictions import read_predictions, write_predictions
from driftwic.runner import Runner, predict_instances, score_records
from driftwic.training.checkpoint import load_checkpoint

AUGMENT_FILE = "augment.jsonl"
EXIT_USAGE = 1
EXIT_DATA = 2


class ArgumentParser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, self.prog + ": error: " + message + "\n")


def cmd_prepare(args) -> int:
    os.makedirs(args.out, exist_ok=True)
    cleaner = TextCleaner()
    total = CleaningReport()
    for name, data_path, labels_path in args.split:
        instances, report = prepare_split(load_tempowic_raw(data_path, labels_path), cleaner, name)
        save_canonical(instances, os.path.join(args.out, name + ".jsonl"))
        total = total.merge(report)

    if args.augment_wic:
        instances, report = prepare_split(load_wic_augmentation(args.augment_wic, args.wic_gold), cleaner, "wic",
                                          check_word=False)
        save_canonical(instances, os.path.join(args.out, AUGMENT_FILE))
        logger.info("WiC pairs go to " + AUGMENT_FILE + ", set data.augment to train with them")
        total = total.merge(report)

    print(total.render())
    return 0


def cmd_fetch_wic(args) -> int:
    print(download_wic(args.dest, args.url))
    return 0


def cmd_train(args) -> int:
    checkpoint_path, _ = Runner(RunConfig.load(args.config, args.set)).start()
    print(checkpoint_path)
    return 0


def cmd_predict(args) -> int:
    checkpoint = load_checkpoint(args.checkpoint)
    records = predict_instances(checkpoint, load_canonical(args.data), args.batch_size)
    write_predictions(records, args.out)
    logger.info("Wrote " + str(len(records)) + " predictions to " + args.out)
    return 0


def cmd_evaluate(args) -> int:
    report = score_records(read_predictions(args.predictions), load_canonical(args.gold))
    print(report.render())
    return 0


def cmd_ensemble(args) -> int:
    prediction_sets = [read_predictions(path) for path in args.predictions]
    records = ensemble(prediction_sets, Averaging(args.average))
    write_predictions(records, args.out)
    logger.info("Averaged " + str(len(prediction_sets)) + " prediction files into " + args.out)
    return 0


def cmd_ablate(args) -> int:
    table = run_ablation(RunConfig.load(args.config, args.set), args.grid)
    print(table.render())
    return 0


def _add_config_arguments(parser: argparse.ArgumentParser):
    parser.add_argument("--config", help="YAML run configuration")
    parser.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="Override a configuration key, e.g. moe.variant=s_gate (repeatable)")


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(prog="driftwic", description="Word-in-context classification of tweet pairs")
    parser.add_argument("--version", action="version", version="%(prog)s " + __version__)
    parser.add_argument("--log-level", choices=["ERROR", "WARNING", "INFO", "DEBUG"], type=str.upper)
    commands = parser.add_subparsers(dest="command", metavar="COMMAND")
    commands.required = True

    prepare = commands.add_parser("prepare", help="Clean raw TempoWiC splits into canonical files")
    prepare.add_argument("--split", nargs=3, action="append", required=True, metavar=("NAME", "DATA", "LABELS"),
                         help="Split name, raw data file and label file (repeatable)")
    prepare.add_argument("--out", required=True, help="Output directory of the canonical files")
    prepare.add_argument("--augment-wic", metavar="WIC_DATA", help="WiC data file to add to the training data")
    prepare.add_argument("--wic-gold", help="WiC labels file, defaults to the sibling gold file")
    prepare.set_defaults(handler=cmd_prepare)

    fetch = commands.add_parser("fetch-wic", help="Download and extract the WiC dataset")
    fetch.add_argument("--dest", required=True, help="Directory the archive is extracted into")
    fetch.add_argument("--url", default=WIC_URL)
    fetch.set_defaults(handler=cmd_fetch_wic)

    train = commands.add_parser("train", help="Train a model and write its best checkpoint")
    _add_config_arguments(train)
    train.set_defaults(handler=cmd_train)

    predict = commands.add_parser("predict", help="Write the predictions of a checkpoint")
    predict.add_argument("--checkpoint", required=True, help="Checkpoint directory")
    predict.add_argument("--data", required=True, help="Canonical file to predict")
    predict.add_argument("--out", required=True, help="Prediction file to write")
    predict.add_argument("--batch-size", type=int, default=32)
    predict.set_defaults(handler=cmd_predict)

    evaluate = commands.add_parser("evaluate", help="Score a prediction file against gold labels")
    evaluate.add_argument("--predictions", required=True, help="Prediction file")
    evaluate.add_argument("--gold", required=True, help="Canonical file holding the gold labels")
    evaluate.set_defaults(handler=cmd_evaluate)

    ensemble_parser = commands.add_parser("ensemble", help="Average several prediction files")
    ensemble_parser.add_argument("--predictions", nargs="+", required=True, help="Prediction files")
    ensemble_parser.add_argument("--out", required=True, help="Prediction file to write")
    ensemble_parser.add_argument("--average", choices=[averaging.value for averaging in Averaging],
                                 default=Averaging.PROBABILITY.value)
    ensemble_parser.set_defaults(handler=cmd_ensemble)

    ablate = commands.add_parser("ablate", help="Train a configuration grid and print its report table")
    ablate.add_argument("--grid", required=True, choices=GRID_NAMES)
    _add_config_arguments(ablate)
    ablate.set_defaults(handler=cmd_ablate)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.log_level:
        logger.set_log_level(args.log_level)
    try:
        return args.handler(args)
    except DriftWiCError as e:
        logger.error(str(e))
        return e.exit_code
    except OSError as e:
        logger.error(str(e))
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
