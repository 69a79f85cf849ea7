from driftwic.training.adversarial import NormScope, FgmConfig, FGM, fgm_perturbation, fgm_step
from driftwic.training.schedule import lr_schedule, warmup_scheduler
from driftwic.training.checkpoint import Checkpoint, save_checkpoint, load_checkpoint, read_manifest
from driftwic.training.trainer import TrainConfig, History, Trainer, build_optimizer, train
