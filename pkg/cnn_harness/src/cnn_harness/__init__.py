"""CNN trainer/evaluator for stacked connectivity tensors."""

from .cten import TensorRecord, read_tensors, write_tensors
from .errors import FormatError, HarnessError, ShapeError, SplitError
from .model import (ModelSpec, build_model, conv_parameter_count,
                    parameter_count, shape_trace)
from .predict import predict, write_predictions
from .train import (Checkpoint, TrainSpec, band_stats, early_stop_epoch,
                    learning_rate, load_checkpoint, normalize,
                    save_checkpoint, save_log, stratified_split, to_batch,
                    train)

__version__ = "0.1.0"

__all__ = [
    "TensorRecord", "read_tensors", "write_tensors",
    "FormatError", "HarnessError", "ShapeError", "SplitError",
    "ModelSpec", "build_model", "conv_parameter_count", "parameter_count",
    "shape_trace",
    "predict", "write_predictions",
    "Checkpoint", "TrainSpec", "band_stats", "early_stop_epoch",
    "learning_rate", "load_checkpoint", "normalize", "save_checkpoint",
    "save_log", "stratified_split", "to_batch", "train",
]
