"""Toy-scale encoder-decoder segmentation models for IR flame zone masks."""

from .data import (
    Dataset,
    inverse_log_class_weights,
    load_dataset,
    normalize_stack,
    read_label_pgm,
    read_temperature_csv,
    temperature_to_intensity,
    write_label_pgm,
)
from .errors import DlsegError, FormatError, ShapeError, TrainingError
from .export import predict_and_export, write_history
from .models import (
    ARCHITECTURES,
    AttentionUNet,
    ModelConfig,
    UNet,
    UNetPP,
    build_model,
    parameter_count,
)
from .train import (
    EpochStats,
    History,
    TrainConfig,
    mean_iou,
    predict_labels,
    train,
    weighted_loss,
)

__version__ = "0.1.0"
