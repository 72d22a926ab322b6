"""Mask export and run artifacts: PGM predictions, history.csv, timing.csv."""

from __future__ import annotations

import time
from pathlib import Path

import numpy as np
import torch

from .data import write_label_pgm
from .errors import ShapeError
from .train import History, predict_labels


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    lines = [",".join(header)]
    lines += [",".join(f"{v:.10g}" if isinstance(v, float) else str(v) for v in row)
              for row in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_history(history: History, path: str | Path) -> None:
    _write_csv(Path(path), ["epoch", "train_loss", "val_loss"], history.as_rows())


def predict_and_export(
    model: torch.nn.Module,
    frames: list[tuple[str, np.ndarray]],
    out_dir: str | Path,
) -> float:
    """Write one argmax PGM mask per (frame_id, normalized image) pair.

    Images must match the spatial contract of the trained model (padded
    convolutions require dimensions divisible by 2^depth). Returns the wall
    time and records it in timing.csv next to the masks.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if not frames:
        raise ShapeError("no frames to export")
    shape = frames[0][1].shape
    for fid, img in frames:
        if img.shape != shape:
            raise ShapeError(f"{fid}: frame shape {img.shape} differs from {shape}")
    t0 = time.monotonic()
    batch = np.stack([img for _, img in frames])[:, None, :, :]
    labels = predict_labels(model, batch)
    for (fid, _), mask in zip(frames, labels):
        write_label_pgm(mask, out_dir / f"{fid}.pgm")
    seconds = time.monotonic() - t0
    _write_csv(out_dir / "timing.csv", ["phase", "seconds"],
               [["predict_and_export", seconds]])
    return seconds
