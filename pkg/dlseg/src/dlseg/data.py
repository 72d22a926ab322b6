"""File ingestion and preprocessing for (temperature frame, label mask) pairs.

Consumes the toolkit's exchange formats directly: temperature frames as CSV
matrices of Kelvin values and masks as binary PGM files whose raw bytes are
the zone labels 0..3. Preprocessing maps Kelvin to 8-bit intensity, divides
by 255 and standardizes with dataset statistics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import FormatError, ShapeError

T_MIN_DEFAULT = 300.0
T_MAX_DEFAULT = 1300.0
NUM_CLASSES = 4


def read_temperature_csv(path: str | Path) -> np.ndarray:
    rows = []
    width = None
    for i, line in enumerate(Path(path).read_text(encoding="utf-8").split("\n")):
        if not line:
            continue
        fields = line.split(",")
        if width is None:
            width = len(fields)
        elif len(fields) != width:
            raise FormatError(f"{path}: ragged row {i}")
        rows.append([float(tok) for tok in fields])
    if not rows:
        raise FormatError(f"{path}: empty frame")
    return np.array(rows, dtype=np.float64)


def read_label_pgm(path: str | Path) -> np.ndarray:
    data = Path(path).read_bytes()
    if not data.startswith(b"P5"):
        raise FormatError(f"{path}: not a binary PGM")
    tokens = []
    pos = 2
    while len(tokens) < 3:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos : pos + 1] != b"\n":
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        tokens.append(data[start:pos])
    pos += 1
    cols, rows, maxval = (int(t) for t in tokens)
    if maxval != 255:
        raise FormatError(f"{path}: maxval must be 255")
    body = data[pos:]
    if len(body) != rows * cols:
        raise FormatError(f"{path}: body size mismatch")
    arr = np.frombuffer(body, dtype=np.uint8).reshape(rows, cols)
    if arr.max(initial=0) >= NUM_CLASSES:
        raise FormatError(f"{path}: label outside 0..{NUM_CLASSES - 1}")
    return arr.copy()


def write_label_pgm(labels: np.ndarray, path: str | Path) -> None:
    arr = np.asarray(labels, dtype=np.uint8)
    if arr.ndim != 2:
        raise ShapeError("mask must be 2-D")
    header = f"P5\n{arr.shape[1]} {arr.shape[0]}\n255\n".encode("ascii")
    Path(path).write_bytes(header + arr.tobytes())


def temperature_to_intensity(
    temps: np.ndarray, t_min: float = T_MIN_DEFAULT, t_max: float = T_MAX_DEFAULT
) -> np.ndarray:
    scaled = np.clip((temps - t_min) / (t_max - t_min), 0.0, 1.0)
    return np.rint(255.0 * scaled)


@dataclass(frozen=True)
class Dataset:
    """Paired, normalized training arrays plus the statistics used."""

    ids: tuple[str, ...]
    images: np.ndarray  # (n, 1, H, W) float32, standardized
    masks: np.ndarray  # (n, H, W) int64
    mean: float
    std: float


def normalize_stack(intensities: list[np.ndarray]) -> tuple[np.ndarray, float, float]:
    """Divide by 255 and standardize with pooled mean / population std."""
    stack = np.stack(intensities).astype(np.float64) / 255.0
    mean = float(stack.mean())
    std = float(stack.std())
    if std <= 0:
        raise ShapeError("constant dataset cannot be standardized")
    return ((stack - mean) / std).astype(np.float32), mean, std


def load_dataset(
    frames_dir: str | Path,
    masks_dir: str | Path,
    t_min: float = T_MIN_DEFAULT,
    t_max: float = T_MAX_DEFAULT,
) -> Dataset:
    frames = {p.stem: p for p in sorted(Path(frames_dir).glob("*.csv"))}
    masks = {p.stem: p for p in sorted(Path(masks_dir).glob("*.pgm"))}
    ids = sorted(set(frames) & set(masks))
    if not ids:
        raise FormatError("no paired frame/mask stems found")
    intensities, labels = [], []
    shape = None
    for fid in ids:
        temps = read_temperature_csv(frames[fid])
        mask = read_label_pgm(masks[fid])
        if temps.shape != mask.shape:
            raise ShapeError(f"{fid}: frame {temps.shape} vs mask {mask.shape}")
        if shape is None:
            shape = temps.shape
        elif temps.shape != shape:
            raise ShapeError(f"{fid}: inconsistent frame shape {temps.shape}")
        intensities.append(temperature_to_intensity(temps, t_min, t_max))
        labels.append(mask.astype(np.int64))
    images, mean, std = normalize_stack(intensities)
    return Dataset(
        ids=tuple(ids),
        images=images[:, None, :, :],
        masks=np.stack(labels),
        mean=mean,
        std=std,
    )


def inverse_log_class_weights(masks: np.ndarray, c: float = 1.02) -> np.ndarray:
    """Class weights w_k = 1 / ln(c + p_k) over all mask pixels."""
    counts = np.bincount(np.asarray(masks, dtype=np.int64).ravel(),
                         minlength=NUM_CLASSES)
    props = counts / counts.sum()
    return np.array([1.0 / math.log(c + p) for p in props])
