"""Command line: train a model on frame/mask directories, export predictions."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np
import torch

from .data import inverse_log_class_weights, load_dataset, temperature_to_intensity, read_temperature_csv
from .errors import DlsegError
from .export import predict_and_export, write_history
from .models import ARCHITECTURES, ModelConfig, build_model
from .train import TrainConfig, train


def cmd_train(args) -> int:
    dataset = load_dataset(args.frames, args.masks)
    cfg = ModelConfig(architecture=args.arch, depth=args.depth,
                      base_channels=args.base_channels)
    model = build_model(cfg)
    weights = tuple(inverse_log_class_weights(dataset.masks))
    tcfg = TrainConfig(
        learning_rate=args.lr,
        weight_decay=args.weight_decay,
        batch_size=args.batch_size,
        max_epochs=args.epochs,
        early_stopping_patience=args.patience,
        class_weights=weights,
        seed=args.seed,
    )
    history = train(model, dataset.images, dataset.masks, tcfg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    torch.save(
        {
            "state_dict": model.state_dict(),
            "model_config": cfg.__dict__,
            "mean": dataset.mean,
            "std": dataset.std,
        },
        out / "model.pt",
    )
    write_history(history, out / "history.csv")
    print(f"[done] {len(history.epochs)} epochs, best val loss "
          f"{history.best_val_loss:.4f}, {history.seconds:.1f}s", file=sys.stderr)
    return 0


def cmd_predict(args) -> int:
    payload = torch.load(Path(args.model) / "model.pt", weights_only=False)
    cfg = ModelConfig(**payload["model_config"])
    model = build_model(cfg)
    model.load_state_dict(payload["state_dict"])
    frames = []
    for p in sorted(Path(args.frames).glob("*.csv")):
        intensity = temperature_to_intensity(read_temperature_csv(p))
        normalized = ((intensity / 255.0 - payload["mean"]) / payload["std"]).astype(
            np.float32
        )
        frames.append((p.stem, normalized))
    if not frames:
        print(f"[warn] no frames in {args.frames}", file=sys.stderr)
        return 0
    seconds = predict_and_export(model, frames, args.out)
    print(f"[done] {len(frames)} masks in {seconds:.2f}s", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dlseg")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train")
    p.add_argument("--frames", required=True)
    p.add_argument("--masks", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--arch", choices=ARCHITECTURES, default="unet")
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("--base-channels", type=int, default=8)
    p.add_argument("--epochs", type=int, default=200)
    p.add_argument("--patience", type=int, default=20)
    p.add_argument("--lr", type=float, default=1e-4)
    p.add_argument("--weight-decay", type=float, default=1e-4)
    p.add_argument("--batch-size", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict")
    p.add_argument("--model", required=True, help="directory with model.pt")
    p.add_argument("--frames", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_predict)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DlsegError as exc:
        print(f"[error] {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
