"""Command-line surface: batch segmentation, evaluation, geometry and statistics.

All outputs are CSV (or PGM masks) with deterministic content for fixed
inputs and seeds; wall-clock timings go to stderr, or to a separate file via
``--timing``, so re-runs stay byte-identical. Exit codes: 0 success, 1 data
error, 2 usage error.
"""

from __future__ import annotations

import argparse
import sys
import time
import zlib
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import geometry as geo
from . import ingest, metrics, preprocess, stats, synth
from .errors import JetsegError
from .segment import (
    DEFAULT_ZONE_PARAMS,
    ChanVeseParams,
    ThresholdBands,
    auto_bands,
    chanvese_segment,
    gmm_segment,
    kmeans_segment,
    median_filter,
    threshold_segment,
)

METHODS = ("threshold", "kmeans", "gmm", "chanvese")

# reserved frame ids for aggregate rows in evaluate reports
AGGREGATE_IDS = ("mean", "stddev")


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.10g}"
    return str(v)


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    lines = [",".join(header)]
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _read_simple_csv(path: Path) -> tuple[list[str], list[list[str]]]:
    lines = [ln for ln in path.read_text(encoding="utf-8").split("\n") if ln]
    if not lines:
        raise JetsegError(f"{path}: empty CSV")
    return lines[0].split(","), [ln.split(",") for ln in lines[1:]]


def _report_timing(label: str, seconds: float, timing_path: str | None) -> None:
    print(f"[timing] {label} seconds={seconds:.3f}", file=sys.stderr)
    if timing_path:
        _write_csv(Path(timing_path), ["label", "seconds"], [[label, seconds]])


def _frame_seed(seed: int, frame_id: str) -> int:
    ss = np.random.SeedSequence([seed, zlib.crc32(frame_id.encode("utf-8"))])
    return int(ss.generate_state(1)[0])


def _config_float(cfg: dict[str, str], key: str, default: float) -> float:
    return float(cfg[key]) if key in cfg else default


def _config_int(cfg: dict[str, str], key: str, default: int) -> int:
    return int(cfg[key]) if key in cfg else default


def _bands_from_config(cfg: dict[str, str]) -> ThresholdBands | None:
    keys = [f"threshold.{zone}.{side}" for zone in ("outer", "middle", "central")
            for side in ("lo", "hi")]
    if not any(k in cfg for k in keys):
        return None
    return ThresholdBands(
        outer=(_config_int(cfg, "threshold.outer.lo", 31),
               _config_int(cfg, "threshold.outer.hi", 85)),
        middle=(_config_int(cfg, "threshold.middle.lo", 101),
                _config_int(cfg, "threshold.middle.hi", 170)),
        central=(_config_int(cfg, "threshold.central.lo", 171),
                 _config_int(cfg, "threshold.central.hi", 255)),
    )


def _zone_params_from_config(cfg: dict[str, str]) -> dict[str, ChanVeseParams]:
    params = {}
    for zone, default in DEFAULT_ZONE_PARAMS.items():
        params[zone] = ChanVeseParams(
            mu=_config_float(cfg, f"chanvese.{zone}.mu", default.mu),
            lambda1=_config_float(cfg, f"chanvese.{zone}.lambda1", default.lambda1),
            lambda2=_config_float(cfg, f"chanvese.{zone}.lambda2", default.lambda2),
            tolerance=_config_float(cfg, f"chanvese.{zone}.tolerance", default.tolerance),
            max_iter=_config_int(cfg, f"chanvese.{zone}.max_iter", default.max_iter),
            dt=_config_float(cfg, f"chanvese.{zone}.dt", default.dt),
        )
    return params


def _segment_frame(task: dict) -> tuple[str, str | None]:
    """Worker: segment one frame and write its mask; returns (frame_id, error)."""
    frame_id = task["frame_id"]
    try:
        field = ingest.load_temperature_csv(task["csv_path"])
        img = preprocess.to_intensity(field, task["t_min"], task["t_max"])
        if task["median_radius"] > 0:
            img = median_filter(img, task["median_radius"])
        method = task["method"]
        if method == "threshold":
            mask = threshold_segment(img, task["bands"])
        elif method == "kmeans":
            mask, _ = kmeans_segment(
                img, k=4, epsilon=task["epsilon"], max_iter=task["max_iter"],
                seed=_frame_seed(task["seed"], frame_id),
            )
        elif method == "gmm":
            mask, _ = gmm_segment(
                img, components=4, max_iter=task["max_iter"], tol=task["tol"],
                seed=_frame_seed(task["seed"], frame_id),
            )
        else:
            result = chanvese_segment(img, task["zone_params"])
            mask = result.mask
            if not result.converged:
                print(f"[warn] {frame_id}: level set not converged", file=sys.stderr)
        ingest.save_label_mask_pgm(mask, Path(task["out_dir"]) / f"{frame_id}.pgm")
        return frame_id, None
    except (JetsegError, ValueError, OSError) as exc:
        return frame_id, f"{type(exc).__name__}: {exc}"


def _run_pool(tasks: list, worker, jobs: int) -> list:
    if jobs <= 1 or len(tasks) <= 1:
        return [worker(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(worker, tasks))


def cmd_segment(args) -> int:
    cfg = ingest.load_config(args.config) if args.config else {}
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    frames = sorted(Path(args.input_dir).glob("*.csv"))
    if not frames:
        print(f"[warn] no .csv frames found in {args.input_dir}", file=sys.stderr)
        return 0

    t_min = _config_float(cfg, "t_min_kelvin", preprocess.DEFAULT_T_MIN)
    t_max = _config_float(cfg, "t_max_kelvin", preprocess.DEFAULT_T_MAX)

    task_base = {
        "method": args.method,
        "t_min": t_min,
        "t_max": t_max,
        "median_radius": args.median_radius,
        "seed": args.seed,
        "out_dir": str(out_dir),
        "epsilon": _config_float(cfg, "kmeans.epsilon", 0.2),
        "max_iter": _config_int(cfg, f"{args.method}.max_iter", 200),
        "tol": _config_float(cfg, "gmm.tol", 1e-6),
        "bands": None,
        "zone_params": None,
    }
    if args.method == "threshold":
        bands = _bands_from_config(cfg)
        if bands is None:
            images = []
            for p in frames:
                field = ingest.load_temperature_csv(p)
                img = preprocess.to_intensity(field, t_min, t_max)
                if args.median_radius > 0:
                    img = median_filter(img, args.median_radius)
                images.append(img)
            result = auto_bands(images)
            bands = result.bands
            if result.fallback:
                print("[warn] histogram modes not separable; using default bands",
                      file=sys.stderr)
        task_base["bands"] = bands
    elif args.method == "chanvese":
        task_base["zone_params"] = _zone_params_from_config(cfg)

    tasks = [dict(task_base, frame_id=p.stem, csv_path=str(p)) for p in frames]
    t0 = time.monotonic()
    results = _run_pool(tasks, _segment_frame, args.jobs)
    _report_timing(f"segment method={args.method} frames={len(tasks)}",
                   time.monotonic() - t0, args.timing)

    failures = [(fid, err) for fid, err in results if err is not None]
    for fid, err in sorted(failures):
        print(f"[error] {fid}: {err}", file=sys.stderr)
    return 1 if failures else 0


def _evaluate_pair(task: tuple[str, str, str]) -> tuple[str, tuple[float, ...]]:
    frame_id, pred_path, truth_path = task
    pred = ingest.load_label_mask_pgm(pred_path)
    truth = ingest.load_label_mask_pgm(truth_path)
    return frame_id, metrics.image_metrics(pred, truth).as_tuple()


def cmd_evaluate(args) -> int:
    pred_dir, truth_dir = Path(args.pred_dir), Path(args.truth_dir)
    pred_ids = {p.stem: p for p in pred_dir.glob("*.pgm")}
    truth_ids = {p.stem: p for p in truth_dir.glob("*.pgm")}
    missing_pred = sorted(set(truth_ids) - set(pred_ids))
    missing_truth = sorted(set(pred_ids) - set(truth_ids))
    if missing_pred or missing_truth:
        for fid in missing_pred:
            print(f"[error] missing prediction for {fid}", file=sys.stderr)
        for fid in missing_truth:
            print(f"[error] missing ground truth for {fid}", file=sys.stderr)
        return 1
    if not pred_ids:
        print("[warn] no mask pairs to evaluate", file=sys.stderr)
        return 0

    tasks = [(fid, str(pred_ids[fid]), str(truth_ids[fid])) for fid in sorted(pred_ids)]
    t0 = time.monotonic()
    results = _run_pool(tasks, _evaluate_pair, args.jobs)
    elapsed = time.monotonic() - t0
    results.sort(key=lambda r: r[0])

    rows = [[fid, *vals] for fid, vals in results]
    per_image = [metrics.ImageMetrics(*vals) for _, vals in results]
    means, stds = metrics.aggregate_metrics(per_image)
    rows.append(["mean", *means])
    rows.append(["stddev", *stds])
    _write_csv(Path(args.out), ["frame_id", *metrics.ImageMetrics.FIELDS], rows)
    _report_timing(f"evaluate frames={len(tasks)}", elapsed, args.timing)
    return 0


def _geometry_frame(task: tuple[str, str, float, int, int]) -> tuple[str, tuple | str]:
    frame_id, mask_path, mpp, nozzle_row, nozzle_col = task
    cal = ingest.Calibration(meters_per_pixel=mpp, nozzle_row=nozzle_row,
                             nozzle_col=nozzle_col)
    try:
        mask = ingest.load_label_mask_pgm(mask_path)
        fg = geo.extract_features(geo.flame_region(mask), cal)
        flags = "liftoff_clamped" if fg.liftoff_clamped else ""
        return frame_id, (fg.height_m, fg.liftoff_m, fg.area_m2,
                          fg.component_pixel_count, flags)
    except (JetsegError, ValueError, OSError) as exc:
        return frame_id, f"{type(exc).__name__}: {exc}"


def cmd_geometry(args) -> int:
    cfg = ingest.load_config(args.config)
    cal = ingest.parse_calibration(cfg)
    masks = sorted(Path(args.mask_dir).glob("*.pgm"))
    if not masks:
        print(f"[warn] no .pgm masks found in {args.mask_dir}", file=sys.stderr)
        return 0
    tasks = [(p.stem, str(p), cal.meters_per_pixel, cal.nozzle_row, cal.nozzle_col)
             for p in masks]
    t0 = time.monotonic()
    results = _run_pool(tasks, _geometry_frame, args.jobs)
    elapsed = time.monotonic() - t0
    results.sort(key=lambda r: r[0])

    rows, failures = [], []
    for fid, payload in results:
        if isinstance(payload, str):
            failures.append((fid, payload))
        else:
            rows.append([fid, *payload])
    _write_csv(Path(args.out),
               ["frame_id", "L_m", "S_m", "A_m2", "component_pixel_count", "flags"],
               rows)
    _report_timing(f"geometry frames={len(tasks)}", elapsed, args.timing)
    for fid, err in failures:
        print(f"[error] {fid}: {err}", file=sys.stderr)
    return 1 if failures else 0


def _read_error_series(path: Path) -> dict[str, float]:
    header, rows = _read_simple_csv(path)
    if header[:2] != ["id", "value"]:
        raise JetsegError(f"{path}: expected header 'id,value'")
    return {r[0]: float(r[1]) for r in rows}


def cmd_stats(args) -> int:
    series_a = _read_error_series(Path(args.errors_a))
    series_b = _read_error_series(Path(args.errors_b))
    if set(series_a) != set(series_b):
        for missing in sorted(set(series_a) ^ set(series_b)):
            print(f"[error] unpaired id {missing}", file=sys.stderr)
        return 1
    ids = sorted(series_a)
    a = np.array([series_a[i] for i in ids])
    b = np.array([series_b[i] for i in ids])
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    result = stats.wilcoxon_signed_rank(stats.PairedSample(a=a, b=b), alpha=args.alpha)
    _write_csv(out_dir / "wilcoxon.csv",
               ["statistic", "p_value", "n_effective", "method", "alpha", "reject"],
               [[result.statistic, result.p_value, result.n_effective,
                 result.method, result.alpha, str(result.reject).lower()]])
    for name, values in (("a", a), ("b", b)):
        pts = stats.qq_points(values)
        _write_csv(out_dir / f"qq_{name}.csv",
                   ["theoretical_quantile", "sample_quantile"],
                   [[p, q] for p, q in pts])
    return 0


def cmd_weights(args) -> int:
    masks = sorted(Path(args.mask_dir).glob("*.pgm"))
    if not masks:
        print(f"[error] no .pgm masks found in {args.mask_dir}", file=sys.stderr)
        return 1
    loaded = [ingest.load_label_mask_pgm(p) for p in masks]
    w = preprocess.compute_class_weights(loaded, c=args.c)
    rows = [
        ["background", w.propensities[0], w.w_background],
        ["outer", w.propensities[1], w.w_outer],
        ["middle", w.propensities[2], w.w_middle],
        ["central", w.propensities[3], w.w_central],
    ]
    _write_csv(Path(args.out), ["class", "propensity", "weight"], rows)
    return 0


def cmd_synth(args) -> int:
    cfg = ingest.load_config(args.spec)
    out_dir = Path(args.out)
    frames_dir = out_dir / "frames"
    truth_dir = out_dir / "truth"
    frames_dir.mkdir(parents=True, exist_ok=True)
    truth_dir.mkdir(parents=True, exist_ok=True)
    count = _config_int(cfg, "count", 1)
    prefix = cfg.get("frame_id", "synthetic")
    base_seed = _config_int(cfg, "seed", 0)

    geo_rows = []
    calibration = None
    for i in range(count):
        spec = synth.FlameSpec(
            rows=_config_int(cfg, "rows", 240),
            cols=_config_int(cfg, "cols", 128),
            mpp=_config_float(cfg, "meters_per_pixel", 0.05),
            nozzle_row=_config_int(cfg, "nozzle_row", 230),
            nozzle_col=_config_int(cfg, "nozzle_col", 64),
            liftoff_m=_config_float(cfg, "liftoff_m", 0.5),
            height_m=_config_float(cfg, "height_m", 4.0),
            max_width_m=_config_float(cfg, "max_width_m", 1.0),
            peak_temperature=_config_float(cfg, "peak_temperature", 1200.0),
            ambient_temperature=_config_float(cfg, "ambient_temperature", 300.0),
            zone_fractions=(
                _config_float(cfg, "zone_fraction_central", 0.4),
                _config_float(cfg, "zone_fraction_middle", 0.3),
                _config_float(cfg, "zone_fraction_outer", 0.3),
            ),
            noise_sigma=_config_float(cfg, "noise_sigma", 0.0),
            seed=base_seed + i,
            frame_id=f"{prefix}_{i:03d}" if count > 1 else prefix,
        )
        result = synth.generate_flame(spec)
        ingest.save_temperature_csv(result.field, frames_dir / f"{spec.frame_id}.csv")
        ingest.save_label_mask_pgm(result.truth_mask,
                                   truth_dir / f"{spec.frame_id}.pgm")
        tg = result.truth_geometry
        geo_rows.append([spec.frame_id, tg.height_m, tg.liftoff_m, tg.area_m2,
                         tg.component_pixel_count, result.analytic_area_m2])
        calibration = result.calibration

    ingest.save_config(
        {
            "meters_per_pixel": _fmt(calibration.meters_per_pixel),
            "nozzle_row": str(calibration.nozzle_row),
            "nozzle_col": str(calibration.nozzle_col),
            "flame_boundary_kelvin": _fmt(synth.FLAME_BOUNDARY_KELVIN),
        },
        out_dir / "calibration.cfg",
    )
    _write_csv(out_dir / "truth_geometry.csv",
               ["frame_id", "L_m", "S_m", "A_m2", "component_pixel_count",
                "analytic_area_m2"],
               geo_rows)
    return 0


def cmd_report(args) -> int:
    rows = []
    for path in args.reports:
        path = Path(path)
        header, data = _read_simple_csv(path)
        if header[0] != "frame_id":
            raise JetsegError(f"{path}: expected an evaluation report")
        per_frame = [r for r in data if r[0] not in AGGREGATE_IDS]
        if not per_frame:
            raise JetsegError(f"{path}: no per-frame rows")
        values = np.array([[float(v) for v in r[1:]] for r in per_frame])
        with np.errstate(invalid="ignore"):  # std over all-inf psnr is nan
            rows.append([path.stem, len(per_frame),
                         *values.mean(axis=0), *values.std(axis=0)])
    header_row = ["method", "frames"]
    header_row += [f"mean_{f}" for f in metrics.ImageMetrics.FIELDS]
    header_row += [f"std_{f}" for f in metrics.ImageMetrics.FIELDS]
    _write_csv(Path(args.out), header_row, rows)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jetseg",
        description="IR jet-flame segmentation, geometry and evaluation toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("segment", help="segment temperature frames into zone masks")
    p.add_argument("input_dir", help="directory of temperature .csv frames")
    p.add_argument("--out", required=True, help="output directory for .pgm masks")
    p.add_argument("--method", choices=METHODS, default="threshold")
    p.add_argument("--config", help="key = value config file")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--median-radius", type=int, default=0)
    p.add_argument("--timing", help="write wall time CSV here")
    p.set_defaults(func=cmd_segment)

    p = sub.add_parser("evaluate", help="compare predicted masks with ground truth")
    p.add_argument("pred_dir")
    p.add_argument("truth_dir")
    p.add_argument("--out", required=True, help="per-frame metric CSV")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--timing", help="write wall time CSV here")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("geometry", help="extract flame geometry from masks")
    p.add_argument("mask_dir")
    p.add_argument("--config", required=True, help="calibration config file")
    p.add_argument("--out", required=True, help="geometry CSV")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--timing", help="write wall time CSV here")
    p.set_defaults(func=cmd_geometry)

    p = sub.add_parser("stats", help="paired signed-rank test between two error series")
    p.add_argument("errors_a", help="CSV with header id,value")
    p.add_argument("errors_b", help="CSV with header id,value")
    p.add_argument("--alpha", type=float, default=0.1)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("weights", help="inverse-log class weights from masks")
    p.add_argument("mask_dir")
    p.add_argument("--c", type=float, default=preprocess.DEFAULT_WEIGHT_C)
    p.add_argument("--out", required=True, help="weights CSV")
    p.set_defaults(func=cmd_weights)

    p = sub.add_parser("synth", help="generate synthetic flame frames with truth")
    p.add_argument("--spec", required=True, help="flame spec config file")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("report", help="summarize evaluation CSVs method by method")
    p.add_argument("reports", nargs="+", help="evaluate output CSVs")
    p.add_argument("--out", required=True, help="summary CSV")
    p.set_defaults(func=cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except JetsegError as exc:
        print(f"[error] {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"[error] {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
