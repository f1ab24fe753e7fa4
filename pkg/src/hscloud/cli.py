"""Command line: generate datasets, run the pipeline, evaluate depth quality.

Exit codes: 0 success, 2 configuration error, 3 data error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import dataio
from .errors import ConfigError, DataError
from .pipeline import PipelineConfig, export_ply, measure_stages, run
from .syntheval import load_multiview, modality_report
from .synthscene import (
    default_scene,
    generate_dataset,
    load_dataset,
    load_scene_spec,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hscloud",
        description="hyperspectral classification + depth point-cloud pipeline",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="replay a dataset through the pipeline")
    p_run.add_argument("--dataset", required=True, help="dataset directory")
    p_run.add_argument("--config", help="pipeline config JSON")
    p_run.add_argument("--serve", metavar="ADDR",
                       help="serve frames on host:port instead of exiting")
    p_run.add_argument("--static-dir", help="viewer assets directory for --serve")
    p_run.add_argument("--export-ply", metavar="DIR",
                       help="write per-frame PLY + classification PNG here")
    p_run.add_argument("--timings", metavar="CSV",
                       help="measure per-stage timings into this CSV")
    p_run.add_argument("--timing-executions", type=int, default=None)
    p_run.add_argument("--toggle-off", default="",
                       help="comma-separated stages to disable")
    p_run.add_argument("--pace-ms", type=int, default=None)
    p_run.add_argument("--overlay", action="store_true",
                       help="write PLYs with class-color overlay")

    p_gen = sub.add_parser("generate", help="generate a synthetic dataset")
    p_gen.add_argument("--spec", help="scene spec JSON (default: built-in scene)")
    p_gen.add_argument("--out", required=True)
    p_gen.add_argument("--frames", type=int, default=1)
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--grid", action="store_true",
                       help="include the 5x5 multiview array")
    p_gen.add_argument("--no-model", action="store_true",
                       help="skip training the toy model")

    p_eval = sub.add_parser("evaluate",
                            help="depth-modality view-synthesis assessment")
    p_eval.add_argument("--dataset", required=True)
    p_eval.add_argument("--out", required=True, help="per-view scores CSV")
    p_eval.add_argument("--summary", help="summary CSV (default: <out>.summary.csv)")
    p_eval.add_argument("--frame", type=int, default=0)
    p_eval.add_argument("--shift-tolerance", action="store_true")
    return parser


def _load_run_config(args) -> PipelineConfig:
    if args.config:
        config = PipelineConfig.from_json(args.config)
        if args.dataset:
            config.dataset = args.dataset
    else:
        config = PipelineConfig(dataset=args.dataset)
    if args.pace_ms is not None:
        config.pace_ms = args.pace_ms
    if args.timing_executions is not None:
        config.timing_executions = args.timing_executions
    for stage in filter(None, args.toggle_off.split(",")):
        stage = stage.strip()
        if stage not in config.toggles:
            raise ConfigError(f"unknown stage toggle {stage!r}")
        config.toggles[stage] = False
    return config.validate()


def _cmd_run(args) -> int:
    config = _load_run_config(args)
    if args.serve:
        host, _, port = args.serve.partition(":")
        from .server import serve_forever
        serve_forever(config, host or "127.0.0.1", int(port or 8700),
                      static_dir=args.static_dir)
        return EXIT_OK
    export_dir = Path(args.export_ply) if args.export_ply else None
    if export_dir:
        export_dir.mkdir(parents=True, exist_ok=True)
    count = 0
    for result in run(config):
        count += 1
        if export_dir:
            export_ply(result, export_dir / f"frame_{result.index:04d}.ply",
                       overlay=args.overlay)
            dataio.write_rgb_png(export_dir / f"class_{result.index:04d}.png",
                                 result.class_image)
        logger.info("frame %d: %d points, %.1f ms", result.index,
                    len(result.cloud), result.timings_ms["end_to_end"])
    if args.timings:
        report = measure_stages(config, executions=config.timing_executions)
        report.write_summary_csv(args.timings)
        samples_path = Path(args.timings).with_suffix(".samples.csv")
        report.write_samples_csv(samples_path)
    print(f"processed {count} frames")
    return EXIT_OK


def _cmd_generate(args) -> int:
    if args.spec:
        spec = load_scene_spec(args.spec)
        if args.grid:
            spec.grid = True
        spec.seed = args.seed if args.seed is not None else spec.seed
    else:
        spec = default_scene(seed=args.seed, grid=args.grid,
                             hs_noise_sigma_counts=2.0)
    out = generate_dataset(spec, args.out, frames=args.frames,
                           train_model=not args.no_model)
    print(f"dataset written to {out}")
    return EXIT_OK


def _cmd_evaluate(args) -> int:
    dataset = load_dataset(args.dataset)
    mv = load_multiview(dataset, frame=args.frame)
    report = modality_report(mv, shift_tolerance=args.shift_tolerance)
    summary = args.summary or str(Path(args.out).with_suffix(".summary.csv"))
    report.write_csv(args.out, summary)
    for modality in report.modalities():
        st = report.stats(modality)
        print(f"{modality}: mean {st.mean:.2f} dB  std {st.std:.2f}  "
              f"min {st.min:.2f}  max {st.max:.2f}")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(name)s %(levelname)s %(message)s",
    )
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "generate":
            return _cmd_generate(args)
        if args.command == "evaluate":
            return _cmd_evaluate(args)
        raise ConfigError(f"unknown command {args.command}")
    except ConfigError as exc:
        logger.error("configuration error: %s", exc)
        return EXIT_CONFIG
    except DataError as exc:
        logger.error("data error: %s", exc)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
