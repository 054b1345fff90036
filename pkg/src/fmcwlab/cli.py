"""Command-line interface.

Subcommands:
  sweep     run a full Monte Carlo sweep from a config file and export
            the summary CSV, phase-error CDF CSV, and run metadata
  trial     run one trial and dump its frames, RD maps, and metrics for
            inspection
  validate  parse and validate a config file, printing its digest
"""

import argparse
import os
import sys
from dataclasses import replace

import yaml

from .errors import FmcwLabError
from .harness import (SweepConfig, export, load_config, mitigate, run_sweep,
                      run_trial, sweep_config_digest, trial_seeds)
from .rdproc import range_doppler_map, write_map
from .scene import assign_interferers, generate_scene, scene_to_yaml
from .synth import AdcFrame, synthesize_frame, write_frame


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fmcwlab",
        description="FMCW radar interference laboratory: synthesis, "
                    "mitigation, and Monte Carlo evaluation.")
    sub = parser.add_subparsers(dest="command", required=True)

    sweep = sub.add_parser("sweep", help="run a Monte Carlo sweep")
    _common_flags(sweep)
    sweep.add_argument("--threads", type=int, default=1,
                       help="worker processes (default 1; results are "
                            "identical for any value)")
    sweep.add_argument("--fast", action="store_true",
                       help="10 trials per grid point instead of the "
                            "configured count")

    trial = sub.add_parser("trial", help="run and dump a single trial")
    _common_flags(trial)
    trial.add_argument("--p", type=float, required=True,
                       help="interference probability for this trial")
    trial.add_argument("--trial-index", type=int, default=0)

    validate = sub.add_parser("validate", help="check a config file")
    validate.add_argument("--config", required=True)
    return parser


def _common_flags(sub) -> None:
    sub.add_argument("--config", default=None,
                     help="YAML sweep config (defaults apply if omitted)")
    sub.add_argument("--seed", type=int, default=None,
                     help="override the master seed")
    sub.add_argument("--out", default="out", help="output directory")


def _load(args) -> SweepConfig:
    cfg = load_config(args.config) if args.config else SweepConfig()
    if getattr(args, "seed", None) is not None:
        cfg = replace(cfg, master_seed=args.seed)
    if getattr(args, "fast", False):
        cfg = replace(cfg, trials_per_point=10)
    return cfg


def _cmd_sweep(args) -> int:
    cfg = _load(args)
    result = run_sweep(cfg, threads=args.threads)
    paths = export(result, args.out)
    print(f"config digest {result.config_digest}; "
          f"{len(result.cells)} cells; "
          f"{result.skipped_trials} trials skipped (no detectable bins)")
    for cell in result.cells:
        print(f"  p={cell.p:<6g} {cell.method:<7s} "
              f"mean_pd={cell.mean_pd:.4f} "
              f"mean_sinr_db={cell.mean_sinr_db:.2f} "
              f"trials={cell.trial_count}")
    for name, path in paths.items():
        print(f"wrote {name}: {path}")
    return 0


def _cmd_trial(args) -> int:
    cfg = _load(args)
    p = args.p
    record = run_trial(cfg, p, args.trial_index)
    os.makedirs(args.out, exist_ok=True)

    scene_seed, assign_seed, noise_seed = trial_seeds(cfg.master_seed, p,
                                                      args.trial_index)
    scene = generate_scene(cfg.scenario, cfg.radar, scene_seed)
    scene = assign_interferers(scene, cfg.scenario, cfg.radar, p, assign_seed)
    frame = synthesize_frame(scene, cfg.radar, noise_seed)

    with open(os.path.join(args.out, "scene.yaml"), "w",
              encoding="utf-8") as fh:
        fh.write(scene_to_yaml(scene))
    write_frame(frame, os.path.join(args.out, "frame_full.bin"))
    write_frame(AdcFrame(frame.clean, cfg.radar),
                os.path.join(args.out, "frame_clean.bin"))
    for method in cfg.methods:
        mitigated = mitigate(method, frame, cfg)
        write_frame(mitigated,
                    os.path.join(args.out, f"frame_{method}.bin"))
        write_map(range_doppler_map(mitigated),
                  os.path.join(args.out, f"rdmap_{method}.bin"))

    doc = {
        "p": p,
        "trial_index": args.trial_index,
        "seeds": {"scene": scene_seed, "assign": assign_seed,
                  "noise": noise_seed},
        "detectable_count": record.detectable_count,
        "interferer_count": len(scene.interferers),
        "methods": {
            m.method: {
                "pd": float(m.pd),
                "sinr_db": float(m.sinr_db),
                "max_phase_error_deg": float(m.phase_error_deg.max())
                if m.phase_error_deg.size else None,
            } for m in record.metrics
        },
    }
    path = os.path.join(args.out, "trial_metrics.yaml")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(yaml.safe_dump(doc, sort_keys=True))
    print(f"trial dumped to {args.out} "
          f"({record.detectable_count} detectable bins, "
          f"{len(scene.interferers)} interferers)")
    return 0


def _cmd_validate(args) -> int:
    cfg = load_config(args.config)
    print(f"{args.config}: valid; digest {sweep_config_digest(cfg)}")
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handlers = {"sweep": _cmd_sweep, "trial": _cmd_trial,
                "validate": _cmd_validate}
    try:
        return handlers[args.command](args)
    except (FmcwLabError, OSError, ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
