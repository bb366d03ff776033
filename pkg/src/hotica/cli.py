"""Command-line experiment runner.

Subcommands:
  simulate   synthesize a scene and write the mixed series (CSV + binary)
  separate   run separation on a previously written binary mixed series
  run        full pipeline: simulate, separate, evaluate, write artifacts
  compare    diff the separation reports of two run manifests

Exit codes: 0 success, 2 configuration error, 3 divergence,
4 acceptance-comparison failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, io
from .config import ExperimentConfig, config_to_dict, dump_config, load_config
from .errors import ConfigError, DivergenceError
from .hot import SensitivityProfile
from .metrics import SeparationReport
from .pipeline import PipelineResult, run_pipeline
from .presets import PRESET_NAMES, get_preset
from .scene import synthesize_series
from .spectral import make_spectrograms

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DIVERGENCE = 3
EXIT_COMPARISON = 4


def _add_config_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--preset", choices=PRESET_NAMES,
                   help="bundled scenario name")
    p.add_argument("--config", type=Path, help="TOML config file")
    p.add_argument("--seed", type=int, help="override scene rng seed")
    p.add_argument("--separator", choices=("cf", "hot"),
                   help="override separator kind")
    p.add_argument("--eta-tx", help="comma-separated per-Tx sensitivities")
    p.add_argument("--eta-rx", help="comma-separated per-Rx sensitivities")
    p.add_argument("--out-dir", type=Path, default=Path("hotica_out"),
                   help="artifact directory (default: ./hotica_out)")


def _parse_eta(text: str, flag: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError as exc:
        raise ConfigError(flag, f"expected comma-separated floats, got {text!r}") from exc


def _resolve_config(args) -> ExperimentConfig:
    if bool(args.preset) == bool(args.config):
        raise ConfigError("cli", "exactly one of --preset or --config is required")
    if args.preset:
        cfg = get_preset(args.preset, seed=args.seed or 0)
    else:
        cfg = load_config(args.config)
    if args.seed is not None:
        cfg = dataclasses.replace(
            cfg, scene=dataclasses.replace(cfg.scene, rng_seed=args.seed))
    if args.separator:
        cfg = dataclasses.replace(cfg, separator=args.separator)
    if args.eta_tx or args.eta_rx:
        n_tx, n_rx = cfg.scene.shape
        eta_tx = (_parse_eta(args.eta_tx, "--eta-tx") if args.eta_tx
                  else cfg.profile.eta_tx)
        eta_rx = (_parse_eta(args.eta_rx, "--eta-rx") if args.eta_rx
                  else cfg.profile.eta_rx)
        try:
            profile = SensitivityProfile(eta_tx, eta_rx)
        except ValueError as exc:
            raise ConfigError("--eta", str(exc)) from exc
        cfg = dataclasses.replace(cfg, profile=profile)
    return cfg


def _write_run_artifacts(out: Path, cfg: ExperimentConfig,
                         result: PipelineResult, dump_b: bool) -> dict[str, Path]:
    labels = result.channel_labels
    files: dict[str, Path] = {}

    files["mixed_csv"] = out / "mixed.csv"
    io.write_series_csv(files["mixed_csv"], result.series, cfg.scene.sample_rate)
    files["mixed_bin"] = out / "mixed.bin"
    io.write_complex_bin(files["mixed_bin"], result.series)

    flat = result.flat_outputs
    grams = make_spectrograms(flat, result.window_times, result.run.bin_freqs)
    mag_norm = np.stack([g.magnitudes for g in grams], axis=-1)
    t_ds = np.arange(flat.shape[0])

    files["spectra_csv"] = out / "spectra_final.csv"
    io.write_spectra_csv(files["spectra_csv"], int(t_ds[-1]), result.run.bin_freqs,
                         flat[-1], labels, mag_norm[-1])
    files["spectrogram_csv"] = out / "spectrogram.csv"
    io.write_spectrogram_csv(files["spectrogram_csv"], t_ds, result.run.bin_freqs,
                             flat, labels, mag_norm)
    files["report_json"] = out / "report.json"
    files["report_json"].write_text(result.report.to_json())

    if dump_b:
        files["b_trajectory_csv"] = out / "b_trajectory.csv"
        io.write_trajectory_csv(files["b_trajectory_csv"], t_ds,
                                result.run.b_trajectory, result.run.rms_pre, labels)
        files["b_tensors_bin"] = out / "b_tensors.bin"
        io.write_complex_bin(files["b_tensors_bin"], result.run.b_trajectory)
    files["config_toml"] = out / "config.toml"
    files["config_toml"].write_text(dump_config(cfg))
    return files


def cmd_run(args) -> int:
    cfg = _resolve_config(args)
    out = args.out_dir
    out.mkdir(parents=True, exist_ok=True)
    started = time.monotonic()
    series = None
    if getattr(args, "input", None):
        series = io.read_complex_bin(args.input)
    try:
        result = run_pipeline(cfg, series=series)
    except DivergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        if series is None:
            series = synthesize_series(cfg.scene)
        io.write_series_csv(out / "mixed.csv", series, cfg.scene.sample_rate)
        io.write_complex_bin(out / "mixed.bin", series)
        io.write_complex_bin(out / "b_last_good.bin", exc.last_good)
        io.write_manifest(out / "manifest.json", name=cfg.name,
                          config_dict=config_to_dict(cfg), seed=cfg.scene.rng_seed,
                          version=__version__,
                          outputs={"mixed_csv": out / "mixed.csv",
                                   "mixed_bin": out / "mixed.bin",
                                   "b_last_good_bin": out / "b_last_good.bin"},
                          wall_clock_s=time.monotonic() - started,
                          status=f"diverged at window {exc.window}")
        return EXIT_DIVERGENCE
    files = _write_run_artifacts(out, cfg, result, args.dump_b_trajectory)
    io.write_manifest(out / "manifest.json", name=cfg.name,
                      config_dict=config_to_dict(cfg), seed=cfg.scene.rng_seed,
                      version=__version__, outputs=files,
                      wall_clock_s=time.monotonic() - started)
    print(result.report.format_table())
    print(f"artifacts written to {out}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    cfg = _resolve_config(args)
    out = args.out_dir
    out.mkdir(parents=True, exist_ok=True)
    series = synthesize_series(cfg.scene)
    io.write_series_csv(out / "mixed.csv", series, cfg.scene.sample_rate)
    io.write_complex_bin(out / "mixed.bin", series)
    print(f"wrote {out / 'mixed.csv'} and {out / 'mixed.bin'} "
          f"({series.shape[0]} samples, {series.shape[1]}x{series.shape[2]} channels)")
    return EXIT_OK


def cmd_separate(args) -> int:
    return cmd_run(args)


def _assigned_interference(report: SeparationReport) -> dict[int, float]:
    return {t.target: t.interference_db for t in report.targets}


def cmd_compare(args) -> int:
    man_a = io.read_manifest(args.manifest_a)
    man_b = io.read_manifest(args.manifest_b)
    rep_a = _report_of(args.manifest_a, man_a)
    rep_b = _report_of(args.manifest_b, man_b)
    ia, ib = _assigned_interference(rep_a), _assigned_interference(rep_b)
    if set(ia) != set(ib):
        print("error: runs assign different target sets; cannot compare",
              file=sys.stderr)
        return EXIT_CONFIG
    deltas = {}
    for k in sorted(ia):
        ta = next(t for t in rep_a.targets if t.target == k)
        tb = next(t for t in rep_b.targets if t.target == k)
        deltas[k] = {
            "interference_db": tb.interference_db - ta.interference_db,
            "primary_error_hz": _delta(tb.primary_error_hz, ta.primary_error_hz),
            "secondary_error_hz": _delta(tb.secondary_error_hz, ta.secondary_error_hz),
            "convergence_s": _delta(tb.convergence_s, ta.convergence_s),
        }
    dominates = all(ib[k] >= ia[k] for k in ia)
    diff = {"manifest_a": str(args.manifest_a), "manifest_b": str(args.manifest_b),
            "per_target_delta_b_minus_a": deltas,
            "b_dominates_interference": dominates}
    print(json.dumps(diff, indent=2))
    return EXIT_OK if dominates else EXIT_COMPARISON


def _delta(b, a):
    if a is None or b is None:
        return None
    return b - a


def _report_of(manifest_path: Path, manifest: dict) -> SeparationReport:
    rel = manifest["outputs"]["report_json"]["path"]
    report_path = Path(manifest_path).parent / rel
    return SeparationReport.from_dict(json.loads(report_path.read_text()))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hotica",
        description="CW MIMO Doppler radar simulation and online tensor ICA")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="simulate, separate, and evaluate")
    _add_config_args(p_run)
    p_run.add_argument("--dump-b-trajectory", action="store_true",
                       help="also write per-window operator norms and tensors")
    p_run.set_defaults(func=cmd_run, input=None)

    p_sim = sub.add_parser("simulate", help="write the mixed series only")
    _add_config_args(p_sim)
    p_sim.set_defaults(func=cmd_simulate)

    p_sep = sub.add_parser("separate",
                           help="separate a binary mixed series written earlier")
    _add_config_args(p_sep)
    p_sep.add_argument("--input", type=Path, required=True,
                       help="mixed.bin from a previous simulate/run")
    p_sep.add_argument("--dump-b-trajectory", action="store_true")
    p_sep.set_defaults(func=cmd_separate)

    p_cmp = sub.add_parser("compare", help="diff two run manifests")
    p_cmp.add_argument("manifest_a", type=Path)
    p_cmp.add_argument("manifest_b", type=Path,
                       help="candidate run; exit 0 only if it dominates "
                            "manifest_a on interference ratio")
    p_cmp.set_defaults(func=cmd_compare)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
