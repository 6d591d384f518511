"""Command line front end.

    ghostsim run CONFIG.json [--out DIR]
    ghostsim preset NAME [--out DIR]
    ghostsim sweep CONFIG.json --axis AXIS --values V1,V2,... [--out DIR]
    ghostsim export-mask NAME OUT.pgm [--width W] [--height H]

Exit codes: 0 success, 2 configuration error, 3 contract/degenerate-input
error, 4 I/O or file format error. Outputs are bytewise deterministic:
no timestamps, stable key order, full float precision.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import load_config, parse_config_text
from .errors import ConfigurationError, ContractError, DegenerateInputError, GhostsimError, PgmFormatError
from .measurement import (
    MeasurementSeries,
    NoiseSpec,
    Scenario,
    bucket_curve,
    clean_bucket_series,
    column_curve,
    save_series,
    simulate,
    write_curve_csv,
)
from .metrics import pearson, quality_report
from .noise import NoiseWaveform, SpatialNoiseMask
from .presets import PRESET_NAMES, preset_config
from .reconstruct import gi_reconstruct, igi_reconstruct, save_f64, save_recon_pgm, validity_diagnostic
from .scene import builtin_mask, load_mask, save_mask

SWEEP_AXES = ("noise-amplitude", "noise-frequency", "N")


def _build_mask(obj_cfg: dict, width: int, height: int) -> np.ndarray:
    if "builtin" in obj_cfg:
        return builtin_mask(obj_cfg["builtin"], width, height)
    mask = load_mask(obj_cfg["pgm"])
    if mask.shape != (height, width):
        raise ConfigurationError(
            f"object mask {obj_cfg['pgm']} is {mask.shape[1]}x{mask.shape[0]}, "
            f"config wants {width}x{height}"
        )
    return mask


def _build_scenario(cfg: dict) -> tuple[Scenario, dict, np.ndarray | None]:
    """Turn a validated config into a Scenario.

    Returns (scenario, resolved config with absolute amplitude, clean bucket
    series when one had to be computed for amplitude resolution).
    """
    from .speckle import SpeckleParams

    sp_cfg = cfg["speckle"]
    speckle = SpeckleParams(
        width=sp_cfg["width"], height=sp_cfg["height"], grain_radius=sp_cfg["grain_radius"],
        mean_intensity=sp_cfg["mean_intensity"], seed=sp_cfg["seed"],
    )
    mask = _build_mask(cfg["object"], speckle.width, speckle.height)

    nz = cfg["noise"]
    resolved = json.loads(json.dumps(cfg))  # deep copy, JSON types only
    s0 = None
    if "amplitude_rel_std" in nz:
        s0 = clean_bucket_series(Scenario(speckle=speckle, object_mask=mask, count=cfg["count"]))
        sigma = float(s0.std())
        if sigma == 0.0:
            raise ConfigurationError("clean bucket series is constant; amplitude_rel_std cannot be resolved")
        amplitude = float(nz["amplitude_rel_std"]) * sigma
        resolved["noise"].pop("amplitude_rel_std")
        resolved["noise"]["amplitude"] = amplitude
    else:
        amplitude = nz["amplitude"]

    waveform = NoiseWaveform(
        kind=nz["kind"], amplitude=amplitude, frequency=nz["frequency"],
        phase=nz["phase"], sample_rate=nz["sample_rate"], seed=nz["seed"],
    )
    spatial = None
    if nz["spatial"] is not None:
        region = nz["spatial"]["region"]
        if region == "custom":
            weights = load_mask(nz["spatial"]["pgm"])
            if weights.shape != (speckle.height, speckle.width):
                raise ConfigurationError(
                    f"spatial weights {nz['spatial']['pgm']} do not match the speckle grid"
                )
            spatial = SpatialNoiseMask(region="custom", custom_weights=weights)
        else:
            spatial = SpatialNoiseMask(region=region)
    scenario = Scenario(
        speckle=speckle, object_mask=mask, count=cfg["count"],
        noise=NoiseSpec(waveform=waveform, position=nz["position"], spatial=spatial),
    )
    return scenario, resolved, s0


def _write_json(obj, path: Path) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def run_scenario(cfg: dict, out_dir: Path) -> dict:
    """Simulate, reconstruct, measure, and write the full artifact set."""
    scenario, resolved, s0 = _build_scenario(cfg)
    out_dir.mkdir(parents=True, exist_ok=True)

    series = simulate(scenario)
    position = scenario.position
    noisy_bucket = position in ("A", "B") and scenario.noise.waveform.kind != "off"
    if noisy_bucket and s0 is None:
        s0 = clean_bucket_series(scenario)
    clean_s = s0 if noisy_bucket else series.s

    kappa = scenario.object_mask.sum() / (scenario.speckle.width * scenario.speckle.height)
    coupling = kappa if position == "A" else 1.0
    validity = validity_diagnostic(clean_s, scenario.noise.waveform, coupling=coupling)

    normalization = cfg["output"]["igi_normalization"]
    gi = gi_reconstruct(series)
    igi = igi_reconstruct(series, normalization=normalization)
    truth = scenario.object_mask
    report_gi = quality_report(gi, truth)
    report_igi = quality_report(igi, truth)

    save_f64(gi, out_dir / "gi.f64")
    save_f64(igi, out_dir / "igi.f64")
    save_recon_pgm(gi, out_dir / "gi.pgm")
    save_recon_pgm(igi, out_dir / "igi.pgm")
    _write_json(report_gi.to_dict(), out_dir / "metrics_gi.json")
    _write_json(report_igi.to_dict(), out_dir / "metrics_igi.json")
    _write_json(validity.to_dict(), out_dir / "validity.json")
    write_curve_csv(bucket_curve(series), out_dir / "bucket_curve.csv")
    if cfg["output"]["emit_curves"]:
        # slit-plane style curves at the quarter and three-quarter columns
        width = scenario.speckle.width
        write_curve_csv(column_curve(series, width // 4), out_dir / "column_curve_left.csv")
        write_curve_csv(column_curve(series, (3 * width) // 4), out_dir / "column_curve_right.csv")
    if cfg["output"]["emit_frames"]:
        save_series(series, out_dir / "series.gsim")

    embedded = json.loads(json.dumps(resolved))
    embedded["output"] = {k: v for k, v in embedded["output"].items() if k != "dir"}
    manifest = {
        "format": "ghostsim-manifest",
        "version": 1,
        "tool": {"name": "ghostsim", "version": __version__},
        "config": embedded,
        "scenario_digest": scenario.digest(),
        "clean_bucket_std": float(clean_s.std()) if noisy_bucket else float(series.s.std()),
    }
    _write_json(manifest, out_dir / "manifest.json")
    return {
        "out": str(out_dir),
        "gi_pearson_r": report_gi.pearson_r,
        "igi_pearson_r": report_igi.pearson_r,
        "validity_flag": validity.flag,
    }


def _evaluate_row(cfg: dict, clean_cache: dict) -> tuple[float, float, float]:
    """One sweep row: gi pearson, igi pearson, validity ratio. No files."""
    scenario, _, s0 = _build_scenario(cfg)
    series = simulate(scenario)
    position = scenario.position
    noisy_bucket = position in ("A", "B") and scenario.noise.waveform.kind != "off"
    if noisy_bucket:
        if s0 is None:
            key = scenario.count
            if key not in clean_cache:
                clean_cache[key] = clean_bucket_series(scenario)
            s0 = clean_cache[key]
        clean_s = s0
    else:
        clean_s = series.s
    kappa = scenario.object_mask.sum() / (scenario.speckle.width * scenario.speckle.height)
    validity = validity_diagnostic(clean_s, scenario.noise.waveform, coupling=kappa if position == "A" else 1.0)
    gi = gi_reconstruct(series)
    igi = igi_reconstruct(series, normalization=cfg["output"]["igi_normalization"])
    truth = scenario.object_mask
    return pearson(gi, truth), pearson(igi, truth), validity.ratio


def run_sweep(cfg: dict, axis: str, values: list[float], out_dir: Path) -> Path:
    """Re-run the base config along one axis; one CSV row per value."""
    if axis not in SWEEP_AXES:
        raise ConfigurationError(f"unknown sweep axis {axis!r}; choose from {SWEEP_AXES}")
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "sweep.csv"
    clean_cache: dict = {}
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["value", "gi_pearson_r", "igi_pearson_r", "validity_ratio", "status"])
        for value in values:
            row_cfg = json.loads(json.dumps(cfg))
            if axis == "noise-amplitude":
                row_cfg["noise"].pop("amplitude_rel_std", None)
                row_cfg["noise"]["amplitude"] = float(value)
            elif axis == "noise-frequency":
                row_cfg["noise"]["frequency"] = float(value)
            else:  # N
                if value != int(value) or int(value) < 2:
                    raise ConfigurationError(f"N sweep values must be integers >= 2, got {value}")
                row_cfg["count"] = int(value)
            try:
                gi_r, igi_r, ratio = _evaluate_row(row_cfg, clean_cache)
                writer.writerow([repr(float(value)), repr(gi_r), repr(igi_r), repr(ratio), "ok"])
            except GhostsimError as exc:
                writer.writerow([repr(float(value)), "", "", "", f"error: {exc}"])
    return csv_path


def export_mask(name: str, out_path: Path, width: int, height: int) -> None:
    save_mask(builtin_mask(name, width, height), out_path)


def _parse_values(text: str) -> list[float]:
    try:
        values = [float(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError as exc:
        raise ConfigurationError(f"bad sweep values {text!r}: {exc}") from exc
    if not values:
        raise ConfigurationError("sweep needs at least one value")
    return values


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ghostsim", description="pseudothermal ghost imaging simulator")
    parser.add_argument("--version", action="version", version=f"ghostsim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a scenario config")
    p_run.add_argument("config")
    p_run.add_argument("--out", default=None, help="output directory (default: config output.dir)")

    p_preset = sub.add_parser("preset", help="run a named preset")
    p_preset.add_argument("name", choices=PRESET_NAMES)
    p_preset.add_argument("--out", default=None, help="output directory (default: out-<name>)")

    p_sweep = sub.add_parser("sweep", help="re-run a config along one axis")
    p_sweep.add_argument("config")
    p_sweep.add_argument("--axis", required=True, choices=SWEEP_AXES)
    p_sweep.add_argument("--values", required=True, help="comma separated values")
    p_sweep.add_argument("--out", default=None, help="output directory (default: config output.dir)")

    p_mask = sub.add_parser("export-mask", help="write a builtin mask as 8-bit PGM")
    p_mask.add_argument("name")
    p_mask.add_argument("out")
    p_mask.add_argument("--width", type=int, default=64)
    p_mask.add_argument("--height", type=int, default=64)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            cfg = load_config(args.config)
            out = Path(args.out) if args.out else Path(cfg["output"]["dir"])
            summary = run_scenario(cfg, out)
            print(
                f"wrote {summary['out']}: gi pearson_r={summary['gi_pearson_r']:.4f} "
                f"igi pearson_r={summary['igi_pearson_r']:.4f} validity={summary['validity_flag']}"
            )
        elif args.command == "preset":
            cfg = parse_config_text(json.dumps(preset_config(args.name)), path=f"<preset {args.name}>")
            out = Path(args.out) if args.out else Path(f"out-{args.name}")
            summary = run_scenario(cfg, out)
            print(
                f"wrote {summary['out']}: gi pearson_r={summary['gi_pearson_r']:.4f} "
                f"igi pearson_r={summary['igi_pearson_r']:.4f} validity={summary['validity_flag']}"
            )
        elif args.command == "sweep":
            cfg = load_config(args.config)
            out = Path(args.out) if args.out else Path(cfg["output"]["dir"])
            csv_path = run_sweep(cfg, args.axis, _parse_values(args.values), out)
            print(f"wrote {csv_path}")
        else:  # export-mask
            export_mask(args.name, Path(args.out), args.width, args.height)
            print(f"wrote {args.out}")
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ContractError, DegenerateInputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (PgmFormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
