"""Named desk-scale scenarios.

All presets share the same 64x64 / grain 2 / N=20000 / speckle seed 42
geometry and the TH object, so their reconstructions are directly
comparable. Noisy presets use a sinusoid much slower than the sampling
rate (0.005 Hz against 25 measurements/s, 4 periods over the run): the
per-step noise increment is then far below the per-step bucket swing,
which is the regime the consecutive-difference reconstruction is built
for, while the plain correlation still integrates the full noise power.

Amplitudes were calibrated against the clean baseline (see
calibration/calibration.md): positions A and B put 200 clean-bucket
standard deviations onto the bucket (position A divides by the object-arm
coupling sum(T)/(w*h) so the same disturbance arrives after the mask);
position C puts 320 mean intensities onto the noisy reference pixels.
"""
from __future__ import annotations

from .errors import ConfigurationError
from .scene import builtin_mask

PRESET_NAMES = ("clean", "position-A", "position-B", "position-C-half", "position-C-double-slit")

_GRID = 64
_COUNT = 20000
_SPECKLE_SEED = 42
_NOISE_SEED = 4242
_SAMPLE_RATE = 25.0
_SLOW_HZ = 0.005       # 4 full periods over N=20000 at 25 Hz
_BUCKET_MULT = 200.0   # positions A and B, multiples of std(clean bucket)
_PIXEL_AMP = 320.0     # position C, multiples of mean_intensity (= 1.0 here)


def _base() -> dict:
    return {
        "speckle": {"width": _GRID, "height": _GRID, "grain_radius": 2.0, "mean_intensity": 1.0, "seed": _SPECKLE_SEED},
        "object": {"builtin": "TH"},
        "count": _COUNT,
    }


def _sinusoid(**extra) -> dict:
    wave = {"kind": "sinusoid", "frequency": _SLOW_HZ, "phase": 0.0, "sample_rate": _SAMPLE_RATE, "seed": _NOISE_SEED}
    wave.update(extra)
    return wave


def preset_config(name: str) -> dict:
    """Expand a preset name into a full config dict (see config.py schema)."""
    cfg = _base()
    if name == "clean":
        pass
    elif name == "position-A":
        # compensate the object-arm coupling so the bucket sees the same
        # disturbance as the position-B preset
        mask = builtin_mask("TH", _GRID, _GRID)
        kappa = mask.sum() / (_GRID * _GRID)
        cfg["noise"] = _sinusoid(position="A", amplitude_rel_std=_BUCKET_MULT / kappa)
    elif name == "position-B":
        cfg["noise"] = _sinusoid(position="B", amplitude_rel_std=_BUCKET_MULT)
    elif name == "position-C-half":
        cfg["noise"] = _sinusoid(position="C", amplitude=_PIXEL_AMP, spatial={"region": "right_half"})
    elif name == "position-C-double-slit":
        cfg["noise"] = _sinusoid(position="C", amplitude=_PIXEL_AMP, spatial={"region": "double_slit_right_half"})
    else:
        raise ConfigurationError(f"unknown preset {name!r}; choose from {PRESET_NAMES}")
    return cfg
