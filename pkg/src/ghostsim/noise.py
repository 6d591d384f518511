"""Background-light noise: temporal waveforms and spatial weighting.

Waveform values are non-negative by construction (light adds, it does not
subtract). Stochastic kinds are indexed like speckle frames: the value at
step n comes from a Philox generator keyed on (seed, module tag) with the
counter set from n, so any step is replayable out of order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.random import Generator, Philox

from .errors import ConfigurationError, ContractError

NOISE_KINDS = ("off", "constant", "sinusoid", "gaussian_white", "poisson")
SPATIAL_REGIONS = ("full", "right_half", "double_slit_right_half", "custom")

_STREAM_TAG = 0x4E4F4953  # "NOIS"


@dataclass(frozen=True)
class NoiseWaveform:
    kind: str = "off"
    amplitude: float = 0.0
    frequency: float = 0.0      # Hz, sinusoid only
    phase: float = 0.0          # radians, sinusoid only
    sample_rate: float = 25.0   # measurements per second
    seed: int = 0               # stochastic kinds only

    def __post_init__(self) -> None:
        if self.kind not in NOISE_KINDS:
            raise ConfigurationError(f"unknown noise kind {self.kind!r}; choose from {NOISE_KINDS}")
        if self.amplitude < 0.0:
            raise ConfigurationError("noise amplitude must be >= 0")
        if self.sample_rate <= 0.0:
            raise ConfigurationError("sample_rate must be > 0")
        if self.kind == "sinusoid" and self.frequency < 0.0:
            raise ConfigurationError("sinusoid frequency must be >= 0")
        if self.seed < 0:
            raise ConfigurationError("seed must be a non-negative integer")


def _rng(seed: int, ordinal: int) -> Generator:
    key = np.array([seed, _STREAM_TAG], dtype=np.uint64)
    return Generator(Philox(counter=ordinal << 128, key=key))


def noise_value(waveform: NoiseWaveform, n: int) -> float:
    """Waveform sample Q_n at measurement ordinal n (1-based). Always >= 0."""
    if n < 1:
        raise ContractError(f"ordinal must be >= 1, got {n}")
    k = waveform.kind
    if k == "off":
        return 0.0
    if k == "constant":
        return waveform.amplitude
    if k == "sinusoid":
        # midpoint convention: oscillates in [0, amplitude], so Q_1 = A/2 at phase 0
        t = (n - 1) / waveform.sample_rate
        return 0.5 * waveform.amplitude * (1.0 + math.sin(2.0 * math.pi * waveform.frequency * t + waveform.phase))
    if k == "gaussian_white":
        z = _rng(waveform.seed, n).standard_normal()
        return max(0.0, waveform.amplitude + 0.25 * waveform.amplitude * z)
    # poisson
    return float(_rng(waveform.seed, n).poisson(waveform.amplitude))


def per_step_noise_delta_bound(waveform: NoiseWaveform) -> float:
    """Upper bound on |Q_{n+1} - Q_n| (probabilistic 6-sigma for stochastic kinds).

    sinusoid: amplitude * |sin(pi*f/fs)|, which is exact for every f including
    aliased ones (sampling folds f > fs/2 back; at integer multiples of fs the
    sampled waveform is constant and the bound is genuinely zero).
    """
    k = waveform.kind
    if k in ("off", "constant"):
        return 0.0
    if k == "sinusoid":
        return waveform.amplitude * abs(math.sin(math.pi * waveform.frequency / waveform.sample_rate))
    if k == "gaussian_white":
        return 6.0 * (waveform.amplitude / 4.0)
    return 6.0 * math.sqrt(waveform.amplitude)  # poisson


@dataclass
class SpatialNoiseMask:
    """Where reference-plane noise lands, as per-pixel weights in [0, 1]."""

    region: str = "full"
    custom_weights: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        if self.region not in SPATIAL_REGIONS:
            raise ConfigurationError(f"unknown spatial region {self.region!r}; choose from {SPATIAL_REGIONS}")
        if self.region == "custom":
            if self.custom_weights is None:
                raise ConfigurationError("custom spatial region requires custom_weights")
            w = np.asarray(self.custom_weights, dtype=np.float64)
            if w.ndim != 2:
                raise ConfigurationError("custom_weights must be 2-D")
            if w.min() < 0.0 or w.max() > 1.0:
                raise ConfigurationError("custom_weights values must lie in [0, 1]")
            self.custom_weights = w
        elif self.custom_weights is not None:
            raise ConfigurationError("custom_weights only apply to the custom region")

    def weights(self, width: int, height: int) -> np.ndarray:
        """Weight grid for the given frame size."""
        if self.region == "full":
            return np.ones((height, width))
        if self.region == "right_half":
            w = np.zeros((height, width))
            w[:, (width + 1) // 2 :] = 1.0  # columns >= width/2
            return w
        if self.region == "double_slit_right_half":
            w = np.zeros((height, width))
            c0 = (width + 1) // 2
            half_w = width - c0
            slit_w = max(1, half_w // 6)
            for center in (c0 + half_w // 3, c0 + (2 * half_w) // 3):
                a = center - slit_w // 2
                w[:, a : a + slit_w] = 1.0
            return w
        # custom
        cw = self.custom_weights
        if cw.shape != (height, width):
            raise ContractError(f"custom_weights shape {cw.shape} does not match frame {(height, width)}")
        return cw.copy()


def noise_field(waveform: NoiseWaveform, spatial: SpatialNoiseMask, n: int, width: int, height: int) -> np.ndarray:
    """Additive reference-plane noise at step n: Q_n times the spatial weights."""
    return noise_value(waveform, n) * spatial.weights(width, height)
