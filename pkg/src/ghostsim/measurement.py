"""Measurement simulation: bucket/reference series with noise injection.

Injection positions (clean frame F_n, clean bucket S0_n = sum F_n*T):

  none  S_n = S0_n,                          I_n = F_n
  A     S_n = S0_n + Q_n * sum(T)/(w*h),     I_n = F_n      (noise through the object arm)
  B     S_n = S0_n + Q_n,                    I_n = F_n      (noise straight onto the bucket)
  C     S_n = S0_n,                          I_n = F_n + Q_n * weights(x)

simulate() materializes everything; simulate_stream() yields one record at a
time at O(width*height) memory. Both are pure functions of the scenario, so
any record can be recomputed independently and runs replay bit-identically.
"""
from __future__ import annotations

import hashlib
import io
import struct
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .errors import ConfigurationError, ContractError, PgmFormatError
from .noise import NoiseWaveform, SpatialNoiseMask, noise_value
from .scene import bucket_signal
from .speckle import SpeckleParams, generate_frame

POSITIONS = ("none", "A", "B", "C")

_GSIM_MAGIC = b"GSIM"
_GSIM_VERSION = 1


@dataclass(frozen=True)
class NoiseSpec:
    """Temporal waveform plus where it enters the measurement."""

    waveform: NoiseWaveform = NoiseWaveform()
    position: str = "none"
    spatial: SpatialNoiseMask | None = None

    def __post_init__(self) -> None:
        if self.position not in POSITIONS:
            raise ConfigurationError(f"unknown injection position {self.position!r}; choose from {POSITIONS}")
        if self.position == "C" and self.spatial is None:
            raise ConfigurationError("position C requires a SpatialNoiseMask")


@dataclass
class Scenario:
    speckle: SpeckleParams
    object_mask: np.ndarray
    count: int
    noise: NoiseSpec = field(default_factory=NoiseSpec)

    def __post_init__(self) -> None:
        mask = np.asarray(self.object_mask, dtype=np.float64)
        if mask.shape != (self.speckle.height, self.speckle.width):
            raise ConfigurationError(
                f"object mask {mask.shape} does not match speckle grid "
                f"{(self.speckle.height, self.speckle.width)}"
            )
        if mask.min() < 0.0 or mask.max() > 1.0:
            raise ConfigurationError("object mask values must lie in [0, 1]")
        if self.count < 2:
            raise ConfigurationError(f"count must be >= 2, got {self.count}")
        self.object_mask = mask

    @property
    def position(self) -> str:
        return self.noise.position

    def digest(self) -> str:
        """sha256 over every parameter that affects the record values."""
        h = hashlib.sha256()
        sp = self.speckle
        wf = self.noise.waveform
        h.update(repr((sp.width, sp.height, float(sp.grain_radius), float(sp.mean_intensity), sp.seed)).encode())
        h.update(repr((self.count, self.noise.position)).encode())
        h.update(repr((wf.kind, float(wf.amplitude), float(wf.frequency), float(wf.phase), float(wf.sample_rate), wf.seed)).encode())
        if self.noise.spatial is not None:
            h.update(self.noise.spatial.region.encode())
            if self.noise.spatial.region == "custom":
                h.update(np.ascontiguousarray(self.noise.spatial.custom_weights).tobytes())
        h.update(np.ascontiguousarray(self.object_mask).tobytes())
        return h.hexdigest()


@dataclass
class MeasurementRecord:
    n: int              # 1-based ordinal
    s: float            # bucket value
    frame: np.ndarray   # reference intensity (height, width)


@dataclass
class MeasurementSeries:
    """Materialized run: s[i] and frames[i] belong to ordinal n = i + 1."""

    s: np.ndarray              # (N,) float64
    frames: np.ndarray         # (N, height, width) float64
    scenario_digest: str = ""

    def __post_init__(self) -> None:
        if self.frames.ndim != 3 or len(self.s) != len(self.frames):
            raise ContractError("series needs s (N,) and frames (N, height, width)")
        if len(self.s) < 2:
            raise ContractError("series must hold at least 2 records")

    def __len__(self) -> int:
        return len(self.s)

    @property
    def width(self) -> int:
        return self.frames.shape[2]

    @property
    def height(self) -> int:
        return self.frames.shape[1]

    def records(self) -> Iterator[MeasurementRecord]:
        for i in range(len(self.s)):
            yield MeasurementRecord(i + 1, float(self.s[i]), self.frames[i])


def _record_maker(scenario: Scenario):
    """Bind the per-ordinal record function for one scenario."""
    sp = scenario.speckle
    mask = scenario.object_mask
    wf = scenario.noise.waveform
    pos = scenario.noise.position
    kappa = mask.sum() / (sp.width * sp.height)  # object-arm coupling for position A
    weights = None
    if pos == "C":
        weights = scenario.noise.spatial.weights(sp.width, sp.height)

    def make(n: int) -> tuple[float, np.ndarray]:
        frame = generate_frame(sp, n)
        s = bucket_signal(frame, mask)
        if pos == "A":
            s += noise_value(wf, n) * kappa
        elif pos == "B":
            s += noise_value(wf, n)
        elif pos == "C":
            frame = frame + noise_value(wf, n) * weights
        return s, frame

    return make


def simulate(scenario: Scenario) -> MeasurementSeries:
    """Run the full scenario into memory."""
    sp = scenario.speckle
    n_rec = scenario.count
    s = np.empty(n_rec)
    frames = np.empty((n_rec, sp.height, sp.width))
    make = _record_maker(scenario)
    for i in range(n_rec):
        s[i], frames[i] = make(i + 1)
    return MeasurementSeries(s=s, frames=frames, scenario_digest=scenario.digest())


def simulate_stream(scenario: Scenario) -> Iterator[MeasurementRecord]:
    """Yield records one at a time; memory stays O(width*height)."""
    make = _record_maker(scenario)
    for i in range(scenario.count):
        s, frame = make(i + 1)
        yield MeasurementRecord(i + 1, s, frame)


def clean_bucket_series(scenario: Scenario) -> np.ndarray:
    """Bucket values of the same scenario with noise off (frames not kept)."""
    sp = scenario.speckle
    mask = scenario.object_mask
    out = np.empty(scenario.count)
    for i in range(scenario.count):
        out[i] = bucket_signal(generate_frame(sp, i + 1), mask)
    return out


def bucket_curve(series: MeasurementSeries) -> np.ndarray:
    """S_n against n, as stored."""
    return series.s.copy()


def column_curve(series: MeasurementSeries, column: int) -> np.ndarray:
    """Per-record sum of one reference column (a slit-plane photocurrent)."""
    if not 0 <= column < series.width:
        raise ContractError(f"column {column} outside 0..{series.width - 1}")
    return series.frames[:, :, column].sum(axis=1)


def save_series(series: MeasurementSeries, path) -> None:
    """Binary container: GSIM header, then per record f64 bucket + f32 frame."""
    header = _GSIM_MAGIC + struct.pack("<IIII", _GSIM_VERSION, series.width, series.height, len(series))
    with open(path, "wb") as fh:
        fh.write(header)
        for i in range(len(series)):
            fh.write(struct.pack("<d", series.s[i]))
            fh.write(series.frames[i].astype("<f4").tobytes())


def load_series(path) -> MeasurementSeries:
    with open(path, "rb") as fh:
        buf = fh.read()
    if buf[:4] != _GSIM_MAGIC:
        raise PgmFormatError("not a measurement container: missing GSIM magic")
    if len(buf) < 20:
        raise PgmFormatError("truncated container header")
    version, width, height, count = struct.unpack("<IIII", buf[4:20])
    if version != _GSIM_VERSION:
        raise PgmFormatError(f"unsupported container version {version}")
    rec_bytes = 8 + width * height * 4
    need = 20 + count * rec_bytes
    if len(buf) < need:
        raise PgmFormatError(f"truncated container: {len(buf)} of {need} bytes")
    s = np.empty(count)
    frames = np.empty((count, height, width))
    view = memoryview(buf)
    for i in range(count):
        off = 20 + i * rec_bytes
        (s[i],) = struct.unpack_from("<d", view, off)
        frames[i] = np.frombuffer(view, dtype="<f4", count=width * height, offset=off + 8).reshape(height, width)
    return MeasurementSeries(s=s, frames=frames)


def write_curve_csv(values: np.ndarray, path) -> None:
    """Two columns, n (1-based) and value, with full float precision."""
    with io.open(path, "w", newline="\n") as fh:
        fh.write("n,value\n")
        for i, v in enumerate(values):
            fh.write(f"{i + 1},{float(v)!r}\n")
