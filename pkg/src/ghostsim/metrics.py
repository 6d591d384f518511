"""Reconstruction quality measures against a known truth mask."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ContractError, DegenerateInputError
from .measurement import MeasurementSeries


def pearson(a: np.ndarray, b: np.ndarray) -> float:
    """Pearson correlation over all pixels."""
    if a.shape != b.shape:
        raise ContractError(f"shape mismatch: {a.shape} vs {b.shape}")
    x = np.asarray(a, dtype=np.float64).ravel()
    y = np.asarray(b, dtype=np.float64).ravel()
    x = x - x.mean()
    y = y - y.mean()
    vx = float(x @ x)
    vy = float(y @ y)
    if vx == 0.0 or vy == 0.0:
        raise DegenerateInputError("pearson undefined for a constant image")
    return float(x @ y) / math.sqrt(vx * vy)


def cnr(image: np.ndarray, truth: np.ndarray) -> float:
    """Signed contrast-to-noise: (mean on truth>=0.5 minus mean off it) / std off it."""
    if image.shape != truth.shape:
        raise ContractError(f"shape mismatch: {image.shape} vs {truth.shape}")
    obj = np.asarray(truth, dtype=np.float64) >= 0.5
    bg = ~obj
    if not obj.any() or bg.sum() < 2:
        raise ContractError("cnr needs at least one object pixel and two background pixels")
    vals = np.asarray(image, dtype=np.float64)
    sigma = float(vals[bg].std())  # population std
    if sigma == 0.0:
        raise DegenerateInputError("background is constant; cnr undefined")
    return float(vals[obj].mean() - vals[bg].mean()) / sigma


def affine_mse(image: np.ndarray, truth: np.ndarray) -> float:
    """MSE after the best least-squares affine fit a*image + b to truth.

    Removes the arbitrary scale and offset of a correlation image before
    comparing levels.
    """
    if image.shape != truth.shape:
        raise ContractError(f"shape mismatch: {image.shape} vs {truth.shape}")
    x = np.asarray(image, dtype=np.float64).ravel()
    y = np.asarray(truth, dtype=np.float64).ravel()
    design = np.stack([x, np.ones_like(x)], axis=1)
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = design @ coef - y
    return float(np.mean(resid * resid))


@dataclass
class QualityReport:
    cnr: float
    pearson_r: float
    mse: float

    def to_dict(self) -> dict:
        return {"cnr": self.cnr, "pearson_r": self.pearson_r, "mse": self.mse}


def quality_report(image: np.ndarray, truth: np.ndarray) -> QualityReport:
    return QualityReport(cnr=cnr(image, truth), pearson_r=pearson(image, truth), mse=affine_mse(image, truth))


def oracle_covariance_image(series: MeasurementSeries) -> np.ndarray:
    """Reference covariance image by definition, one pixel at a time.

    Deliberately naive (pure Python loops, no vectorization) and deliberately
    sharing no code with gi_reconstruct: this is the independent check the
    fast path is verified against. Use on small series only.
    """
    n = len(series)
    height, width = series.height, series.width
    s_vals = [float(v) for v in series.s]
    s_mean = sum(s_vals) / n
    out = np.empty((height, width))
    for r in range(height):
        for c in range(width):
            pix_mean = 0.0
            for i in range(n):
                pix_mean += float(series.frames[i, r, c])
            pix_mean /= n
            acc = 0.0
            for i in range(n):
                acc += (s_vals[i] - s_mean) * (float(series.frames[i, r, c]) - pix_mean)
            out[r, c] = acc / n
    return out
