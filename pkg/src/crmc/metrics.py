"""Performance metrics and convergence diagnostics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .array import steering_vector

RELATIVE_ERROR_FLOOR_DB = -300.0
PATTERN_FLOOR_DB = -80.0
DEFAULT_GRID = np.arange(-90.0, 91.0, 1.0)


def relative_error_db(w_o, w) -> float:
    """``10 log10(||w_o - w||^2 / ||w_o||^2)``, floored at -300 dB."""
    w_o = np.asarray(w_o)
    w = np.asarray(w)
    if w_o.shape != w.shape:
        raise ValueError(f"shape mismatch {w_o.shape} vs {w.shape}")
    ref = np.vdot(w_o, w_o).real
    if ref == 0:
        raise ValueError("reference weights must be non-zero")
    diff = w_o - w
    ratio = np.vdot(diff, diff).real / ref
    if ratio <= 10 ** (RELATIVE_ERROR_FLOOR_DB / 10):
        return RELATIVE_ERROR_FLOOR_DB
    return float(10 * np.log10(ratio))


@dataclass
class Beampattern:
    angles_deg: np.ndarray
    gain_db: np.ndarray

    @property
    def peak_angle(self) -> float:
        return float(self.angles_deg[np.argmax(self.gain_db)])


def beampattern(w, num_elements: int | None = None, angles_deg=None,
                floor_db: float = PATTERN_FLOOR_DB) -> Beampattern:
    """Array pattern ``20 log10 |w^H a(theta)|`` normalized to a 0 dB peak.

    Values below ``floor_db`` are clamped to it.
    """
    w = np.asarray(w, dtype=complex)
    if not np.any(w):
        raise ValueError("beampattern of all-zero weights is undefined")
    num_elements = w.shape[-1] if num_elements is None else num_elements
    if num_elements != w.shape[-1]:
        raise ValueError("weight length does not match the array size")
    angles = DEFAULT_GRID if angles_deg is None else np.asarray(angles_deg, dtype=float)
    if np.any(np.diff(angles) <= 0):
        raise ValueError("angle grid must be strictly increasing")
    gain = np.abs(steering_vector(angles, num_elements) @ np.conj(w))
    with np.errstate(divide="ignore"):
        db = 20 * np.log10(gain / gain.max())
    return Beampattern(angles.copy(), np.maximum(db, floor_db))


def null_depth(bp: Beampattern, angle_deg: float) -> float:
    """Pattern gain at ``angle_deg``, linearly interpolated on the grid."""
    lo, hi = bp.angles_deg[0], bp.angles_deg[-1]
    if not lo <= angle_deg <= hi:
        raise ValueError(f"angle {angle_deg} outside pattern grid [{lo}, {hi}]")
    return float(np.interp(angle_deg, bp.angles_deg, bp.gain_db))


def median_beampattern(patterns) -> Beampattern:
    """Per-angle median of several patterns sharing one grid."""
    patterns = list(patterns)
    if not patterns:
        raise ValueError("no patterns to combine")
    grid = patterns[0].angles_deg
    gains = np.array([p.gain_db for p in patterns])
    return Beampattern(grid.copy(), np.median(gains, axis=0))


def sample_wiener(x, d) -> np.ndarray:
    """Least-squares weights solving ``(sum x x^H) w = sum x conj(d)``.

    A rank-deficient covariance (noise-free data with fewer sources than
    elements) yields the minimum-norm solution.
    """
    x = np.asarray(x, dtype=complex)
    d = np.asarray(d, dtype=complex)
    cov = x.T @ np.conj(x)
    if not np.any(cov):
        raise ValueError("sample covariance is zero; no excitation")
    cross = x.T @ np.conj(d)
    w, *_ = np.linalg.lstsq(cov, cross, rcond=1e-12)
    return w


def running_mean(values) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    return np.cumsum(values) / np.arange(1, len(values) + 1)


def loglog_slope(n, values) -> float:
    """Least-squares slope of ``log(values)`` against ``log(n)``."""
    slope, _ = np.polyfit(np.log(np.asarray(n, dtype=float)),
                          np.log(np.asarray(values, dtype=float)), 1)
    return float(slope)


def linear_fit_r2(x, y) -> tuple[float, float, float]:
    """Ordinary least squares ``y = a + b x``; returns ``(a, b, r_squared)``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    b, a = np.polyfit(x, y, 1)
    resid = y - (a + b * x)
    total = np.sum((y - y.mean()) ** 2)
    r2 = 1.0 - np.sum(resid ** 2) / total if total > 0 else 1.0
    return float(a), float(b), float(r2)


def predicted_bias(n, w_o, input_cov, delta: float) -> np.ndarray:
    """First-order mean weight bias ``-(1/n) Gamma^{-1} R(0) w_o``, ``R(0) = I/delta``.

    Returned as one vector per entry of ``n`` (the bias of ``E{w(n)} - w_o``).
    """
    n = np.atleast_1d(np.asarray(n, dtype=float))
    k = np.linalg.solve(input_cov, w_o) / delta
    return -k[None, :] / n[:, None]
