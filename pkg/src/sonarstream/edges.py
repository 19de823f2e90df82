"""Canny edge detection built from first principles.

Stages: Gaussian smoothing (sigma configurable, default 1.4), Sobel
gradients, non-maximum suppression along the quantized gradient
direction, and two-threshold hysteresis.  Gradient magnitudes are
normalized by the maximum possible Sobel response on a [0,1] plane
(4*sqrt(2)) so the thresholds are absolute, not per-frame adaptive.
"""

from __future__ import annotations

import numpy as np
from scipy import ndimage

_SOBEL_MAX = 4.0 * np.sqrt(2.0)  # peak |gradient| of a [0,1] plane

_EIGHT = np.ones((3, 3), dtype=int)


def gaussian_smooth(plane: np.ndarray, sigma: float = 1.4) -> np.ndarray:
    radius = max(1, int(np.ceil(3.0 * sigma)))
    xs = np.arange(-radius, radius + 1, dtype=np.float64)
    kernel = np.exp(-0.5 * (xs / sigma) ** 2)
    kernel /= kernel.sum()
    padded = np.pad(plane, radius, mode="reflect")
    out = np.apply_along_axis(lambda r: np.convolve(r, kernel, mode="valid"), 1, padded)
    out = np.apply_along_axis(lambda c: np.convolve(c, kernel, mode="valid"), 0, out)
    return out


def sobel_gradients(plane: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    p = np.pad(plane, 1, mode="reflect")
    gx = (p[:-2, 2:] + 2 * p[1:-1, 2:] + p[2:, 2:]
          - p[:-2, :-2] - 2 * p[1:-1, :-2] - p[2:, :-2])
    gy = (p[2:, :-2] + 2 * p[2:, 1:-1] + p[2:, 2:]
          - p[:-2, :-2] - 2 * p[:-2, 1:-1] - p[:-2, 2:])
    return gx, gy


def _nonmax_suppress(mag: np.ndarray, gx: np.ndarray, gy: np.ndarray) -> np.ndarray:
    angle = np.mod(np.arctan2(gy, gx), np.pi)
    sector = np.floor((angle + np.pi / 8) / (np.pi / 4)).astype(int) % 4
    padded = np.pad(mag, 1, mode="constant")
    center = padded[1:-1, 1:-1]
    neigh = {
        0: (padded[1:-1, 2:], padded[1:-1, :-2]),     # horizontal gradient
        1: (padded[2:, 2:], padded[:-2, :-2]),        # 45 deg
        2: (padded[2:, 1:-1], padded[:-2, 1:-1]),     # vertical
        3: (padded[2:, :-2], padded[:-2, 2:]),        # 135 deg
    }
    keep = np.zeros_like(mag, dtype=bool)
    for s, (n1, n2) in neigh.items():
        sel = sector == s
        keep |= sel & (center >= n1) & (center >= n2)
    return np.where(keep, mag, 0.0)


def canny(plane: np.ndarray, low: float = 0.04, high: float = 0.10,
          sigma: float = 1.4) -> np.ndarray:
    """Binary edge mask of a normalized [0,1] plane."""
    if not 0.0 <= low <= high:
        raise ValueError(f"need 0 <= low <= high, got low={low} high={high}")
    smoothed = gaussian_smooth(np.asarray(plane, dtype=np.float64), sigma)
    gx, gy = sobel_gradients(smoothed)
    mag = np.hypot(gx, gy) / _SOBEL_MAX
    nms = _nonmax_suppress(mag, gx, gy)
    strong = nms >= high
    weak = nms >= low
    if not strong.any():
        return np.zeros_like(strong)
    labels, count = ndimage.label(weak, structure=_EIGHT)
    keep = np.zeros(count + 1, dtype=bool)
    keep[np.unique(labels[strong])] = True
    keep[0] = False
    return keep[labels]
