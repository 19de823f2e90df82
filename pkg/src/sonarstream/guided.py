"""Edge-preserving guided filter on normalized intensity planes.

For each window of half-width ``radius`` centered at j, a linear model
a_j, b_j regresses the input plane onto the guidance plane:

    a_j = (mean(G*I) - mean(G)*mean(I)) / (var(G) + epsilon)
    b_j = mean(I) - a_j * mean(G)

The output at pixel i averages (a, b) over every window that contains i
before applying ``Q_i = a*G_i + b``.  Windows are truncated at frame
borders: statistics are taken over the valid intersection only, so no
pixel values are invented outside the raster.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class GuidedFilterParams:
    radius: int = 4
    epsilon: float = 0.01

    def __post_init__(self):
        if self.radius < 1:
            raise ValueError(f"radius must be >= 1, got {self.radius}")
        if self.epsilon < 0:
            raise ValueError(f"epsilon must be >= 0, got {self.epsilon}")


def box_sum(a: np.ndarray, r: int) -> np.ndarray:
    """Sum over the (2r+1)^2 window around each pixel, truncated at borders."""
    h, w = a.shape
    c = np.zeros((h + 1, w + 1), dtype=np.float64)
    np.cumsum(np.cumsum(a, axis=0), axis=1, out=c[1:, 1:])
    y = np.arange(h)
    x = np.arange(w)
    y0 = np.clip(y - r, 0, h)
    y1 = np.clip(y + r + 1, 0, h)
    x0 = np.clip(x - r, 0, w)
    x1 = np.clip(x + r + 1, 0, w)
    return (c[np.ix_(y1, x1)] - c[np.ix_(y0, x1)]
            - c[np.ix_(y1, x0)] + c[np.ix_(y0, x0)])


def window_counts(height: int, width: int, r: int) -> np.ndarray:
    y = np.arange(height)
    x = np.arange(width)
    ny = np.clip(y + r + 1, 0, height) - np.clip(y - r, 0, height)
    nx = np.clip(x + r + 1, 0, width) - np.clip(x - r, 0, width)
    return ny[:, None] * nx[None, :].astype(np.float64)


def guided_filter(I: np.ndarray, G: np.ndarray,
                  params: GuidedFilterParams = GuidedFilterParams()) -> np.ndarray:
    """Filter input plane I using guidance plane G. Returns the output plane."""
    I = np.asarray(I, dtype=np.float64)
    G = np.asarray(G, dtype=np.float64)
    if I.shape != G.shape:
        raise ValueError(f"input dims {I.shape} != guidance dims {G.shape}")
    h, w = I.shape
    r, eps = params.radius, params.epsilon
    if h < 2 * r + 1 or w < 2 * r + 1:
        raise ValueError(f"window {2*r+1}x{2*r+1} larger than frame {w}x{h}")

    n = window_counts(h, w, r)
    mean_i = box_sum(I, r) / n
    mean_g = box_sum(G, r) / n
    mean_gi = box_sum(G * I, r) / n
    var_g = np.maximum(box_sum(G * G, r) / n - mean_g * mean_g, 0.0)

    denom = var_g + eps
    cov = mean_gi - mean_g * mean_i
    a = np.divide(cov, denom, out=np.zeros_like(cov), where=denom > 0)
    b = mean_i - a * mean_g

    a_bar = box_sum(a, r) / n
    b_bar = box_sum(b, r) / n
    return a_bar * G + b_bar


def to_plane(pixels: np.ndarray) -> np.ndarray:
    """8-bit raster -> normalized float plane in [0,1]."""
    return np.asarray(pixels, dtype=np.float64) / 255.0


def to_u8(plane: np.ndarray) -> np.ndarray:
    """Normalized plane -> clamped 8-bit raster."""
    return np.clip(np.rint(plane * 255.0), 0, 255).astype(np.uint8)
