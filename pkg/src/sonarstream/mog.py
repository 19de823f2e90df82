"""Per-pixel mixture-of-Gaussians background model.

Each pixel keeps K weighted Gaussians (weight, mean, variance).  On each
frame a pixel is first classified against the pre-update state, then the
model is updated:

* mean and variance recurrences apply only to the matched component
  (the highest weight/sigma component within ``match_sigma`` std-devs),
* weight recurrence applies to every component with a 0/1 match
  indicator, followed by renormalization so weights sum to 1,
* if nothing matches, the lowest-weight component is replaced by a fresh
  Gaussian centered on the observed value.

Classification sorts components by weight/sigma and treats the leading
ones whose cumulative weight reaches ``background_ratio`` as background;
a value is background iff it matches one of them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .frames import SonarFrame

DEFAULT_K = 3
DEFAULT_ALPHA = 0.01
DEFAULT_MATCH_SIGMA = 2.5
DEFAULT_BACKGROUND_RATIO = 0.9
DEFAULT_INIT_VARIANCE = 225.0  # 15^2
DEFAULT_INIT_WEIGHT = 0.05
VARIANCE_FLOOR = 4.0


@dataclass
class MogComponent:
    weight: float
    mean: float
    variance: float


@dataclass
class MogPixelModel:
    components: list[MogComponent]

    @classmethod
    def fresh(cls, x0: float, k: int = DEFAULT_K,
              init_variance: float = DEFAULT_INIT_VARIANCE) -> "MogPixelModel":
        comps = [MogComponent(1.0, x0, init_variance)]
        comps += [MogComponent(0.0, 0.0, init_variance) for _ in range(k - 1)]
        return cls(comps)


def mog_update_pixel(model: MogPixelModel, x_t: float, alpha: float,
                     match_sigma: float = DEFAULT_MATCH_SIGMA,
                     init_variance: float = DEFAULT_INIT_VARIANCE,
                     init_weight: float = DEFAULT_INIT_WEIGHT,
                     variance_floor: float = VARIANCE_FLOOR) -> tuple[MogPixelModel, bool]:
    """One observation update; returns (updated model, matched?)."""
    comps = model.components
    order = sorted(range(len(comps)),
                   key=lambda k: -comps[k].weight / math.sqrt(comps[k].variance))
    matched = -1
    for k in order:
        c = comps[k]
        if abs(x_t - c.mean) <= match_sigma * math.sqrt(c.variance):
            matched = k
            break

    if matched < 0:
        new = [MogComponent(c.weight, c.mean, c.variance) for c in comps]
        lowest = min(range(len(new)), key=lambda k: new[k].weight)
        new[lowest] = MogComponent(init_weight, x_t, max(init_variance, variance_floor))
        total = sum(c.weight for c in new)
        for c in new:
            c.weight /= total
        return MogPixelModel(new), False

    new = []
    for k, c in enumerate(comps):
        m_k = 1.0 if k == matched else 0.0
        w = (1.0 - alpha) * c.weight + alpha * m_k
        if k == matched:
            mu = (1.0 - alpha) * c.mean + alpha * x_t
            var = max((1.0 - alpha) * c.variance + alpha * (x_t - mu) ** 2,
                      variance_floor)
        else:
            mu, var = c.mean, c.variance
        new.append(MogComponent(w, mu, var))
    total = sum(c.weight for c in new)
    for c in new:
        c.weight /= total
    return MogPixelModel(new), True


def mog_classify(model: MogPixelModel, x_t: float,
                 background_ratio: float = DEFAULT_BACKGROUND_RATIO,
                 match_sigma: float = DEFAULT_MATCH_SIGMA) -> bool:
    """True iff x_t is foreground under the pre-update model."""
    comps = sorted(model.components,
                   key=lambda c: -c.weight / math.sqrt(c.variance))
    cum = 0.0
    for c in comps:
        if abs(x_t - c.mean) <= match_sigma * math.sqrt(c.variance):
            return False
        cum += c.weight
        if cum >= background_ratio:
            break
    return True


@dataclass
class ForegroundMask:
    bits: np.ndarray  # (height, width) bool

    @property
    def height(self) -> int:
        return self.bits.shape[0]

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    def packed_rows(self) -> bytes:
        """Rows packed MSB-first, each row padded to a byte boundary."""
        return np.packbits(self.bits, axis=1).tobytes()


class MogField:
    """Whole-frame MOG state, vectorized over pixels.

    Arrays are laid out (K, H, W).  The field is lazily initialized from
    the first frame it sees.
    """

    def __init__(self, width: int, height: int, k: int = DEFAULT_K,
                 alpha: float = DEFAULT_ALPHA,
                 match_sigma: float = DEFAULT_MATCH_SIGMA,
                 background_ratio: float = DEFAULT_BACKGROUND_RATIO,
                 init_variance: float = DEFAULT_INIT_VARIANCE,
                 init_weight: float = DEFAULT_INIT_WEIGHT,
                 variance_floor: float = VARIANCE_FLOOR):
        if not 0.0 <= alpha <= 1.0:
            raise ValueError(f"alpha must be in [0,1], got {alpha}")
        if match_sigma <= 0:
            raise ValueError(f"match_sigma must be positive, got {match_sigma}")
        if not 0.0 < background_ratio <= 1.0:
            raise ValueError(f"background_ratio must be in (0,1], got {background_ratio}")
        self.width = width
        self.height = height
        self.k = k
        self.alpha = alpha
        self.match_sigma = match_sigma
        self.background_ratio = background_ratio
        self.init_variance = init_variance
        self.init_weight = init_weight
        self.variance_floor = variance_floor
        self._initialized = False
        self.weights = np.zeros((k, height, width))
        self.means = np.zeros((k, height, width))
        self.variances = np.full((k, height, width), init_variance)

    def _init_from(self, x: np.ndarray) -> None:
        self.weights[0] = 1.0
        self.means[0] = x
        self._initialized = True

    def apply(self, frame: SonarFrame) -> ForegroundMask:
        """Classify against the current state, then update it."""
        if frame.pixels.shape != (self.height, self.width):
            raise ValueError(
                f"frame dims {frame.width}x{frame.height} do not match "
                f"field dims {self.width}x{self.height}"
            )
        x = frame.pixels.astype(np.float64)
        if not self._initialized:
            # first frame seeds the model and is background by definition
            self._init_from(x)
            return ForegroundMask(np.zeros((self.height, self.width), dtype=bool))

        w, mu, var = self.weights, self.means, self.variances
        sigma = np.sqrt(var)
        order = np.argsort(-w / sigma, axis=0, kind="stable")
        w_s = np.take_along_axis(w, order, axis=0)
        mu_s = np.take_along_axis(mu, order, axis=0)
        sig_s = np.take_along_axis(sigma, order, axis=0)

        match_s = np.abs(x[None] - mu_s) <= self.match_sigma * sig_s
        cum_before = np.cumsum(w_s, axis=0) - w_s
        is_bg_comp = cum_before < self.background_ratio
        fg = ~np.any(match_s & is_bg_comp, axis=0)

        # update: matched component = first match in sorted order
        any_match = np.any(match_s, axis=0)
        first_s = np.argmax(match_s, axis=0)
        matched_orig = np.take_along_axis(order, first_s[None], axis=0)[0]

        m = np.zeros_like(w)
        np.put_along_axis(m, matched_orig[None], any_match[None].astype(np.float64), axis=0)

        a = self.alpha
        # weight recurrence only applies when some component matched;
        # otherwise weights are kept and the replacement below renormalizes
        new_w = np.where(any_match[None], (1.0 - a) * w + a * m, w)
        is_matched = m > 0
        new_mu = np.where(is_matched, (1.0 - a) * mu + a * x[None], mu)
        new_var = np.where(
            is_matched,
            np.maximum((1.0 - a) * var + a * (x[None] - new_mu) ** 2, self.variance_floor),
            var,
        )

        # unmatched pixels: replace the lowest-weight component
        if np.any(~any_match):
            lowest = np.argmin(new_w, axis=0)
            repl = (~any_match)[None] & (np.arange(self.k)[:, None, None] == lowest[None])
            new_w = np.where(repl, self.init_weight, new_w)
            new_mu = np.where(repl, x[None], new_mu)
            new_var = np.where(repl, max(self.init_variance, self.variance_floor), new_var)

        new_w /= np.sum(new_w, axis=0, keepdims=True)
        self.weights, self.means, self.variances = new_w, new_mu, new_var
        return ForegroundMask(fg)

    def pixel_model(self, row: int, col: int) -> MogPixelModel:
        return MogPixelModel([
            MogComponent(self.weights[k, row, col], self.means[k, row, col],
                         self.variances[k, row, col])
            for k in range(self.k)
        ])
