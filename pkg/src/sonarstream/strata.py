"""Near-square stratum splitting, configuration space, and the bitrate
and power models over per-stratum streaming configurations.

Tall frames are cut into N horizontal bands whose heights differ by at
most one pixel; N is the band count that keeps each band's aspect ratio
closest to square (always within [1/sqrt(2), sqrt(2)]).  Wide frames are
split along their long axis symmetrically.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

DOWNSCALE_CHOICES = (1, 2, 4)
FPS_CHOICES = (1, 5, 10, 15)
DEFAULT_BITS_PER_PIXEL = 8.0
DEFAULT_CODEC_RATIO = 0.2

ASPECT_LO = 1.0 / math.sqrt(2.0)
ASPECT_HI = math.sqrt(2.0)


@dataclass(frozen=True)
class Rect:
    x: int
    y: int
    w: int
    h: int

    @property
    def area(self) -> int:
        return self.w * self.h


@dataclass(frozen=True)
class StratumLayout:
    width: int
    height: int
    rects: tuple[Rect, ...]

    def __len__(self) -> int:
        return len(self.rects)

    def as_dict(self) -> dict:
        return {
            "width": self.width,
            "height": self.height,
            "rects": [vars(r) for r in self.rects],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "StratumLayout":
        return cls(d["width"], d["height"],
                   tuple(Rect(**r) for r in d["rects"]))


@dataclass(frozen=True)
class StratumConfig:
    downscale: int
    fps: int
    filter_on: bool

    def __post_init__(self):
        if self.downscale not in DOWNSCALE_CHOICES:
            raise ValueError(f"downscale must be one of {DOWNSCALE_CHOICES}")
        if self.fps not in FPS_CHOICES:
            raise ValueError(f"fps must be one of {FPS_CHOICES}")

    @property
    def key(self) -> str:
        return f"d{self.downscale}:f{self.fps}:{'on' if self.filter_on else 'off'}"


@dataclass(frozen=True)
class Configuration:
    """Per-stratum settings plus the inference route for the whole frame."""

    per_stratum: tuple[StratumConfig, ...]
    route: str = "edge"  # "edge" or "cloud"

    def __post_init__(self):
        if self.route not in ("edge", "cloud"):
            raise ValueError(f"route must be 'edge' or 'cloud', got {self.route!r}")

    @property
    def key(self) -> str:
        return self.route + "|" + ",".join(s.key for s in self.per_stratum)

    def as_dict(self) -> dict:
        return {
            "route": self.route,
            "strata": [
                {"downscale": s.downscale, "fps": s.fps, "filter_on": s.filter_on}
                for s in self.per_stratum
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Configuration":
        return cls(tuple(StratumConfig(s["downscale"], s["fps"], s["filter_on"])
                         for s in d["strata"]),
                   route=d.get("route", "edge"))


def _band_count(long_px: int, short_px: int) -> int:
    r = long_px / short_px
    lo, hi = max(1, math.floor(r)), max(1, math.ceil(r))
    # band count keeping per-band aspect closest to 1 on a log scale
    return min((lo, hi), key=lambda n: abs(math.log(r / n)))


def split_strata(width: int, height: int) -> StratumLayout:
    if width < 1 or height < 1:
        raise ValueError(f"bad frame dims {width}x{height}")
    if height >= width:
        n = _band_count(height, width)
        base, extra = divmod(height, n)
        rects = []
        y = 0
        for i in range(n):
            h = base + (1 if i < extra else 0)
            rects.append(Rect(0, y, width, h))
            y += h
    else:
        n = _band_count(width, height)
        base, extra = divmod(width, n)
        rects = []
        x = 0
        for i in range(n):
            w = base + (1 if i < extra else 0)
            rects.append(Rect(x, 0, w, height))
            x += w
    return StratumLayout(width, height, tuple(rects))


def estimate_bitrate(layout: StratumLayout, config: Configuration,
                     bits_per_pixel: float = DEFAULT_BITS_PER_PIXEL,
                     codec_ratio: float = DEFAULT_CODEC_RATIO) -> float:
    """Streamed bits/second of a configuration over a layout."""
    if bits_per_pixel <= 0:
        raise ValueError(f"bits_per_pixel must be > 0, got {bits_per_pixel}")
    if not 0.0 < codec_ratio <= 1.0:
        raise ValueError(f"codec_ratio must be in (0,1], got {codec_ratio}")
    if len(config.per_stratum) != len(layout):
        raise ValueError(
            f"config has {len(config.per_stratum)} strata, layout has {len(layout)}"
        )
    total = 0.0
    for rect, s in zip(layout.rects, config.per_stratum):
        channels = 3 if s.filter_on else 1
        total += (rect.area / s.downscale ** 2) * s.fps * bits_per_pixel \
            * codec_ratio * channels
    return total


@dataclass(frozen=True)
class PowerModel:
    """Affine path-power model, calibrated to profiled edge/cloud runs.

    The edge route runs inference on-premise; the cloud route pays a
    smaller preprocessing share on the edge plus a transmission term
    affine in bitrate with a fixed per-stream overhead.
    """

    edge_base_w: float = 9.00
    edge_per_stratum_w: float = 0.34
    cloud_edge_base_w: float = 4.96
    cloud_edge_per_stratum_w: float = 0.39
    tx_per_stream_w: float = 2.17
    tx_per_mbps_w: float = 43.31 / 36.0  # anchored at a 36 Mbps profiled stream

    def as_dict(self) -> dict:
        return dict(vars(self))

    @classmethod
    def from_dict(cls, d: dict) -> "PowerModel":
        return cls(**{k: d[k] for k in vars(cls()) if k in d})

    @classmethod
    def load(cls, path) -> "PowerModel":
        with open(path) as fh:
            d = json.load(fh)
        return cls.from_dict(d.get("power", d))


def estimate_power(config: Configuration, bitrate_bps: float,
                   model: PowerModel = PowerModel()) -> float:
    """Watts drawn by the analytics path for a configuration."""
    n = len(config.per_stratum)
    if config.route == "edge":
        return model.edge_base_w + model.edge_per_stratum_w * n
    tx = model.tx_per_stream_w * n + model.tx_per_mbps_w * (bitrate_bps / 1e6)
    return model.cloud_edge_base_w + model.cloud_edge_per_stratum_w * n + tx
