"""Deterministic synthetic generators: moving-blob clips with known
motion ground truth, and 24 h environment traces for planner testing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .energy import CLOUD_ATTENUATION, EnvTrace, PvModel
from .frames import SonarFrame


@dataclass
class BlobClip:
    frames: list[SonarFrame]
    motion_frames: set[int]  # ground-truth indices containing the blob

    @property
    def idle_fraction(self) -> float:
        return 1.0 - len(self.motion_frames) / len(self.frames)


def make_blob_clip(seed: int, width: int = 64, height: int = 64,
                   warmup: int = 30, active: int = 50,
                   background: int = 20, blob_value: int = 200,
                   motion_fraction: float = 0.3) -> BlobClip:
    """Static background warm-up followed by frames where a bright blob
    translates 2 px/frame on a known subset of frames."""
    rng = np.random.default_rng(seed)
    bw = int(rng.integers(12, 24))
    bh = int(rng.integers(6, 12))
    x0 = int(rng.integers(0, max(1, width - bw - 2 * active)))
    y0 = int(rng.integers(0, height - bh))
    n_motion = max(1, int(round(active * motion_fraction)))
    motion_local = rng.choice(active, size=n_motion, replace=False)

    frames = []
    motion_frames = set()
    base = np.full((height, width), background, dtype=np.uint8)
    for i in range(warmup):
        frames.append(SonarFrame(base.copy(), timestamp=i / 10.0, index=i))
    step = 0
    for j in range(active):
        idx = warmup + j
        pix = base.copy()
        if j in motion_local:
            x = min(x0 + 2 * step, width - bw)
            step += 1
            pix[y0:y0 + bh, x:x + bw] = blob_value
            motion_frames.add(idx)
        frames.append(SonarFrame(pix, timestamp=idx / 10.0, index=idx))
    return BlobClip(frames, motion_frames)


def make_accuracy_table() -> dict[str, float]:
    """Synthetic per-stratum accuracy profile: quality rises with
    framerate and channel population, falls with downscaling, and the
    cloud model outperforms the edge model."""
    from .strata import DOWNSCALE_CHOICES, FPS_CHOICES  # local to avoid cycle

    table = {}
    for route, base in (("edge", 0.50), ("cloud", 0.62)):
        for d in DOWNSCALE_CHOICES:
            for f in FPS_CHOICES:
                for flt in ("off", "on"):
                    a = base + 0.15 / d + 0.10 * (f / 15.0) \
                        + (0.05 if flt == "on" else 0.0)
                    table[f"{route}:d{d}:f{f}:{flt}"] = round(a, 6)
    return table


def _day_pv(hours: np.ndarray, cloud: np.ndarray, rated_w: float = 900.0,
            sunrise: float = 6.0, sunset: float = 18.0) -> np.ndarray:
    pv = np.zeros_like(hours)
    day = (hours >= sunrise) & (hours <= sunset)
    phase = (hours[day] - sunrise) / (sunset - sunrise)
    atten = np.array([CLOUD_ATTENUATION[int(c)] for c in cloud[day]])
    pv[day] = rated_w * np.sin(np.pi * phase) * atten
    return pv


def make_clear_day_trace(step_s: float = 60.0) -> EnvTrace:
    t = np.arange(0.0, 24 * 3600.0, step_s)
    hours = t / 3600.0
    precip = np.zeros_like(t)
    cloud = np.zeros(len(t), dtype=int)
    pv = _day_pv(hours, cloud)
    return EnvTrace(t, precip, cloud, pv)


def make_storm_day_trace(step_s: float = 60.0) -> EnvTrace:
    """Thick cloud all day, light rain mid-morning, heavy rain and full
    cloud through the afternoon: PV-starved enough that an unbounded
    policy drains the battery."""
    t = np.arange(0.0, 24 * 3600.0, step_s)
    hours = t / 3600.0
    cloud = np.full(len(t), 2, dtype=int)
    cloud[(hours >= 14) & (hours < 20)] = 3
    precip = np.zeros_like(t)
    precip[(hours >= 8) & (hours < 13)] = 1.0
    precip[(hours >= 14) & (hours < 18)] = 6.0
    pv = _day_pv(hours, cloud)
    return EnvTrace(t, precip, cloud, pv)


def make_light_rain_day_trace(step_s: float = 60.0) -> EnvTrace:
    """Clear day with a block of light rain only; used to check the
    precipitation-to-throughput wiring."""
    t = np.arange(0.0, 24 * 3600.0, step_s)
    hours = t / 3600.0
    cloud = np.zeros(len(t), dtype=int)
    precip = np.zeros_like(t)
    rain = (hours >= 9) & (hours < 15)
    precip[rain] = 2.0
    cloud[rain] = 1
    pv = _day_pv(hours, cloud)
    return EnvTrace(t, precip, cloud, pv)
