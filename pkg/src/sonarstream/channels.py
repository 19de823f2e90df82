"""Three-channel population of a sonar frame and the motion gate.

The three planes fed to detectors hedge two guided-filter variants:
the original frame, the frame guided by the foreground mask, and the
foreground mask guided by the frame.  The motion gate runs Canny on
max(ch2, ch3) and flags a frame as motion when the edge-pixel fraction
reaches the density threshold; gated-out frames are counted in a saving
ledger.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .edges import canny
from .frames import SonarFrame
from .guided import GuidedFilterParams, guided_filter, to_plane
from .mog import ForegroundMask

DEFAULT_CANNY_LOW = 0.04
DEFAULT_CANNY_HIGH = 0.10
DEFAULT_CANNY_SIGMA = 1.4
DEFAULT_DENSITY_THRESHOLD = 0.003


@dataclass
class ChannelTriple:
    ch1: np.ndarray  # original frame, normalized
    ch2: np.ndarray  # guided: input=original, guide=foreground
    ch3: np.ndarray  # guided: input=foreground, guide=original

    def __post_init__(self):
        if not (self.ch1.shape == self.ch2.shape == self.ch3.shape):
            raise ValueError("channel planes must share dims")


@dataclass
class MotionResult:
    is_motion: bool
    edge_density: float
    edge_mask: np.ndarray


@dataclass
class SavingLedger:
    frames_total: int = 0
    frames_motion: int = 0

    @property
    def saving_ratio(self) -> float:
        if self.frames_total == 0:
            return 1.0
        return 1.0 - self.frames_motion / self.frames_total

    def update(self, motion: MotionResult) -> "SavingLedger":
        self.frames_total += 1
        if motion.is_motion:
            self.frames_motion += 1
        return self

    def as_dict(self) -> dict:
        return {
            "frames_total": self.frames_total,
            "frames_motion": self.frames_motion,
            "saving_ratio": self.saving_ratio,
        }


def mask_to_plane(mask: ForegroundMask) -> np.ndarray:
    return mask.bits.astype(np.float64)


def populate_channels(frame: SonarFrame, mask: ForegroundMask,
                      gf: GuidedFilterParams = GuidedFilterParams()) -> ChannelTriple:
    if frame.pixels.shape != mask.bits.shape:
        raise ValueError(
            f"frame dims {frame.width}x{frame.height} != mask dims "
            f"{mask.width}x{mask.height}"
        )
    original = to_plane(frame.pixels)
    fg = mask_to_plane(mask)
    return ChannelTriple(
        ch1=original,
        ch2=guided_filter(original, fg, gf),
        ch3=guided_filter(fg, original, gf),
    )


def detect_motion(triple: ChannelTriple,
                  canny_low: float = DEFAULT_CANNY_LOW,
                  canny_high: float = DEFAULT_CANNY_HIGH,
                  density_threshold: float = DEFAULT_DENSITY_THRESHOLD,
                  sigma: float = DEFAULT_CANNY_SIGMA) -> MotionResult:
    fused = np.maximum(triple.ch2, triple.ch3)
    edges = canny(fused, canny_low, canny_high, sigma)
    density = float(np.count_nonzero(edges)) / edges.size
    return MotionResult(is_motion=density >= density_threshold,
                        edge_density=density, edge_mask=edges)


def update_ledger(ledger: SavingLedger, motion: MotionResult) -> SavingLedger:
    return ledger.update(motion)
