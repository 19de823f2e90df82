"""Pluggable detector surface: a baseline connected-component blob
detector over foreground masks, plus a greedy-matching F1 evaluator
usable as an accuracy source for profiling.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Protocol

import numpy as np
from scipy import ndimage

from .channels import ChannelTriple
from .mog import ForegroundMask

CLASS_SALMON, CLASS_OTTER, CLASS_SMOLT = 0, 1, 2

_EIGHT = np.ones((3, 3), dtype=int)


@dataclass(frozen=True)
class DetBox:
    x: int
    y: int
    w: int
    h: int
    score: float = 1.0
    class_id: int = CLASS_SALMON

    def __post_init__(self):
        if self.w < 1 or self.h < 1:
            raise ValueError(f"degenerate box {self.w}x{self.h}")
        if not 0.0 <= self.score <= 1.0:
            raise ValueError(f"score must be in [0,1], got {self.score}")


class Detector(Protocol):
    """Anything that maps a populated channel triple to boxes."""

    def detect(self, triple: ChannelTriple) -> list[DetBox]: ...


def blob_detect(mask: ForegroundMask, min_area: int = 1) -> list[DetBox]:
    """Tight bounding boxes of 8-connected foreground components."""
    if min_area < 1:
        raise ValueError(f"min_area must be >= 1, got {min_area}")
    labels, count = ndimage.label(mask.bits, structure=_EIGHT)
    boxes = []
    for i, sl in enumerate(ndimage.find_objects(labels), start=1):
        if sl is None:
            continue
        area = int(np.count_nonzero(labels[sl] == i))
        if area < min_area:
            continue
        ys, xs = sl
        w = xs.stop - xs.start
        h = ys.stop - ys.start
        boxes.append(DetBox(xs.start, ys.start, w, h,
                            score=area / (w * h), class_id=CLASS_SALMON))
    return boxes


@dataclass
class BlobDetector:
    min_area: int = 4
    threshold: float = 0.5

    def detect(self, triple: ChannelTriple) -> list[DetBox]:
        # ch3 carries the foreground guided by the original frame
        mask = ForegroundMask(triple.ch3 >= self.threshold)
        return blob_detect(mask, self.min_area)


def iou(a: DetBox, b: DetBox) -> float:
    ix = max(0, min(a.x + a.w, b.x + b.w) - max(a.x, b.x))
    iy = max(0, min(a.y + a.h, b.y + b.h) - max(a.y, b.y))
    inter = ix * iy
    union = a.w * a.h + b.w * b.h - inter
    return inter / union if union > 0 else 0.0


def evaluate_f1(dets: list[DetBox], labels: list[DetBox],
                iou_threshold: float = 0.5) -> tuple[float, float, float]:
    """Greedy one-to-one matching by descending score.

    Empty detections give precision 1 by convention (no false positives
    were emitted); empty labels give recall 1.
    """
    if not 0.0 < iou_threshold < 1.0:
        raise ValueError(f"iou_threshold must be in (0,1), got {iou_threshold}")
    matched_labels: set[int] = set()
    tp = 0
    for d in sorted(dets, key=lambda b: -b.score):
        best, best_iou = -1, iou_threshold
        for j, g in enumerate(labels):
            if j in matched_labels:
                continue
            v = iou(d, g)
            if v >= best_iou:
                best, best_iou = j, v
        if best >= 0:
            matched_labels.add(best)
            tp += 1
    precision = tp / len(dets) if dets else 1.0
    recall = tp / len(labels) if labels else 1.0
    f1 = (2 * precision * recall / (precision + recall)
          if precision + recall > 0 else 0.0)
    return precision, recall, f1


def load_labels(path) -> dict[int, list[DetBox]]:
    """Labels CSV: frame_idx,x,y,w,h,class_id."""
    per_frame: dict[int, list[DetBox]] = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        for row in reader:
            if not row or row[0].strip().lower() == "frame_idx":
                continue
            idx, x, y, w, h, cls = (int(v) for v in row[:6])
            per_frame.setdefault(idx, []).append(DetBox(x, y, w, h, 1.0, cls))
    return per_frame


def save_detections(dets_per_frame: dict[int, list[DetBox]], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["frame_idx", "x", "y", "w", "h", "class_id", "score"])
        for idx in sorted(dets_per_frame):
            for b in dets_per_frame[idx]:
                writer.writerow([idx, b.x, b.y, b.w, b.h, b.class_id,
                                 f"{b.score:.6f}"])
