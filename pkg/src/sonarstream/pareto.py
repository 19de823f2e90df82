"""Exhaustive profiling of the configuration space and Pareto-front
extraction over (bandwidth, power, accuracy).

Two dominance rules are exposed:

* ``strict-all`` -- a configuration is excluded only when some other
  configuration is strictly better on all three metrics at once.
* ``standard`` -- classical Pareto dominance: no worse on every metric
  and strictly better on at least one.

The strict-all front is always a superset of the standard front.
"""

from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass

import numpy as np

from .strata import (
    DOWNSCALE_CHOICES,
    FPS_CHOICES,
    Configuration,
    PowerModel,
    StratumConfig,
    StratumLayout,
    estimate_bitrate,
    estimate_power,
)

RULE_STRICT_ALL = "strict-all"
RULE_STANDARD = "standard"
DEFAULT_SPACE_CAP = 1_000_000


class SearchSpaceTooLarge(ValueError):
    pass


class ProfileMiss(KeyError):
    pass


@dataclass(frozen=True)
class MetricTriple:
    bandwidth: float  # bits/s
    power: float      # Watts
    accuracy: float   # [0,1]

    def __post_init__(self):
        if self.bandwidth < 0 or self.power < 0:
            raise ValueError("bandwidth and power must be non-negative")
        if not 0.0 <= self.accuracy <= 1.0:
            raise ValueError(f"accuracy must be in [0,1], got {self.accuracy}")

    def as_dict(self) -> dict:
        return {"bandwidth_bps": self.bandwidth, "power_w": self.power,
                "accuracy": self.accuracy}


class AccuracyProfile:
    """Lookup of per-stratum accuracy keyed by ``route:dD:fF:on|off``.

    A configuration's accuracy is the mean of its per-stratum entries.
    With ``interpolate=True`` missing (downscale, fps) points are filled
    by bilinear interpolation within the same route/filter slice.
    """

    def __init__(self, table: dict[str, float], interpolate: bool = False):
        for key, a in table.items():
            if not 0.0 <= a <= 1.0:
                raise ValueError(f"accuracy out of range for {key!r}: {a}")
        self.table = dict(table)
        self.interpolate = interpolate

    @staticmethod
    def stratum_key(route: str, s: StratumConfig) -> str:
        return f"{route}:{s.key}"

    @classmethod
    def load(cls, path, interpolate: bool = False) -> "AccuracyProfile":
        table = {}
        with open(path, newline="") as fh:
            for i, row in enumerate(csv.reader(fh)):
                if not row or row[0].startswith("#"):
                    continue
                if row[0].strip().lower() == "key":
                    continue
                if len(row) != 2:
                    raise ValueError(f"{path}: malformed row {i}: {row!r}")
                key, a = row[0].strip(), float(row[1])
                if not 0.0 <= a <= 1.0:
                    raise ValueError(f"{path}: row {i}: accuracy {a} out of [0,1]")
                table[key] = a
        if not table:
            raise ValueError(f"{path}: error at row 0: profile is empty")
        return cls(table, interpolate=interpolate)

    def stratum_accuracy(self, route: str, s: StratumConfig) -> float:
        key = self.stratum_key(route, s)
        if key in self.table:
            return self.table[key]
        if not self.interpolate:
            raise ProfileMiss(f"no accuracy entry for {key!r} and interpolation is off")
        return self._interp(route, s)

    def _interp(self, route: str, s: StratumConfig) -> float:
        flt = "on" if s.filter_on else "off"

        def lookup(d, f):
            return self.table.get(f"{route}:d{d}:f{f}:{flt}")

        ds = sorted({d for d in DOWNSCALE_CHOICES if any(
            lookup(d, f) is not None for f in FPS_CHOICES)})
        if not ds:
            raise ProfileMiss(f"no entries to interpolate for route={route} filter={flt}")

        def interp_f(d):
            pts = [(f, lookup(d, f)) for f in FPS_CHOICES if lookup(d, f) is not None]
            if not pts:
                raise ProfileMiss(f"no fps entries for route={route} d={d} filter={flt}")
            fs, vals = zip(*pts)
            return float(np.interp(s.fps, fs, vals))

        vals = [interp_f(d) for d in ds]
        return float(np.interp(s.downscale, ds, vals))

    def accuracy(self, config: Configuration) -> float:
        return float(np.mean([self.stratum_accuracy(config.route, s)
                              for s in config.per_stratum]))


def evaluate_config(config: Configuration, layout: StratumLayout,
                    profile: AccuracyProfile, power_model: PowerModel,
                    bits_per_pixel: float = 8.0,
                    codec_ratio: float = 0.2) -> MetricTriple:
    b = estimate_bitrate(layout, config, bits_per_pixel, codec_ratio)
    p = estimate_power(config, b, power_model)
    a = profile.accuracy(config)
    return MetricTriple(b, p, a)


def _nondominated(metrics: np.ndarray, rule: str) -> np.ndarray:
    """Boolean mask of non-dominated rows of an (n, 3) [B, P, A] array."""
    b, p, a = metrics[:, 0], metrics[:, 1], metrics[:, 2]
    n = len(metrics)
    keep = np.ones(n, dtype=bool)
    chunk = 256
    for start in range(0, n, chunk):
        sl = slice(start, min(start + chunk, n))
        if rule == RULE_STRICT_ALL:
            dominated = ((b[None, :] < b[sl, None])
                         & (p[None, :] < p[sl, None])
                         & (a[None, :] > a[sl, None])).any(axis=1)
        elif rule == RULE_STANDARD:
            no_worse = ((b[None, :] <= b[sl, None])
                        & (p[None, :] <= p[sl, None])
                        & (a[None, :] >= a[sl, None]))
            better = ((b[None, :] < b[sl, None])
                      | (p[None, :] < p[sl, None])
                      | (a[None, :] > a[sl, None]))
            dominated = (no_worse & better).any(axis=1)
        else:
            raise ValueError(f"unknown dominance rule {rule!r}")
        keep[sl] = ~dominated
    return keep


@dataclass
class ParetoSet:
    members: list[tuple[Configuration, MetricTriple]]
    rule: str

    def __len__(self) -> int:
        return len(self.members)

    def as_dict(self) -> dict:
        return {
            "rule": self.rule,
            "members": [{"config": c.as_dict(), "metrics": m.as_dict()}
                        for c, m in self.members],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ParetoSet":
        return cls(
            members=[(Configuration.from_dict(m["config"]),
                      MetricTriple(m["metrics"]["bandwidth_bps"],
                                   m["metrics"]["power_w"],
                                   m["metrics"]["accuracy"]))
                     for m in d["members"]],
            rule=d.get("rule", RULE_STRICT_ALL),
        )


def _sorted_members(members):
    return sorted(members, key=lambda cm: (cm[1].bandwidth, cm[1].power,
                                           -cm[1].accuracy, cm[0].key))


def pareto_front(evaluated: list[tuple[Configuration, MetricTriple]],
                 rule: str = RULE_STRICT_ALL) -> ParetoSet:
    if not evaluated:
        raise ValueError("cannot take the Pareto front of an empty evaluation list")
    metrics = np.array([[m.bandwidth, m.power, m.accuracy] for _, m in evaluated])
    # dedupe identical triples so the pairwise pass only sees unique points
    uniq, inverse = np.unique(metrics, axis=0, return_inverse=True)
    keep_uniq = _nondominated(uniq, rule)
    keep = keep_uniq[inverse]
    members = [cm for cm, k in zip(evaluated, keep) if k]
    return ParetoSet(_sorted_members(members), rule)


def enumerate_configs(n_strata: int,
                      downscales=DOWNSCALE_CHOICES,
                      fps_choices=FPS_CHOICES,
                      filter_choices=(False, True),
                      routes=("edge", "cloud"),
                      cap: int = DEFAULT_SPACE_CAP):
    per_stratum = len(downscales) * len(fps_choices) * len(filter_choices)
    size = (per_stratum ** n_strata) * len(routes)
    if size > cap:
        raise SearchSpaceTooLarge(
            f"configuration space has {size} members, above the cap of {cap}"
        )
    stratum_opts = [StratumConfig(d, f, flt)
                    for d in downscales for f in fps_choices for flt in filter_choices]
    for route in routes:
        for combo in itertools.product(stratum_opts, repeat=n_strata):
            yield Configuration(combo, route=route)


def exhaustive_search(layout: StratumLayout, profile: AccuracyProfile,
                      power_model: PowerModel,
                      rule: str = RULE_STRICT_ALL,
                      downscales=DOWNSCALE_CHOICES,
                      fps_choices=FPS_CHOICES,
                      filter_choices=(False, True),
                      routes=("edge", "cloud"),
                      bits_per_pixel: float = 8.0,
                      codec_ratio: float = 0.2,
                      cap: int = DEFAULT_SPACE_CAP
                      ) -> tuple[ParetoSet, list[tuple[Configuration, MetricTriple]]]:
    """Evaluate every configuration and return (front, all evaluations)."""
    evaluated = [
        (c, evaluate_config(c, layout, profile, power_model,
                            bits_per_pixel, codec_ratio))
        for c in enumerate_configs(len(layout), downscales, fps_choices,
                                   filter_choices, routes, cap)
    ]
    return pareto_front(evaluated, rule), _sorted_members(evaluated)
