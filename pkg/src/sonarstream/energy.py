"""Off-grid environment models: weather traces, precipitation-coupled
satellite throughput, dish power, PV production, and battery state.

Traces are CSV time series (``t_s,precip_mm_h,cloud_class,pv_w`` with an
optional ``measured_mbps`` column).  All models default to deterministic
behavior; the stochastic dish mode needs an explicit seed.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

CLOUD_CLEAR, CLOUD_LIGHT, CLOUD_THICK, CLOUD_FULL = 0, 1, 2, 3
CLOUD_ATTENUATION = {CLOUD_CLEAR: 1.0, CLOUD_LIGHT: 0.7,
                     CLOUD_THICK: 0.4, CLOUD_FULL: 0.15}

SONAR_W = 100.0
CAMERA_W = 15.0
DISH_MEAN_CLEAR_W = 51.3
DISH_MAX_W = 166.5
DISH_RAIN_UPLIFT_W = 30.0
PV_RATED_W = 900.0  # three 300 W modules
PV_EFFICIENCY = 0.186


@dataclass(frozen=True)
class WeatherSample:
    t: float
    precipitation: float  # mm/hour
    cloud_class: int

    def __post_init__(self):
        if self.precipitation < 0:
            raise ValueError(f"negative precipitation {self.precipitation}")
        if self.cloud_class not in CLOUD_ATTENUATION:
            raise ValueError(f"unknown cloud class {self.cloud_class}")


@dataclass(frozen=True)
class LinkModel:
    baseline_mbps: float = 100.0
    precip_multiplier: float = 0.85
    heavy_rain_threshold: float = 4.0  # mm/h
    heavy_rain_multiplier: float = 0.6
    cloud_multiplier: float = 0.90

    @classmethod
    def from_dict(cls, d: dict) -> "LinkModel":
        return cls(**{k: d[k] for k in vars(cls()) if k in d})


def throughput_at(link: LinkModel, w: WeatherSample) -> float:
    """Throughput in Mbps under the sampled weather."""
    if w.precipitation > link.heavy_rain_threshold:
        return link.baseline_mbps * link.heavy_rain_multiplier
    if w.precipitation > 0:
        return link.baseline_mbps * link.precip_multiplier
    if w.cloud_class >= CLOUD_LIGHT:
        return link.baseline_mbps * link.cloud_multiplier
    return link.baseline_mbps


@dataclass(frozen=True)
class DishPowerModel:
    mean_clear_w: float = DISH_MEAN_CLEAR_W
    max_w: float = DISH_MAX_W
    rain_uplift_w: float = DISH_RAIN_UPLIFT_W
    stochastic: bool = False
    sigma_w: float = 15.0

    @classmethod
    def from_dict(cls, d: dict) -> "DishPowerModel":
        return cls(**{k: d[k] for k in vars(cls()) if k in d})


def dish_power_at(model: DishPowerModel, w: WeatherSample,
                  rng: np.random.Generator | None = None) -> float:
    mean = model.mean_clear_w + (model.rain_uplift_w if w.precipitation > 0 else 0.0)
    if not model.stochastic:
        return min(mean, model.max_w)
    if rng is None:
        raise ValueError("stochastic dish power needs an explicit seeded generator")
    draw = rng.normal(mean, model.sigma_w)
    return float(np.clip(draw, 0.0, model.max_w))


@dataclass
class PvModel:
    """PV output, either trace-driven or a clipped diurnal sinusoid."""

    rated_w: float = PV_RATED_W
    efficiency: float = PV_EFFICIENCY
    trace_t: np.ndarray | None = None   # seconds
    trace_w: np.ndarray | None = None   # Watts
    sunrise_h: float = 6.0
    sunset_h: float = 18.0

    def at(self, t: float, cloud_class: int = CLOUD_CLEAR) -> float:
        if self.trace_t is not None:
            if t < self.trace_t[0] or t > self.trace_t[-1]:
                raise ValueError(f"t={t} outside trace span "
                                 f"[{self.trace_t[0]}, {self.trace_t[-1]}]")
            return float(np.interp(t, self.trace_t, self.trace_w))
        return self.synthetic(t, cloud_class)

    def synthetic(self, t: float, cloud_class: int = CLOUD_CLEAR) -> float:
        hour = (t / 3600.0) % 24.0
        if not self.sunrise_h <= hour <= self.sunset_h:
            return 0.0
        phase = (hour - self.sunrise_h) / (self.sunset_h - self.sunrise_h)
        return self.rated_w * math.sin(math.pi * phase) * CLOUD_ATTENUATION[cloud_class]


def pv_forecast(pv: PvModel, t: float, horizon_s: float,
                method: str = "persistence",
                cloud_class: int = CLOUD_CLEAR) -> np.ndarray:
    """Forecast PV watts at 60 s resolution over the horizon."""
    if horizon_s > 4 * 3600:
        raise ValueError(f"forecast horizon {horizon_s}s exceeds the 4 h window")
    steps = int(horizon_s // 60)
    if method == "persistence":
        return np.full(steps, pv.at(t, cloud_class))
    if method == "trace-oracle":
        times = t + 60.0 * np.arange(steps)
        return np.array([pv.at(ti, cloud_class) for ti in times])
    raise ValueError(f"unknown forecast method {method!r}")


@dataclass
class EnergyState:
    battery_capacity_wh: float
    soc: float
    reserve_wh: float = 0.0

    def __post_init__(self):
        if self.battery_capacity_wh <= 0:
            raise ValueError(f"capacity must be > 0, got {self.battery_capacity_wh}")
        if not 0.0 <= self.soc <= 1.0:
            raise ValueError(f"soc must be in [0,1], got {self.soc}")
        if not 0.0 <= self.reserve_wh < self.battery_capacity_wh:
            raise ValueError(f"reserve {self.reserve_wh} Wh outside "
                             f"[0, {self.battery_capacity_wh}) Wh")

    @property
    def stored_wh(self) -> float:
        return self.soc * self.battery_capacity_wh


def battery_step(state: EnergyState, pv_w: float, load_w: float,
                 dt_s: float) -> tuple[EnergyState, bool]:
    if dt_s <= 0:
        raise ValueError(f"dt must be positive, got {dt_s}")
    delta_wh = (pv_w - load_w) * dt_s / 3600.0
    soc = min(max(state.soc + delta_wh / state.battery_capacity_wh, 0.0), 1.0)
    depleted = soc == 0.0 and load_w > pv_w
    return EnergyState(state.battery_capacity_wh, soc, state.reserve_wh), depleted


@dataclass
class EnvTrace:
    """Loaded environment time series at a regular cadence."""

    t: np.ndarray
    precip: np.ndarray
    cloud: np.ndarray
    pv_w: np.ndarray
    measured_mbps: np.ndarray | None = None

    def __post_init__(self):
        n = len(self.t)
        for name in ("precip", "cloud", "pv_w"):
            if len(getattr(self, name)) != n:
                raise ValueError(f"trace column {name} length mismatch")
        if np.any(np.diff(self.t) <= 0):
            raise ValueError("trace times must strictly increase")

    def __len__(self) -> int:
        return len(self.t)

    def index_at(self, t: float) -> int:
        if t < self.t[0] or t > self.t[-1]:
            raise ValueError(f"t={t} outside trace span [{self.t[0]}, {self.t[-1]}]")
        return int(np.searchsorted(self.t, t, side="right") - 1)

    def weather_at(self, t: float) -> WeatherSample:
        i = self.index_at(t)
        return WeatherSample(float(self.t[i]), float(self.precip[i]),
                             int(self.cloud[i]))

    def pv_model(self) -> PvModel:
        return PvModel(trace_t=self.t, trace_w=self.pv_w)

    @classmethod
    def load(cls, path) -> "EnvTrace":
        rows = []
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            required = {"t_s", "precip_mm_h", "cloud_class", "pv_w"}
            missing = required - set(reader.fieldnames or [])
            if missing:
                raise ValueError(f"{path}: missing trace columns {sorted(missing)}")
            has_mbps = "measured_mbps" in (reader.fieldnames or [])
            for row in reader:
                rows.append((float(row["t_s"]), float(row["precip_mm_h"]),
                             int(row["cloud_class"]), float(row["pv_w"]),
                             float(row["measured_mbps"]) if has_mbps
                             and row["measured_mbps"] != "" else math.nan))
        if not rows:
            raise ValueError(f"{path}: empty trace")
        arr = np.array(rows)
        mbps = arr[:, 4]
        return cls(arr[:, 0], arr[:, 1], arr[:, 2].astype(int), arr[:, 3],
                   None if np.isnan(mbps).all() else mbps)

    def save(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            cols = ["t_s", "precip_mm_h", "cloud_class", "pv_w"]
            if self.measured_mbps is not None:
                cols.append("measured_mbps")
            writer.writerow(cols)
            for i in range(len(self)):
                row = [f"{self.t[i]:.0f}", f"{self.precip[i]:g}",
                       int(self.cloud[i]), f"{self.pv_w[i]:.3f}"]
                if self.measured_mbps is not None:
                    row.append(f"{self.measured_mbps[i]:.3f}")
                writer.writerow(row)
