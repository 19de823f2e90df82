"""Continuous-operation planner: each epoch, pick the highest-accuracy
Pareto configuration that fits the measured bandwidth and a
forecast-aware energy budget, holding back an overnight reserve.

The budget is the largest constant discretionary power that keeps the
simulated battery trajectory above the reserve floor over the planning
horizon; it is found by bisection so arbitrary forecast series work.
The horizon is stretched through the next night window (treated as
zero-PV) so daytime planning already accounts for the night ahead.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .energy import (
    CAMERA_W,
    SONAR_W,
    DishPowerModel,
    EnergyState,
    EnvTrace,
    LinkModel,
    PvModel,
    battery_step,
    dish_power_at,
    pv_forecast,
    throughput_at,
)
from .pareto import MetricTriple, ParetoSet
from .strata import Configuration

BUDGET_TOLERANCE_W = 0.1
_BUDGET_MAX_W = 5000.0
FORECAST_WINDOW_S = 4 * 3600.0

MODE_RESERVE = "reserve"
MODE_ALWAYS_MAX = "always-max"


@dataclass
class PolicyParams:
    epoch_s: float = 300.0
    reserve_wh: float = 300.0
    battery_capacity_wh: float = 1200.0
    initial_soc: float = 0.9
    night_start_h: float = 18.0
    night_end_h: float = 6.0
    mode: str = MODE_RESERVE
    forecast_method: str = "persistence"
    sonar_w: float = SONAR_W
    camera_w: float = CAMERA_W
    dish_rain_uplift_w: float = 30.0
    budget_margin_wh: float = 100.0  # slack above the reserve floor during budgeting

    def __post_init__(self):
        if self.epoch_s <= 0:
            raise ValueError(f"epoch_s must be positive, got {self.epoch_s}")
        if self.mode not in (MODE_RESERVE, MODE_ALWAYS_MAX):
            raise ValueError(f"unknown policy mode {self.mode!r}")

    @property
    def fixed_load_w(self) -> float:
        return self.sonar_w + self.camera_w

    def in_night(self, t: float) -> bool:
        hour = (t / 3600.0) % 24.0
        if self.night_start_h <= self.night_end_h:
            return self.night_start_h <= hour < self.night_end_h
        return hour >= self.night_start_h or hour < self.night_end_h

    def seconds_to_dawn(self, t: float) -> float:
        """Seconds until the next end-of-night boundary at or after t."""
        hour = (t / 3600.0) % 24.0
        delta = (self.night_end_h - hour) % 24.0
        if delta == 0.0:
            delta = 24.0
        return delta * 3600.0

    @classmethod
    def load(cls, path) -> "PolicyParams":
        with open(path) as fh:
            d = json.load(fh)
        return cls(**{k: d[k] for k in vars(cls()) if k in d})

    def as_dict(self) -> dict:
        return dict(vars(self))


@dataclass
class ScheduleDecision:
    epoch_start: float
    chosen: Configuration
    metrics: MetricTriple
    predicted_margin_wh: float
    feasible_count: int
    fallback_used: bool
    bandwidth_mbps: float
    budget_w: float
    low_energy: bool = False

    def as_dict(self) -> dict:
        return {
            "epoch_start": self.epoch_start,
            "config": self.chosen.as_dict(),
            "metrics": self.metrics.as_dict(),
            "predicted_margin_wh": self.predicted_margin_wh,
            "feasible_count": self.feasible_count,
            "fallback_used": self.fallback_used,
            "bandwidth_mbps": self.bandwidth_mbps,
            "budget_w": self.budget_w,
            "low_energy": self.low_energy,
        }


def _trajectory_min_wh(state: EnergyState, forecast_w: np.ndarray,
                       load_w: float) -> float:
    e = state.stored_wh
    lowest = e
    for pv in forecast_w:
        e = min(e + (pv - load_w) / 60.0, state.battery_capacity_wh)
        e = max(e, 0.0)
        if e < lowest:
            lowest = e
    return lowest


def energy_budget(state: EnergyState, forecast_w: np.ndarray,
                  load_fixed_w: float, reserve_wh: float,
                  tolerance_w: float = BUDGET_TOLERANCE_W
                  ) -> tuple[float, bool]:
    """Max sustainable discretionary power over the forecast horizon.

    Returns (budget_w, low_energy); low_energy is set when even zero
    discretionary power violates the reserve floor.
    """
    forecast_w = np.asarray(forecast_w, dtype=np.float64)

    def feasible(p: float) -> bool:
        return _trajectory_min_wh(state, forecast_w, load_fixed_w + p) >= reserve_wh

    if not feasible(0.0):
        return 0.0, True
    lo, hi = 0.0, _BUDGET_MAX_W
    if feasible(hi):
        return hi, False
    while hi - lo > tolerance_w:
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            lo = mid
        else:
            hi = mid
    return lo, False


def fallback_member(front: ParetoSet) -> tuple[Configuration, MetricTriple]:
    """Minimal edge-only member: lowest power, then lowest bandwidth."""
    edge = [(c, m) for c, m in front.members if c.route == "edge"]
    pool = edge if edge else front.members
    return min(pool, key=lambda cm: (cm[1].power, cm[1].bandwidth, -cm[1].accuracy))


def plan_epoch(front: ParetoSet, bandwidth_mbps: float, budget_w: float,
               policy: PolicyParams, epoch_start: float = 0.0,
               predicted_margin_wh: float = 0.0,
               low_energy: bool = False) -> ScheduleDecision:
    if not front.members:
        raise ValueError("cannot plan over an empty Pareto front")
    bandwidth_bps = bandwidth_mbps * 1e6
    feasible = [(c, m) for c, m in front.members
                if m.bandwidth <= bandwidth_bps and m.power <= budget_w]
    if feasible:
        chosen = max(feasible,
                     key=lambda cm: (cm[1].accuracy, -cm[1].power, -cm[1].bandwidth))
        fallback_used = False
    else:
        chosen = fallback_member(front)
        fallback_used = True
    return ScheduleDecision(
        epoch_start=epoch_start,
        chosen=chosen[0],
        metrics=chosen[1],
        predicted_margin_wh=predicted_margin_wh,
        feasible_count=len(feasible),
        fallback_used=fallback_used,
        bandwidth_mbps=bandwidth_mbps,
        budget_w=budget_w,
        low_energy=low_energy,
    )


@dataclass
class SimulationReport:
    decisions: list[ScheduleDecision]
    series: list[dict]
    depletion_events: int
    total_bytes_sent: float
    mean_accuracy: float
    min_soc: float
    policy: PolicyParams

    def as_dict(self) -> dict:
        return {
            "policy": self.policy.as_dict(),
            "depletion_events": self.depletion_events,
            "total_bytes_sent": self.total_bytes_sent,
            "time_weighted_mean_accuracy": self.mean_accuracy,
            "min_soc": self.min_soc,
            "decisions": [d.as_dict() for d in self.decisions],
        }


SERIES_COLUMNS = ["t_s", "soc", "pv_w", "load_w", "mbps",
                  "chosen_A", "chosen_B", "chosen_P", "fallback", "depleted"]


def _budget_forecast(pv: PvModel, trace: EnvTrace, t: float, horizon_s: float,
                     policy: PolicyParams) -> np.ndarray:
    """Minute-resolution PV series for budgeting; night hours are zeroed
    and the 4 h forecast window is extended by persistence."""
    window = min(horizon_s, FORECAST_WINDOW_S,
                 max(60.0, trace.t[-1] - t))
    cloud = trace.weather_at(t).cloud_class
    base = pv_forecast(pv, t, window, policy.forecast_method, cloud)
    steps = max(1, int(horizon_s // 60))
    if len(base) == 0:
        base = np.array([pv.at(t, cloud)])
    series = np.empty(steps)
    series[:len(base)] = base[:steps]
    series[len(base):] = base[-1]
    times = t + 60.0 * np.arange(steps)
    night = np.array([policy.in_night(ti) for ti in times])
    series[night] = 0.0
    return series


def simulate_day(trace: EnvTrace, front: ParetoSet, policy: PolicyParams,
                 link: LinkModel, dish: DishPowerModel | None = None,
                 rng: np.random.Generator | None = None,
                 step_s: float = 60.0) -> SimulationReport:
    """Step the site at fixed resolution, re-planning each epoch."""
    dish = dish or DishPowerModel()
    pv = trace.pv_model()
    state = EnergyState(policy.battery_capacity_wh, policy.initial_soc,
                        policy.reserve_wh)
    decisions: list[ScheduleDecision] = []
    series: list[dict] = []
    depletions = 0
    was_depleted = False
    bytes_sent = 0.0
    acc_time = 0.0
    min_soc = state.soc
    decision: ScheduleDecision | None = None

    times = np.arange(trace.t[0], trace.t[-1] + 1e-9, step_s)
    for t in times:
        weather = trace.weather_at(t)
        if decision is None or (t - trace.t[0]) % policy.epoch_s == 0:
            if trace.measured_mbps is not None and not math.isnan(
                    trace.measured_mbps[trace.index_at(t)]):
                mbps = float(trace.measured_mbps[trace.index_at(t)])
            else:
                mbps = throughput_at(link, weather)
            if policy.mode == MODE_ALWAYS_MAX:
                chosen = max(front.members,
                             key=lambda cm: (cm[1].accuracy, -cm[1].power))
                decision = ScheduleDecision(
                    epoch_start=float(t), chosen=chosen[0], metrics=chosen[1],
                    predicted_margin_wh=0.0, feasible_count=len(front.members),
                    fallback_used=False, bandwidth_mbps=mbps,
                    budget_w=float("inf"))
            else:
                # stretch past dawn so early-morning PV-starved hours are
                # already covered by the overnight plan
                horizon = policy.seconds_to_dawn(t) + FORECAST_WINDOW_S
                forecast = _budget_forecast(pv, trace, float(t), horizon, policy)
                fixed = policy.fixed_load_w + (
                    policy.dish_rain_uplift_w if weather.precipitation > 0 else 0.0)
                floor = policy.reserve_wh + policy.budget_margin_wh
                budget, low = energy_budget(state, forecast, fixed, floor)
                margin = _trajectory_min_wh(state, forecast,
                                            fixed) - policy.reserve_wh
                decision = plan_epoch(front, mbps, budget, policy,
                                      epoch_start=float(t),
                                      predicted_margin_wh=margin,
                                      low_energy=low)
            decisions.append(decision)

        load = policy.fixed_load_w + decision.metrics.power
        if decision.chosen.route == "cloud" and weather.precipitation > 0:
            load += policy.dish_rain_uplift_w
        pv_now = pv.at(float(t), weather.cloud_class)
        state, depleted = battery_step(state, pv_now, load, step_s)
        if depleted and not was_depleted:
            depletions += 1
        was_depleted = depleted
        min_soc = min(min_soc, state.soc)
        bytes_sent += decision.metrics.bandwidth / 8.0 * step_s
        acc_time += decision.metrics.accuracy * step_s
        series.append({
            "t_s": float(t),
            "soc": state.soc,
            "pv_w": pv_now,
            "load_w": load,
            "mbps": decision.bandwidth_mbps,
            "chosen_A": decision.metrics.accuracy,
            "chosen_B": decision.metrics.bandwidth,
            "chosen_P": decision.metrics.power,
            "fallback": int(decision.fallback_used),
            "depleted": int(depleted),
        })

    span = step_s * len(times)
    return SimulationReport(
        decisions=decisions,
        series=series,
        depletion_events=depletions,
        total_bytes_sent=bytes_sent,
        mean_accuracy=acc_time / span if span else 0.0,
        min_soc=min_soc,
        policy=policy,
    )
