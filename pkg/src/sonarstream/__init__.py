"""Sonar-frame preprocessing and weather-aware streaming planner."""

from .channels import ChannelTriple, MotionResult, SavingLedger, detect_motion, populate_channels
from .energy import EnergyState, EnvTrace, LinkModel, PvModel, battery_step, throughput_at
from .frames import ClipHeader, SonarFrame, read_clip, write_clip
from .guided import GuidedFilterParams, guided_filter
from .mog import ForegroundMask, MogField, MogPixelModel
from .pareto import AccuracyProfile, MetricTriple, ParetoSet, exhaustive_search, pareto_front
from .scheduler import PolicyParams, ScheduleDecision, energy_budget, plan_epoch, simulate_day
from .strata import Configuration, PowerModel, StratumConfig, StratumLayout, split_strata

__version__ = "0.1.0"

__all__ = [
    "AccuracyProfile", "ChannelTriple", "ClipHeader", "Configuration",
    "EnergyState", "EnvTrace", "ForegroundMask", "GuidedFilterParams",
    "LinkModel", "MetricTriple", "MogField", "MogPixelModel", "MotionResult",
    "ParetoSet", "PolicyParams", "PowerModel", "PvModel", "SavingLedger",
    "ScheduleDecision", "SonarFrame", "StratumConfig", "StratumLayout",
    "battery_step", "detect_motion", "energy_budget", "exhaustive_search",
    "guided_filter", "pareto_front", "plan_epoch", "populate_channels",
    "read_clip", "simulate_day", "split_strata", "throughput_at", "write_clip",
]
