#!/usr/bin/env python3
"""Regenerate the bundled fixture data under src/sonarstream/data/."""

import csv
import json
from pathlib import Path

from sonarstream.scheduler import PolicyParams
from sonarstream.strata import PowerModel
from sonarstream.synth import (
    make_accuracy_table,
    make_clear_day_trace,
    make_light_rain_day_trace,
    make_storm_day_trace,
)

DATA = Path(__file__).resolve().parents[1] / "src" / "sonarstream" / "data"


def main():
    DATA.mkdir(parents=True, exist_ok=True)

    with open(DATA / "accuracy_profile.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["key", "A"])
        for key, a in sorted(make_accuracy_table().items()):
            writer.writerow([key, a])

    model = {
        "power": PowerModel().as_dict(),
        "link": {"baseline_mbps": 100.0, "precip_multiplier": 0.85,
                 "heavy_rain_threshold": 4.0, "heavy_rain_multiplier": 0.6,
                 "cloud_multiplier": 0.90},
        "dish": {"mean_clear_w": 51.3, "max_w": 166.5, "rain_uplift_w": 30.0,
                 "stochastic": False},
    }
    (DATA / "power_model.json").write_text(json.dumps(model, indent=2) + "\n")

    base = dict(epoch_s=300.0, reserve_wh=300.0, battery_capacity_wh=1800.0,
                initial_soc=0.85, night_start_h=18.0, night_end_h=6.0,
                forecast_method="persistence", sonar_w=100.0, camera_w=15.0,
                dish_rain_uplift_w=30.0, budget_margin_wh=100.0)
    (DATA / "policy_reserve.json").write_text(
        json.dumps({**base, "mode": "reserve"}, indent=2) + "\n")
    (DATA / "policy_naive.json").write_text(
        json.dumps({**base, "mode": "always-max"}, indent=2) + "\n")
    # sanity: fixture policies must round-trip through PolicyParams
    PolicyParams(**{**base, "mode": "reserve"})

    make_clear_day_trace().save(DATA / "clear_day.csv")
    make_storm_day_trace().save(DATA / "storm_day.csv")
    make_light_rain_day_trace().save(DATA / "light_rain_day.csv")
    print(f"wrote fixtures to {DATA}")


if __name__ == "__main__":
    main()
