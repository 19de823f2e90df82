"""Command-line surface.

Exit codes: 0 success, 1 domain error (bad data, infeasible request),
2 usage or missing-input error.  Every JSON output embeds the resolved
run configuration so results are self-describing.  ``SALINA_SEED`` is
the fallback seed for stochastic modes.
"""

from __future__ import annotations

import csv
import functools
import json
import sys
from pathlib import Path

import click
import numpy as np

from . import channels as ch
from . import guided as gf
from . import mog as mogmod
from .energy import DishPowerModel, EnvTrace, LinkModel
from .frames import ClipFormatError, read_clip, write_clip, SonarFrame
from .pareto import (
    RULE_STANDARD,
    RULE_STRICT_ALL,
    AccuracyProfile,
    ParetoSet,
    exhaustive_search,
)
from .scheduler import PolicyParams, plan_epoch, simulate_day, SERIES_COLUMNS
from .strata import PowerModel, StratumLayout, split_strata


def domain_errors(fn):
    """Map domain failures to exit 1, keeping click usage errors at 2."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (ClipFormatError, ValueError, KeyError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(1)
        except OSError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(2)

    return wrapper


@click.group()
@click.option("--seed", type=int, envvar="SALINA_SEED", default=None,
              help="Seed for stochastic modes (SALINA_SEED also honored).")
@click.pass_context
def main(ctx, seed):
    """Sonar preprocessing pipeline and weather-aware streaming planner."""
    ctx.ensure_object(dict)
    ctx.obj["seed"] = seed


def _pipeline_options(fn):
    opts = [
        click.option("--fps", type=float, default=10.0, show_default=True,
                     help="Frame rate assumed for PGM directories."),
        click.option("--mog-k", type=int, default=mogmod.DEFAULT_K, show_default=True),
        click.option("--mog-alpha", type=float, default=mogmod.DEFAULT_ALPHA,
                     show_default=True),
        click.option("--mog-sigma", type=float, default=mogmod.DEFAULT_MATCH_SIGMA,
                     show_default=True),
        click.option("--mog-bgratio", type=float,
                     default=mogmod.DEFAULT_BACKGROUND_RATIO, show_default=True),
        click.option("--gf-radius", type=int, default=4, show_default=True),
        click.option("--gf-epsilon", type=float, default=0.01, show_default=True),
        click.option("--canny-low", type=float, default=ch.DEFAULT_CANNY_LOW,
                     show_default=True),
        click.option("--canny-high", type=float, default=ch.DEFAULT_CANNY_HIGH,
                     show_default=True),
        click.option("--density-threshold", type=float,
                     default=ch.DEFAULT_DENSITY_THRESHOLD, show_default=True),
    ]
    for opt in reversed(opts):
        fn = opt(fn)
    return fn


def _run_pipeline(frames, params):
    if not frames:
        raise ValueError("clip contains no frames")
    h, w = frames[0].pixels.shape
    field = mogmod.MogField(w, h, k=params["mog_k"], alpha=params["mog_alpha"],
                            match_sigma=params["mog_sigma"],
                            background_ratio=params["mog_bgratio"])
    gparams = gf.GuidedFilterParams(params["gf_radius"], params["gf_epsilon"])
    ledger = ch.SavingLedger()
    out = []
    for frame in frames:
        mask = field.apply(frame)
        triple = ch.populate_channels(frame, mask, gparams)
        motion = ch.detect_motion(triple, params["canny_low"], params["canny_high"],
                                  params["density_threshold"])
        ch.update_ledger(ledger, motion)
        out.append((frame, mask, triple, motion))
    return ledger, out


@main.command()
@click.argument("clip", type=click.Path(exists=True))
@click.option("-o", "--out-dir", type=click.Path(), required=True)
@_pipeline_options
@domain_errors
def preprocess(clip, out_dir, **params):
    """Run MOG + channel population + motion gate over a clip and write
    the three-plane clips, the mask clips, and the motion ledger."""
    frames = read_clip(clip, fps=params["fps"])
    ledger, results = _run_pipeline(frames, params)

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name, plane_of in (("ch1", lambda r: r[2].ch1),
                           ("ch2", lambda r: r[2].ch2),
                           ("ch3", lambda r: r[2].ch3)):
        planes = [SonarFrame(gf.to_u8(plane_of(r)), r[0].timestamp, r[0].index)
                  for r in results]
        write_clip(planes, out / f"{name}.sfr", fps=params["fps"])
    masks = [SonarFrame(r[1].bits.astype(np.uint8) * 255, r[0].timestamp, r[0].index)
             for r in results]
    write_clip(masks, out / "mask.sfr", fps=params["fps"])
    with open(out / "mask.bits", "wb") as fh:
        h, w = results[0][1].bits.shape
        fh.write(np.array([w, h, len(results)], dtype="<u4").tobytes())
        for r in results:
            fh.write(r[1].packed_rows())
    payload = {"run_config": {"subcommand": "preprocess", "input": str(clip),
                              **params},
               **ledger.as_dict()}
    (out / "ledger.json").write_text(json.dumps(payload, indent=2, sort_keys=True))
    click.echo(json.dumps(ledger.as_dict(), sort_keys=True))


@main.command()
@click.argument("clip", type=click.Path(exists=True))
@_pipeline_options
@domain_errors
def motion(clip, **params):
    """Print the per-clip motion ledger as JSON."""
    frames = read_clip(clip, fps=params["fps"])
    ledger, _ = _run_pipeline(frames, params)
    click.echo(json.dumps(ledger.as_dict(), sort_keys=True))


@main.command()
@click.option("--width", type=int, default=None, help="Frame width in pixels.")
@click.option("--height", type=int, default=None, help="Frame height in pixels.")
@click.option("--layout", "layout_path", type=click.Path(exists=True), default=None,
              help="Layout JSON instead of --width/--height.")
@click.option("--profile", "profile_path", type=click.Path(exists=True),
              required=True, help="Accuracy profile CSV (key,A rows).")
@click.option("--power-model", "power_path", type=click.Path(exists=True),
              default=None)
@click.option("--bpp", type=float, default=8.0, show_default=True)
@click.option("--codec-ratio", type=float, default=0.2, show_default=True)
@click.option("--rule", type=click.Choice([RULE_STRICT_ALL, RULE_STANDARD]),
              default=RULE_STRICT_ALL, show_default=True)
@click.option("--interpolate/--no-interpolate", default=False)
@click.option("-o", "--out-dir", type=click.Path(), required=True)
@domain_errors
def profile(width, height, layout_path, profile_path, power_path, bpp,
            codec_ratio, rule, interpolate, out_dir):
    """Exhaustively evaluate the configuration space and emit the Pareto
    front (JSON) plus every evaluated point (CSV)."""
    if layout_path:
        layout = StratumLayout.from_dict(json.loads(Path(layout_path).read_text()))
    elif width and height:
        layout = split_strata(width, height)
    else:
        raise click.UsageError("provide --layout or both --width and --height")
    acc = AccuracyProfile.load(profile_path, interpolate=interpolate)
    pm = PowerModel.load(power_path) if power_path else PowerModel()
    front, evaluated = exhaustive_search(layout, acc, pm, rule=rule,
                                         bits_per_pixel=bpp,
                                         codec_ratio=codec_ratio)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    payload = {
        "run_config": {"subcommand": "profile", "layout": layout.as_dict(),
                       "profile": str(profile_path),
                       "power_model": pm.as_dict(), "bpp": bpp,
                       "codec_ratio": codec_ratio, "rule": rule,
                       "interpolate": interpolate},
        **front.as_dict(),
    }
    (out / "front.json").write_text(json.dumps(payload, indent=2, sort_keys=True))
    with open(out / "evaluations.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["config_key", "B_bps", "P_w", "A"])
        for c, m in evaluated:
            writer.writerow([c.key, f"{m.bandwidth:.6f}", f"{m.power:.6f}",
                             f"{m.accuracy:.6f}"])
    click.echo(f"front: {len(front)} of {len(evaluated)} configurations")


def _load_front(path) -> ParetoSet:
    return ParetoSet.from_dict(json.loads(Path(path).read_text()))


@main.command()
@click.option("--front", "front_path", type=click.Path(exists=True), required=True)
@click.option("--bandwidth-mbps", type=float, required=True)
@click.option("--budget-w", type=float, required=True)
@click.option("--policy", "policy_path", type=click.Path(exists=True), default=None)
@domain_errors
def plan(front_path, bandwidth_mbps, budget_w, policy_path):
    """One-shot scheduling decision from a stored front."""
    front = _load_front(front_path)
    policy = PolicyParams.load(policy_path) if policy_path else PolicyParams()
    decision = plan_epoch(front, bandwidth_mbps, budget_w, policy)
    payload = {"run_config": {"subcommand": "plan", "front": str(front_path),
                              "bandwidth_mbps": bandwidth_mbps,
                              "budget_w": budget_w},
               **decision.as_dict()}
    click.echo(json.dumps(payload, indent=2, sort_keys=True))


@main.command()
@click.option("--trace", "trace_path", type=click.Path(exists=True), required=True)
@click.option("--front", "front_path", type=click.Path(exists=True), required=True)
@click.option("--policy", "policy_path", type=click.Path(exists=True), default=None)
@click.option("--power-model", "power_path", type=click.Path(exists=True),
              default=None, help="JSON holding link/dish model constants.")
@click.option("-o", "--out-dir", type=click.Path(), required=True)
@click.pass_context
@domain_errors
def simulate(ctx, trace_path, front_path, policy_path, power_path, out_dir):
    """Simulate a traced day at 60 s resolution; write report JSON and
    the per-step series CSV."""
    trace = EnvTrace.load(trace_path)
    front = _load_front(front_path)
    policy = PolicyParams.load(policy_path) if policy_path else PolicyParams()
    link, dish = LinkModel(), DishPowerModel()
    if power_path:
        d = json.loads(Path(power_path).read_text())
        link = LinkModel.from_dict(d.get("link", d))
        dish = DishPowerModel.from_dict(d.get("dish", {}))
    rng = None
    if dish.stochastic:
        seed = ctx.obj.get("seed")
        if seed is None:
            raise ValueError("stochastic dish model requires --seed or SALINA_SEED")
        rng = np.random.default_rng(seed)
    report = simulate_day(trace, front, policy, link, dish, rng)

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    payload = {"run_config": {"subcommand": "simulate", "trace": str(trace_path),
                              "front": str(front_path),
                              "policy": policy.as_dict(),
                              "seed": ctx.obj.get("seed")},
               **report.as_dict()}
    (out / "report.json").write_text(json.dumps(payload, indent=2, sort_keys=True))
    with open(out / "series.csv", "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=SERIES_COLUMNS)
        writer.writeheader()
        for row in report.series:
            writer.writerow({k: (f"{v:.6f}" if isinstance(v, float) else v)
                             for k, v in row.items()})
    click.echo(f"depletion events: {report.depletion_events}, "
               f"min soc: {report.min_soc:.3f}")


@main.command()
@click.option("--profile-dir", type=click.Path(exists=True), default=None,
              help="Output directory of a `profile` run.")
@click.option("--simulate-dir", type=click.Path(exists=True), default=None,
              help="Output directory of a `simulate` run.")
@click.option("-o", "--out-dir", type=click.Path(), required=True)
@domain_errors
def report(profile_dir, simulate_dir, out_dir):
    """Render figures for stored profile/simulation outputs."""
    from .report import render_profile_figures, render_simulation_figures

    if not profile_dir and not simulate_dir:
        raise click.UsageError("provide --profile-dir and/or --simulate-dir")
    written = []
    out = Path(out_dir)
    if profile_dir:
        front = json.loads((Path(profile_dir) / "front.json").read_text())
        written += render_profile_figures(Path(profile_dir) / "evaluations.csv",
                                          front, out)
    if simulate_dir:
        written += render_simulation_figures(Path(simulate_dir) / "series.csv", out)
    for path in written:
        click.echo(str(path))


if __name__ == "__main__":
    main()
