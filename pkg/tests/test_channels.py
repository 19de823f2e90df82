import numpy as np
import pytest

from sonarstream.channels import (
    SavingLedger,
    detect_motion,
    populate_channels,
    update_ledger,
)
from sonarstream.frames import SonarFrame
from sonarstream.guided import GuidedFilterParams, guided_filter, to_plane
from sonarstream.mog import ForegroundMask, MogField
from sonarstream.synth import make_blob_clip


def run_gate(clip, **kwargs):
    """Full pipeline over a synthetic clip; returns per-frame motion flags."""
    h, w = clip.frames[0].pixels.shape
    field = MogField(w, h)
    flags = []
    for frame in clip.frames:
        mask = field.apply(frame)
        triple = populate_channels(frame, mask)
        flags.append(detect_motion(triple, **kwargs).is_motion)
    return flags


class TestPopulate:
    def test_compositional_oracle_bit_exact(self):
        rng = np.random.default_rng(0)
        pix = rng.integers(0, 256, (20, 20), dtype=np.uint8)
        bits = rng.random((20, 20)) < 0.3
        gf = GuidedFilterParams(3, 0.02)
        triple = populate_channels(SonarFrame(pix), ForegroundMask(bits), gf)
        orig = to_plane(pix)
        fg = bits.astype(np.float64)
        assert np.array_equal(triple.ch1, orig)
        assert np.array_equal(triple.ch2, guided_filter(orig, fg, gf))
        assert np.array_equal(triple.ch3, guided_filter(fg, orig, gf))

    def test_empty_mask_zeroes_ch3(self):
        for seed in range(100):
            rng = np.random.default_rng(seed)
            pix = rng.integers(0, 256, (16, 16), dtype=np.uint8)
            triple = populate_channels(SonarFrame(pix),
                                       ForegroundMask(np.zeros((16, 16), bool)))
            assert np.abs(triple.ch3).max() <= 1e-12

    def test_constant_inputs_give_constant_channels(self):
        pix = np.full((16, 16), 80, np.uint8)
        bits = np.ones((16, 16), bool)
        triple = populate_channels(SonarFrame(pix), ForegroundMask(bits))
        for plane in (triple.ch1, triple.ch2, triple.ch3):
            assert np.ptp(plane) <= 1e-12

    def test_dim_mismatch(self):
        with pytest.raises(ValueError):
            populate_channels(SonarFrame(np.zeros((16, 16), np.uint8)),
                              ForegroundMask(np.zeros((16, 17), bool)))


class TestMotionGate:
    def test_all_zero_channels_no_motion(self):
        pix = np.zeros((32, 32), np.uint8)
        triple = populate_channels(SonarFrame(pix),
                                   ForegroundMask(np.zeros((32, 32), bool)))
        result = detect_motion(triple)
        assert not result.is_motion
        assert result.edge_density == 0.0

    def test_moving_blob_recall_and_saving_ratio(self):
        clip = make_blob_clip(seed=0)
        flags = run_gate(clip)
        hits = sum(1 for i in clip.motion_frames if flags[i])
        assert hits == len(clip.motion_frames)  # recall 1.0
        ledger = SavingLedger(len(flags), sum(flags))
        assert abs(ledger.saving_ratio - clip.idle_fraction) <= 0.02

    def test_known_idle_fraction(self):
        clip = make_blob_clip(seed=3, warmup=20, active=80, motion_fraction=0.1)
        flags = run_gate(clip)
        ledger = SavingLedger(len(flags), sum(flags))
        assert ledger.saving_ratio == pytest.approx(
            1.0 - len(clip.motion_frames) / len(clip.frames), abs=0.02)

    def test_density_threshold_monotonicity(self):
        clip = make_blob_clip(seed=5)
        counts = []
        for thr in (0.001, 0.003, 0.01, 0.05):
            flags = run_gate(clip, density_threshold=thr)
            counts.append(sum(flags))
        assert counts == sorted(counts, reverse=True)

    def test_edge_density_matches_mask(self):
        clip = make_blob_clip(seed=9)
        h, w = clip.frames[0].pixels.shape
        field = MogField(w, h)
        for frame in clip.frames:
            mask = field.apply(frame)
            triple = populate_channels(frame, mask)
            res = detect_motion(triple)
            assert res.edge_density == np.count_nonzero(res.edge_mask) / (h * w)


class TestLedger:
    def test_empty_plus_idle_frame(self):
        class Idle:
            is_motion = False
        ledger = update_ledger(SavingLedger(), Idle())
        assert ledger.saving_ratio == 1.0

    def test_three_motion_of_ten(self):
        ledger = SavingLedger()
        for i in range(10):
            class R:
                is_motion = i < 3
            update_ledger(ledger, R())
        assert ledger.saving_ratio == pytest.approx(0.7)

    def test_recount_oracle(self):
        rng = np.random.default_rng(1)
        flags = rng.random(10_000) < 0.37
        ledger = SavingLedger()
        for flag in flags:
            class R:
                is_motion = bool(flag)
            update_ledger(ledger, R())
        assert ledger.frames_total == 10_000
        assert ledger.frames_motion == int(flags.sum())
        assert ledger.saving_ratio == pytest.approx(1 - flags.sum() / 10_000)
