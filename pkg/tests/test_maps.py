import math

import numpy as np
import pytest

from gazeforge import (
    DegenerateMapError,
    EmptyFixationsError,
    FixationSet,
    InvalidArgumentsError,
    SaliencyMap,
    empirical_saliency,
    max_normalize,
    normalize_to_distribution,
    resample_map,
)
from gazeforge.maps import gaussian_kernel_1d

from conftest import random_map
from oracles import dense_convolve_oracle


class TestSaliencyMap:
    def test_rejects_negative_values(self):
        with pytest.raises(InvalidArgumentsError):
            SaliencyMap(np.array([[1.0, -0.5]]))

    def test_rejects_nan(self):
        with pytest.raises(InvalidArgumentsError):
            SaliencyMap(np.array([[np.nan, 0.0]]))

    def test_values_are_read_only(self):
        m = SaliencyMap(np.ones((2, 2)))
        with pytest.raises(ValueError):
            m.values[0, 0] = 5.0

    def test_dims(self):
        m = SaliencyMap(np.zeros((3, 5)))
        assert (m.width, m.height) == (5, 3)


class TestNormalize:
    def test_uniform_map(self):
        m = SaliencyMap(np.full((4, 4), 2.0))
        out = normalize_to_distribution(m)
        assert np.allclose(out.values, 1.0 / 16.0)

    def test_proportionality(self):
        out = normalize_to_distribution(SaliencyMap(np.array([[1.0, 3.0]])))
        assert np.allclose(out.values, [[0.25, 0.75]])

    def test_random_map_property(self, rng):
        for _ in range(20):
            m = random_map(rng)
            out = normalize_to_distribution(m)
            assert abs(out.total_mass - 1.0) < 1e-12
            assert out.argmax() == m.argmax()

    def test_zero_map_degenerate(self):
        with pytest.raises(DegenerateMapError):
            normalize_to_distribution(SaliencyMap(np.zeros((2, 2))))

    def test_max_normalize(self):
        out = max_normalize(SaliencyMap(np.array([[0.5, 2.0]])))
        assert np.allclose(out.values, [[0.25, 1.0]])


class TestResample:
    def test_identity_dims_bitwise_equal(self, rng):
        m = random_map(rng, 7, 5)
        out = resample_map(m, 7, 5)
        assert np.array_equal(out.values, m.values)

    def test_constant_preserved(self):
        m = SaliencyMap(np.full((3, 4), 0.7))
        for w, h in [(1, 1), (9, 2), (4, 13)]:
            out = resample_map(m, w, h)
            assert np.allclose(out.values, 0.7)

    def test_hand_evaluated_bilinear(self):
        # Columns [0, 1] widened to three columns: the middle lands halfway.
        m = SaliencyMap(np.array([[0.0, 1.0], [0.0, 1.0]]))
        out = resample_map(m, 3, 2)
        assert np.allclose(out.values[:, 1], 0.5)
        assert np.allclose(out.values[:, 0], 0.0)
        assert np.allclose(out.values[:, 2], 1.0)

    def test_non_negative(self, rng):
        m = random_map(rng, 9, 6)
        out = resample_map(m, 17, 3)
        assert out.values.min() >= 0.0

    def test_argmax_tracks_scaling_for_smooth_unimodal(self):
        gx, gy = np.meshgrid(np.arange(32, dtype=float), np.arange(32, dtype=float))
        m = SaliencyMap(np.exp(-((gx - 12.0) ** 2 + (gy - 20.0) ** 2) / (2 * 9.0)))
        m = normalize_to_distribution(m)
        out = resample_map(m, 64, 64)
        out = normalize_to_distribution(out)
        ax, ay = out.argmax()
        # Source (12, 20) maps to ((12 + 0.5) * 2 - 0.5, (20 + 0.5) * 2 - 0.5).
        assert abs(ax - 24.5) <= 1.0
        assert abs(ay - 40.5) <= 1.0


class TestFixationSet:
    def test_timestamps_must_be_monotone_per_subject(self):
        with pytest.raises(InvalidArgumentsError):
            FixationSet(records=(("a", 5.0, 1.0, 1.0), ("a", 2.0, 1.0, 1.0)), display_ppd=40)

    def test_interleaved_subjects_allowed(self):
        fs = FixationSet(
            records=(("a", 5.0, 1.0, 1.0), ("b", 1.0, 2.0, 2.0), ("a", 6.0, 1.0, 1.0)),
            display_ppd=40,
        )
        assert len(fs) == 3

    def test_ppd_positive(self):
        with pytest.raises(InvalidArgumentsError):
            FixationSet(records=(), display_ppd=0.0)


class TestEmpiricalSaliency:
    def test_single_fixation_peak_and_mass(self):
        fs = FixationSet(records=(("s", 0.0, 32.0, 32.0),), display_ppd=4.0)
        m = empirical_saliency(fs, 64, 64, sigma_deg=1.0)  # sigma_px = 4
        assert m.argmax() == (32, 32)
        assert abs(m.total_mass - 1.0) < 1e-6

    def test_subject_agnostic_accumulation(self):
        two_subjects = FixationSet(
            records=(("a", 0.0, 10.0, 12.0), ("b", 0.0, 10.0, 12.0)), display_ppd=3.0
        )
        one_twice = FixationSet(
            records=(("a", 0.0, 10.0, 12.0), ("a", 1.0, 10.0, 12.0)), display_ppd=3.0
        )
        m1 = empirical_saliency(two_subjects, 32, 32)
        m2 = empirical_saliency(one_twice, 32, 32)
        assert np.array_equal(m1.values, m2.values)

    def test_matches_dense_convolution_oracle(self, rng):
        width, height, ppd = 24, 18, 2.5
        records = tuple(
            ("s", float(i), float(rng.uniform(0, width - 1)), float(rng.uniform(0, height - 1)))
            for i in range(5)
        )
        fs = FixationSet(records=records, display_ppd=ppd)
        out = empirical_saliency(fs, width, height, sigma_deg=1.0)

        grid = [[0.0] * width for _ in range(height)]
        for _, _, x, y in records:
            grid[math.floor(y + 0.5)][math.floor(x + 0.5)] += 1.0
        kernel = [float(v) for v in gaussian_kernel_1d(1.0 * ppd)]
        dense = dense_convolve_oracle(grid, kernel)
        total = sum(sum(row) for row in dense)
        expected = np.array(dense) / total
        assert np.max(np.abs(out.values - expected)) < 1e-9

    def test_record_order_irrelevant(self, rng):
        records = [
            (f"s{i}", float(i), float(rng.uniform(0, 20)), float(rng.uniform(0, 20)))
            for i in range(6)
        ]
        fs1 = FixationSet(records=tuple(records), display_ppd=2.0)
        fs2 = FixationSet(records=tuple(reversed(records)), display_ppd=2.0)
        m1 = empirical_saliency(fs1, 21, 21)
        m2 = empirical_saliency(fs2, 21, 21)
        assert np.allclose(m1.values, m2.values, atol=1e-15)

    def test_no_inbounds_fixations(self):
        fs = FixationSet(records=(("s", 0.0, -50.0, -50.0),), display_ppd=4.0)
        with pytest.raises(EmptyFixationsError):
            empirical_saliency(fs, 16, 16)
