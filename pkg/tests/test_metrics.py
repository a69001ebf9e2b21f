import numpy as np
import pytest

from gazeforge import (
    EmptyFixationsError,
    FixationSet,
    SaliencyMap,
    ShapeMismatchError,
    UndefinedMetricError,
    auc_judd,
    cc,
    evaluate_pair,
    kl_divergence,
    nss,
    sim,
)
from gazeforge.metrics import mean_reports

from conftest import random_fixations, random_map
from oracles import auc_judd_oracle, cc_oracle, kl_oracle, nss_oracle, sim_oracle


def fix_at(points, ppd=40.0):
    records = tuple((f"s{i}", float(i), float(x), float(y)) for i, (x, y) in enumerate(points))
    return FixationSet(records=records, display_ppd=ppd)


class TestAucJudd:
    def test_perfect_discrimination(self, rng):
        m = random_map(rng, 6, 6)
        ax, ay = m.argmax()
        assert abs(auc_judd(m, fix_at([(ax, ay), (ax, ay)])) - 1.0) < 1e-9

    def test_constant_map_undefined(self):
        with pytest.raises(UndefinedMetricError):
            auc_judd(SaliencyMap(np.full((4, 4), 0.3)), fix_at([(1, 1)]))

    def test_no_inbounds_fixations(self, rng):
        with pytest.raises(EmptyFixationsError):
            auc_judd(random_map(rng, 4, 4), fix_at([(-10, -10)]))

    def test_hand_enumerated_3x3(self):
        values = np.array([[0.9, 0.1, 0.3], [0.2, 0.5, 0.7], [0.4, 0.8, 0.6]])
        m = SaliencyMap(values)
        fixations = [(0.0, 0.0), (1.0, 1.0)]  # values 0.9 and 0.5
        expected = auc_judd_oracle(values.tolist(), fixations)
        assert auc_judd(m, fix_at(fixations)) == expected

    def test_matches_enumeration_oracle(self, rng):
        for _ in range(50):
            m = random_map(rng, 6, 6)
            pts = [
                (float(rng.uniform(0, 5)), float(rng.uniform(0, 5)))
                for _ in range(int(rng.integers(1, 8)))
            ]
            assert auc_judd(m, fix_at(pts)) == auc_judd_oracle(m.values.tolist(), pts)

    def test_monotone_transform_invariance(self, rng):
        m = random_map(rng, 8, 8)
        pts = [(float(rng.uniform(0, 7)), float(rng.uniform(0, 7))) for _ in range(5)]
        fs = fix_at(pts)
        transformed = SaliencyMap(np.exp(3.0 * m.values) - 0.9)
        assert abs(auc_judd(m, fs) - auc_judd(transformed, fs)) < 1e-12


class TestNss:
    def test_fixation_at_mean_valued_pixel(self):
        values = np.array([[0.0, 1.0, 2.0]])  # mean 1.0 at pixel (1, 0)
        assert abs(nss(SaliencyMap(values), fix_at([(1, 0)]))) < 1e-9

    def test_all_fixations_at_argmax(self, rng):
        m = random_map(rng, 8, 8)
        ax, ay = m.argmax()
        expected = (m.values.max() - m.values.mean()) / m.values.std()
        assert abs(nss(m, fix_at([(ax, ay)] * 3)) - expected) < 1e-12

    def test_duplicating_fixations(self, rng):
        m = random_map(rng, 8, 8)
        pts = [(float(rng.uniform(0, 7)), float(rng.uniform(0, 7))) for _ in range(4)]
        assert abs(nss(m, fix_at(pts)) - nss(m, fix_at(pts + pts))) < 1e-12

    def test_matches_direct_formula_oracle(self, rng):
        for _ in range(25):
            m = random_map(rng, 8, 8)
            pts = [(float(rng.uniform(0, 7)), float(rng.uniform(0, 7))) for _ in range(6)]
            assert abs(nss(m, fix_at(pts)) - nss_oracle(m.values.tolist(), pts)) < 1e-9

    def test_zero_variance_undefined(self):
        with pytest.raises(UndefinedMetricError):
            nss(SaliencyMap(np.full((3, 3), 1.0)), fix_at([(1, 1)]))

    def test_top_pixels_positive(self, rng):
        m = random_map(rng, 8, 8)
        order = np.argsort(m.values.ravel())[::-1][:5]
        pts = [(int(i % 8), int(i // 8)) for i in order]
        assert nss(m, fix_at(pts)) > 0.0


class TestCc:
    def test_self_correlation(self, rng):
        m = random_map(rng)
        assert abs(cc(m, m) - 1.0) < 1e-9

    def test_anticorrelation(self, rng):
        m = random_map(rng)
        flipped = SaliencyMap(float(m.values.max()) + 0.1 - m.values)
        assert abs(cc(m, flipped) + 1.0) < 1e-9

    def test_matches_direct_formula(self, rng):
        for _ in range(25):
            a, b = random_map(rng), random_map(rng)
            assert abs(cc(a, b) - cc_oracle(a.values.tolist(), b.values.tolist())) < 1e-12

    def test_symmetry_and_scale_invariance(self, rng):
        a, b = random_map(rng), random_map(rng)
        assert abs(cc(a, b) - cc(b, a)) < 1e-12
        assert abs(cc(SaliencyMap(a.values * 7.3), b) - cc(a, b)) < 1e-9

    def test_shape_mismatch(self, rng):
        with pytest.raises(ShapeMismatchError):
            cc(random_map(rng, 4, 4), random_map(rng, 5, 4))


class TestKl:
    def test_identical_maps_near_zero(self, rng):
        for _ in range(10):
            m = random_map(rng)
            assert kl_divergence(m, m) <= 1e-6

    def test_delta_vs_uniform_closed_form(self):
        n = 64
        delta = np.zeros((8, 8))
        delta[3, 5] = 1.0
        p = SaliencyMap(delta)
        q = SaliencyMap(np.full((8, 8), 1.0))
        assert abs(kl_divergence(p, q) - np.log(n)) < 1e-3

    def test_asymmetric(self):
        p = SaliencyMap(np.array([[0.9, 0.1]]))
        q = SaliencyMap(np.array([[0.5, 0.5]]))
        assert kl_divergence(p, q) != kl_divergence(q, p)

    def test_matches_oracle(self, rng):
        for _ in range(25):
            a, b = random_map(rng), random_map(rng)
            got = kl_divergence(a, b)
            want = kl_oracle(a.values.tolist(), b.values.tolist())
            assert abs(got - want) < 1e-12

    def test_non_negative_and_scale_invariant(self, rng):
        a, b = random_map(rng), random_map(rng)
        assert kl_divergence(a, b) >= 0.0
        assert abs(kl_divergence(SaliencyMap(a.values * 3.0), b) - kl_divergence(a, b)) < 1e-9


class TestSim:
    def test_self_similarity(self, rng):
        m = random_map(rng)
        assert abs(sim(m, m) - 1.0) < 1e-9

    def test_disjoint_deltas(self):
        a = np.zeros((4, 4))
        a[0, 0] = 1.0
        b = np.zeros((4, 4))
        b[3, 3] = 1.0
        assert sim(SaliencyMap(a), SaliencyMap(b)) < 1e-12

    def test_matches_oracle(self, rng):
        for _ in range(25):
            a, b = random_map(rng), random_map(rng)
            assert abs(sim(a, b) - sim_oracle(a.values.tolist(), b.values.tolist())) < 1e-12

    def test_range_symmetry_scale(self, rng):
        a, b = random_map(rng), random_map(rng)
        v = sim(a, b)
        assert 0.0 <= v <= 1.0
        assert abs(v - sim(b, a)) < 1e-12
        assert abs(sim(SaliencyMap(a.values * 11.0), b) - v) < 1e-9


class TestEvaluatePair:
    def test_identity_no_fixations(self, rng):
        m = random_map(rng)
        r = evaluate_pair(m, m)
        assert abs(r.cc - 1.0) < 1e-9
        assert r.kl <= 1e-6
        assert abs(r.sim - 1.0) < 1e-9
        assert r.auc is None and r.nss is None
        assert not r.errors

    def test_fields_match_individual_calls(self, rng):
        t, a = random_map(rng), random_map(rng)
        fs = random_fixations(rng, 8, 8, 5)
        r = evaluate_pair(t, a, fs)
        assert r.cc == cc(t, a)
        assert r.kl == kl_divergence(t, a)
        assert r.sim == sim(t, a)
        assert r.auc == auc_judd(t, fs)
        assert r.nss == nss(t, fs)

    def test_resamples_achieved_to_target(self, rng):
        t = random_map(rng, 8, 8)
        a = random_map(rng, 16, 16)
        r = evaluate_pair(t, a)
        assert r.resampled
        assert r.cc is not None

    def test_partial_report_on_errors(self, rng):
        t = random_map(rng)
        constant = SaliencyMap(np.full((8, 8), 0.5))
        fs = random_fixations(rng, 8, 8, 3)
        r = evaluate_pair(constant, t, fs)
        assert r.cc is None and "cc" in r.errors
        assert r.auc is None and "auc" in r.errors
        assert r.kl is not None and r.sim is not None

    def test_batch_mean_equals_mean_of_reports(self, rng):
        reports = [evaluate_pair(random_map(rng), random_map(rng)) for _ in range(50)]
        mean, _ = mean_reports(reports)
        assert abs(mean.cc - np.mean([r.cc for r in reports])) < 1e-12
        assert abs(mean.kl - np.mean([r.kl for r in reports])) < 1e-12
        assert abs(mean.sim - np.mean([r.sim for r in reports])) < 1e-12
