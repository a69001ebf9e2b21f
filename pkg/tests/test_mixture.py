import numpy as np
import pytest

from gazeforge import (
    Gaussian2D,
    GaussianMixtureSpec,
    InvalidArgumentsError,
    InvalidCovarianceError,
    Transform2D,
    mixture_from_dict,
    mixture_to_dict,
    render_mixture,
    transform_mixture,
)

from conftest import random_mixture
from oracles import render_gaussian_oracle


def iso(s2):
    return np.eye(2) * s2


class TestGaussian2D:
    def test_rejects_asymmetric_covariance(self):
        with pytest.raises(InvalidCovarianceError):
            Gaussian2D(weight=1.0, mean=(0, 0), cov=np.array([[4.0, 1.0], [0.0, 4.0]]))

    def test_rejects_non_positive_definite(self):
        with pytest.raises(InvalidCovarianceError):
            Gaussian2D(weight=1.0, mean=(0, 0), cov=np.array([[1.0, 2.0], [2.0, 1.0]]))

    def test_rejects_negative_weight(self):
        with pytest.raises(InvalidArgumentsError):
            Gaussian2D(weight=-0.1, mean=(0, 0), cov=iso(4.0))


class TestMixtureSpec:
    def test_empty_allowed(self):
        spec = GaussianMixtureSpec(8, 8, ())
        assert len(spec) == 0

    def test_off_canvas_bound(self):
        with pytest.raises(InvalidArgumentsError):
            GaussianMixtureSpec(
                8, 8, (Gaussian2D(weight=1, mean=(100.0, 0.0), cov=iso(1.0)),)
            )


class TestRenderMixture:
    def test_empty_renders_zero(self):
        m = render_mixture(GaussianMixtureSpec(16, 16, ()), 16, 16)
        assert m.total_mass == 0.0

    def test_unit_peak_at_mean(self):
        spec = GaussianMixtureSpec(
            64, 64, (Gaussian2D(weight=1.0, mean=(32.0, 32.0), cov=iso(25.0)),)
        )
        m = render_mixture(spec, 64, 64)
        assert m.argmax() == (32, 32)
        assert abs(m.values[32, 32] - 1.0) < 1e-9

    def test_two_gaussians_sum_of_singles(self):
        g1 = Gaussian2D(weight=1.0, mean=(16.0, 32.0), cov=iso(16.0))
        g2 = Gaussian2D(weight=1.0, mean=(48.0, 32.0), cov=iso(16.0))
        both = render_mixture(GaussianMixtureSpec(64, 64, (g1, g2)), 64, 64)
        alone1 = render_mixture(GaussianMixtureSpec(64, 64, (g1,)), 64, 64)
        alone2 = render_mixture(GaussianMixtureSpec(64, 64, (g2,)), 64, 64)
        assert np.max(np.abs(both.values - (alone1.values + alone2.values))) < 1e-12

    def test_against_loop_oracle(self, rng):
        cov = np.array([[30.0, 8.0], [8.0, 22.0]])
        g = Gaussian2D(weight=0.8, mean=(10.3, 7.9), cov=cov)
        m = render_mixture(GaussianMixtureSpec(24, 20, (g,)), 24, 20)
        expected = render_gaussian_oracle(0.8, (10.3, 7.9), cov.tolist(), 24, 20)
        assert np.max(np.abs(m.values - np.array(expected))) < 1e-12

    def test_linear_in_weights(self, rng):
        spec = random_mixture(rng, canvas=48)
        for w in rng.uniform(0.2, 3.0, size=3):
            scaled = GaussianMixtureSpec(
                48,
                48,
                tuple(
                    Gaussian2D(weight=g.weight * w, mean=g.mean, cov=g.cov)
                    for g in spec.components
                ),
            )
            base = render_mixture(spec, 48, 48)
            out = render_mixture(scaled, 48, 48)
            assert np.max(np.abs(out.values - w * base.values)) < 1e-12

    def test_integer_translation_equivariance(self, rng):
        spec = random_mixture(rng, canvas=64, margin=26)
        dx, dy = 3, -2
        moved = GaussianMixtureSpec(
            64,
            64,
            tuple(
                Gaussian2D(weight=g.weight, mean=(g.mean[0] + dx, g.mean[1] + dy), cov=g.cov)
                for g in spec.components
            ),
        )
        base = render_mixture(spec, 64, 64).values
        out = render_mixture(moved, 64, 64).values
        # Compare on the interior: out[y, x] == base[y - dy, x - dx].
        interior = out[8:-8, 8:-8]
        shifted = base[8 - dy : -8 - dy, 8 - dx : -8 - dx]
        assert np.max(np.abs(interior - shifted)) < 1e-12


class TestMixtureJson:
    def test_round_trip(self, rng):
        spec = random_mixture(rng)
        data = mixture_to_dict(spec)
        back = mixture_from_dict(data)
        assert mixture_to_dict(back) == data

    def test_shape(self, rng):
        spec = random_mixture(rng, n_components=2)
        data = mixture_to_dict(spec)
        assert set(data) == {"canvas", "gaussians"}
        assert set(data["canvas"]) == {"w", "h"}
        assert set(data["gaussians"][0]) == {"w", "mu", "sigma"}


class TestTransform2D:
    def test_apply_then_invert(self, rng):
        for _ in range(20):
            tr = Transform2D(
                tx=float(rng.uniform(-30, 30)),
                ty=float(rng.uniform(-30, 30)),
                theta=float(rng.uniform(-3, 3)),
                scale=float(rng.uniform(0.3, 3.0)),
                pivot=(16.0, 16.0),
            )
            pts = rng.uniform(-50, 50, size=(5, 2))
            back = tr.inverse().apply_points(tr.apply_points(pts))
            assert np.max(np.abs(back - pts)) < 1e-9

    def test_angle_normalized(self):
        tr = Transform2D(theta=3 * np.pi)
        assert -np.pi < tr.theta <= np.pi

    def test_transform_mixture_covariance(self):
        g = Gaussian2D(weight=1.0, mean=(10.0, 10.0), cov=np.array([[9.0, 0.0], [0.0, 1.0]]))
        spec = GaussianMixtureSpec(32, 32, (g,))
        tr = Transform2D(theta=np.pi / 2, scale=2.0, pivot=(10.0, 10.0))
        out = transform_mixture(spec, tr)
        # 90 degree rotation swaps the axes; scale 2 multiplies variances by 4.
        assert np.allclose(out.components[0].cov, [[4.0, 0.0], [0.0, 36.0]], atol=1e-9)
        assert np.allclose(out.components[0].mean, (10.0, 10.0))
