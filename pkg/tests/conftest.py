import os
import sys
from pathlib import Path

# Must land before numpy initializes its threaded backends (see package init).
for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
    os.environ.setdefault(var, "1")
os.environ.setdefault("OMP_WAIT_POLICY", "PASSIVE")

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from gazeforge import FixationSet, Gaussian2D, GaussianMixtureSpec, SaliencyMap


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_map(rng, width=8, height=8, low=0.01, high=1.0) -> SaliencyMap:
    """Strictly positive random map (float32-representable values)."""
    values = rng.uniform(low, high, size=(height, width)).astype(np.float32)
    return SaliencyMap(values.astype(np.float64))


def random_fixations(rng, width, height, count, ppd=40.0) -> FixationSet:
    records = []
    t = 0.0
    for _ in range(count):
        t += float(rng.uniform(1, 30))
        records.append(
            ("s0", t, float(rng.uniform(0, width - 1)), float(rng.uniform(0, height - 1)))
        )
    return FixationSet(records=tuple(records), display_ppd=ppd)


def random_mixture(rng, canvas=128, n_components=None, margin=24) -> GaussianMixtureSpec:
    """Well-conditioned random mixture fully inside the canvas."""
    margin = min(margin, canvas // 3)
    n = int(n_components) if n_components is not None else int(rng.integers(1, 6))
    comps = []
    for _ in range(n):
        sx = float(rng.uniform(6, 14))
        sy = float(rng.uniform(6, 14))
        rho = float(rng.uniform(-0.4, 0.4))
        cov = np.array([[sx * sx, rho * sx * sy], [rho * sx * sy, sy * sy]])
        comps.append(
            Gaussian2D(
                weight=float(rng.uniform(0.5, 1.5)),
                mean=(
                    float(rng.uniform(margin, canvas - margin)),
                    float(rng.uniform(margin, canvas - margin)),
                ),
                cov=cov,
            )
        )
    return GaussianMixtureSpec(canvas_width=canvas, canvas_height=canvas, components=tuple(comps))
