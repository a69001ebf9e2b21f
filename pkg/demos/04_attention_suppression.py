"""Authoring presets that push attention away from a region.

Absolute suppression removes authored bumps inside the region outright and
tightens any neighbor spilling into it, guaranteeing under 1% of rendered
mass remains there. Relative suppression keeps the bumps but scales their
weights down, de-emphasizing without eliminating.
"""
import numpy as np

from gazeforge import Gaussian2D, GaussianMixtureSpec, author_suppression, render_mixture
from gazeforge.correction import polygon_mask

W, H = 256, 144
spec = GaussianMixtureSpec(
    W, H,
    (
        Gaussian2D(1.0, (64.0, 72.0), np.eye(2) * 300.0),   # inside the region
        Gaussian2D(1.0, (140.0, 72.0), np.eye(2) * 300.0),  # near its edge
        Gaussian2D(1.0, (215.0, 72.0), np.eye(2) * 300.0),  # far away
    ),
)
region = [(20.0, 30.0), (110.0, 30.0), (110.0, 114.0), (20.0, 114.0)]
mask = polygon_mask(W, H, region)


def region_share(s):
    rendered = render_mixture(s, W, H)
    return float(rendered.values[mask].sum() / rendered.total_mass)


print(f"authored layout keeps {region_share(spec):.1%} of its mass in the region")

absolute = author_suppression(spec, region, mode="absolute")
print(f"absolute suppression: {len(absolute)} of {len(spec)} bumps survive, "
      f"region mass {region_share(absolute):.2%} (< 1% guaranteed)")

relative = author_suppression(spec, region, mode="relative", attenuation=0.3)
before = render_mixture(spec, W, H).values[72, 64]
after = render_mixture(relative, W, H).values[72, 64]
print(f"relative suppression at 0.3: peak inside region {before:.2f} -> {after:.2f}")

# A region that touches nothing leaves the spec object untouched.
noop = author_suppression(spec, [(300.0, 10.0), (310.0, 10.0), (310.0, 20.0)],
                          mode="relative", attenuation=0.5)
print(f"no-op region returns the identical spec object: {noop is spec}")
