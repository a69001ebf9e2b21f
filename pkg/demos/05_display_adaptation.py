"""Adapt a conditioning map to where a given display actually puts content
on the viewer's retina.

Reaction times are fastest around 7-10 degrees of eccentricity, so for a
known screen geometry we can either reweight a map toward that band or
physically relocate its salient mass into it. This script does both on the
eye-tracking study display preset (24-inch monitor, 60 cm, 40 px/deg).
"""
import math

import numpy as np

from gazeforge import (
    DISPLAY_PRESETS,
    EccentricityProfile,
    Gaussian2D,
    GaussianMixtureSpec,
    eccentricity_map,
    render_mixture,
    retarget,
)

display = DISPLAY_PRESETS["study-24in"]
print(f"display: {display.width_px}x{display.height_px} px, "
      f"{display.fov_deg[0]:.1f} x {display.fov_deg[1]:.1f} deg field, "
      f"{display.center_ppd:.1f} px/deg at center")

W, H = 480, 270  # quarter-resolution working raster
ecc = eccentricity_map(display, W, H)
print(f"eccentricity at raster center: {ecc.values[135, 240]:.2f} deg; "
      f"at the right edge: {ecc.values[135, 479]:.2f} deg")

# Salient content parked way out at ~16 degrees, left side.
off_band = render_mixture(
    GaussianMixtureSpec(W, H, (Gaussian2D(1.0, (80.0, 135.0), np.eye(2) * 81.0),)),
    W, H,
)
profile = EccentricityProfile()  # band (7, 10) deg, raised-cosine falloff
band_mask = (ecc.values >= 7.0) & (ecc.values <= 10.0)


def band_share(m):
    return float(m.values[band_mask].sum() / m.total_mass)


px, py = off_band.argmax()
print(f"\ninput peak at {ecc.values[py, px]:.1f} deg, "
      f"in-band mass {band_share(off_band):.1%}")

weighted = retarget(off_band, display, profile, mode="weight")
px, py = weighted.argmax()
print(f"weight mode:    peak at {ecc.values[py, px]:.1f} deg, "
      f"in-band mass {band_share(weighted):.1%} (attenuates, layout fixed)")

moved = retarget(off_band, display, profile, mode="transform")
px, py = moved.argmax()
print(f"transform mode: peak at {ecc.values[py, px]:.1f} deg, "
      f"in-band mass {band_share(moved):.1%} (relocates the mass)")
