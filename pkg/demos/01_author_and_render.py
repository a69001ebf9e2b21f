"""Author a saliency map as a Gaussian mixture and render it.

Each "click" of a designer becomes one weighted bivariate Gaussian; the sum
of the bumps is the conditioning map a generation backend consumes. This
script builds a three-bump layout, renders it, and writes both the lossless
SMAP raster and a preview PNG.
"""
import numpy as np

from gazeforge import Gaussian2D, GaussianMixtureSpec, max_normalize, render_mixture
from gazeforge.formats import map_to_png_bytes, write_mixture_json, write_smap

# A wide-ish canvas with a dominant subject left of center, a secondary
# subject on the right, and a faint accent between them.
spec = GaussianMixtureSpec(
    canvas_width=512,
    canvas_height=288,
    components=(
        Gaussian2D(weight=1.0, mean=(160.0, 150.0), cov=np.array([[2600.0, 400.0],
                                                                  [400.0, 1800.0]])),
        Gaussian2D(weight=0.7, mean=(390.0, 120.0), cov=np.eye(2) * 1200.0),
        Gaussian2D(weight=0.25, mean=(280.0, 200.0), cov=np.eye(2) * 500.0),
    ),
)

rendered = render_mixture(spec, 512, 288)
print(f"rendered {rendered.width}x{rendered.height}, peak {rendered.values.max():.3f}, "
      f"total mass {rendered.total_mass:.1f}")

# Peak sits on the dominant Gaussian's mean.
px, py = rendered.argmax()
print(f"argmax at ({px}, {py}) - authored dominant mean was (160, 150)")

write_mixture_json(spec, "authored_spec.json")
write_smap(rendered, "authored.smap")
with open("authored_preview.png", "wb") as fh:
    fh.write(map_to_png_bytes(max_normalize(rendered)))
print("wrote authored_spec.json, authored.smap, authored_preview.png")
