"""From raw gaze samples to an empirical saliency map, then score a
prediction against it with the five benchmark metrics.

Two synthetic observers look mostly at a "subject" region with a few
glances elsewhere. Their fixations become a blurred, normalized attention
map; a Gaussian-mixture prediction of that attention is then scored with
AUC, NSS (fixation-based) and CC, KL, SIM (distribution-based).
"""
import numpy as np

from gazeforge import (
    FixationSet,
    Gaussian2D,
    GaussianMixtureSpec,
    empirical_saliency,
    evaluate_pair,
    render_mixture,
)

rng = np.random.default_rng(42)
W, H, PPD = 320, 180, 40.0

# Observer gaze: 70% of samples near (110, 90), the rest near (240, 60).
records = []
for subject in ("obs-a", "obs-b"):
    t = 0.0
    for _ in range(60):
        t += float(rng.uniform(80, 300))
        if rng.random() < 0.7:
            x, y = rng.normal(110, 12), rng.normal(90, 12)
        else:
            x, y = rng.normal(240, 10), rng.normal(60, 10)
        records.append((subject, t, float(x), float(y)))

fixations = FixationSet(records=tuple(records), display_ppd=PPD)
ground_truth = empirical_saliency(fixations, W, H, sigma_deg=1.0)
print(f"empirical map sums to {ground_truth.total_mass:.6f} "
      f"(distribution-normalized), argmax {ground_truth.argmax()}")

# A designer's prediction of that attention distribution.
prediction = render_mixture(
    GaussianMixtureSpec(
        W, H,
        (
            Gaussian2D(weight=1.0, mean=(112.0, 88.0), cov=np.eye(2) * 900.0),
            Gaussian2D(weight=0.4, mean=(238.0, 62.0), cov=np.eye(2) * 700.0),
        ),
    ),
    W, H,
)

report = evaluate_pair(prediction, ground_truth, fixations)
print("prediction vs. observed attention:")
for name in ("auc", "nss", "cc", "kl", "sim"):
    print(f"  {name.upper():>3} = {getattr(report, name):.4f}")

# A deliberately wrong prediction scores visibly worse.
wrong = render_mixture(
    GaussianMixtureSpec(W, H, (Gaussian2D(1.0, (60.0, 160.0), np.eye(2) * 900.0),)),
    W, H,
)
bad = evaluate_pair(wrong, ground_truth, fixations)
print(f"a misplaced prediction: CC {bad.cc:.3f} (vs {report.cc:.3f}), "
      f"KL {bad.kl:.2f} (vs {report.kl:.2f})")
