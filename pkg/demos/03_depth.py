"""Which curve is the most typical? Which point is an outlier?

Modified band depth ranks a bundle of curves by how often each sits inside
the bands spanned by pairs of others. Projection depth does the same for
points: the worst standardized deviation over all directions.
"""
import numpy as np

from shapestress import FunctionalSample, depth_trim, functional_median, mbd, projection_depth

rng = np.random.default_rng(1)
t = np.linspace(0, 1, 50)
levels = np.array([-1.0, -0.5, 0.0, 0.4, 0.9, 3.0])
curves = levels[:, None] + np.sin(2 * np.pi * t) + 0.1 * rng.standard_normal((6, 50))
sample = FunctionalSample.from_curves(curves, grid=t, ids=[f"c{i}" for i in range(6)])

scores = mbd(sample)
for i, v in zip(sample.ids, scores.values):
    print(f"{i}  MBD {v:.3f}")
print("functional median:", sample.ids[functional_median(sample).indices[0]])

cloud = rng.standard_normal((60, 2))
cloud[0] = [6.0, -5.0]
print("\nprojection depth of the centre", round(projection_depth([0.0, 0.0], cloud), 3))
print("projection depth of the outlier", round(projection_depth(cloud[0], cloud), 3))
kept = depth_trim(cloud, alpha=0.1)
print(f"depth >= 0.1 keeps {len(kept)} of 60; outlier kept: {0 in kept}")
