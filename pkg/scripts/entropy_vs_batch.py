"""How the two-level entropy estimate and the per-record reward behave as the batch grows.

Draws embeddings from a mixture of Gaussian clusters whose values are the
cluster index plus noise, and prints the first-level estimate, the
value-conditional estimate and the mean si2e reward for each batch size.
"""
import numpy as np

from structinfo.exploration import (TransitionBatch, build_hierarchy, intrinsic_rewards, knn_entropy,
                                    vcse_estimate)

rng = np.random.default_rng(0)
centers = rng.normal(scale=6.0, size=(4, 2))
print(f"{'n':>5} {'communities':>11} {'H(first)':>10} {'VCSE':>10} {'mean reward':>12}")
for n in (16, 32, 64, 128, 256):
    which = rng.integers(0, len(centers), n)
    emb = centers[which] + rng.normal(size=(n, 2))
    values = which + rng.normal(scale=0.05, size=n)
    batch = TransitionBatch.from_embeddings(emb, values)
    assignment = build_hierarchy(batch)
    print(f"{n:>5} {assignment.n_communities:>11} {knn_entropy(emb, 5):>10.3f} "
          f"{vcse_estimate(batch, assignment, 5):>10.3f} {intrinsic_rewards(batch, assignment, 5).mean():>12.3f}")
