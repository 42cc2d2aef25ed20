"""Sweeping AI accuracy against meta-AUC and finding inversions.

An inversion is a pair of AIs where the less accurate one leads to the
better team because its confidence is more informative.
"""

# %%
import numpy as np

from metasense import HumanSpec, find_inversions, sweep_grid

human = HumanSpec.constant(0.55)
thetas = np.linspace(0.5, 0.8, 7)
aucs = np.linspace(0.5, 0.99, 8)
grid = sweep_grid(human, thetas, aucs)

# %%
# Print the grid as a table: rows are AI accuracy, columns are meta-AUC.
print("theta \\ auc " + " ".join(f"{a:6.3f}" for a in aucs))
values = np.array([c.combined for c in grid]).reshape(len(thetas), len(aucs))
for th, row in zip(thetas, values):
    print(f"{th:11.3f} " + " ".join(f"{v:6.3f}" for v in row))

# %%
# Every pair where the lower-accuracy AI has the higher meta-AUC and the higher
# team accuracy, by at least half a point.
pairs = find_inversions(grid, min_margin=0.005)
print(f"{len(pairs)} inversion pairs; the five largest:")
for p in pairs[:5]:
    print(f"  A{p.model_a} -> {p.combined_a:.4f}  beats  B{p.model_b} -> {p.combined_b:.4f}  by {p.margin:.4f}")

# %%
# The behavioural study contrasted a 55%-accurate AI with meta-AUC 0.99 and a
# 66%-accurate AI with meta-AUC 0.50. The model predicts the first one wins.
(pair,) = [p for p in find_inversions(sweep_grid(human, [0.55, 0.66], [0.5, 0.99]))]
print(pair)

# %%
# A human at chance leaves nothing for the AI's confidence to arbitrate, so no
# inversions appear no matter how the grid is laid out.
chance = sweep_grid(HumanSpec.constant(0.01), np.linspace(0.3, 0.95, 14), np.linspace(0.5, 0.995, 12))
print("inversions with a chance-level human:", find_inversions(chance))
