"""Tour of the building blocks: Euclidean projections onto the sparsity
and l1 balls (and their intersection), and the Bregman machinery the dual
player updates with."""

import numpy as np

from l0l1 import (
    ConstraintSet,
    bregman_distance,
    bregman_project,
    euclidean_geometry,
    grad_map,
    grad_map_inverse,
    hard_threshold,
    l1_project,
    lifted_entropy_geometry,
    project_k_tau,
)
from l0l1.bregman import (
    ENTROPY,
    ITAKURA_SAITO,
    MAHALANOBIS,
    BregmanGeometry,
    DualBall,
    lift_to_simplex,
    simplex_to_dual,
)

w = np.array([3.0, 1.0, 0.5, -0.2])
print("w =", w)
print("keep top 2 magnitudes:   ", hard_threshold(w, 2))
print("shrink into l1 ball (2): ", l1_project(w, 2.0))
print("both, k=2 and tau=3:     ", project_k_tau(w, ConstraintSet(2, 3.0)))

print("\nBregman distances for the classic potentials:")
p, q = np.array([0.5, 0.5]), np.array([0.25, 0.75])
eu = euclidean_geometry(2)
print("  squared euclidean:", bregman_distance(eu, p, q))
print("  entropy (KL form):", bregman_distance(BregmanGeometry(ENTROPY, 2), p, q))
print("  itakura-saito:    ", bregman_distance(BregmanGeometry(ITAKURA_SAITO, 2), p, q))
mat = np.array([[2.0, 0.5], [0.5, 1.0]])
print(
    "  mahalanobis:      ",
    bregman_distance(BregmanGeometry(MAHALANOBIS, 2, matrix=mat), p, q),
)

print("\ngradient maps invert each other:")
x = np.array([0.2, 1.7])
print("  euclidean round trip:", grad_map_inverse(eu, grad_map(eu, x)))

print("\nthe dual player's feasible sets:")
q_out = np.array([3.0, 4.0])
print("  l2 ball projection of (3,4):", bregman_project(eu, DualBall(2, 2), q_out))

# the l1 ball is handled through nonnegative simplex weights
# (positive parts, negative parts, slack)
point = np.array([0.25, -0.5])
weights = lift_to_simplex(point)
print("  lift of (0.25, -0.5):", weights)
ent = lifted_entropy_geometry(2)
rescaled = bregman_project(ent, DualBall(1, 2), weights * 3.0)
print("  KL projection is renormalization:", simplex_to_dual(rescaled))
