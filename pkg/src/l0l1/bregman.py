"""Bregman potentials, distances, gradient maps, and Bregman projections.

Four classic potentials are evaluable as distances (squared Euclidean,
squared Mahalanobis, entropy, Itakura-Saito).  Gradient maps and Bregman
projections are provided for the two geometries the game solver actually
plays in:

* squared Euclidean on the l2 unit ball (dual exponent p = 2), and
* scaled entropy on a lifted probability simplex encoding the l1 unit
  ball (dual exponent p = 1).

The l1 ball {P in R^M : ||P||_1 <= 1} is represented by 2M + 1 nonnegative
weights summing to one: positive parts, negative parts, and one slack
coordinate.  The encoded point is P_i = w_i - w_{M+i}.  Under entropy the
Bregman projection onto the simplex is plain renormalization, which keeps
the multiplicative update closed-form.

Scale conventions: the Euclidean potential uses scale 1, so the distance
lower bound B(P, Q) >= ||P - Q||_2^2 holds with equality; the entropy
potential uses scale 2, so Pinsker's inequality gives
B(P, Q) >= ||P - Q||_1^2 on the simplex.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SQUARED_EUCLIDEAN = "squared-euclidean"
MAHALANOBIS = "mahalanobis"
ENTROPY = "entropy"
ITAKURA_SAITO = "itakura-saito"

_KINDS = (SQUARED_EUCLIDEAN, MAHALANOBIS, ENTROPY, ITAKURA_SAITO)

# positive-orthant floor applied before logarithms; preserves results at
# tested tolerances while avoiding -inf
WEIGHT_FLOOR = 1e-300


@dataclass(frozen=True)
class BregmanGeometry:
    """A potential R (by name), its domain dimension, and a positive scale
    multiplying R.  `matrix` is the PSD matrix of the Mahalanobis potential
    and must be None otherwise."""

    kind: str
    dim: int
    scale: float = 1.0
    matrix: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown geometry kind {self.kind!r}")
        if self.dim < 1:
            raise ValueError("dimension must be >= 1")
        if not self.scale > 0:
            raise ValueError("scale must be positive")
        if self.kind == MAHALANOBIS:
            if self.matrix is None:
                raise ValueError("mahalanobis geometry needs a PSD matrix")
            m = np.asarray(self.matrix, dtype=np.float64)
            if m.shape != (self.dim, self.dim):
                raise ValueError("mahalanobis matrix shape mismatch")
            if not np.allclose(m, m.T):
                raise ValueError("mahalanobis matrix must be symmetric")
            if np.linalg.eigvalsh(m)[0] < -1e-10 * max(1.0, abs(m).max()):
                raise ValueError("mahalanobis matrix must be positive semidefinite")
        elif self.matrix is not None:
            raise ValueError(f"{self.kind} geometry takes no matrix")


@dataclass(frozen=True)
class DualBall:
    """The feasible set {P in R^M : ||P||_p <= 1} for p in {1, 2}."""

    p: int
    dim: int

    def __post_init__(self):
        if self.p not in (1, 2):
            raise ValueError(f"dual ball exponent must be 1 or 2, got {self.p}")
        if self.dim < 1:
            raise ValueError("dimension must be >= 1")


def euclidean_geometry(dim: int) -> BregmanGeometry:
    """Scale-1 squared Euclidean potential (B(P,Q) = ||P-Q||_2^2)."""
    return BregmanGeometry(SQUARED_EUCLIDEAN, dim)


def lifted_entropy_geometry(m: int) -> BregmanGeometry:
    """Scale-2 entropy potential on the lifted simplex for an l1 ball in R^m."""
    return BregmanGeometry(ENTROPY, 2 * m + 1, scale=2.0)


def _check_point(g: BregmanGeometry, x: np.ndarray, name: str) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (g.dim,):
        raise ValueError(f"{name} has shape {x.shape}, geometry dimension is {g.dim}")
    if g.kind in (ENTROPY, ITAKURA_SAITO) and np.any(x <= 0):
        raise ValueError(f"{name} must be strictly positive for {g.kind}")
    return x


def bregman_distance(g: BregmanGeometry, p: np.ndarray, q: np.ndarray) -> float:
    """B_R(P, Q) = R(P) - R(Q) - <P - Q, grad R(Q)>, in closed form.

    Closed forms, each multiplied by the geometry scale:

    * squared Euclidean:  ||P - Q||_2^2
    * squared Mahalanobis: <P - Q, Phi (P - Q)>
    * entropy:            sum_i P_i log(P_i / Q_i) - sum_i (P_i - Q_i)
    * Itakura-Saito:      sum_i (P_i / Q_i - log(P_i / Q_i) - 1)

    Entropy and Itakura-Saito require strictly positive entries.
    """
    p = _check_point(g, p, "P")
    q = _check_point(g, q, "Q")
    if g.kind == SQUARED_EUCLIDEAN:
        d = p - q
        val = float(d @ d)
    elif g.kind == MAHALANOBIS:
        d = p - q
        val = float(d @ (np.asarray(g.matrix, dtype=np.float64) @ d))
    elif g.kind == ENTROPY:
        val = float(np.sum(p * np.log(p / q)) - np.sum(p - q))
    else:  # itakura-saito
        ratio = p / q
        val = float(np.sum(ratio - np.log(ratio) - 1.0))
    return g.scale * val


def grad_map(g: BregmanGeometry, p: np.ndarray) -> np.ndarray:
    """grad R at P for the geometries the game updates in.

    squared Euclidean with scale s: 2 s P;  entropy with scale s: s log P.
    """
    p = _check_point(g, p, "P")
    if g.kind == SQUARED_EUCLIDEAN:
        return 2.0 * g.scale * p
    if g.kind == ENTROPY:
        return g.scale * np.log(np.maximum(p, WEIGHT_FLOOR))
    raise ValueError(f"grad_map is not defined for {g.kind} (distance evaluator only)")


def grad_map_inverse(g: BregmanGeometry, y: np.ndarray) -> np.ndarray:
    """Inverse of `grad_map`: y / (2 s) for squared Euclidean, exp(y / s)
    for entropy."""
    y = np.asarray(y, dtype=np.float64)
    if y.shape != (g.dim,):
        raise ValueError(f"gradient has shape {y.shape}, geometry dimension is {g.dim}")
    if g.kind == SQUARED_EUCLIDEAN:
        return y / (2.0 * g.scale)
    if g.kind == ENTROPY:
        return np.exp(y / g.scale)
    raise ValueError(f"grad_map_inverse is not defined for {g.kind}")


def bregman_project(g: BregmanGeometry, ball: DualBall, q: np.ndarray) -> np.ndarray:
    """Bregman projection of Q onto the dual feasible set.

    Supported pairings:

    * (squared Euclidean, p = 2): Euclidean projection onto the unit
      2-ball, i.e. radial shrinking when ||Q||_2 > 1.
    * (entropy, p = 1): Q holds the 2M + 1 lifted nonnegative weights; the
      KL projection onto the probability simplex is renormalization.
    """
    q = np.asarray(q, dtype=np.float64)
    if g.kind == SQUARED_EUCLIDEAN and ball.p == 2:
        if q.shape != (ball.dim,):
            raise ValueError("point dimension does not match the ball")
        nrm = float(np.sqrt(q @ q))
        return q.copy() if nrm <= 1.0 else q / nrm
    if g.kind == ENTROPY and ball.p == 1:
        if q.shape != (2 * ball.dim + 1,):
            raise ValueError("lifted weights must have length 2 M + 1")
        if np.any(q < 0):
            raise ValueError("lifted weights must be nonnegative")
        total = float(np.sum(q))
        if total <= 0:
            raise ValueError("lifted weights must not all vanish")
        return q / total
    raise ValueError(f"unsupported geometry/ball pairing ({g.kind}, p={ball.p})")


# ---------------------------------------------------------------------------
# lifted-simplex encoding of the l1 unit ball
# ---------------------------------------------------------------------------

def lift_to_simplex(p: np.ndarray) -> np.ndarray:
    """Encode a point of the l1 unit ball as 2M + 1 simplex weights
    (positive parts, negative parts, slack)."""
    p = np.asarray(p, dtype=np.float64)
    l1 = float(np.sum(np.abs(p)))
    if l1 > 1.0 + 1e-12:
        raise ValueError(f"point has l1 norm {l1} > 1, not in the dual ball")
    w = np.concatenate([np.maximum(p, 0.0), np.maximum(-p, 0.0), [max(1.0 - l1, 0.0)]])
    return w


def simplex_to_dual(w: np.ndarray) -> np.ndarray:
    """Decode lifted weights back to the encoded point P_i = w_i - w_{M+i}."""
    w = np.asarray(w, dtype=np.float64)
    if w.size % 2 != 1:
        raise ValueError("lifted weights must have odd length 2 M + 1")
    m = w.size // 2
    return w[:m] - w[m : 2 * m]


def uniform_simplex_weights(m: int) -> np.ndarray:
    """The uniform lifted weights (1/(2M+1), ...), encoding P = 0."""
    return np.full(2 * m + 1, 1.0 / (2 * m + 1))
