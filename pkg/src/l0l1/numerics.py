"""Dense vector/matrix kernels and restricted least-squares subroutines.

Everything in here operates on plain float64 numpy arrays: matrices are
2-d row-major arrays, vectors are 1-d arrays, and support sets are sorted
1-d integer index arrays.  All functions are pure; none mutate their
arguments, so they are safe to call concurrently from parallel trials.
"""

from __future__ import annotations

import struct

import numpy as np

MAGIC = b"SPD1"


def as_matrix(a) -> np.ndarray:
    """Validate and return `a` as a 2-d float64 array with finite entries."""
    m = np.asarray(a, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise ValueError(f"expected a 2-d matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix entries must be finite")
    return m


def as_vector(x) -> np.ndarray:
    """Validate and return `x` as a 1-d float64 array with finite entries."""
    v = np.asarray(x, dtype=np.float64)
    if v.ndim != 1:
        raise ValueError(f"expected a 1-d vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector entries must be finite")
    return v


def as_index_set(support, n: int) -> np.ndarray:
    """Validate a support set: sorted, distinct column indices in [0, n)."""
    s = np.asarray(support, dtype=np.int64).ravel()
    if s.size == 0:
        return s
    if np.any(s < 0) or np.any(s >= n):
        raise ValueError(f"support indices must lie in [0, {n})")
    if np.any(np.diff(s) <= 0):
        raise ValueError("support indices must be strictly increasing")
    return s


def mat_vec(a: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Dense matrix-vector product A @ x.

    Raises ValueError on a dimension mismatch.  The product is evaluated by
    the platform BLAS, which is deterministic for fixed inputs on a fixed
    machine; that is the reproducibility level the benchmark relies on.
    """
    a = np.asarray(a, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    if a.ndim != 2 or x.ndim != 1 or a.shape[1] != x.shape[0]:
        raise ValueError(
            f"dimension mismatch: matrix is {a.shape}, vector has length {x.shape}"
        )
    return a @ x


def lp_norm(x: np.ndarray, p: float) -> float:
    """The lp norm of a vector for p in [1, inf]; p = inf is the max magnitude."""
    x = np.asarray(x, dtype=np.float64)
    if np.isinf(p):
        return float(np.max(np.abs(x))) if x.size else 0.0
    if p == 2:
        return float(np.sqrt(np.sum(x * x)))
    if p == 1:
        return float(np.sum(np.abs(x)))
    if p < 1:
        raise ValueError(f"lp_norm requires p >= 1, got {p}")
    return float(np.sum(np.abs(x) ** p) ** (1.0 / p))


def restricted_lsq(
    a: np.ndarray,
    f: np.ndarray,
    support,
    tol: float = 1e-9,
    max_iter: int | None = None,
    x0: np.ndarray | None = None,
) -> np.ndarray:
    """Least squares restricted to a column support set.

    Returns the length-N vector v minimizing ||f - A v||_2^2 subject to
    supp(v) being a subset of `support`; coordinates off the support are
    exactly zero.  The restricted problem is solved by conjugate gradients
    on the normal equations of the column submatrix, stopping once the
    gradient restricted to the support has 2-norm <= tol or after max_iter
    steps (default 4 * |support|, covering roundoff slack beyond CG's exact
    termination).  A singular restricted Gram matrix is handled by CG's
    natural behavior inside the Krylov space; no factorization is formed.

    Parameters
    ----------
    a : (M, N) matrix
    f : (M,) observation vector
    support : sorted distinct indices into columns of `a`; empty -> zeros
    tol : stopping threshold on the restricted gradient norm, > 0
    max_iter : CG iteration cap; None selects 4 * |support|
    x0 : optional warm start; only its `support` coordinates are used
    """
    a = np.asarray(a, dtype=np.float64)
    f = np.asarray(f, dtype=np.float64)
    m, n = a.shape
    s = as_index_set(support, n)
    if tol <= 0:
        raise ValueError("tol must be positive")
    out = np.zeros(n)
    if s.size == 0:
        return out
    if s.size > m:
        raise ValueError(f"support size {s.size} exceeds number of rows {m}")
    a_s = a[:, s]
    gram = a_s.T @ a_s
    b = a_s.T @ f
    if max_iter is None:
        max_iter = 4 * s.size

    x = np.zeros(s.size) if x0 is None else np.asarray(x0, dtype=np.float64)[s].copy()
    r = b - gram @ x if x0 is not None else b.copy()
    p = r.copy()
    rs = float(r @ r)
    for _ in range(max_iter):
        if np.sqrt(rs) <= tol:
            break
        gp = gram @ p
        p_gp = float(p @ gp)
        if p_gp <= 0.0:
            # null direction of a singular Gram: nothing further to gain
            break
        alpha = rs / p_gp
        x += alpha * p
        r -= alpha * gp
        rs_new = float(r @ r)
        p = r + (rs_new / rs) * p
        rs = rs_new
    out[s] = x
    return out


# ---------------------------------------------------------------------------
# file formats: "SPD1" binary and plain CSV
# ---------------------------------------------------------------------------

def write_matrix(path, a: np.ndarray) -> None:
    """Write a matrix in the binary format: b"SPD1", u64 rows, u64 cols,
    then row-major little-endian IEEE-754 f64 entries."""
    a = as_matrix(a)
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<QQ", a.shape[0], a.shape[1]))
        fh.write(np.ascontiguousarray(a, dtype="<f8").tobytes())


def write_vector(path, x: np.ndarray) -> None:
    """Write a vector as a single-column matrix in the binary format."""
    write_matrix(path, as_vector(x)[:, None])


def read_matrix(path) -> np.ndarray:
    """Read a matrix written by `write_matrix`."""
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != MAGIC:
            raise ValueError(f"{path}: bad magic {magic!r}, expected {MAGIC!r}")
        rows, cols = struct.unpack("<QQ", fh.read(16))
        data = fh.read(8 * rows * cols)
    if len(data) != 8 * rows * cols:
        raise ValueError(f"{path}: truncated payload for {rows}x{cols} matrix")
    return np.frombuffer(data, dtype="<f8").astype(np.float64).reshape(rows, cols)


def read_vector(path) -> np.ndarray:
    """Read a vector: accepts a single-column or single-row matrix file."""
    m = read_matrix(path)
    if 1 not in m.shape:
        raise ValueError(f"{path}: expected a vector file, got shape {m.shape}")
    return m.ravel()


def read_matrix_csv(path) -> np.ndarray:
    """Read a matrix from CSV: one row per line, comma-separated decimals."""
    m = np.loadtxt(path, delimiter=",", dtype=np.float64, ndmin=2)
    return as_matrix(m)


def load_matrix_auto(path) -> np.ndarray:
    """Load a matrix, sniffing the binary magic and falling back to CSV."""
    with open(path, "rb") as fh:
        head = fh.read(4)
    if head == MAGIC:
        return read_matrix(path)
    return read_matrix_csv(path)
