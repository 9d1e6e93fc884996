"""Hard-thresholding pursuits and the projected-gradient Lasso baseline.

* `sp_solve` - subspace pursuit: extend the working support with the top-k
  residual correlations, least-squares fit on the <= 2k union, prune back
  to k, and refit.
* `clash_solve` - the same outer pattern with the l1 budget enforced in
  the inner solves: active set expansion, greedy descent with shrinkage
  over the extended support, combinatorial selection, and an l1-aware
  de-bias on the pruned support.  With tau = inf the inner solves collapse
  to plain restricted least squares and the iterates match `sp_solve`.
* `lasso_pg_solve` - projected gradient over the full coordinate space
  with the l1 ball projection, fixed step 1/L.
* `iht_solve` - fixed-step iterative hard thresholding, kept as a
  comparison baseline.

All top-k selections break magnitude ties toward the lowest index, so
every solver is deterministic given its inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .numerics import lp_norm, restricted_lsq
from .projections import hard_threshold, l1_project, top_k_support
from .results import IterateTrace, SolverResult


# Warm-start portfolio for `clash_solve`: (norm-budget schedule, momentum)
# pairs.  A schedule lists fractions of the final budget tau; its stages
# approach tau from below so the early ones work under stronger shrinkage,
# where support identification is easier.  Momentum members compute the
# expansion gradient at an extrapolated point, which changes the explored
# support sequence.  The run whose final residual is smallest wins; ties
# keep the earliest.
CONTINUATION_PORTFOLIO: tuple[tuple[tuple[float, ...], bool], ...] = (
    ((), False),
    ((0.7, 0.8, 0.9, 0.95), False),
    ((), True),
    ((0.5, 0.65, 0.8, 0.9, 0.96), False),
    ((0.6, 0.7, 0.78, 0.85, 0.9, 0.94, 0.97, 0.99), False),
    ((0.6, 0.85), False),
    ((0.7, 0.8, 0.9, 0.95), True),
)


@dataclass
class PursuitConfig:
    """Outer-loop budgets plus inner-solver settings.

    `tau` may be +inf for SP/IHT-style runs where the norm budget is
    inactive.  `tolerance` is the relative iterate-change stop; the inner
    settings govern the l1-constrained projected-gradient subproblems
    (restricted least squares always runs at its own tight defaults).

    `continuation` controls the warm-start portfolio of `clash_solve`:
    "auto" uses `CONTINUATION_PORTFOLIO` when tau is finite and a single
    cold start otherwise; "none" forces the single cold start; a tuple of
    schedules (each a tuple of fractions of tau) is used as given.
    """

    sparsity: int
    tau: float = np.inf
    tolerance: float = 1e-6
    max_iterations: int = 100
    inner_tol: float = 1e-8
    inner_max_iter: int = 500
    continuation: str | tuple[tuple[float, ...], ...] = "auto"

    def __post_init__(self):
        if self.sparsity < 1:
            raise ValueError("sparsity must be >= 1")
        if not self.tau > 0:
            raise ValueError("tau must be positive (use inf to disable)")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if isinstance(self.continuation, str) and self.continuation not in ("auto", "none"):
            raise ValueError("continuation must be 'auto', 'none', or schedules")


@dataclass
class ContractionReport:
    """Outcome of an empirical per-iteration contraction check."""

    passed: bool
    rho: float
    noise_term: float
    violations: list[tuple[int, float, float]]


def _power_iter_gram(gram: np.ndarray, iters: int = 20, rel_tol: float = 1e-6) -> float:
    """Largest eigenvalue of a PSD matrix by power iteration (deterministic
    all-ones start)."""
    n = gram.shape[0]
    v = np.full(n, 1.0 / np.sqrt(n))
    lam = 0.0
    for _ in range(iters):
        w = gram @ v
        nw = float(np.sqrt(w @ w))
        if nw == 0.0:
            return 0.0
        v = w / nw
        if lam > 0 and abs(nw - lam) <= rel_tol * nw:
            return nw
        lam = nw
    return lam


def _power_iter_cols(a: np.ndarray, iters: int = 20, rel_tol: float = 1e-6) -> float:
    """Largest eigenvalue of A^T A without forming the Gram matrix."""
    n = a.shape[1]
    v = np.full(n, 1.0 / np.sqrt(n))
    lam = 0.0
    for _ in range(iters):
        w = a.T @ (a @ v)
        nw = float(np.sqrt(w @ w))
        if nw == 0.0:
            return 0.0
        v = w / nw
        if lam > 0 and abs(nw - lam) <= rel_tol * nw:
            return nw
        lam = nw
    return lam


def _l1_restricted_pg(
    phi: np.ndarray,
    f: np.ndarray,
    support: np.ndarray,
    tau: float,
    x0: np.ndarray | None,
    tol: float,
    max_iter: int,
) -> np.ndarray:
    """minimize ||f - Phi v||_2^2 over supp(v) in `support`, ||v||_1 <= tau,
    by projected gradient with fixed step 1/L on the column submatrix.

    Stops when the projected-gradient mapping norm drops to `tol`.  Returns
    a full-length vector, zero off the support.
    """
    n = phi.shape[1]
    out = np.zeros(n)
    if support.size == 0:
        return out
    a_s = phi[:, support]
    gram = a_s.T @ a_s
    b = a_s.T @ f
    lam = _power_iter_gram(gram)
    if lam == 0.0:
        return out
    step = 1.0 / lam
    x = np.zeros(support.size) if x0 is None else x0[support].copy()
    x = l1_project(x, tau)
    for _ in range(max_iter):
        g = gram @ x - b
        x_new = l1_project(x - step * g, tau)
        moved = float(np.sqrt(np.sum((x_new - x) ** 2)))
        x = x_new
        if moved / step <= tol:
            break
    out[support] = x
    return out


def sp_solve(
    phi: np.ndarray,
    f: np.ndarray,
    cfg: PursuitConfig,
    alpha_true: np.ndarray | None = None,
    keep_iterates: bool = False,
) -> tuple[SolverResult, IterateTrace]:
    """Subspace pursuit.

    Initializes on the top-k correlations of Phi^T f, then repeatedly
    unions the current support with the top-k residual correlations
    (extended support <= 2k), solves restricted least squares on the
    union, prunes to the k largest entries, and refits on the pruned
    support.  Stops when the residual norm stops decreasing, when the
    relative iterate change drops below the tolerance, or at the
    iteration cap.
    """
    phi = np.asarray(phi, dtype=np.float64)
    f = np.asarray(f, dtype=np.float64)
    m, n = phi.shape
    k = cfg.sparsity
    if k > m:
        raise ValueError(f"sparsity {k} exceeds number of measurements {m}")

    trace = IterateTrace()
    support = top_k_support(phi.T @ f, k)
    alpha = restricted_lsq(phi, f, support)
    residual = f - phi @ alpha
    res_norm = float(np.sqrt(residual @ residual))
    trace.record(
        support,
        res_norm,
        float(np.sqrt(alpha @ alpha)),
        _dist(alpha, alpha_true),
        alpha if keep_iterates else None,
    )

    termination = "max-iterations"
    iterations = 0
    for _ in range(cfg.max_iterations):
        iterations += 1
        extended = np.union1d(support, top_k_support(phi.T @ residual, k))
        v = restricted_lsq(phi, f, extended)
        gamma = hard_threshold(v, k)
        new_support = np.nonzero(gamma)[0]
        alpha_new = restricted_lsq(phi, f, new_support)
        residual_new = f - phi @ alpha_new
        res_norm_new = float(np.sqrt(residual_new @ residual_new))
        if res_norm_new > res_norm:
            termination = "residual stopped decreasing"
            break
        delta = float(np.sqrt(np.sum((alpha_new - alpha) ** 2)))
        alpha, support = alpha_new, new_support
        residual, res_norm = residual_new, res_norm_new
        trace.record(
            support,
            res_norm,
            delta,
            _dist(alpha, alpha_true),
            alpha if keep_iterates else None,
        )
        if delta <= cfg.tolerance * max(float(np.sqrt(alpha @ alpha)), 1e-12):
            termination = "converged"
            break

    result = SolverResult(
        alpha=alpha,
        residual_l2=res_norm,
        residual_q=res_norm,
        history=list(trace.residual_norms),
        iterations=iterations,
        termination=termination,
    )
    return result, trace


def _clash_loop(
    phi: np.ndarray,
    f: np.ndarray,
    k: int,
    tau: float,
    alpha0: np.ndarray,
    cfg: PursuitConfig,
    alpha_true: np.ndarray | None,
    keep_iterates: bool,
    trace: IterateTrace | None,
    momentum: bool = False,
) -> tuple[np.ndarray, int, str]:
    """The four-step iteration at a fixed budget (k, tau), from alpha0.

    With `momentum` the expansion gradient is taken at an extrapolation of
    the last two iterates instead of the current one; the descent,
    selection, and de-bias steps are unchanged, so iterate feasibility and
    the <= 2k extended-support bound still hold.  When `trace` is None the
    loop runs silently (warm-up stage).
    """
    norm_active = np.isfinite(tau)

    def inner(support: np.ndarray, warm: np.ndarray | None) -> np.ndarray:
        if not norm_active:
            return restricted_lsq(phi, f, support)
        return _l1_restricted_pg(
            phi, f, support, tau, warm, cfg.inner_tol, cfg.inner_max_iter
        )

    alpha = alpha0
    alpha_prev = alpha0
    support = np.nonzero(alpha)[0]
    termination = "max-iterations"
    iterations = 0
    for it in range(cfg.max_iterations):
        iterations += 1
        if momentum and it > 0:
            probe = alpha + (it / (it + 3.0)) * (alpha - alpha_prev)
        else:
            probe = alpha
        grad = phi.T @ (phi @ probe - f)
        grad_off = grad.copy()
        grad_off[support] = 0.0
        extended = np.union1d(support, top_k_support(grad_off, k))
        v = inner(extended, alpha)
        gamma = hard_threshold(v, k)
        new_support = np.nonzero(gamma)[0]
        alpha_new = inner(new_support, gamma)
        delta = float(np.sqrt(np.sum((alpha_new - alpha) ** 2)))
        alpha_prev = alpha
        alpha, support = alpha_new, np.nonzero(alpha_new)[0]
        if trace is not None:
            trace.record(
                support,
                lp_norm(f - phi @ alpha, 2),
                delta,
                _dist(alpha, alpha_true),
                alpha if keep_iterates else None,
            )
        if delta <= cfg.tolerance * max(float(np.sqrt(alpha @ alpha)), 1e-12):
            termination = "converged"
            break
    return alpha, iterations, termination


def clash_solve(
    phi: np.ndarray,
    f: np.ndarray,
    cfg: PursuitConfig,
    alpha_true: np.ndarray | None = None,
    keep_iterates: bool = False,
) -> tuple[SolverResult, IterateTrace]:
    """Joint sparsity-and-norm pursuit.

    Per iteration: (1) active set expansion - union the current support
    with the k strongest gradient coordinates from its complement;
    (2) greedy descent with shrinkage - l1-constrained least squares over
    the <= 2k extended support; (3) combinatorial selection - prune to the
    k largest entries; (4) de-bias - l1-constrained least squares on the
    pruned support, keeping the norm budget active so every emitted
    iterate satisfies both constraints.  With tau = inf steps 2 and 4 are
    plain restricted least squares and the iterates match subspace
    pursuit's on the same inputs.

    The iteration map can stall on fixed points short of the best
    solution near its recovery phase transition, so with a finite tau the
    solver runs a small deterministic portfolio of warm starts
    (`CONTINUATION_PORTFOLIO`): each member solves the same problem
    through a schedule of reduced norm budgets (fractions of tau), with or
    without momentum in the expansion, ending with the full-budget loop.
    Every stage iterate is feasible for the final constraint set (stage
    budgets never exceed tau).  The portfolio stops early once a run
    reaches a numerically exact fit, or once three consecutive members
    fail to improve the best residual meaningfully (the plateau signals a
    noise floor rather than a recovery problem).  The smallest final residual
    wins, ties keeping the earliest run; the reported trace and iteration
    count are the winning full-budget run's.
    """
    phi = np.asarray(phi, dtype=np.float64)
    f = np.asarray(f, dtype=np.float64)
    m, n = phi.shape
    k = cfg.sparsity
    tau = cfg.tau
    if k > m:
        raise ValueError(f"sparsity {k} exceeds number of measurements {m}")

    if isinstance(cfg.continuation, tuple):
        portfolio = tuple((sched, False) for sched in cfg.continuation)
    elif cfg.continuation == "auto" and np.isfinite(tau):
        portfolio = CONTINUATION_PORTFOLIO
    else:
        portfolio = (((), False),)

    f_norm = float(np.sqrt(f @ f))
    exact_fit = 1e-6 * max(f_norm, 1e-12)
    best: tuple[float, np.ndarray, IterateTrace, int, str] | None = None
    stalls = 0
    for schedule, momentum in portfolio:
        alpha = np.zeros(n)
        for fraction in schedule:
            stage_tau = fraction * tau
            alpha = l1_project(alpha, stage_tau)
            alpha, _, _ = _clash_loop(
                phi, f, k, stage_tau, alpha, cfg, None, False, None, momentum
            )
        trace = IterateTrace()
        alpha, iterations, termination = _clash_loop(
            phi, f, k, tau, l1_project(alpha, tau), cfg,
            alpha_true, keep_iterates, trace, momentum,
        )
        res_norm = lp_norm(f - phi @ alpha, 2)
        if best is None or res_norm < best[0] * (1.0 - 5e-3):
            stalls = 0
        else:
            stalls += 1
        if best is None or res_norm < best[0]:
            best = (res_norm, alpha, trace, iterations, termination)
        if best[0] <= exact_fit or stalls >= 3:
            break

    res_norm, alpha, trace, iterations, termination = best
    result = SolverResult(
        alpha=alpha,
        residual_l2=res_norm,
        residual_q=res_norm,
        history=list(trace.residual_norms),
        iterations=iterations,
        termination=termination,
    )
    return result, trace


def lasso_pg_solve(
    phi: np.ndarray,
    f: np.ndarray,
    tau: float,
    tol: float = 1e-8,
    max_iter: int = 2000,
) -> SolverResult:
    """Projected gradient for min ||f - Phi a||_2^2 over ||a||_1 <= tau.

    Fixed step 1/L with L estimated by power iteration on Phi^T Phi
    (20 iterations, relative tolerance 1e-6).  Stops when the
    projected-gradient mapping norm reaches `tol`.  The history holds the
    squared objective after each step, which is non-increasing for this
    step size.
    """
    phi = np.asarray(phi, dtype=np.float64)
    f = np.asarray(f, dtype=np.float64)
    if not tau >= 0:
        raise ValueError("tau must be >= 0")
    n = phi.shape[1]
    x = np.zeros(n)
    lam = _power_iter_cols(phi)
    if lam == 0.0 or tau == 0.0:
        alpha = l1_project(x, tau)
        r = phi @ alpha - f
        nrm = float(np.sqrt(r @ r))
        return SolverResult(alpha, nrm, nrm, [nrm * nrm], 0, "degenerate")
    step = 1.0 / lam
    r = phi @ x - f
    history: list[float] = []
    termination = "max-iterations"
    iterations = 0
    for _ in range(max_iter):
        iterations += 1
        g = phi.T @ r
        x_new = l1_project(x - step * g, tau)
        moved = float(np.sqrt(np.sum((x_new - x) ** 2)))
        x = x_new
        r = phi @ x - f
        history.append(float(r @ r))
        if moved / step <= tol:
            termination = "converged"
            break
    nrm = float(np.sqrt(r @ r))
    return SolverResult(x, nrm, nrm, history, iterations, termination)


def iht_solve(
    phi: np.ndarray,
    f: np.ndarray,
    k: int,
    step: float | None = None,
    max_iter: int = 500,
    tol: float = 1e-6,
) -> SolverResult:
    """Fixed-step iterative hard thresholding:
    a <- hard_threshold(a - step * Phi^T (Phi a - f), k).

    `step = None` selects 1/L with L from power iteration on Phi^T Phi.
    The history holds the residual 2-norm after each step.
    """
    phi = np.asarray(phi, dtype=np.float64)
    f = np.asarray(f, dtype=np.float64)
    n = phi.shape[1]
    if k > n:
        raise ValueError(f"sparsity {k} exceeds dimension {n}")
    if step is None:
        lam = _power_iter_cols(phi)
        step = 1.0 / lam if lam > 0 else 1.0
    x = np.zeros(n)
    history: list[float] = []
    termination = "max-iterations"
    iterations = 0
    for _ in range(max_iter):
        iterations += 1
        g = phi.T @ (phi @ x - f)
        x_new = hard_threshold(x - step * g, k)
        delta = float(np.sqrt(np.sum((x_new - x) ** 2)))
        x = x_new
        history.append(lp_norm(f - phi @ x, 2))
        if delta <= tol * max(float(np.sqrt(x @ x)), 1e-12):
            termination = "converged"
            break
    nrm = lp_norm(f - phi @ x, 2)
    return SolverResult(x, nrm, nrm, history, iterations, termination)


def contraction_check(
    trace: IterateTrace, rho_bound: float, c1: float, noise_norm: float
) -> ContractionReport:
    """Check the empirical envelope e_{i+1} <= rho * e_i + c1 * ||n||_2 on a
    trace that recorded ground-truth distances."""
    if trace.truth_distances is None or len(trace.truth_distances) < 2:
        raise ValueError("trace has no ground-truth distances to check")
    e = trace.truth_distances
    noise_term = c1 * noise_norm
    violations = [
        (i, e[i + 1], rho_bound * e[i] + noise_term)
        for i in range(len(e) - 1)
        if e[i + 1] > rho_bound * e[i] + noise_term
    ]
    return ContractionReport(not violations, rho_bound, noise_term, violations)


def _dist(alpha: np.ndarray, alpha_true: np.ndarray | None) -> float | None:
    if alpha_true is None:
        return None
    return float(np.sqrt(np.sum((alpha - alpha_true) ** 2)))
