"""Empirical isometry probing and the on-disk formats.

`rip_probe` draws random s-sparse unit vectors and reports the largest
deviation of ||Phi a|| from 1: an empirical LOWER bound on the matrix's
restricted-isometry constant, useful for sanity checks, never a
certificate.  The probe grows with the sparsity level and with the trial
count.

The same matrices and vectors round-trip through the "SPD1" binary format
the CLI reads and writes.
"""

import tempfile
from pathlib import Path

import numpy as np

from l0l1.bench import rip_report, solve_file
from l0l1.numerics import read_vector, write_matrix, write_vector
from l0l1.synth import ProblemSpec, generate, rip_probe

problem = generate(ProblemSpec(n=400, m=120, k=20, sigma=0.0, seed=31))

print("empirical isometry deviations (400 probes each):")
for s in (5, 20, 60, 120):
    eps = rip_probe(problem.phi, s, 2, trials=400, seed=1)
    print(f"  s={s:3d}: eps_hat = {eps:.4f}")

print("\nfull report with reference-threshold flags:")
print(rip_report(problem.phi, [20, 120], 2, trials=200, seed=1))

with tempfile.TemporaryDirectory() as tmp:
    tmp = Path(tmp)
    write_matrix(tmp / "phi.bin", problem.phi)
    write_vector(tmp / "f.bin", problem.f)
    summary = solve_file(
        str(tmp / "phi.bin"),
        str(tmp / "f.bin"),
        "clash",
        str(tmp / "alpha.bin"),
        k=20,
        tau=problem.tau_star,
    )
    alpha = read_vector(tmp / "alpha.bin")
    print("\nsolve_file round trip:")
    print(f"  residual: {summary['residual_l2']:.3e}")
    print(f"  recovery error: {np.linalg.norm(alpha - problem.alpha_star):.3e}")
    print(f"  equivalent CLI: l0l1 solve --matrix phi.bin --observation f.bin"
          f" --solver clash --k 20 --tau {problem.tau_star:.4f} --out alpha.bin")
