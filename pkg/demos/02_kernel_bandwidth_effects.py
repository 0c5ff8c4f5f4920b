"""How the kernel bandwidth trades accuracy against robustness.

For light-tailed errors a large bandwidth is best (the kernel then behaves
like a squared/absolute distance weight); for heavy-tailed errors a small
bandwidth caps the influence of outlying responses.  We sweep gamma on the
linear design under normal and Cauchy errors and print the mean squared
projection distance per bandwidth.
"""

import numpy as np

from sdrkit import ExperimentPlan, KernelSpec, MethodSpec, SimSpec, run_monte_carlo

GAMMAS = [0.5, 2.0, 5.0, 20.0, 80.0]
REPS = 60

for error in ("normal", "cauchy"):
    print(f"\nerror law: {error}")
    print(f"{'gamma':>8s} {'gaussian':>10s} {'laplace':>10s}")
    for gamma in GAMMAS:
        methods = (
            MethodSpec("im_k", kernel=KernelSpec("gaussian", gamma)),
            MethodSpec("im_k", kernel=KernelSpec("laplace", gamma)),
        )
        plan = ExperimentPlan(SimSpec("ex1i", 225, error, seed=3), methods, REPS)
        result = run_monte_carlo(plan)
        mse = {
            label: float(np.mean(out.distances[np.isfinite(out.distances)] ** 2))
            for label, out in result.outcomes.items()
        }
        print(f"{gamma:8.1f} {mse['im_gauss']:10.4f} {mse['im_lap']:10.4f}")

print(
    "\nUnder normal errors the MSE keeps falling as gamma grows; under"
    "\nCauchy errors it is minimized at a small gamma and degrades as the"
    "\nkernel flattens toward a raw distance weight."
)
