"""Runtime scaling of the estimator families.

The average-angle estimator sums over all index triples (cubic in n even
after factorization, because the pair-weight matrix itself needs a cubic
sweep), while the kernel and distance estimators only touch pairs.  The
fitted log-log slopes make the asymptotic orders visible directly.
"""

from sdrkit import ExperimentPlan, KernelSpec, MethodSpec, SimSpec, runtime_bench

plan = ExperimentPlan(
    SimSpec("ex2", 100, "normal", seed=5),
    (
        MethodSpec("im_pr"),
        MethodSpec("im_k", kernel=KernelSpec("gaussian", 40.0)),
        MethodSpec("mddm"),
    ),
    replications=3,
)
bench = runtime_bench(plan, [100, 200, 400, 800])

print(f"{'method':10s} {'n':>5s} {'estimator s':>12s} {'with eigen s':>13s}")
for row in bench.rows:
    print(f"{row.label:10s} {row.n:5d} {row.seconds_estimator:12.5f}"
          f" {row.seconds_total:13.5f}")

print("\nfitted log-log slopes (2 = quadratic, 3 = cubic):")
for label, slope in bench.slopes.items():
    print(f"  {label:10s} {slope:.2f}")
