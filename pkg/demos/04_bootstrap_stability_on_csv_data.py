"""Judging estimator stability on a real-style data set via the bootstrap.

Without ground truth, a practical quality signal is how much the estimated
subspace moves when the rows are resampled.  We synthesize a small data set
in the shape of a school-performance study (63 rows, 8 predictors, 4
percentage responses, a single quadratic index), then compare first- and
second-order estimators on bootstrap stability: mean projection distance to
the full-data fit, and the median of one minus the trace correlation.

The same report is available from the command line:

    sdrkit bootstrap --input data.csv --x-columns ... --y-columns ... \
        --method im_gauss --method iv_gauss --gamma 30 --d 1 --B 200
"""

import numpy as np

from sdrkit import DataSet, KernelSpec, MethodSpec, bootstrap_eval

rng = np.random.default_rng(7)
n, p = 63, 8
x = rng.standard_normal((n, p))
direction = np.zeros(p)
direction[0], direction[1] = 0.8, 0.6
signal = x @ direction
y = np.column_stack([
    signal**2 + 0.4 * rng.standard_normal(n),
    np.abs(signal) + 0.4 * rng.standard_normal(n),
    rng.standard_normal(n),
    rng.standard_normal(n),
])
data = DataSet(x, y)

methods = [
    MethodSpec("mddm"),
    MethodSpec("im_k", kernel=KernelSpec("gaussian", 30.0)),
    MethodSpec("iv_pr"),
    MethodSpec("iv_k", kernel=KernelSpec("gaussian", 30.0)),
]
report = bootstrap_eval(data, methods, d=1, B=200, seed=11)

print(f"bootstrap stability over B={report.B} resamples (lower = more stable)\n")
print(f"{'method':10s} {'mean dist':>10s} {'sd':>8s} {'mse':>8s} {'med 1-r':>9s}")
for label, method in report.methods.items():
    print(f"{label:10s} {method.mean_dist:10.3f} {method.sd_dist:8.3f}"
          f" {method.mse_dist:8.3f} {method.median_one_minus_r:9.3f}")

print(
    "\nThe quadratic link leaves no first-order signal, so the inverse-mean"
    "\nestimators jump between resamples while the inverse-variance ones"
    "\nstay put -- the same ordering this analysis shows on real data."
)
