import numpy as np
import pytest

import oracles
from sdrkit.errors import (
    DimensionMismatch,
    InvalidSpec,
    MissingKernelSpec,
    SliceTooSmall,
    TooFewSamples,
    TooManySlices,
    UnivariateOnly,
)
from sdrkit.estimators import (
    DataSet,
    MethodSpec,
    candidate_matrix,
    center,
    estimate_subspace,
    icmi_id,
    icmi_kernel,
    icmi_pr,
    icvi_kernel,
    icvi_pr,
    mddm,
    save,
    sir,
    subspace_from_candidate,
)
from sdrkit.kernels import KernelSpec
from sdrkit.linalg import subspace_distance

rng = np.random.default_rng(20240603)

GAUSS2 = KernelSpec("gaussian", 2.0)

ALL_SPECS = [
    MethodSpec("im_pr"),
    MethodSpec("im_k", kernel=GAUSS2),
    MethodSpec("iv_pr"),
    MethodSpec("iv_k", kernel=GAUSS2),
    MethodSpec("icmi_id"),
    MethodSpec("cume"),
    MethodSpec("mddm"),
    MethodSpec("sir", slices=3),
    MethodSpec("save", slices=3),
]
# candidate matrices of the form Z' W(Y) Z are exactly equivariant under any
# invertible predictor map; the second-order ones only under orthogonal maps
LINEAR_IN_ZZ = ["im_pr", "im_gauss", "icmi_id", "cume", "mddm", "sir"]
Y_ISOMETRY_INVARIANT = ["im_pr", "im_gauss", "iv_pr", "iv_gauss", "mddm"]


def random_data(n=20, p=3, q=1, seed=None):
    local = np.random.default_rng(seed if seed is not None else rng.integers(2**32))
    return DataSet(local.standard_normal((n, p)), local.standard_normal((n, q)))


class TestCenter:
    def test_two_points(self):
        design = center(np.array([[1.0], [-1.0]]))
        assert np.array_equal(design.mean, [0.0])
        assert np.array_equal(design.Z, [[1.0], [-1.0]])
        assert np.array_equal(design.cov, [[1.0]])

    def test_constant_column(self):
        x = np.column_stack([np.full(6, 3.0), rng.standard_normal(6)])
        design = center(x)
        assert np.abs(design.cov[0]).max() == 0.0
        assert np.abs(design.cov[:, 0]).max() == 0.0

    def test_matches_direct_sum(self):
        x = rng.standard_normal((10, 3))
        design = center(x)
        direct = sum(np.outer(z, z) for z in design.Z) / 10
        assert np.abs(design.cov - direct).max() <= 1e-12
        assert np.abs(design.Z.sum(axis=0)).max() <= 1e-10 * 10

    def test_too_few(self):
        with pytest.raises(TooFewSamples):
            center(np.array([[1.0, 2.0]]))


class TestMethodSpec:
    def test_kernel_required(self):
        with pytest.raises(MissingKernelSpec):
            MethodSpec("im_k")

    def test_kernel_forbidden(self):
        with pytest.raises(InvalidSpec):
            MethodSpec("mddm", kernel=GAUSS2)

    def test_slices_default(self):
        assert MethodSpec("sir").slices == 5

    def test_slices_forbidden(self):
        with pytest.raises(InvalidSpec):
            MethodSpec("im_pr", slices=4)

    def test_unknown_method(self):
        with pytest.raises(InvalidSpec):
            MethodSpec("pca")

    def test_labels(self):
        assert MethodSpec("im_k", kernel=GAUSS2).label == "im_gauss"
        assert MethodSpec("iv_k", kernel=KernelSpec("laplace", 1.0)).label == "iv_lap"
        assert MethodSpec("iv_k", kernel=KernelSpec("rational_quadratic", 1.0)).label == "iv_rq"
        assert MethodSpec("sir").label == "sir"


class TestIcmiPr:
    def test_constant_x(self):
        data = DataSet(np.ones((5, 2)), rng.standard_normal((5, 1)))
        assert np.abs(icmi_pr(data)).max() == 0.0

    def test_n2_zero(self):
        data = DataSet(rng.standard_normal((2, 3)), rng.standard_normal((2, 1)))
        assert np.abs(icmi_pr(data)).max() == 0.0

    def test_brute_force_scalar(self):
        data = random_data(n=4, p=1, q=1, seed=1)
        expect = oracles.icmi_pr(data.X, data.Y)
        assert np.abs(icmi_pr(data) - expect).max() <= 1e-10

    def test_brute_force_multivariate(self):
        data = random_data(n=6, p=3, q=2, seed=2)
        expect = oracles.icmi_pr(data.X, data.Y)
        assert np.abs(icmi_pr(data) - expect).max() <= 1e-10


class TestIcmiKernel:
    def test_constant_y(self):
        data = DataSet(rng.standard_normal((6, 2)), np.ones((6, 1)))
        assert np.abs(icmi_kernel(data, GAUSS2)).max() <= 1e-28

    def test_two_point_closed_form(self):
        data = DataSet(
            np.array([[1.0, 0.0], [-1.0, 0.0]]), np.array([[0.0], [2.0]])
        )
        lam = icmi_kernel(data, KernelSpec("gaussian", 4.0))
        scale = (1.0 - np.exp(-1.0)) / 2.0
        expect = scale * np.diag([1.0, 0.0])
        assert np.abs(lam - expect).max() <= 1e-12

    def test_brute_force(self):
        data = random_data(n=5, p=2, q=2, seed=3)
        expect = oracles.icmi_kernel(data.X, data.Y, oracles.gaussian(2.0))
        assert np.abs(icmi_kernel(data, GAUSS2) - expect).max() <= 1e-12

    def test_psd(self):
        data = random_data(n=12, p=4, q=2, seed=4)
        lam = icmi_kernel(data, GAUSS2)
        assert np.linalg.eigvalsh(lam).min() >= -1e-10 * np.trace(lam)


class TestIcviPr:
    def test_n2_zero(self):
        data = DataSet(rng.standard_normal((2, 2)), rng.standard_normal((2, 1)))
        assert np.abs(icvi_pr(data)).max() == 0.0

    def test_equal_squares_zero(self):
        # p=1 with all Z_i^2 equal makes every centered second moment vanish
        data = DataSet(np.array([[1.0], [-1.0], [1.0], [-1.0]]),
                       np.array([[0.0], [1.0], [2.0], [3.0]]))
        assert np.abs(icvi_pr(data)).max() <= 1e-14

    def test_brute_force(self):
        data = random_data(n=4, p=2, q=1, seed=5)
        lam = icvi_pr(data)
        expect = oracles.icvi_pr(data.X, data.Y)
        assert np.linalg.norm(lam - expect) <= 1e-8 * (1 + np.linalg.norm(lam))


class TestIcviKernel:
    def test_constant_y(self):
        data = DataSet(rng.standard_normal((6, 2)), np.full((6, 1), 2.5))
        lam = icvi_kernel(data, GAUSS2)
        assert np.abs(lam).max() <= 1e-13

    def test_constant_x(self):
        data = DataSet(np.ones((6, 2)), rng.standard_normal((6, 1)))
        assert np.abs(icvi_kernel(data, GAUSS2)).max() == 0.0

    def test_brute_force(self):
        data = random_data(n=5, p=3, q=2, seed=6)
        expect = oracles.icvi_kernel(data.X, data.Y, oracles.gaussian(2.0))
        assert np.abs(icvi_kernel(data, GAUSS2) - expect).max() <= 1e-10

    def test_psd(self):
        data = random_data(n=12, p=3, q=1, seed=7)
        lam = icvi_kernel(data, GAUSS2)
        assert np.linalg.eigvalsh(lam).min() >= -1e-8 * np.trace(lam)


class TestIcmiId:
    def test_constant_x(self):
        data = DataSet(np.full((5, 2), 1.0), rng.standard_normal((5, 1)))
        assert np.abs(icmi_id(data)).max() == 0.0

    def test_constant_y(self):
        data = DataSet(rng.standard_normal((5, 2)), np.zeros((5, 1)))
        assert np.abs(icmi_id(data)).max() <= 1e-28

    def test_univariate_brute_force(self):
        data = DataSet(np.array([[1.0], [0.0], [-1.0]]), np.array([[1.0], [2.0], [3.0]]))
        expect = oracles.icmi_id(data.X, data.Y)
        assert np.abs(icmi_id(data) - expect).max() <= 1e-12

    def test_multivariate_brute_force(self):
        data = random_data(n=6, p=2, q=2, seed=8)
        expect = oracles.icmi_id(data.X, data.Y)
        assert np.abs(icmi_id(data) - expect).max() <= 1e-12

    def test_psd(self):
        data = random_data(n=15, p=3, q=2, seed=9)
        lam = icmi_id(data)
        assert np.linalg.eigvalsh(lam).min() >= -1e-10 * max(np.trace(lam), 1e-30)


class TestMddm:
    def test_constant_y(self):
        data = DataSet(rng.standard_normal((5, 2)), np.full((5, 2), 3.0))
        assert np.abs(mddm(data)).max() == 0.0

    def test_two_point_closed_form(self):
        data = DataSet(np.array([[1.0, 0.0], [-1.0, 0.0]]), np.array([[0.0], [2.0]]))
        assert np.abs(mddm(data) - np.diag([1.0, 0.0])).max() <= 1e-12

    def test_brute_force(self):
        data = random_data(n=5, p=3, q=2, seed=10)
        expect = oracles.mddm(data.X, data.Y)
        assert np.abs(mddm(data) - expect).max() <= 1e-12


class TestSlicedMethods:
    def test_sir_single_slice_zero(self):
        data = random_data(n=9, p=2, seed=11)
        assert np.abs(sir(data, 1)).max() == 0.0

    def test_save_single_slice_zero(self):
        data = random_data(n=9, p=2, seed=12)
        assert np.abs(save(data, 1)).max() == 0.0

    def test_constant_x(self):
        data = DataSet(np.ones((8, 2)), rng.standard_normal((8, 1)))
        assert np.abs(sir(data, 2)).max() == 0.0
        assert np.abs(save(data, 2)).max() == 0.0

    def test_sir_two_slice_hand(self):
        x = np.array([[1.0, 2.0], [2.0, 1.0], [3.0, 3.0],
                      [10.0, 4.0], [11.0, 6.0], [12.0, 5.0]])
        y = np.array([0.1, 0.2, 0.3, 1.1, 1.2, 1.3])
        data = DataSet(x, y[:, None])
        xbar = x.mean(axis=0)
        lo, hi = x[:3].mean(axis=0) - xbar, x[3:].mean(axis=0) - xbar
        expect = 0.5 * np.outer(lo, lo) + 0.5 * np.outer(hi, hi)
        assert np.abs(sir(data, 2) - expect).max() <= 1e-12

    def test_save_two_slice_hand(self):
        local = np.random.default_rng(13)
        x = local.standard_normal((8, 2))
        y = np.arange(8.0)
        data = DataSet(x, y[:, None])
        cov = center(x).cov
        parts = []
        for block in (x[:4], x[4:]):
            m = block.mean(axis=0)
            s = (block - m).T @ (block - m) / 4
            parts.append((cov - s) @ (cov - s))
        expect = 0.5 * parts[0] + 0.5 * parts[1]
        assert np.abs(save(data, 2) - expect).max() <= 1e-12

    def test_ties_go_to_lower_slice(self):
        y = np.array([1.0, 1.0, 1.0, 2.0, 3.0, 4.0])
        data = DataSet(rng.standard_normal((6, 2)), y[:, None])
        # cut at the n/2-th order statistic (1.0); all tied values stay low
        lam = sir(data, 2)
        lo = y <= 1.0
        xbar = data.X.mean(axis=0)
        expect = (lo.sum() / 6) * np.outer(data.X[lo].mean(0) - xbar, data.X[lo].mean(0) - xbar) \
            + ((~lo).sum() / 6) * np.outer(data.X[~lo].mean(0) - xbar, data.X[~lo].mean(0) - xbar)
        assert np.abs(lam - expect).max() <= 1e-12

    def test_multivariate_rejected(self):
        data = random_data(n=10, p=2, q=2, seed=14)
        with pytest.raises(UnivariateOnly):
            sir(data)
        with pytest.raises(UnivariateOnly):
            save(data)

    def test_too_many_slices(self):
        data = random_data(n=4, p=2, seed=15)
        with pytest.raises(TooManySlices):
            sir(data, 5)

    def test_slice_too_small(self):
        data = random_data(n=6, p=2, seed=16)
        with pytest.raises(SliceTooSmall):
            save(data, 6)


class TestEstimateSubspace:
    def test_prewhitened_top_eigenspace(self):
        local = np.random.default_rng(17)
        x = local.standard_normal((40, 3))
        white = np.linalg.cholesky(np.linalg.inv(center(x).cov))
        data = DataSet(x @ white, local.standard_normal((40, 1)))
        assert np.abs(center(data.X).cov - np.eye(3)).max() <= 1e-10
        lam = np.diag([2.0, 1.0, 0.0])
        est = subspace_from_candidate(data, lam, 1)
        assert subspace_distance(est.basis, np.array([1.0, 0.0, 0.0])[:, None]) <= 1e-8
        assert est.eigenvalues[0] == pytest.approx(2.0, abs=1e-9)

    def test_orthonormal_basis(self):
        data = random_data(n=30, p=4, q=1, seed=18)
        est = estimate_subspace(data, MethodSpec("mddm"), 2)
        gram = est.basis.T @ est.basis
        assert np.abs(gram - np.eye(2)).max() <= 1e-10
        assert np.all(np.diff(np.abs(est.eigenvalues)) <= 1e-15)

    def test_d_out_of_range(self):
        data = random_data(n=10, p=3, seed=19)
        with pytest.raises(DimensionMismatch):
            estimate_subspace(data, MethodSpec("mddm"), 4)
        with pytest.raises(DimensionMismatch):
            estimate_subspace(data, MethodSpec("mddm"), 0)

    def test_deterministic(self):
        data = random_data(n=25, p=3, seed=20)
        a = estimate_subspace(data, MethodSpec("im_k", kernel=GAUSS2), 2)
        b = estimate_subspace(data, MethodSpec("im_k", kernel=GAUSS2), 2)
        assert np.array_equal(a.basis, b.basis)

    def test_recovers_linear_direction(self):
        local = np.random.default_rng(21)
        x = local.standard_normal((400, 5))
        beta = np.array([1.0, 1.0, 0.0, 0.0, 0.0]) / np.sqrt(2)
        y = x @ beta + 0.3 * local.standard_normal(400)
        data = DataSet(x, y[:, None])
        for spec in (MethodSpec("im_k", kernel=KernelSpec("gaussian", 20.0)),
                     MethodSpec("sir"), MethodSpec("cume"), MethodSpec("mddm")):
            est = estimate_subspace(data, spec, 1)
            assert subspace_distance(est.basis, beta[:, None]) <= 0.35


def _signal_data(seed, n=24, p=3, q=1):
    """Random data with planted linear + quadratic signal so the subspace
    comparisons below have a clear eigengap."""
    local = np.random.default_rng(seed)
    x = local.standard_normal((n, p))
    direction = local.standard_normal(p)
    direction /= np.linalg.norm(direction)
    signal = x @ direction
    y = np.column_stack(
        [signal + 0.5 * local.standard_normal(n), signal**2 + 0.5 * local.standard_normal(n)]
    )[:, :q]
    return DataSet(x, y)


class TestSharedProperties:
    @pytest.mark.parametrize("spec", ALL_SPECS, ids=lambda s: s.label)
    def test_translation_invariance(self, spec):
        for seed in range(3):
            data = _signal_data(seed + 100)
            shifted = DataSet(data.X + np.array([2.0, -1.0, 0.5]), data.Y + 3.0)
            a = candidate_matrix(data, spec)
            b = candidate_matrix(shifted, spec)
            assert np.abs(a - b).max() <= 1e-10 * (1 + np.abs(a).max())

    @pytest.mark.parametrize(
        "spec",
        [s for s in ALL_SPECS if s.label in Y_ISOMETRY_INVARIANT],
        ids=lambda s: s.label,
    )
    def test_y_isometry_invariance(self, spec):
        for seed in range(3):
            data = _signal_data(seed + 200, q=2) if spec.method != "sir" else None
            data = data or _signal_data(seed + 200)
            local = np.random.default_rng(seed)
            rot, _ = np.linalg.qr(local.standard_normal((data.q, data.q)))
            moved = DataSet(data.X, data.Y @ rot.T + 1.5)
            a = candidate_matrix(data, spec)
            b = candidate_matrix(moved, spec)
            assert np.abs(a - b).max() <= 1e-10 * (1 + np.abs(a).max())

    @pytest.mark.parametrize(
        "spec", [s for s in ALL_SPECS if s.label in LINEAR_IN_ZZ], ids=lambda s: s.label
    )
    def test_x_equivariance_general_linear(self, spec):
        for seed in range(3):
            data = _signal_data(seed + 300)
            local = np.random.default_rng(seed)
            a_map = local.standard_normal((3, 3)) + 2 * np.eye(3)
            moved = DataSet(data.X @ a_map.T + 1.0, data.Y)
            lam = candidate_matrix(data, spec)
            lam_moved = candidate_matrix(moved, spec)
            expect = a_map @ lam @ a_map.T
            assert np.abs(lam_moved - expect).max() <= 1e-8 * (1 + np.abs(expect).max())

    @pytest.mark.parametrize(
        "spec",
        [s for s in ALL_SPECS if s.label in ("iv_pr", "iv_gauss", "save")],
        ids=lambda s: s.label,
    )
    def test_x_equivariance_orthogonal(self, spec):
        # the second-order candidate matrices multiply two Z-quadratics, so
        # general linear maps do not pass through; orthogonal ones do
        for seed in range(3):
            data = _signal_data(seed + 400)
            local = np.random.default_rng(seed)
            rot, _ = np.linalg.qr(local.standard_normal((3, 3)))
            moved = DataSet(data.X @ rot.T + 1.0, data.Y)
            lam = candidate_matrix(data, spec)
            expect = rot @ lam @ rot.T
            lam_moved = candidate_matrix(moved, spec)
            assert np.abs(lam_moved - expect).max() <= 1e-8 * (1 + np.abs(expect).max())

    @pytest.mark.parametrize(
        "spec", [s for s in ALL_SPECS if s.label in LINEAR_IN_ZZ], ids=lambda s: s.label
    )
    def test_subspace_map_under_linear_transform(self, spec):
        data = _signal_data(500, n=40)
        local = np.random.default_rng(500)
        a_map = local.standard_normal((3, 3)) + 2 * np.eye(3)
        moved = DataSet(data.X @ a_map.T, data.Y)
        base = estimate_subspace(data, spec, 1)
        mapped = estimate_subspace(moved, spec, 1)
        expect = np.linalg.inv(a_map).T @ base.basis
        assert subspace_distance(mapped.basis, expect) <= 1e-6

    @pytest.mark.parametrize("spec", ALL_SPECS, ids=lambda s: s.label)
    def test_permutation_invariance(self, spec):
        data = _signal_data(600, n=18)
        local = np.random.default_rng(600)
        perm = local.permutation(18)
        shuffled = DataSet(data.X[perm], data.Y[perm])
        a = candidate_matrix(data, spec)
        b = candidate_matrix(shuffled, spec)
        assert np.abs(a - b).max() <= 1e-10 * (1 + np.abs(a).max())

    def test_factorized_equals_literal_all(self):
        # one consolidated sweep mirroring the acceptance oracle suite
        ker = KernelSpec("laplace", 1.5)
        data = random_data(n=7, p=2, q=2, seed=700)
        pairs = [
            (icmi_pr(data), oracles.icmi_pr(data.X, data.Y)),
            (icvi_pr(data), oracles.icvi_pr(data.X, data.Y)),
            (icmi_kernel(data, ker), oracles.icmi_kernel(data.X, data.Y, oracles.laplace(1.5))),
            (icvi_kernel(data, ker), oracles.icvi_kernel(data.X, data.Y, oracles.laplace(1.5))),
            (icmi_id(data), oracles.icmi_id(data.X, data.Y)),
            (mddm(data), oracles.mddm(data.X, data.Y)),
        ]
        for got, expect in pairs:
            assert np.linalg.norm(got - expect) <= 1e-8 * (1 + np.linalg.norm(expect))
