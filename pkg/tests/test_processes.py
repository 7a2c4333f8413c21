import numpy as np
import pytest
from scipy import stats

from volterrasim.errors import AlignmentError, ConfigError
from volterrasim.processes import (
    CumulantSpec,
    Ensemble,
    GridSpec,
    RosenblattScheme,
    check_increment_stationarity,
    ensemble_from_csv,
    fbm_covariance_matrix,
    rosenblatt_cumulant,
    rosenblatt_discretization_tolerance,
    rosenblatt_grid_covariance,
    rosenblatt_normalizer,
    rosenblatt_sigma,
    rosenblatt_tail_bound,
    simulate_fbm,
    simulate_rosenblatt,
)


class TestGridSpec:
    def test_times_contain_zero(self):
        g = GridSpec(-1.0, 2.0, 301)
        assert 0.0 in g.times
        assert g.dt == pytest.approx(0.01)

    def test_index_of(self):
        g = GridSpec(0.0, 1.0, 101)
        assert g.index_of(0.5) == 50
        assert g.index_of(0.5 + 1e-12) == 50

    def test_off_grid_rejected(self):
        g = GridSpec(0.0, 1.0, 11)
        with pytest.raises(AlignmentError):
            g.index_of(1.2)

    def test_validation(self):
        with pytest.raises(ValueError):
            GridSpec(1.0, 0.0, 10)
        with pytest.raises(ValueError):
            GridSpec(0.0, 1.0, 1)
        with pytest.raises(ValueError):
            GridSpec(-0.35, 1.0, 10)  # would skip over zero


class TestEnsemble:
    def test_csv_roundtrip(self, tmp_path, fbm_ensemble):
        sub = Ensemble(fbm_ensemble.grid, fbm_ensemble.values[:, :5])
        path = tmp_path / "ens.csv"
        sub.to_csv(path)
        back = ensemble_from_csv(path)
        assert np.array_equal(back.values, sub.values)
        assert back.grid.n_points == sub.grid.n_points

    def test_values_read_only(self, fbm_ensemble):
        with pytest.raises(ValueError):
            fbm_ensemble.values[0, 0] = 1.0

    def test_increments(self, fbm_ensemble):
        inc = fbm_ensemble.increments(0.0, 1.0)
        assert inc.shape == (fbm_ensemble.n_paths,)


class TestFbm:
    def test_zero_at_origin(self, fbm_ensemble):
        assert np.all(fbm_ensemble.at(0.0) == 0.0)

    def test_unit_variance_at_one(self, fbm_ensemble):
        v = fbm_ensemble.at(1.0).var()
        n = fbm_ensemble.n_paths
        assert abs(v - 1.0) <= 4.0 * np.sqrt(2.0 / (n - 1))

    def test_two_sided_covariance(self, fbm_ensemble):
        H = 0.7
        x, y = fbm_ensemble.at(-1.0), fbm_ensemble.at(1.0)
        target = 0.5 * (1.0 + 1.0 - 2.0 ** (2 * H))
        emp = np.mean(x * y)
        se = np.std(x * y) / np.sqrt(len(x))
        assert abs(emp - target) <= 4.0 * se

    def test_determinism_and_offset(self):
        g = GridSpec(0.0, 1.0, 21)
        a = simulate_fbm(g, 0.75, 10, seed=5)
        b = simulate_fbm(g, 0.75, 10, seed=5)
        assert np.array_equal(a.values, b.values)
        tail = simulate_fbm(g, 0.75, 4, seed=5, path_offset=6)
        assert np.array_equal(a.values[:, 6:], tail.values)

    def test_seed_matters(self):
        g = GridSpec(0.0, 1.0, 21)
        a = simulate_fbm(g, 0.75, 10, seed=5)
        c = simulate_fbm(g, 0.75, 10, seed=6)
        assert not np.array_equal(a.values, c.values)

    def test_covariance_matrix_psd(self):
        t = np.linspace(-2, 2, 41)
        C = fbm_covariance_matrix(t[t != 0], 0.8)
        w = np.linalg.eigvalsh(C)
        assert w.min() > -1e-10

    def test_grid_size_guard(self):
        with pytest.raises(ConfigError):
            simulate_fbm(GridSpec(0.0, 1.0, 9000), 0.7, 1, seed=0)


class TestRosenblatt:
    def test_sigma_and_normalizer(self):
        H = 0.75
        assert rosenblatt_sigma(H) == pytest.approx(
            np.sqrt(0.5 * H * (2 * H - 1)))
        assert rosenblatt_normalizer(H) > 0.0

    def test_tail_bound_decreases_in_depth(self):
        b1 = rosenblatt_tail_bound(0.75, 2.0, 1e6)
        b2 = rosenblatt_tail_bound(0.75, 2.0, 1e8)
        assert 0 < b2 < b1

    def test_scheme_respects_tolerance(self, rosenblatt_ensemble):
        ens, scheme = rosenblatt_ensemble
        assert scheme.tail_bound(ens.grid) <= scheme.tail_tol

    def test_variance_matches_grid_covariance(self, rosenblatt_ensemble):
        ens, scheme = rosenblatt_ensemble
        C = rosenblatt_grid_covariance(ens.grid, scheme)
        i = ens.grid.index_of(1.0)
        x = ens.values[i]
        se = np.std(x * x) / np.sqrt(len(x))
        assert abs(x.var() - C[i, i]) <= 4.0 * se

    def test_negative_time_cross_covariance_sign(self, rosenblatt_ensemble):
        # E R_{-1} R_1 = (2 - 2^{2H})/2 < 0 for the two-sided process
        ens, scheme = rosenblatt_ensemble
        x, y = ens.at(-1.0), ens.at(1.0)
        emp = np.mean(x * y)
        assert emp < 0.0
        C = rosenblatt_grid_covariance(ens.grid, scheme)
        i, j = ens.grid.index_of(-1.0), ens.grid.index_of(1.0)
        assert C[i, j] < 0.0

    def test_positive_skewness(self, rosenblatt_ensemble):
        ens, _ = rosenblatt_ensemble
        assert stats.skew(ens.at(1.0)) > 0.5
        # reflexivity: R_0 - R_{-1} has the same (positively skewed) law
        assert stats.skew(-ens.at(-1.0)) > 0.5

    def test_discretization_tolerance_small(self, rosenblatt_ensemble):
        ens, scheme = rosenblatt_ensemble
        tol = rosenblatt_discretization_tolerance(ens.grid, scheme)
        assert tol < 0.05

    def test_determinism_and_offset(self, rosenblatt_ensemble):
        ens, scheme = rosenblatt_ensemble
        again = simulate_rosenblatt(ens.grid, scheme, 3, seed=321,
                                    path_offset=1)
        assert np.array_equal(ens.values[:, 1:4], again.values)

    def test_scheme_validation(self):
        with pytest.raises(ConfigError):
            RosenblattScheme(H=0.75, y_edges=np.linspace(0, 1, 5),
                             substeps=2, tail_tol=1e-3)
        with pytest.raises(ConfigError):
            # unreachable tolerance
            RosenblattScheme.for_grid(GridSpec(0, 1, 11), 0.75,
                                      tail_tol=1e-30)


class TestCumulants:
    def test_kappa2_is_variance(self):
        spec = CumulantSpec(intervals=((0.0, 1.0),), thetas=(1.0,), order=2)
        assert rosenblatt_cumulant(spec, 0.75) == pytest.approx(1.0, rel=1e-3)

    def test_kappa2_scaling(self):
        # Var(R_2) = 2^{2H}
        H = 0.7
        spec = CumulantSpec(intervals=((0.0, 2.0),), thetas=(1.0,), order=2)
        # slower O(w^{2H-1}) rate at H = 0.7 needs a finer mesh
        val = rosenblatt_cumulant(spec, H, n_nodes=1024, rtol=2e-2)
        assert val == pytest.approx(2 ** (2 * H), rel=1e-3)

    def test_kappa3_positive(self):
        spec = CumulantSpec(intervals=((0.0, 1.0),), thetas=(1.0,), order=3)
        assert rosenblatt_cumulant(spec, 0.75) > 0.0

    def test_cumulants_shift_invariant(self):
        H = 0.8
        k3 = rosenblatt_cumulant(
            CumulantSpec(((0.0, 1.0),), (1.0,), 3), H)
        k3_shifted = rosenblatt_cumulant(
            CumulantSpec(((5.0, 6.0),), (1.0,), 3), H)
        assert k3 == pytest.approx(k3_shifted, rel=1e-6)

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            CumulantSpec(((0.0, 1.0),), (1.0,), 5)
        with pytest.raises(ValueError):
            CumulantSpec(((1.0, 0.0),), (1.0,), 2)
        with pytest.raises(ValueError):
            CumulantSpec(((0.0, 1.0),), (1.0, 2.0), 2)


def test_increment_stationarity_fbm(fbm_ensemble):
    reports = check_increment_stationarity(
        fbm_ensemble, intervals=[(0.0, 0.5)], shifts=[0.25, 0.5], seed=17)
    assert all(r.passed for r in reports)


def test_increment_reflexivity_fbm(fbm_ensemble):
    reports = check_increment_stationarity(
        fbm_ensemble, intervals=[(0.0, 0.5), (0.5, 1.0)], shifts=[0.0],
        seed=18, reflexive=True)
    assert all(r.passed for r in reports)
