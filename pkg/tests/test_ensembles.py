from __future__ import annotations

import math

import numpy as np
import pytest
from scipy import stats as spstats

from logfreeze import ensembles as en
from logfreeze.specfun import DomainError

TWO_PI = 2.0 * math.pi


class TestSeeding:
    def test_bit_identical_replay(self):
        a = en.sample_cue_phases(16, en.Seed(123, 4))
        b = en.sample_cue_phases(16, en.Seed(123, 4))
        assert np.array_equal(a.phases, b.phases)

    def test_streams_differ(self):
        a = en.sample_cue_phases(16, en.Seed(123, 0))
        b = en.sample_cue_phases(16, en.Seed(123, 1))
        assert not np.array_equal(a.phases, b.phases)

    def test_rem_and_fourier_replay(self):
        s = en.Seed(9, 2)
        assert np.array_equal(
            en.sample_circular_rem(32, 1e-6, s).values,
            en.sample_circular_rem(32, 1e-6, s).values,
        )
        assert np.array_equal(
            en.sample_fourier_field(32, 128, s).values,
            en.sample_fourier_field(32, 128, s).values,
        )


class TestCuePhases:
    def test_range_and_count(self):
        pv = en.sample_cue_phases(64, en.Seed(1))
        assert pv.n == 64 and len(pv.phases) == 64
        assert np.all((0 <= pv.phases) & (pv.phases < TWO_PI))

    def test_size_limits(self):
        with pytest.raises(DomainError):
            en.sample_cue_phases(1, en.Seed(0))
        with pytest.raises(DomainError):
            en.sample_cue_phases(5000, en.Seed(0))

    def test_trace_moments(self):
        # E|Tr U|^2 = 1 and E|Tr U^2|^2 = 2 at N = 8, alongside an
        # independently implemented Haar sampler as oracle
        n, reps = 8, 20000
        rng = np.random.default_rng(5)
        t1 = np.empty(reps)
        t2 = np.empty(reps)
        for i in range(reps):
            ph = en.sample_cue_phases(n, en.Seed(55, i)).phases
            z = np.exp(1j * ph)
            t1[i] = abs(z.sum()) ** 2
            t2[i] = abs((z**2).sum()) ** 2
        for vals, target in ((t1, 1.0), (t2, 2.0)):
            se = vals.std(ddof=1) / math.sqrt(reps)
            assert abs(vals.mean() - target) < 3 * se

        oracle = np.empty(2000)
        for i in range(len(oracle)):
            u = spstats.unitary_group.rvs(n, random_state=rng)
            oracle[i] = abs(np.trace(u @ u)) ** 2
        se_o = oracle.std(ddof=1) / math.sqrt(len(oracle))
        assert abs(oracle.mean() - t2.mean()) < 4 * math.hypot(se_o, t2.std() / math.sqrt(reps))

    def test_phase_uniformity(self):
        pooled = np.concatenate(
            [en.sample_cue_phases(16, en.Seed(77, i)).phases for i in range(2000)]
        )
        counts, _ = np.histogram(pooled, bins=32, range=(0, TWO_PI))
        chi2 = ((counts - counts.mean()) ** 2 / counts.mean()).sum()
        p_value = spstats.chi2.sf(chi2, df=31)
        assert p_value > 1e-4


class TestCharpolyGrid:
    def test_matches_direct_product(self):
        for n in (4, 17, 32):
            pv = en.sample_cue_phases(n, en.Seed(3, n))
            grid = en.log_charpoly_grid(pv)
            z = np.exp(1j * pv.phases)
            direct = np.array(
                [-2.0 * np.sum(np.log(np.abs(1.0 - z * np.exp(-1j * t)))) for t in grid.thetas]
            )
            assert np.max(np.abs(grid.values - direct) / np.maximum(np.abs(direct), 1.0)) < 1e-10

    def test_single_factor_geometry(self):
        pv = en.PhaseVector(1, np.array([math.pi]))
        grid = en.log_charpoly_grid(pv, n_grid=4, offset=0.0)
        assert grid.values[0] == pytest.approx(-2.0 * math.log(2.0), abs=1e-14)

    def test_full_circle_log_mean(self):
        n = 32
        pv = en.sample_cue_phases(n, en.Seed(11))
        grid = en.log_charpoly_grid(pv)
        bound = n * math.log(grid.n_grid) / grid.n_grid
        assert abs(np.mean(grid.values)) < 4.0 * bound

    def test_exact_hit_is_clamped(self):
        pv = en.PhaseVector(2, np.array([0.0, math.pi]))
        grid = en.log_charpoly_grid(pv, n_grid=8, offset=0.0)
        assert np.all(np.isfinite(grid.values))
        assert grid.values.max() <= 1400.0 + 10.0

    def test_oversampling_guard(self):
        pv = en.sample_cue_phases(8, en.Seed(2))
        with pytest.raises(DomainError):
            en.log_charpoly_grid(pv, n_grid=16)


class TestCircularRem:
    def test_two_site_covariance(self):
        cov = en.rem_covariance(2, 0.0)
        assert cov[0, 1] == pytest.approx(-2.0 * math.log(2.0))
        assert cov[0, 0] == pytest.approx(2.0 * math.log(2.0))

    def test_covariance_symmetry_and_circulant(self):
        cov = en.rem_covariance(16, 1e-6)
        assert np.allclose(cov, cov.T)
        assert np.allclose(cov[0, 3], cov[5, 8])

    def test_empirical_covariance(self):
        m, reps = 16, 60000
        sampler = en.CircularRemSampler(m, 1e-6)
        draws = sampler.draw(en.Seed(17).generator(), reps)
        emp = draws.T @ draws / reps
        cov = en.rem_covariance(m, 1e-6)
        se = np.sqrt((np.outer(np.diag(cov), np.diag(cov)) + cov**2) / reps)
        assert np.max(np.abs(emp - cov) / se) < 5.0

    def test_not_positive_definite_reports_floor(self):
        with pytest.raises(DomainError, match="admissible"):
            en.CircularRemSampler(64, 0.0)

    def test_size_guard(self):
        with pytest.raises(DomainError):
            en.CircularRemSampler(5000, 1e-6)


class TestFourierField:
    def test_grid_mean_exactly_zero(self):
        f = en.sample_fourier_field(64, 256, en.Seed(4))
        assert abs(f.values.mean()) < 1e-13 * np.abs(f.values).max()

    def test_pointwise_variance(self):
        k, reps = 64, 4000
        rng = en.Seed(21).generator()
        vals = np.stack([en._fourier_values(k, 256, rng) for _ in range(reps)])
        target = 2.0 * np.sum(1.0 / np.arange(1, k + 1))
        pooled = vals.var(axis=0).mean()
        # grid points correlate, so keep a generous band
        assert abs(pooled - target) < 0.1 * target

    def test_covariance_at_pi(self):
        k, reps = 64, 30000
        rng = en.Seed(22).generator()
        acc = 0.0
        for _ in range(reps):
            v = en._fourier_values(k, 256, rng)
            acc += v[0] * v[128]
        emp = acc / reps
        ns = np.arange(1, k + 1)
        target = 2.0 * np.sum(np.cos(math.pi * ns) / ns)
        assert abs(emp - target) < 0.12

    def test_grid_guard(self):
        with pytest.raises(DomainError):
            en.sample_fourier_field(64, 100, en.Seed(0))


class TestPartitionFunction:
    def test_zero_temperature_limit(self):
        pv = en.sample_cue_phases(16, en.Seed(6))
        grid = en.log_charpoly_grid(pv)
        assert en.partition_function(grid, 1e-12, 16) == pytest.approx(
            math.log(16.0), abs=1e-9
        )

    def test_single_term_lower_bound(self):
        pv = en.sample_cue_phases(16, en.Seed(8))
        grid = en.log_charpoly_grid(pv)
        beta = 1.7
        lower = math.log(16 * grid.arc_length / (TWO_PI * grid.n_grid)) - beta * grid.values.min()
        assert en.partition_function(grid, beta, 16) >= lower

    def test_rotation_invariance_bit_exact(self):
        pv = en.sample_cue_phases(12, en.Seed(10))
        grid = en.log_charpoly_grid(pv, n_grid=96)
        alpha = 7 * (TWO_PI / 96)
        rotated = en.PhaseVector(12, np.mod(pv.phases + alpha, TWO_PI))
        grid_rot = en.log_charpoly_grid(rotated, n_grid=96, offset=grid.offset + alpha)
        assert en.partition_function(grid, 0.8, 12) == en.partition_function(grid_rot, 0.8, 12)


class TestExtremesAndMeasures:
    def test_refinement_never_increases(self):
        for i in range(10):
            grid = en.log_charpoly_grid(en.sample_cue_phases(24, en.Seed(30, i)))
            ext = en.field_extremes(grid)
            assert ext.min_value <= grid.values.min() + 1e-12

    def test_single_factor_extreme(self):
        pv = en.PhaseVector(1, np.array([1.0]))
        grid = en.log_charpoly_grid(pv, n_grid=4096)
        ext = en.field_extremes(grid)
        assert ext.min_value == pytest.approx(-2.0 * math.log(2.0), abs=1e-6)
        assert ext.argmin == pytest.approx(1.0 + math.pi, abs=1e-3)

    def test_sojourn_monotone_and_bounded(self):
        grid = en.log_charpoly_grid(en.sample_cue_phases(64, en.Seed(31)))
        xs = np.array([0.05, 0.2, 0.4, 0.6, 0.8])
        mu = en.sojourn_measure(grid, xs, 64)
        assert np.all(np.diff(mu) <= 0)
        assert 0.0 < mu[0] < 1.0

    def test_box_coarsen_basics(self):
        grid = en.log_charpoly_grid(en.sample_cue_phases(32, en.Seed(32)))
        abs_grid = en.FieldGrid(grid.arc_length, grid.n_grid, grid.offset,
                                np.exp(-0.5 * grid.values))
        assert en.box_coarsen(abs_grid, 8, 0.0) == pytest.approx(1.0)
        assert en.box_coarsen(abs_grid, 8, 1.0) == pytest.approx(abs_grid.values.mean())
        with pytest.raises(DomainError):
            en.box_coarsen(abs_grid, 7, 2.0)
