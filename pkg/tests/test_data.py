import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from speclab.data import (
    DataModelSpec,
    class_means,
    empirical_moments,
    jointness_residual,
    make_priors,
    population_spectra,
    sample,
)
from speclab.errors import InvalidScheme, ZeroMatrix


def spec_fig2(**kw):
    base = dict(k=3, d=3, mu=1.0, sigma2=0.125, priors=np.array([0.5, 0.3, 0.2]))
    base.update(kw)
    return DataModelSpec(**base)


class TestPriors:
    def test_explicit(self):
        p = make_priors("explicit", values=[0.6, 0.4])
        np.testing.assert_allclose(p, [0.6, 0.4])

    def test_zipf(self):
        p = make_priors("zipf", k=4)
        np.testing.assert_allclose(p, np.array([1, 1 / 2, 1 / 3, 1 / 4]) / (25 / 12))
        assert p.sum() == pytest.approx(1.0)

    def test_step(self):
        p = make_priors("step", k=4, ratio=3.0, majority_count=1)
        assert p[0] == pytest.approx(3.0 * p[1])
        assert p.sum() == pytest.approx(1.0)

    def test_unknown_scheme(self):
        with pytest.raises(InvalidScheme):
            make_priors("pareto", k=3)

    def test_explicit_normalizes(self):
        np.testing.assert_allclose(make_priors("explicit", values=[0.7, 0.7]), [0.5, 0.5])

    def test_explicit_rejects_nonpositive(self):
        with pytest.raises(InvalidScheme):
            make_priors("explicit", values=[0.7, -0.7])


class TestDataModelSpec:
    def test_snr(self):
        assert spec_fig2().snr == pytest.approx(8.0)

    def test_d_less_than_k_rejected(self):
        with pytest.raises(ValueError):
            spec_fig2(d=2)

    def test_prior_length_mismatch_rejected(self):
        with pytest.raises(ValueError):
            spec_fig2(priors=np.array([0.5, 0.5]))


class TestClassMeans:
    def test_orthonormal_means(self):
        spec = spec_fig2(mu=2.0, d=5)
        M = class_means(spec)
        assert M.shape == (3, 5)
        np.testing.assert_allclose(M @ M.T, 4.0 * np.eye(3), atol=1e-12)

    def test_normalized_gaussian_means(self):
        spec = spec_fig2(d=40, mean_mode="normalized_gaussian")
        M = class_means(spec)
        np.testing.assert_allclose(np.linalg.norm(M, axis=1), np.ones(3), atol=1e-12)


class TestPopulationSpectra:
    def test_fig2_values(self):
        prof = population_spectra(spec_fig2())
        np.testing.assert_allclose(prof.s_yx, [0.5, 0.3, 0.2], atol=1e-15)
        np.testing.assert_allclose(prof.s_xx, [0.625, 0.425, 0.325], atol=1e-15)
        np.testing.assert_allclose(
            prof.ratios, [0.8, 0.3 / 0.425, 0.2 / 0.325], atol=1e-15
        )

    def test_trailing_noise_directions(self):
        spec = spec_fig2(d=6)
        prof = population_spectra(spec)
        assert prof.s_xx.shape == (6,)
        np.testing.assert_allclose(prof.s_xx[3:], spec.sigma2, atol=1e-15)

    def test_priors_sorted_descending(self):
        spec = spec_fig2(priors=np.array([0.2, 0.5, 0.3]))
        prof = population_spectra(spec)
        np.testing.assert_allclose(prof.priors, [0.5, 0.3, 0.2])
        assert prof.minority_index == 2
        assert prof.majority_index == 0

    def test_svd_of_sigma_yx_matches(self):
        # U, s_yx, V must actually be an SVD of the population cross moment.
        spec = spec_fig2(priors=np.array([0.2, 0.5, 0.3]), d=5, mu=1.5)
        prof = population_spectra(spec)
        sigma_yx = prof.sigma_yx()
        np.testing.assert_allclose(
            prof.U @ np.diag(prof.s_yx) @ prof.V[:, : spec.k].T, sigma_yx, atol=1e-12
        )
        np.testing.assert_allclose(prof.U.T @ prof.U, np.eye(3), atol=1e-12)
        np.testing.assert_allclose(prof.V.T @ prof.V, np.eye(5), atol=1e-12)

    def test_sigma_xx_diagonalized_by_v(self):
        spec = spec_fig2(d=5)
        prof = population_spectra(spec)
        np.testing.assert_allclose(
            prof.V.T @ prof.sigma_xx() @ prof.V, np.diag(prof.s_xx), atol=1e-12
        )

    def test_t_star(self):
        prof = population_spectra(spec_fig2())
        assert prof.t_star == pytest.approx(0.2 / 0.325)


class TestSampling:
    def test_shapes_and_one_hot(self):
        batch = sample(spec_fig2(d=4), n=50, seed=0)
        assert batch.X.shape == (50, 4)
        assert batch.Y.shape == (50, 3)
        np.testing.assert_array_equal(batch.Y.sum(axis=1), np.ones(50))
        np.testing.assert_array_equal(np.argmax(batch.Y, axis=1), batch.labels)

    def test_deterministic_in_seed(self):
        a = sample(spec_fig2(), n=10, seed=3)
        b = sample(spec_fig2(), n=10, seed=3)
        np.testing.assert_array_equal(a.X, b.X)
        assert not np.array_equal(a.X, sample(spec_fig2(), n=10, seed=4).X)

    @settings(max_examples=20, deadline=None)
    @given(st.integers(0, 10_000))
    def test_moments_converge_to_population(self, seed):
        # Law of large numbers at loose tolerance: empirical second moments
        # approach the population ones that population_spectra encodes.
        spec = spec_fig2(sigma2=0.01)
        prof = population_spectra(spec)
        batch = sample(spec, n=4000, seed=seed)
        sigma_xx, sigma_yx = empirical_moments(batch)
        assert np.linalg.norm(sigma_xx - prof.sigma_xx()) < 0.1
        assert np.linalg.norm(sigma_yx - prof.sigma_yx()) < 0.1


class TestJointness:
    def test_population_moments_jointly_diagonalizable(self):
        prof = population_spectra(spec_fig2(d=5))
        rep = jointness_residual(prof.sigma_xx(), prof.sigma_yx())
        assert rep.ratio < 1e-12

    def test_misaligned_moments_flagged(self):
        prof = population_spectra(spec_fig2(d=5))
        rng = np.random.Generator(np.random.Philox(0))
        B = rng.standard_normal((5, 5))
        rep = jointness_residual(prof.sigma_xx() + 0.5 * (B + B.T), prof.sigma_yx())
        assert rep.ratio > 0.05

    def test_zero_cross_moment_rejected(self):
        with pytest.raises(ZeroMatrix):
            jointness_residual(np.eye(3), np.zeros((3, 3)))
