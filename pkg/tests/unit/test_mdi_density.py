"""
Unit tests for the grid histogram, the weighted least squares tilt fit and KL^min.
"""

import numpy as np
import pytest
from scipy.stats import norm

from src.core.domain.basis import BasisFunction, BasisSet
from src.core.domain.density import GridHistogram, TiltModel
from src.core.ports.exceptions import EmptyInputError, InvalidRangeError, SingularDesignError
from src.core.services.mdi_density import MdiDensity
from src.core.services.nonlinearities import Nonlinearities


MICA2 = Nonlinearities.resolve_basis("mica2")
MICA4 = Nonlinearities.resolve_basis("mica4")


def gibbs_histogram(beta, basis=MICA2, size=500, grid_range=(-5.0, 5.0)) -> GridHistogram:
    """Histogram whose frequencies are exactly step * phi * (1 + beta^T G)."""
    lo, hi = grid_range
    step = (hi - lo) / size
    centers = lo + (np.arange(size) + 0.5) * step
    values, _, _ = Nonlinearities.design(basis, centers)
    freqs = step * norm.pdf(centers) * (1.0 + values @ np.asarray(beta, dtype=float))
    return GridHistogram(centers=centers, step=step, freqs=freqs, n_samples=1)


def dense_wls(h: GridHistogram, basis: BasisSet) -> np.ndarray:
    """Independent weighted least squares: scale rows by sqrt(w) and use lstsq."""
    weights = h.step * np.exp(-0.5 * h.centers ** 2) / np.sqrt(2 * np.pi)
    design = np.column_stack([Nonlinearities.evaluate(f, h.centers)[0] for f in basis.functions])
    targets = h.freqs / weights - 1.0
    root = np.sqrt(weights)
    beta, *_ = np.linalg.lstsq(design * root[:, None], targets * root, rcond=None)
    return beta


class TestBuildHistogram:
    """Test cases for build_histogram."""

    def test_hand_counted_example(self):
        """Test samples {-1, -1, 1, 1} with L = 2 on (-2, 2)."""
        h = MdiDensity.build_histogram(np.array([-1.0, -1.0, 1.0, 1.0]), 2, (-2.0, 2.0))
        assert h.step == 2.0
        np.testing.assert_allclose(h.centers, [-1.0, 1.0])
        np.testing.assert_allclose(h.freqs, [0.5, 0.5])
        assert h.clipped == 0

    def test_single_point_fills_one_bin(self):
        """Test that identical samples put all mass in one bin."""
        h = MdiDensity.build_histogram(np.full(10, 0.013), 500, (-5.0, 5.0))
        assert h.freqs.max() == 1.0
        assert np.count_nonzero(h.freqs) == 1

    def test_bins_are_closed_on_the_right(self):
        """Test that a sample on a bin edge belongs to the lower bin."""
        h = MdiDensity.build_histogram(np.array([0.0]), 2, (-2.0, 2.0))
        np.testing.assert_allclose(h.freqs, [1.0, 0.0])

    def test_every_interior_edge_goes_left(self):
        """Test that each of the 499 interior edges of the default grid lands in its lower bin."""
        edges = -5.0 + np.arange(501) * (10.0 / 500)
        h = MdiDensity.build_histogram(edges[1:-1], 500, (-5.0, 5.0))
        np.testing.assert_array_equal(h.freqs * 499, np.r_[np.ones(499), 0.0])
        assert h.clipped == 0

    def test_range_end_points(self):
        """Test that hi is the last bin and lo is outside."""
        h = MdiDensity.build_histogram(np.array([-5.0, 5.0]), 500, (-5.0, 5.0))
        assert h.clipped == 1
        assert h.freqs[-1] == 0.5

    def test_outside_samples_are_clipped(self):
        """Test that samples outside (lo, hi] are dropped and counted."""
        h = MdiDensity.build_histogram(np.array([-2.0, -7.0, 0.5, 9.0]), 4, (-2.0, 2.0))
        assert h.clipped == 3
        assert h.freqs.sum() == pytest.approx(0.25)

    def test_gaussian_frequencies_match_prior_mass(self, gaussian_samples):
        """Test max |q - step*phi| < 0.006 for 10^5 standard normal samples."""
        h = MdiDensity.build_histogram(gaussian_samples, 500, (-5.0, 5.0))
        assert np.max(np.abs(h.freqs - MdiDensity.gaussian_weights(h))) < 0.006
        assert h.freqs.sum() + h.clipped / h.n_samples == pytest.approx(1.0, abs=1e-12)

    def test_centers_are_uniform(self, gaussian_samples):
        """Test strictly increasing centers with spacing step."""
        h = MdiDensity.build_histogram(gaussian_samples, 500, (-5.0, 5.0))
        np.testing.assert_allclose(np.diff(h.centers), h.step, atol=1e-12)
        assert h.lo == pytest.approx(-5.0)
        assert h.hi == pytest.approx(5.0)

    def test_empty_input(self):
        """Test that no samples raises EmptyInputError."""
        with pytest.raises(EmptyInputError):
            MdiDensity.build_histogram(np.array([]), 10, (-1.0, 1.0))

    @pytest.mark.parametrize("size,grid_range", [(1, (-1.0, 1.0)), (10, (1.0, 1.0)), (10, (2.0, -2.0))])
    def test_invalid_grid(self, size, grid_range):
        """Test that L < 2 or lo >= hi raises InvalidRangeError."""
        with pytest.raises(InvalidRangeError):
            MdiDensity.build_histogram(np.array([0.1]), size, grid_range)


class TestFitTiltWls:
    """Test cases for fit_tilt_wls."""

    def test_gaussian_histogram_needs_no_tilt(self):
        """Test that q = step*phi gives beta = 0."""
        model = MdiDensity.fit_tilt_wls(gibbs_histogram([0.0, 0.0]), MICA2, ridge=0.0)
        np.testing.assert_allclose(model.beta, [0.0, 0.0], atol=1e-12)

    def test_recovers_in_span_tilt(self):
        """Test that q = step*phi*(1 + 0.1 G2bar) recovers beta = (0, 0.1)."""
        model = MdiDensity.fit_tilt_wls(gibbs_histogram([0.0, 0.1]), MICA2, ridge=0.0)
        np.testing.assert_allclose(model.beta, [0.0, 0.1], atol=1e-8)

    def test_matches_independent_solver(self):
        """Test the normal-equation solve against a dense lstsq oracle on 50 random histograms."""
        rng = np.random.default_rng(50)
        for _ in range(50):
            samples = rng.standard_normal(2000) * rng.uniform(0.7, 1.3) + rng.uniform(-0.3, 0.3)
            h = MdiDensity.build_histogram(samples, 200, (-5.0, 5.0))
            model = MdiDensity.fit_tilt_wls(h, MICA2, ridge=0.0)
            np.testing.assert_allclose(model.beta, dense_wls(h, MICA2), rtol=1e-9, atol=1e-10)

    def test_residual_is_weight_orthogonal(self, rng):
        """Test that D^T W (D beta - r) vanishes at the solution."""
        h = MdiDensity.build_histogram(rng.laplace(size=5000) / np.sqrt(2), 500, (-5.0, 5.0))
        model = MdiDensity.fit_tilt_wls(h, MICA2, ridge=0.0)
        weights = MdiDensity.gaussian_weights(h)
        design, _, _ = Nonlinearities.design(MICA2, h.centers)
        targets = (h.freqs - weights) / weights
        gradient = design.T @ (weights * (design @ model.beta - targets))
        assert np.max(np.abs(gradient)) < 1e-8 * np.linalg.norm(design.T @ (weights * targets)) + 1e-12

    def test_gaussian_samples_give_small_beta(self, gaussian_samples):
        """Test ||beta|| < 0.05 for 10^5 standard normal samples."""
        h = MdiDensity.build_histogram(gaussian_samples, 500, (-5.0, 5.0))
        model = MdiDensity.fit_tilt_wls(h, MICA2)
        assert np.linalg.norm(model.beta) < 0.05

    def test_mica4_basis_is_solvable(self, rng):
        """Test that the four-function basis fits without a singular design."""
        h = MdiDensity.build_histogram(rng.exponential(size=5000) - 1.0, 500, (-5.0, 5.0))
        model = MdiDensity.fit_tilt_wls(h, MICA4)
        assert model.beta.shape == (4,)
        assert np.all(np.isfinite(model.beta))

    def test_too_few_weighted_bins(self):
        """Test that a design with fewer bins than functions is singular."""
        h = GridHistogram(centers=np.array([0.0]), step=1.0, freqs=np.array([1.0]), n_samples=1)
        with pytest.raises(SingularDesignError):
            MdiDensity.fit_tilt_wls(h, MICA2, ridge=0.0)


class TestKlMin:
    """Test cases for kl_min, partition_integral and diagnostics."""

    def test_zero_tilt_is_near_zero(self, gaussian_samples):
        """Test that beta = 0 gives KL^min = 1 - sum(step*phi) ~ 0."""
        h = MdiDensity.build_histogram(gaussian_samples, 500, (-5.0, 5.0))
        zero = TiltModel.zero(MICA2)
        assert abs(MdiDensity.kl_min(zero, h)) < 1e-6
        assert MdiDensity.partition_integral(zero, h) == pytest.approx(1.0, abs=1e-6)

    def test_gaussian_null(self, gaussian_samples):
        """Test kl_min < 0.01 and partition within 0.05 of 1 for Gaussian samples."""
        h = MdiDensity.build_histogram(gaussian_samples, 500, (-5.0, 5.0))
        model = MdiDensity.fit_tilt_wls(h, MICA2)
        assert MdiDensity.kl_min(model, h) < 0.01
        assert MdiDensity.partition_integral(model, h) == pytest.approx(1.0, abs=0.05)

    def test_bimodal_data_is_non_gaussian(self, rng):
        """Test that a strongly bimodal sample has positive KL^min."""
        samples = np.concatenate([rng.normal(-1.0, 0.3, 5000), rng.normal(1.0, 0.3, 5000)])
        samples = samples / samples.std()
        h = MdiDensity.build_histogram(samples, 500, (-5.0, 5.0))
        model = MdiDensity.fit_tilt_wls(h, MICA2)
        assert MdiDensity.kl_min(model, h) > 0.0

    def test_matches_continuous_integral(self):
        """Test the discretized KL^min of a small Gibbs tilt against quadrature."""
        h = gibbs_histogram([0.05, 0.1])
        model = TiltModel(beta=np.array([0.05, 0.1]), basis=MICA2)
        assert MdiDensity.kl_min(model, h) == pytest.approx(MdiDensity.kl_min_continuous(model), abs=2e-3)

    def test_fitted_beta_is_a_local_maximum(self):
        """Test that +-0.05 perturbations do not raise KL^min by more than 1e-6."""
        h = gibbs_histogram([0.02, 0.02])
        model = MdiDensity.fit_tilt_wls(h, MICA2, ridge=0.0)
        base = MdiDensity.kl_min(model, h)
        for k in range(2):
            for delta in (-0.05, 0.05):
                beta = np.array(model.beta)
                beta[k] += delta
                assert MdiDensity.kl_min(TiltModel(beta=beta, basis=MICA2), h) <= base + 1e-6

    def test_permuting_basis_keeps_value(self, rng):
        """Test invariance under a joint permutation of basis and beta."""
        h = MdiDensity.build_histogram(rng.uniform(-1.7, 1.7, 4000), 500, (-5.0, 5.0))
        beta = np.array([0.1, -0.2, 0.01, 0.3])
        swapped = BasisSet((BasisFunction.G1, BasisFunction.G0, BasisFunction.G2BAR, BasisFunction.G1BAR))
        a = MdiDensity.kl_min(TiltModel(beta=beta, basis=MICA4), h)
        b = MdiDensity.kl_min(TiltModel(beta=beta[::-1].copy(), basis=swapped), h)
        assert a == pytest.approx(b, abs=1e-12)

    def test_doubling_grid_is_stable(self, rng):
        """Test that L = 500 and L = 1000 give kl_min within 5e-3."""
        samples = rng.uniform(-np.sqrt(3), np.sqrt(3), 20000)
        values = []
        for size in (500, 1000):
            h = MdiDensity.build_histogram(samples, size, (-5.0, 5.0))
            values.append(MdiDensity.kl_min(MdiDensity.fit_tilt_wls(h, MICA2), h))
        assert abs(values[0] - values[1]) < 5e-3

    def test_huge_beta_is_clamped(self, gaussian_samples):
        """Test that ||beta|| = 100 stays finite and is flagged."""
        h = MdiDensity.build_histogram(gaussian_samples, 500, (-5.0, 5.0))
        model = TiltModel(beta=np.array([0.0, 100.0]), basis=MICA2)
        diagnostics = MdiDensity.diagnose(model, h)
        assert np.isfinite(diagnostics.partition)
        assert np.isfinite(diagnostics.kl_min)
        assert diagnostics.clamped is True

    def test_diagnose_agrees_with_separate_calls(self, rng):
        """Test diagnose() against kl_min() and partition_integral()."""
        h = MdiDensity.build_histogram(rng.exponential(size=3000) - 1.0, 500, (-5.0, 5.0))
        model = MdiDensity.fit_tilt_wls(h, MICA2)
        diagnostics = MdiDensity.diagnose(model, h)
        assert diagnostics.kl_min == pytest.approx(MdiDensity.kl_min(model, h), abs=1e-15)
        assert diagnostics.partition == pytest.approx(MdiDensity.partition_integral(model, h), abs=1e-15)
        assert diagnostics.clamped is False
