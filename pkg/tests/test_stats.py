from __future__ import absolute_import
import sys
import unittest
from fractions import Fraction
import numpy as np
sys.path.insert(0, "..")
from phstair import counting, stats, transform
from phstair.errors import InsufficientSample, PreconditionError
from phstair.exact_dist import MarginalLaw
from phstair.model import ModelParams
from phstair.simulate import simulate_ensemble


class TestDkw(unittest.TestCase):
    def test_threshold(self):
        self.assertAlmostEqual(stats.dkw_threshold(100000, 0.01), 0.005147, places=6)
        self.assertAlmostEqual(stats.dkw_threshold(200000, 0.01), 0.00364, places=5)

    def test_simulated_sample_passes(self):
        ensemble = simulate_ensemble(ModelParams(Fraction(1, 2)), 5, 20000, 42)
        report = stats.dkw_cdf_gate(ensemble.final_states(), MarginalLaw(Fraction(1, 2), 5), 0.01)
        self.assertTrue(report.passed, report)
        self.assertEqual(report.sample_size, 20000)
        self.assertIn("p=1/2", report.reference)

    def test_wrong_parameter_fails(self):
        sample = MarginalLaw(0.6, 5).sample(np.random.default_rng(1), 100000)
        report = stats.dkw_cdf_gate(sample, MarginalLaw(0.5, 5), 0.01)
        self.assertFalse(report.passed)
        self.assertGreater(report.statistic, 0.05)

    def test_atom_is_counted(self):
        # The continuous part alone fits, but all mass at 1 is missing.
        law = MarginalLaw(0.5, 2)
        sample = law.sample(np.random.default_rng(2), 50000)
        sample = np.where(sample == 1.0, 0.999999, sample)
        self.assertFalse(stats.dkw_cdf_gate(sample, law, 0.01).passed)

    def test_small_sample(self):
        with self.assertRaises(PreconditionError):
            stats.dkw_cdf_gate(np.ones(999), MarginalLaw(0.5, 0), 0.01)

    def test_calibration(self):
        law = MarginalLaw(0.5, 5)
        rng = np.random.default_rng(123)
        failures = sum(not stats.dkw_cdf_gate(law.sample(rng, 2000), law, 0.05).passed for _ in range(200))
        self.assertLessEqual(failures, 3 * 0.05 * 200)


class TestChiSquare(unittest.TestCase):
    def test_pooling(self):
        self.assertEqual(stats.pool_bins([0.0, 500.0, 500.0]), [[1], [2]])
        self.assertEqual(stats.pool_bins([1.0, 2.0, 3.0, 10.0, 1.0]), [[0, 1, 2], [3, 4]])
        self.assertEqual(stats.pool_bins([1.0, 1.0]), [[0, 1]])

    def test_forced_first_jump(self):
        m = 10000
        ensemble = simulate_ensemble(ModelParams(Fraction(1)), 2, m, 3)
        counts = np.bincount(ensemble.counts(), minlength=3)
        report = stats.chi_square_gate(counts, counting.pmf(Fraction(1), 2), 0.01)
        self.assertEqual(report.detail["bins"], [[1], [2]])
        self.assertEqual(report.detail["expected"], [m / 2.0, m / 2.0])
        self.assertTrue(report.passed, report)

    def test_simulated_counts_pass(self):
        ensemble = simulate_ensemble(ModelParams(Fraction(1, 2)), 5, 20000, 11)
        counts = np.bincount(ensemble.counts(), minlength=6)
        self.assertTrue(stats.chi_square_gate(counts, counting.pmf(Fraction(1, 2), 5), 0.01).passed)

    def test_swapped_bins_fail(self):
        table = counting.pmf(Fraction(1, 2), 5)
        counts = np.random.default_rng(5).multinomial(200000, [float(e) for e in table])
        counts[[0, 1]] = counts[[1, 0]]
        report = stats.chi_square_gate(counts, table, 0.01)
        self.assertFalse(report.passed)

    def test_impossible_counts_fail(self):
        table = counting.pmf(Fraction(1), 2)
        report = stats.chi_square_gate([5, 500, 495], table, 0.01)
        self.assertFalse(report.passed)
        self.assertEqual(report.detail["impossible_counts"], 5)
        report = stats.chi_square_gate([0, 500, 495, 3], table, 0.01)
        self.assertEqual(report.detail["impossible_counts"], 3)

    def test_single_bin(self):
        with self.assertRaises(InsufficientSample):
            stats.chi_square_gate([1000], counting.pmf(Fraction(1, 2), 0), 0.01)

    def test_calibration(self):
        table = counting.pmf(Fraction(9, 10), 8)
        probs = [float(e) for e in table]
        rng = np.random.default_rng(321)
        failures = sum(not stats.chi_square_gate(rng.multinomial(5000, probs), table, 0.05).passed
                       for _ in range(200))
        self.assertLessEqual(failures, 3 * 0.05 * 200)


class TestMomentGates(unittest.TestCase):
    def test_one_step_mean(self):
        ensemble = simulate_ensemble(ModelParams(0.5), 1, 20000, 8)
        report = stats.moment_gate(ensemble.final_states(), 0.75)
        self.assertTrue(report.passed, report)

    def test_constant_sample(self):
        report = stats.moment_gate(np.full(1000, 0.25), 0.25)
        self.assertTrue(report.passed)
        self.assertEqual(report.statistic, 0.0)
        self.assertEqual(report.threshold, 0.0)

    def test_laplace_mean(self):
        ensemble = simulate_ensemble(ModelParams(0.5), 2, 20000, 10)
        exact = transform.laplace_partial_sum(0.5, transform.LaplaceQuery(1.0, 2))
        self.assertTrue(stats.moment_gate(np.exp(-ensemble.partial_sums()), exact).passed)

    def test_wrong_mean_fails(self):
        ensemble = simulate_ensemble(ModelParams(0.5), 1, 20000, 8)
        self.assertFalse(stats.moment_gate(ensemble.final_states(), 1.0).passed)

    def test_frequency(self):
        report = stats.binomial_frequency_gate(5000, 10000, 0.5, "fair coin")
        self.assertTrue(report.passed)
        self.assertFalse(stats.binomial_frequency_gate(6000, 10000, 0.5, "fair coin").passed)
        with self.assertRaises(PreconditionError):
            stats.binomial_frequency_gate(5, 10, 0.5, "fair coin")

    def test_report(self):
        report = stats.GateReport("gate", 0.2, 0.1, 5000, "law")
        self.assertFalse(report.passed)
        self.assertEqual(report.to_dict()["reference"], "law")
        self.assertTrue(stats.GateReport("gate", 0.1, 0.1, 5000, "law").passed)


if __name__ == "__main__":
    unittest.main()
