import math
import unittest

import numpy as np

from DiscoJamEngine import (
    ConfigError,
    DirsProfile,
    JammerMode,
    Placement,
    RateReport,
    ScenarioConfig,
    ShapeMismatchError,
    active_jammer_penalty,
    anti_jamming_precoder,
    pathloss_nlos,
    rate_per_lu,
    sample_trial,
    sjnr_realized,
    sjnr_realized_all,
    sjnr_statistical,
    sjnr_statistical_all,
    sum_rate,
    zf_precoder,
)
from DiscoJamEngine.utils import complex_normal, dbm_to_watts


class TestStatisticalSjnr(unittest.TestCase):
    def setUp(self):
        self.rng = np.random.default_rng(31)

    def tearDown(self):
        self.rng = None

    def test_zero_precoder(self):
        H = complex_normal(self.rng, (4, 2))
        sjnr = sjnr_statistical_all(H, np.zeros((4, 2)), [0.5, 0.5], 1e-3)
        np.testing.assert_array_equal(sjnr, np.zeros(2))

    def test_matched_filter_snr(self):
        h = complex_normal(self.rng, (5, 1))
        w = np.sqrt(2.0) * h / np.linalg.norm(h)
        sjnr = sjnr_statistical(0, h, w, None, 0.1)
        self.assertAlmostEqual(sjnr / (2.0 * np.linalg.norm(h) ** 2 / 0.1), 1.0, places=12)

    def test_jamming_terms(self):
        H = np.eye(2, dtype=complex)
        W = np.eye(2, dtype=complex)
        sjnr = sjnr_statistical_all(H, W, [0.5, 0.25], 1.0)
        np.testing.assert_allclose(sjnr, [1.5 / 1.25, 1.25 / 1.5])

    def test_matches_eigenvalue(self):
        config = ScenarioConfig(num_users=3, num_antennas=6, num_elements=128)
        profile = DirsProfile.from_case("c1", num_elements=128)
        trial = sample_trial(config, profile, 5, 0, 0)
        precoder = anti_jamming_precoder(
            trial.H_rpt, trial.closed_form, trial.noise, config.tx_power
        )
        sjnr = sjnr_statistical_all(trial.H_rpt, precoder.W, trial.closed_form, trial.noise)
        np.testing.assert_allclose(sjnr, precoder.eigenvalues, rtol=1e-8)

    def test_extra_interference(self):
        H = np.eye(2, dtype=complex)
        sjnr = sjnr_statistical_all(H, H, None, 1.0, extra=[1.0, 3.0])
        np.testing.assert_allclose(sjnr, [0.5, 0.25])

    def test_errors(self):
        with self.assertRaises(ShapeMismatchError):
            sjnr_statistical_all(np.eye(2), np.eye(3))
        with self.assertRaises(IndexError):
            sjnr_statistical(2, np.eye(2), np.eye(2))


class TestRealizedSjnr(unittest.TestCase):
    def setUp(self):
        self.rng = np.random.default_rng(32)
        self.H = complex_normal(self.rng, (6, 3))
        self.W = zf_precoder(self.H, 0.2).W

    def tearDown(self):
        self.rng = None
        self.H = None
        self.W = None

    def test_single_sub_slot_matches_statistical(self):
        realized = sjnr_realized_all(self.H[None], self.W, 0.01)
        statistical = sjnr_statistical_all(self.H, self.W, None, 0.01)
        np.testing.assert_allclose(realized, statistical, rtol=1e-12)
        self.assertAlmostEqual(sjnr_realized(1, self.H, self.W, 0.01), statistical[1])

    def test_repeated_sub_slots(self):
        stack = np.repeat(self.H[None], 6, axis=0)
        np.testing.assert_allclose(
            sjnr_realized_all(stack, self.W, 0.01),
            sjnr_realized_all(self.H, self.W, 0.01),
            rtol=1e-12,
        )

    def test_ratio_of_means(self):
        H = np.eye(2, dtype=complex)
        stack = np.stack([H, 2 * H])
        sjnr = sjnr_realized_all(stack, np.eye(2), 1.0)
        np.testing.assert_allclose(sjnr, [2.5, 2.5])

    def test_noise_lowers_every_sjnr(self):
        variances = [0.1, 0.3, 0.2]
        stack = complex_normal(self.rng, (6, 6, 3))
        for k in range(3):
            with self.subTest(k=k):
                self.assertGreater(
                    sjnr_statistical(k, self.H, self.W, variances, 0.01),
                    sjnr_statistical(k, self.H, self.W, variances, 0.02),
                )
                self.assertGreater(
                    sjnr_realized(k, stack, self.W, 0.01),
                    sjnr_realized(k, stack, self.W, 0.02),
                )

    def test_sub_slot_average_approaches_statistical(self):
        variances = np.array([0.2, 0.5, 1.0])
        W = zf_precoder(self.H, 1.0).W
        aca = complex_normal(self.rng, (20_000, 6, 3)) * np.sqrt(variances)[None, None, :]
        realized = sjnr_realized_all(self.H[None] + aca, W, 0.1)
        statistical = sjnr_statistical_all(self.H, W, variances, 0.1)
        np.testing.assert_allclose(realized, statistical, rtol=0.05)

    def test_silent_state_is_direct_channel(self):
        config = ScenarioConfig(num_users=2, num_antennas=4, num_elements=64)
        profile = DirsProfile.from_case("c2", JammerMode.TEMPORAL, num_elements=64)
        trial = sample_trial(config, profile, 2, 0, 0)
        np.testing.assert_allclose(trial.H_rpt, trial.H_direct)
        W = zf_precoder(trial.H_direct, trial.powers).W
        sjnr = sjnr_realized_all(trial.H_rpt[None], W, trial.noise)
        self.assertTrue(np.all(sjnr > 0))


class TestRates(unittest.TestCase):
    def test_rate_per_lu(self):
        self.assertAlmostEqual(rate_per_lu([1.0]), 1.0)
        self.assertEqual(rate_per_lu([0.0, 0.0]), 0.0)
        self.assertAlmostEqual(rate_per_lu([3.0, 1.0]), 1.5)
        self.assertAlmostEqual(sum_rate([3.0, 1.0]), 3.0)

    def test_order_of_lus(self):
        sjnr = np.random.default_rng(35).exponential(5.0, 8)
        self.assertAlmostEqual(rate_per_lu(sjnr[::-1]), rate_per_lu(sjnr), places=12)
        self.assertAlmostEqual(rate_per_lu(np.roll(sjnr, 3)), rate_per_lu(sjnr), places=12)

    def test_concave(self):
        rng = np.random.default_rng(36)
        first, second = rng.exponential(5.0, 8), rng.exponential(0.5, 8)
        self.assertGreaterEqual(rate_per_lu([first.mean()]), rate_per_lu(first))
        midpoint = rate_per_lu((first + second) / 2)
        self.assertGreaterEqual(midpoint, (rate_per_lu(first) + rate_per_lu(second)) / 2)

    def test_negative_sjnr(self):
        with self.assertRaises(ConfigError):
            rate_per_lu([1.0, -0.5])
        with self.assertRaises(ConfigError):
            sum_rate([])

    def test_report(self):
        report = RateReport([3.0, 7.0], "ajp")
        self.assertAlmostEqual(report.sum_rate, 5.0)
        self.assertAlmostEqual(report.rate_per_lu, 2.5)
        self.assertIn("ajp", repr(report))


class TestActiveJammer(unittest.TestCase):
    def setUp(self):
        self.rng = np.random.default_rng(33)

    def tearDown(self):
        self.rng = None

    def _placement(self, users):
        positions = np.tile([0.0, 180.0, 0.0], (users, 1))
        return Placement(np.zeros((1, 3)), np.zeros((1, 3)), positions, 0.05)

    def test_silent_jammer(self):
        penalty = active_jammer_penalty((-2.0, 0.0, 5.0), 0.0, self._placement(4), self.rng)
        np.testing.assert_array_equal(penalty, np.zeros(4))

    def test_mean_power(self):
        power = float(dbm_to_watts(-4.0))
        penalty = active_jammer_penalty(
            (-2.0, 0.0, 5.0), power, self._placement(100_000), self.rng
        )
        expected = power * pathloss_nlos(math.sqrt(4 + 32400 + 25))
        self.assertAlmostEqual(penalty.mean() / expected, 1.0, delta=0.03)

    def test_negative_power(self):
        with self.assertRaises(ConfigError):
            active_jammer_penalty((0.0, 0.0, 0.0), -1.0, self._placement(1), self.rng)
