import unittest

import numpy as np

from DiscoJamEngine import (
    AcaSource,
    ConfigError,
    DirsProfile,
    EstimatorRangeError,
    FeedbackLog,
    FeedbackModel,
    ScenarioConfig,
    ShapeMismatchError,
    anti_jamming_precoder,
    build_scenario,
    collect_feedback,
    estimate_characteristic,
    estimate_characteristics,
    estimate_from_frame,
    feedback_power,
    feedback_powers,
    refresh_precoder,
    sample_trial,
)
from DiscoJamEngine.utils import Stream, complex_normal, trial_rng


class TestFeedbackPower(unittest.TestCase):
    def test_zero_channel(self):
        self.assertEqual(feedback_power(np.zeros(4), 1.0, 2), 0.0)

    def test_total_power(self):
        self.assertAlmostEqual(feedback_power(np.array([1.0, 1j]), 3.0, 3), 2.0)

    def test_decomposed_power(self):
        h_rpt = np.array([1.0, 0.0])
        h_dt = np.array([1.0, 2.0])
        self.assertAlmostEqual(feedback_power(h_dt, 2.0, 1, h_rpt_k=h_rpt), 10.0)
        with self.assertRaises(ShapeMismatchError):
            feedback_power(h_dt, 2.0, 1, h_rpt_k=np.zeros(3))

    def test_vectorized_agrees(self):
        rng = np.random.default_rng(41)
        H_dt = complex_normal(rng, (4, 3))
        H_rpt = complex_normal(rng, (4, 3))
        powers = feedback_powers(H_dt, 1.5, H_rpt=H_rpt)
        for k in range(3):
            self.assertAlmostEqual(
                powers[k], feedback_power(H_dt[:, k], 1.5, 3, h_rpt_k=H_rpt[:, k])
            )

    def test_noise_needs_stream(self):
        with self.assertRaises(ConfigError):
            feedback_power(np.ones(2), 1.0, 1, noise_std=0.1)
        noisy = feedback_power(np.ones(2), 1.0, 1, noise_std=0.1, rng=np.random.default_rng(0))
        self.assertGreaterEqual(noisy, 0.0)

    def test_model_parse(self):
        self.assertIs(FeedbackModel.parse("TOTAL"), FeedbackModel.TOTAL)
        with self.assertRaises(ConfigError):
            FeedbackModel.parse("partial")


class TestFeedbackLog(unittest.TestCase):
    def setUp(self):
        self.feedback = FeedbackLog(2, 3)

    def tearDown(self):
        self.feedback = None

    def test_append_errors(self):
        with self.assertRaises(ShapeMismatchError):
            self.feedback.append([1.0, 2.0, 3.0])
        with self.assertRaises(ConfigError):
            self.feedback.append([1.0, -2.0])
        for _ in range(3):
            self.feedback.append([1.0, 2.0])
        with self.assertRaises(ConfigError):
            self.feedback.append([1.0, 2.0])
        self.assertEqual(self.feedback.count, 3)

    def test_matrix(self):
        self.feedback.append([1.0, 2.0])
        self.feedback.append([3.0, 4.0])
        np.testing.assert_array_equal(self.feedback.matrix(1), [[1.0, 2.0]])
        self.assertEqual(self.feedback.matrix().shape, (2, 2))

    def test_trace_rows(self):
        for _ in range(3):
            self.feedback.append([1.0, 2.0])
        rows = self.feedback.trace_rows(4, np.ones((2, 2)), 1.0)
        self.assertEqual(len(rows), 6)
        self.assertEqual(rows[0][:3], (4, 1, 0))
        self.assertEqual(rows[-1][:3], (4, 3, 1))


class TestEstimator(unittest.TestCase):
    def test_hand_example(self):
        feedback = FeedbackLog(1, 6)
        feedback.append([3.0])
        h_rpt = np.array([1.0, 0.0])
        self.assertAlmostEqual(estimate_characteristic(feedback, 0, h_rpt, 1.0, None, 1), 1.0)

    def test_consistent_feedback_is_zero(self):
        rng = np.random.default_rng(42)
        H_rpt = complex_normal(rng, (4, 2))
        feedback = FeedbackLog(2, 6)
        trained = 2.0 / 2 * np.sum(np.abs(H_rpt) ** 2, axis=0)
        for _ in range(4):
            feedback.append(trained)
        estimates = estimate_characteristics(feedback, H_rpt, 2.0, 4)
        np.testing.assert_allclose(estimates, 0.0, atol=1e-12)

    def test_range(self):
        feedback = FeedbackLog(1, 6)
        feedback.append([1.0])
        feedback.append([1.0])
        with self.assertRaises(EstimatorRangeError):
            estimate_characteristic(feedback, 0, np.ones(2), 1.0, 2, 0)
        with self.assertRaises(EstimatorRangeError):
            estimate_characteristic(feedback, 0, np.ones(2), 1.0, 2, 3)
        with self.assertRaises(IndexError):
            estimate_characteristic(feedback, 1, np.ones(2), 1.0, 2, 1)

    def test_vector_matches_scalar(self):
        rng = np.random.default_rng(43)
        H_rpt = complex_normal(rng, (3, 2))
        feedback = FeedbackLog(2, 6)
        for _ in range(5):
            feedback.append(rng.uniform(0.0, 4.0, size=2))
        for s in (1, 3, 5):
            vector = estimate_characteristics(feedback, H_rpt, 1.5, s)
            for k in range(2):
                scalar = estimate_characteristic(feedback, k, H_rpt[:, k], 1.5, 3, s)
                self.assertAlmostEqual(vector[k], scalar, places=12)
        self.assertEqual(feedback.running_estimates(H_rpt, 1.5).shape, (5, 2))


class TestFrameEstimate(unittest.TestCase):
    def setUp(self):
        self.config = ScenarioConfig(num_users=2, num_antennas=4, num_elements=256, seed=6)
        self.profile = DirsProfile.from_case("c2", num_elements=256)
        self.placement = build_scenario(self.config, trial_rng(6, 0, 0, Stream.PLACEMENT))

    def tearDown(self):
        self.config = None
        self.profile = None
        self.placement = None

    def _trial(self, realization):
        return sample_trial(
            self.config, self.profile, 6, 0, realization, placement=self.placement
        )

    def test_average_estimate_matches_closed_form(self):
        P0 = self.config.tx_power
        ratios = []
        for realization in range(1000):
            trial = self._trial(realization)
            estimate = estimate_from_frame(trial.channels, trial.frame, P0, 6)
            ratios.append(estimate.variances / trial.closed_form.variances)
        self.assertAlmostEqual(float(np.mean(ratios)), 1.0, delta=0.08)

    def test_estimated_statistics(self):
        trial = self._trial(0)
        estimate = estimate_from_frame(
            trial.channels, trial.frame, self.config.tx_power, 2, model="total"
        )
        self.assertIs(estimate.source, AcaSource.ESTIMATED)
        self.assertEqual(estimate.label, "estimated(2)")
        self.assertEqual(len(estimate), 2)

    def test_collect_feedback_count(self):
        trial = self._trial(1)
        feedback, H_rpt = collect_feedback(trial.channels, trial.frame, self.config.tx_power)
        self.assertEqual(feedback.count, 6)
        np.testing.assert_array_equal(H_rpt, trial.H_rpt)
        for count in (0, 7):
            with self.assertRaises(EstimatorRangeError):
                collect_feedback(trial.channels, trial.frame, 1.0, count=count)

    def test_refresh_with_closed_form(self):
        trial = self._trial(2)
        P0 = self.config.tx_power
        refreshed = refresh_precoder(trial.closed_form, trial.H_rpt, trial.noise, P0)
        direct = anti_jamming_precoder(trial.H_rpt, trial.closed_form, trial.noise, P0)
        np.testing.assert_array_equal(refreshed.W, direct.W)
        with self.assertRaises(ConfigError):
            refresh_precoder([-1.0, 1.0], trial.H_rpt, trial.noise, P0)
