import math
import unittest

import numpy as np

from DiscoJamEngine import (
    ConfigError,
    DirsProfile,
    JammerMode,
    ReflectionState,
    ScenarioConfig,
    ShapeMismatchError,
    aca_channel,
    alpha_bar_temporal,
    build_scenario,
    combined_channel,
    dt_channels,
    large_scale_fading,
    mean_reflection,
    sample_channels,
    sample_frame,
    sample_reflection,
)


class TestProfile(unittest.TestCase):
    def test_one_bit_alphabet(self):
        profile = DirsProfile.from_case("c1")
        self.assertEqual(profile.size, 2)
        expected = [0.8 * np.exp(1j * math.pi / 9), np.exp(1j * 7 * math.pi / 6)]
        np.testing.assert_allclose(profile.alphabet, expected)
        self.assertEqual(profile.probs, (0.25, 0.75))

    def test_ideal_case(self):
        profile = DirsProfile.from_case("C2-ideal", JammerMode.TEMPORAL)
        self.assertEqual(profile.gains, (1.0, 1.0))
        self.assertIs(profile.mode, JammerMode.TEMPORAL)

    def test_uniform(self):
        profile = DirsProfile.uniform(2)
        self.assertEqual(profile.size, 4)
        np.testing.assert_allclose(profile.phases, [0, math.pi / 2, math.pi, 3 * math.pi / 2])
        self.assertEqual(profile.probs, (0.25,) * 4)

    def test_invalid(self):
        with self.assertRaises(ConfigError):
            DirsProfile.from_case("c3")
        with self.assertRaises(ConfigError):
            DirsProfile.one_bit((0.5, 0.6))
        with self.assertRaises(ConfigError):
            DirsProfile(1, (0.0, 1.0), (0.5, 1.2), (0.5, 0.5))
        with self.assertRaises(ConfigError):
            DirsProfile(1, (0.0,), (1.0,), (1.0,))
        with self.assertRaises(ConfigError):
            JammerMode.parse("sometimes")

    def test_mode_parse(self):
        self.assertIs(JammerMode.parse("Temporal"), JammerMode.TEMPORAL)
        self.assertIs(JammerMode.parse(JammerMode.PERSISTENT), JammerMode.PERSISTENT)


class TestReflection(unittest.TestCase):
    def setUp(self):
        self.rng = np.random.default_rng(4)

    def tearDown(self):
        self.rng = None

    def test_degenerate_distribution(self):
        profile = DirsProfile.one_bit((1.0, 0.0), num_elements=64)
        state = sample_reflection(profile, self.rng)
        np.testing.assert_allclose(state.vector, 0.8 * np.exp(1j * math.pi / 9))
        self.assertTrue(np.all(state.indices == 0))

    def test_entries_in_alphabet(self):
        profile = DirsProfile.from_case("c2", num_elements=500)
        state = sample_reflection(profile, self.rng)
        distance = np.min(np.abs(state.vector[:, None] - profile.alphabet[None, :]), axis=1)
        self.assertTrue(np.all(distance < 1e-12))

    def test_frequency(self):
        profile = DirsProfile.from_case("c1", num_elements=100_000)
        state = sample_reflection(profile, self.rng)
        frequency = np.mean(state.indices == 0)
        sigma = math.sqrt(0.25 * 0.75 / 100_000)
        self.assertLess(abs(frequency - 0.25), 4 * sigma)

    def test_silent(self):
        state = ReflectionState.silent(8)
        self.assertTrue(state.is_silent)
        np.testing.assert_array_equal(state.vector, np.zeros(8))


class TestFrame(unittest.TestCase):
    def setUp(self):
        self.rng = np.random.default_rng(5)

    def tearDown(self):
        self.rng = None

    def test_temporal_rpt_is_silent(self):
        profile = DirsProfile.from_case("c2", JammerMode.TEMPORAL, num_elements=128)
        frame = sample_frame(profile, self.rng)
        self.assertTrue(frame.rpt_state.is_silent)
        self.assertTrue(np.all(frame.rpt_state.vector == 0))
        self.assertEqual(len(frame), 6)
        self.assertFalse(any(state.is_silent for state in frame.dt_states))

    def test_persistent_draws(self):
        profile = DirsProfile.from_case("c2", num_elements=128)
        frame = sample_frame(profile, self.rng, 6)
        self.assertFalse(frame.rpt_state.is_silent)
        states = [frame.rpt_state] + frame.dt_states
        self.assertEqual(len(states), 7)
        distinct = {tuple(state.indices) for state in states}
        self.assertEqual(len(distinct), 7)

    def test_states_are_uncorrelated(self):
        profile = DirsProfile.from_case("c2", num_elements=512)
        centre = mean_reflection(profile)
        spread = alpha_bar_temporal(profile) - abs(centre) ** 2
        consecutive, trained = [], []
        for _ in range(50):
            frame = sample_frame(profile, self.rng, 6)
            dt = [state.vector - centre for state in frame.dt_states]
            rpt = frame.rpt_state.vector - centre
            consecutive.extend(np.conj(a) * b for a, b in zip(dt, dt[1:]))
            trained.extend(np.conj(rpt) * b for b in dt)
        for name, products in (("consecutive", consecutive), ("trained", trained)):
            with self.subTest(pair=name):
                products = np.concatenate(products)
                correlation = abs(products.mean()) / spread
                self.assertLess(correlation, 3.0 / math.sqrt(products.size))

    def test_single_sub_slot(self):
        profile = DirsProfile.from_case("c1", num_elements=16)
        self.assertEqual(len(sample_frame(profile, self.rng, 1)), 1)
        with self.assertRaises(ConfigError):
            sample_frame(profile, self.rng, 0)


class TestCombinedChannel(unittest.TestCase):
    def setUp(self):
        self.config = ScenarioConfig(num_users=3, num_antennas=4, num_elements=16)
        placement = build_scenario(self.config, np.random.default_rng(1))
        self.channels = sample_channels(
            self.config, placement, large_scale_fading(placement), np.random.default_rng(2)
        )
        self.profile = DirsProfile.from_case("c2", num_elements=16)
        self.rng = np.random.default_rng(3)

    def tearDown(self):
        self.config = None
        self.channels = None
        self.profile = None
        self.rng = None

    def test_silent_state_gives_direct_channel(self):
        H = combined_channel(self.channels, ReflectionState.silent(16))
        np.testing.assert_array_equal(H, self.channels.H_d.conj().T)

    def test_single_element(self):
        config = ScenarioConfig(num_users=1, num_antennas=2, num_elements=1)
        placement = build_scenario(config, np.random.default_rng(1))
        channels = sample_channels(
            config, placement, large_scale_fading(placement), np.random.default_rng(2)
        )
        phi = 0.8 * np.exp(1j * 0.3)
        H = combined_channel(channels, ReflectionState(np.array([phi]), np.array([0])))
        expected = (channels.H_I[0, 0] * phi * channels.G[0, :] + channels.H_d[0]).conj()
        np.testing.assert_allclose(H[:, 0], expected)

    def test_wrong_state_length(self):
        with self.assertRaises(ShapeMismatchError):
            combined_channel(self.channels, ReflectionState.silent(15))

    def test_aca_identities(self):
        first = sample_reflection(self.profile, self.rng)
        second = sample_reflection(self.profile, self.rng)
        H_first = combined_channel(self.channels, first)
        H_second = combined_channel(self.channels, second)
        np.testing.assert_array_equal(aca_channel(H_first, H_first), np.zeros_like(H_first))
        np.testing.assert_allclose(aca_channel(H_second, H_first), H_second - H_first)
        with self.assertRaises(ShapeMismatchError):
            aca_channel(H_first, H_first[:, :2])

    def test_temporal_aca_is_reflected_path(self):
        profile = self.profile.with_mode(JammerMode.TEMPORAL)
        frame = sample_frame(profile, self.rng)
        H_rpt = combined_channel(self.channels, frame.rpt_state)
        H_dt = combined_channel(self.channels, frame.dt_states[0])
        phi = frame.dt_states[0].vector
        reflected = ((self.channels.H_I * phi[None, :]) @ self.channels.G).conj().T
        np.testing.assert_allclose(aca_channel(H_dt, H_rpt), reflected, atol=1e-18)

    def test_dt_stack(self):
        frame = sample_frame(self.profile, self.rng)
        stack = dt_channels(self.channels, frame)
        self.assertEqual(stack.shape, (6, 4, 3))
        expected = combined_channel(self.channels, frame.dt_states[2])
        np.testing.assert_array_equal(stack[2], expected)
