import unittest

import numpy as np

from DiscoJamEngine import (
    ConfigError,
    LargeScale,
    Placement,
    ScenarioConfig,
    build_scenario,
    large_scale_fading,
    los_element,
    los_matrix,
    sample_ap_dirs_channel,
    sample_channels,
    sample_direct_channel,
    sample_dirs_lu_channel,
)


def _bulk_placement(users: int, antennas: int, elements: int = 1) -> Placement:
    return Placement(
        np.zeros((antennas, 3)), np.zeros((elements, 3)), np.zeros((users, 3)), 0.05
    )


class TestFarField(unittest.TestCase):
    def setUp(self):
        self.rng = np.random.default_rng(11)

    def tearDown(self):
        self.rng = None

    def test_zero_gain_row(self):
        placement = _bulk_placement(2, 4)
        gains = LargeScale(1.0, np.ones(2), np.array([0.0, 1.0]))
        H_d = sample_direct_channel(placement, gains, self.rng)
        np.testing.assert_array_equal(H_d[0], np.zeros(4))
        self.assertTrue(np.all(np.abs(H_d[1]) > 0))

    def test_unit_variance(self):
        placement = _bulk_placement(1000, 100)
        gains = LargeScale(1.0, np.ones(1000), np.ones(1000))
        H_d = sample_direct_channel(placement, gains, self.rng)
        self.assertAlmostEqual(np.mean(np.abs(H_d) ** 2), 1.0, delta=0.03)
        band = 4.0 * np.sqrt(0.5 / H_d.size)
        self.assertLess(abs(H_d.real.mean()), band)
        self.assertLess(abs(H_d.imag.mean()), band)

    def test_independent_entries(self):
        placement = _bulk_placement(1000, 100)
        gains = LargeScale(1.0, np.ones(1000), np.ones(1000))
        H_d = sample_direct_channel(placement, gains, self.rng)
        correlation = np.mean(H_d[:, 0] * np.conj(H_d[:, 1]))
        self.assertLess(abs(correlation), 4.0 / np.sqrt(1000))

    def test_dirs_lu_scaling(self):
        placement = _bulk_placement(2, 1, elements=50_000)
        gains = LargeScale(1.0, np.array([4.0, 0.25]), np.ones(2))
        H_I = sample_dirs_lu_channel(placement, gains, self.rng)
        self.assertEqual(H_I.shape, (2, 50_000))
        power = np.mean(np.abs(H_I) ** 2, axis=1)
        np.testing.assert_allclose(power, [4.0, 0.25], rtol=0.03)


class TestNearField(unittest.TestCase):
    def setUp(self):
        self.placement = Placement(
            np.array([[0.0, 0.0, 0.0]]),
            np.array([[1.0, 0.0, 0.0], [1.025, 0.0, 0.0]]),
            np.zeros((1, 3)),
            0.05,
        )

    def tearDown(self):
        self.placement = None

    def test_reference_element(self):
        self.assertEqual(los_element(self.placement, 0, 0), 1 + 0j)

    def test_half_wavelength(self):
        value = los_element(self.placement, 1, 0)
        self.assertAlmostEqual(value.real, -1.0, places=9)
        self.assertAlmostEqual(value.imag, 0.0, places=9)

    def test_matrix_matches_elements(self):
        config = ScenarioConfig(num_users=2, num_antennas=4, num_elements=6)
        placement = build_scenario(config, np.random.default_rng(0))
        matrix = los_matrix(placement)
        self.assertEqual(matrix.shape, (6, 4))
        for r in range(6):
            for n in range(4):
                self.assertAlmostEqual(matrix[r, n], los_element(placement, r, n), places=12)
        np.testing.assert_allclose(np.abs(matrix), 1.0)

    def test_index_errors(self):
        with self.assertRaises(IndexError):
            los_element(self.placement, 2, 0)
        with self.assertRaises(IndexError):
            los_element(self.placement, 0, 1)


class TestApDirsChannel(unittest.TestCase):
    def setUp(self):
        self.config = ScenarioConfig(num_users=2, num_antennas=4, num_elements=32)
        self.placement = build_scenario(self.config, np.random.default_rng(2))
        self.large_scale = large_scale_fading(self.placement)
        self.rng = np.random.default_rng(7)

    def tearDown(self):
        self.config = None
        self.placement = None
        self.large_scale = None
        self.rng = None

    def test_pure_los_limit(self):
        G = sample_ap_dirs_channel(self.placement, self.large_scale, 1e12, self.rng)
        scale = np.sqrt(self.large_scale.ap_dirs)
        np.testing.assert_allclose(G, scale * los_matrix(self.placement), atol=1e-5 * scale)

    def test_pure_nlos_variance(self):
        placement = _bulk_placement(1, 100, elements=1000)
        gains = LargeScale(2.0, np.ones(1), np.ones(1))
        G = sample_ap_dirs_channel(placement, gains, 0.0, self.rng, los=np.ones((1000, 100)))
        self.assertAlmostEqual(np.mean(np.abs(G) ** 2) / 2.0, 1.0, delta=0.03)

    def test_negative_rician(self):
        with self.assertRaises(ConfigError):
            sample_ap_dirs_channel(self.placement, self.large_scale, -1.0, self.rng)

    def test_channel_set_shapes(self):
        channels = sample_channels(self.config, self.placement, self.large_scale, self.rng)
        self.assertEqual(channels.G.shape, (32, 4))
        self.assertEqual(channels.H_I.shape, (2, 32))
        self.assertEqual(channels.H_d.shape, (2, 4))
        self.assertEqual(channels.num_users, 2)
        self.assertEqual(channels.num_antennas, 4)
        self.assertEqual(channels.num_elements, 32)

    def test_reproducible(self):
        first = sample_channels(
            self.config, self.placement, self.large_scale, np.random.default_rng(9)
        )
        second = sample_channels(
            self.config, self.placement, self.large_scale, np.random.default_rng(9)
        )
        np.testing.assert_array_equal(first.G, second.G)
        np.testing.assert_array_equal(first.H_d, second.H_d)
