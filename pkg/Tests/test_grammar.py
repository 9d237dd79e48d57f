import unittest

from DiscoJamEngine import BenchmarkTag, GrammarError, parse_benchmarks, parse_sweep, parse_trials


class TestBenchmarkList(unittest.TestCase):
    def test_plain_tags(self):
        tags = parse_benchmarks("nojam, zf,ajp")
        self.assertEqual([t.name for t in tags], ["nojam", "zf", "ajp"])
        self.assertTrue(all(t.parameter is None for t in tags))

    def test_parameters(self):
        tags = parse_benchmarks("ajp_est(1),aj(-4),aj(2.5)")
        self.assertEqual(tags[0], BenchmarkTag("ajp_est", 1.0))
        self.assertEqual([t.canonical for t in tags], ["ajp_est(1)", "aj(-4)", "aj(2.5)"])

    def test_case_insensitive(self):
        tags = parse_benchmarks("ActiveJammer(-4), NoJam")
        self.assertEqual(tags[0].name, "activejammer")
        self.assertEqual(tags[1], BenchmarkTag("nojam"))

    def test_errors(self):
        for text in ("", "   ", "zf,,ajp", "ajp(", "aj(x)", "1zf"):
            with self.subTest(text=text):
                with self.assertRaises(GrammarError):
                    parse_benchmarks(text)


class TestSweep(unittest.TestCase):
    def test_power_range(self):
        sweep = parse_sweep("power=-14:-2:4")
        self.assertEqual(sweep.name, "tx_power_per_lu")
        self.assertEqual(sweep.values, (-14.0, -10.0, -6.0, -2.0))

    def test_default_step(self):
        self.assertEqual(parse_sweep("s=1:6").values, (1.0, 2.0, 3.0, 4.0, 5.0, 6.0))

    def test_aliases(self):
        self.assertEqual(parse_sweep("N_D=256,512").name, "num_elements")
        self.assertEqual(parse_sweep("K=4").name, "num_users")
        self.assertEqual(parse_sweep("d_AD=3:5:1").values, (3.0, 4.0, 5.0))
        self.assertEqual(parse_sweep("tx_power_per_lu=-2").values, (-2.0,))

    def test_stop_not_on_grid(self):
        self.assertEqual(parse_sweep("k=2:9:3").values, (2.0, 5.0, 8.0))

    def test_descending(self):
        self.assertEqual(parse_sweep("power=0:-4:-2").values, (0.0, -2.0, -4.0))

    def test_errors(self):
        for text in ("x=1:2", "power=1:2:0", "power=1:-2:1", "power=", "power 1:2"):
            with self.subTest(text=text):
                with self.assertRaises(GrammarError):
                    parse_sweep(text)


class TestTrials(unittest.TestCase):
    def test_drops_only(self):
        self.assertEqual(parse_trials("100"), (100, None))

    def test_drops_and_realizations(self):
        self.assertEqual(parse_trials("100x20"), (100, 20))
        self.assertEqual(parse_trials("3X2"), (3, 2))

    def test_errors(self):
        for text in ("0", "10x0", "ten", "10x", "-5"):
            with self.subTest(text=text):
                with self.assertRaises(GrammarError):
                    parse_trials(text)
