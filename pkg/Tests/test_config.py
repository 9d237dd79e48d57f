import csv
import json
import os
import tempfile
import unittest

from DiscoJamEngine import (
    RESULT_HEADER,
    ConfigError,
    FeedbackModel,
    JammerMode,
    apply_overrides,
    feedback_trace,
    format_results,
    load_config,
    plot_results,
    run_experiment,
    sample_trial,
    spec_from_dict,
    write_channels,
    write_results,
    write_trace,
)

TINY = {
    "scenario": {
        "num_users": 2,
        "num_antennas": 4,
        "num_elements": 64,
        "tx_power_per_lu_dbm": -2,
    },
    "experiment": {"benchmarks": "nojam,ajp", "drops": 2, "realizations": 1, "seed": 3},
}


class TestSpecFromDict(unittest.TestCase):
    def test_empty_document(self):
        spec = spec_from_dict({})
        self.assertEqual(spec.case, "c2")
        self.assertIs(spec.mode, JammerMode.PERSISTENT)
        self.assertIsNone(spec.profile)
        self.assertEqual(spec.scenario.num_users, 12)

    def test_sections(self):
        spec = spec_from_dict(
            {
                "scenario": {"num_users": 4, "num_antennas": 8, "tx_power_per_lu_dbm": -14},
                "profile": {"case": "c1"},
                "experiment": {
                    "mode": "temporal",
                    "sweep": "power=-14:-2:4",
                    "feedback_model": "total",
                    "jammer_position": [1, 2, 3],
                },
            }
        )
        self.assertAlmostEqual(spec.scenario.power_per_lu_dbm, -14.0)
        self.assertEqual(spec.case, "c1")
        self.assertIs(spec.mode, JammerMode.TEMPORAL)
        self.assertIs(spec.feedback_model, FeedbackModel.TOTAL)
        self.assertEqual(spec.jammer_position, (1, 2, 3))
        self.assertEqual(len(spec.grid), 4)

    def test_custom_profile(self):
        spec = spec_from_dict(
            {
                "profile": {
                    "bits": 1,
                    "phases": [0.0, 3.0],
                    "gains": [1.0, 0.5],
                    "probs": [0.4, 0.6],
                }
            }
        )
        self.assertEqual(spec.case, "custom-1bit")
        profile = spec.resolve_profile(spec.scenario)
        self.assertEqual(profile.num_elements, spec.scenario.num_elements)
        self.assertEqual(profile.probs, (0.4, 0.6))

    def test_uniform_profile(self):
        spec = spec_from_dict({"profile": {"bits": 2}})
        self.assertEqual(spec.resolve_profile(spec.scenario).size, 4)

    def test_unknown_keys(self):
        for document in (
            {"extra": {}},
            {"scenario": {"antennas": 4}},
            {"experiment": {"trials": 5}},
            {"profile": {"case": "c1", "bits": 1}},
            {"scenario": {"tx_power_dbm": 10, "tx_power_per_lu_dbm": 0}},
        ):
            with self.subTest(document=document):
                with self.assertRaises(ConfigError):
                    spec_from_dict(document)


class TestLoadConfig(unittest.TestCase):
    def setUp(self):
        self.folder = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.folder.cleanup()

    def _path(self, name):
        return os.path.join(self.folder.name, name)

    def test_round_trip(self):
        path = self._path("tiny.json")
        with open(path, "w", encoding="utf-8") as stream:
            json.dump(TINY, stream)
        spec = load_config(path)
        self.assertEqual(spec.drops, 2)
        self.assertEqual(spec.benchmarks, ("nojam", "ajp"))

    def test_missing_file(self):
        with self.assertRaises(ConfigError):
            load_config(self._path("absent.json"))

    def test_bad_json(self):
        path = self._path("bad.json")
        with open(path, "w", encoding="utf-8") as stream:
            stream.write("{not json")
        with self.assertRaises(ConfigError):
            load_config(path)


class TestOverrides(unittest.TestCase):
    def setUp(self):
        self.spec = spec_from_dict({"profile": {"bits": 1}})

    def tearDown(self):
        self.spec = None

    def test_none_is_ignored(self):
        spec = apply_overrides(self.spec, seed=None, drops=5)
        self.assertEqual(spec.drops, 5)
        self.assertIsNone(spec.seed)

    def test_case_replaces_profile(self):
        spec = apply_overrides(self.spec, case="c1", mode="temporal")
        self.assertIsNone(spec.profile)
        self.assertEqual(spec.case, "c1")
        self.assertIs(spec.mode, JammerMode.TEMPORAL)

    def test_unknown_field(self):
        with self.assertRaises(ConfigError):
            apply_overrides(self.spec, bogus=1)


class TestReport(unittest.TestCase):
    def setUp(self):
        self.folder = tempfile.TemporaryDirectory()
        self.spec = spec_from_dict(TINY)
        self.result = run_experiment(self.spec)

    def tearDown(self):
        self.folder.cleanup()
        self.spec = None
        self.result = None

    def _path(self, name):
        return os.path.join(self.folder.name, name)

    def _read(self, path):
        with open(path, newline="", encoding="utf-8") as stream:
            return list(csv.reader(stream))

    def test_results_csv(self):
        path = self._path("out/results.csv")
        text = write_results(self.result, path)
        self.assertEqual(text, format_results(self.result))
        rows = self._read(path)
        self.assertEqual(tuple(rows[0]), RESULT_HEADER)
        self.assertEqual(len(rows), 3)
        self.assertEqual(rows[1][:4], ["-2", "NoJamming_ZF", "persistent", "c2"])
        self.assertEqual(rows[1][6], "2")
        self.assertEqual(len(rows[1][4].split(".")[1]), 8)

    def test_plot_is_reproducible(self):
        first, second = self._path("a.svg"), self._path("b.svg")
        plot_results(self.result, first)
        plot_results(self.result, second)
        with open(first, encoding="utf-8") as stream:
            svg = stream.read()
        with open(second, encoding="utf-8") as stream:
            self.assertEqual(svg, stream.read())
        self.assertIn("<svg", svg)

    def test_channel_dump(self):
        config = self.spec.scenario
        trial = sample_trial(config, self.spec.resolve_profile(config), 3, 0, 0)
        path = self._path("channels.csv")
        write_channels(trial.channels, path)
        rows = self._read(path)
        self.assertEqual(len(rows), 1 + 64 * 4 + 2 * 64 + 2 * 4)
        self.assertEqual(rows[1][:3], ["G", "0", "0"])

    def test_trace(self):
        path = self._path("trace.csv")
        write_trace(feedback_trace(self.spec, 1), path)
        rows = self._read(path)
        self.assertEqual(rows[0], ["frame", "s", "k", "feedback_power", "estimate"])
        self.assertEqual(len(rows), 1 + 6 * 2)
