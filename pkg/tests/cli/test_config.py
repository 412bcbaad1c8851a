# Standard Imports
import os
import shutil
import tempfile
import unittest

# Internal Imports
import nearid.errors as e
from nearid.cli import config as cfg
from tests.helpers import load_config, write_config

TANH = {"family": "radial_tanh", "params": {"beta": 0.1}, "d": 2}


class TestResolve(unittest.TestCase):
    def test_defaults_are_filled_in(self):
        resolved = cfg.resolve("decompose", {"map": TANH})
        self.assertEqual(resolved["m_linear"], 4)
        self.assertEqual(resolved["m_nonlinear"], 16)
        self.assertIsNone(resolved["epsilon"])
        self.assertEqual(resolved["seed"], 0)

    def test_seed_override(self):
        self.assertEqual(cfg.resolve("factor", {"matrix": [[1.0]], "seed": 3}, seed=9)["seed"], 9)

    def test_integers_are_accepted_as_numbers(self):
        resolved = cfg.resolve("saddle", {"random_target": {"m": 1, "d": 1, "k": 1}, "lr": 1})
        self.assertEqual(resolved["lr"], 1.0)
        self.assertIsInstance(resolved["lr"], float)
        self.assertEqual(resolved["random_target"]["bound"], 0.2)

    def test_type_errors(self):
        bad = [
            ("factor", {"matrix": [[1.0]], "m": True}),
            ("factor", {"matrix": [[1.0]], "m": 2.5}),
            ("factor", {"matrix": [[1.0, 2.0]]}),
            ("factor", {"matrix": "I"}),
            ("certify", {"map": TANH, "stack": "yes"}),
            ("decompose", {"map": TANH, "sweep": [4, 1]}),
            ("decompose", {"map": TANH, "m_nonlinear": None}),
            ("saddle", {"random_target": {"m": 1, "d": 1, "k": 1}, "init": "ones"}),
            ("frechet", {"random": {"m": 1, "d": 1, "k": 1}, "epsilon": 1.0}),
        ]
        for command, raw in bad:
            with self.assertRaises(e.ConfigError, msg=str(raw)):
                cfg.resolve(command, raw)

    def test_unknown_and_missing_keys(self):
        with self.assertRaises(e.ConfigError):
            cfg.resolve("factor", {"matrix": [[1.0]], "colour": "red"})
        with self.assertRaises(e.ConfigError):
            cfg.resolve("factor", {})
        with self.assertRaises(e.ConfigError):
            cfg.resolve("frechet", {"random": {"m": 1, "d": 1}})
        with self.assertRaises(e.ConfigError):
            cfg.resolve("frechet", {"random": {"m": 1, "d": 1, "k": 1}, "descent": {"step": 1.0}})

    def test_target_sources(self):
        shape = {"m": 1, "d": 1, "k": 1}
        with self.assertRaises(e.ConfigError):
            cfg.resolve("saddle", {"random_target": shape, "theta_star": {"A": [], "B": []}})
        with self.assertRaises(e.ConfigError):
            cfg.resolve("frechet", {})
        with self.assertRaises(e.ConfigError):
            cfg.resolve("frechet", {"random": shape, "target": {"A": [], "B": []}})
        with self.assertRaises(e.ConfigError):
            cfg.resolve("frechet", {"random": shape, "map": TANH})
        with self.assertRaises(e.ConfigError):
            cfg.resolve("frechet", {"random": shape, "target_map": TANH})
        with self.assertRaises(e.ConfigError):
            cfg.resolve("frechet", {"map": TANH, "target_map": {"family": "spline"}})
        resolved = cfg.resolve("frechet", {"map": TANH})
        self.assertEqual((resolved["m_linear"], resolved["m_nonlinear"]), (4, 16))
        self.assertIsNone(resolved["schedule_epsilon"])

    def test_map_is_checked_up_front(self):
        with self.assertRaises(e.ConfigError):
            cfg.resolve("decompose", {"map": {"family": "spline"}})

    def test_unknown_command(self):
        with self.assertRaises(e.ConfigError):
            cfg.resolve("transmogrify", {})

    def test_fixtures_resolve(self):
        for command, name in (
            ("factor", "factor_scalar.json"),
            ("decompose", "decompose_tanh.json"),
            ("certify", "certify_identity.json"),
            ("saddle", "saddle_random.json"),
            ("frechet", "frechet_random.json"),
        ):
            resolved = cfg.resolve(command, load_config(name))
            self.assertIn("seed", resolved)


class TestHash(unittest.TestCase):
    def test_key_order_does_not_matter(self):
        a = cfg.resolve("factor", {"matrix": [[2.0]], "m": 4})
        b = cfg.resolve("factor", {"m": 4, "matrix": [[2.0]]})
        self.assertEqual(cfg.config_hash(a), cfg.config_hash(b))
        self.assertEqual(len(cfg.config_hash(a)), 64)

    def test_defaults_hash_like_explicit_values(self):
        a = cfg.resolve("factor", {"matrix": [[2.0]]})
        b = cfg.resolve("factor", {"matrix": [[2.0]], "m": 4, "seed": 0})
        self.assertEqual(cfg.config_hash(a), cfg.config_hash(b))

    def test_canonical_form(self):
        self.assertEqual(cfg.canonical({"b": 1, "a": [1.0, 2]}), '{"a":[1.0,2],"b":1}')


class TestLoad(unittest.TestCase):
    def setUp(self):
        self.directory = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.directory)

    def test_reads_an_object(self):
        path = write_config(self.directory, {"matrix": [[1.0]]})
        self.assertEqual(cfg.load(path), {"matrix": [[1.0]]})

    def test_rejects_invalid_json(self):
        with self.assertRaises(e.ConfigError):
            cfg.load(write_config(self.directory, "{"))

    def test_rejects_non_objects(self):
        with self.assertRaises(e.ConfigError):
            cfg.load(write_config(self.directory, "[1, 2]"))

    def test_missing_file(self):
        with self.assertRaises(OSError):
            cfg.load(os.path.join(self.directory, "missing.json"))
