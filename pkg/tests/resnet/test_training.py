# Standard Imports
import math
import os
import shutil
import tempfile
import unittest

# ThirdParty Imports
import numpy as np

# Internal Imports
import nearid.errors as e
from nearid.resnet import (
    Dataset,
    ResNetParams,
    finite_difference_grad,
    grad,
    loss,
    make_saddle_instance,
    train_gd,
)
from tests.helpers import small_network


class TestSaddleInstance(unittest.TestCase):
    def test_scalar_example(self):
        theta_star = ResNetParams([[[0.1]]], [[[1.0]]])
        data = make_saddle_instance(theta_star, 100, 1.0, seed=0)
        self.assertEqual(len(data), 100)
        self.assertEqual(math.fsum(data.X[:, 0]), 0.0)
        self.assertGreater(data.meta["displacement"], 0.0)
        self.assertEqual(data.meta["generator"], theta_star.digest())

    def test_odd_size_includes_the_origin(self):
        data = make_saddle_instance(small_network(d=3), 7, 1.0, seed=1)
        np.testing.assert_array_equal(data.X[-1], np.zeros(3))
        for j in range(3):
            self.assertEqual(math.fsum(data.X[:, j]), 0.0)

    def test_identity_target_is_rejected(self):
        theta = ResNetParams([np.zeros((2, 3))], [np.ones((3, 2))])
        with self.assertRaises(e.IdentityTargetError) as context:
            make_saddle_instance(theta, 50, 1.0)
        self.assertIsInstance(context.exception, e.RejectionError)

    def test_too_few_samples_raise(self):
        with self.assertRaises(e.DatasetError):
            make_saddle_instance(small_network(), 1, 1.0)

    def test_zero_network_is_a_suboptimal_critical_point(self):
        rng = np.random.default_rng(3)
        for trial in range(10):
            m, d = (int(v) for v in rng.integers(1, 5, size=2))
            k = int(rng.integers(1, 9))
            theta_star = ResNetParams.random(m, d, k, bound=0.2, seed=trial)
            data = make_saddle_instance(theta_star, 200, 1.0, seed=trial)
            zero = ResNetParams.zeros(m, d, k)
            np.testing.assert_array_equal(grad(zero, data).flatten(), np.zeros(zero.size))
            self.assertLessEqual(np.abs(finite_difference_grad(zero, data).flatten()).max(), 1e-6)
            self.assertGreater(loss(zero, data), 0.0)
            self.assertEqual(loss(theta_star, data), 0.0)


class TestTrainGD(unittest.TestCase):
    def setUp(self):
        self.theta_star = small_network(m=2, d=2, k=3, bound=0.2, seed=8)
        self.data = make_saddle_instance(self.theta_star, 60, 1.0, seed=8)

    def test_zero_start_is_stuck(self):
        zero = ResNetParams.zeros(2, 2, 3)
        run = train_gd(zero, self.data, lr=0.5, steps=1000)
        self.assertEqual(run.theta, zero)
        self.assertEqual(len(set(run.losses)), 1)
        self.assertGreater(run.losses[0], 0.0)
        self.assertEqual(max(run.grad_norms), 0.0)
        self.assertFalse(run.diverged)
        self.assertEqual(run.steps, 1000)

    def test_generating_network_stays_optimal(self):
        run = train_gd(self.theta_star, self.data, lr=0.1, steps=20)
        self.assertEqual(run.losses, (0.0,) * 21)

    def test_perturbed_start_descends(self):
        rng = np.random.default_rng(9)
        noise = self.theta_star.unflatten(1e-2 * rng.standard_normal(self.theta_star.size))
        run = train_gd(self.theta_star + noise, self.data, lr=0.05, steps=100)
        for before, after in zip(run.losses, run.losses[1:]):
            self.assertLessEqual(after, before * (1.0 + 1e-12))
        self.assertLess(run.losses[-1], run.losses[0])

    def test_divergence_is_detected(self):
        theta = small_network(m=2, d=2, k=3, bound=0.5, seed=1)
        X = np.array([[0.5, 0.5]])
        run = train_gd(theta, (X, X + 1e3), lr=1e3, steps=50)
        self.assertTrue(run.diverged)
        self.assertLess(run.steps, 50)

    def test_rows(self):
        run = train_gd(ResNetParams.zeros(1, 2, 3), self.data, lr=0.1, steps=2)
        rows = run.rows()
        self.assertEqual(len(rows), 3)
        self.assertIsNone(rows[-1][2])

    def test_invalid_settings_raise(self):
        with self.assertRaises(e.ConfigError):
            train_gd(self.theta_star, self.data, lr=0.0, steps=10)
        with self.assertRaises(e.ConfigError):
            train_gd(self.theta_star, self.data, lr=0.1, steps=-1)


class TestDataset(unittest.TestCase):
    def setUp(self):
        self.directory = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.directory)

    def test_csv_round_trip(self):
        data = make_saddle_instance(small_network(), 11, 1.0, seed=2)
        path = os.path.join(self.directory, "dataset.csv")
        data.save(path)
        loaded = Dataset.load(path)
        np.testing.assert_array_equal(loaded.X, data.X)
        np.testing.assert_array_equal(loaded.Y, data.Y)
        self.assertEqual(loaded.R, 1.0)
        self.assertEqual(loaded.meta, data.meta)

    def test_header_comes_first(self):
        text = Dataset([[0.1]], [[0.2]], 1.0, meta={"seed": 3}).to_csv()
        lines = text.splitlines()
        self.assertEqual(lines[0], '# {"R": 1.0, "d": 1, "n": 1, "seed": 3}')
        self.assertEqual(lines[1], "x_1,y_1")

    def test_missing_header_raises(self):
        with self.assertRaises(e.DatasetError):
            Dataset.from_csv("x_1,y_1\n0.1,0.2\n")

    def test_wrong_column_count_raises(self):
        with self.assertRaises(e.DatasetError):
            Dataset.from_csv('# {"R": 1.0, "d": 1}\nx_1,y_1\n0.1,0.2,0.3\n')

    def test_non_numeric_entry_raises(self):
        with self.assertRaises(e.DatasetError):
            Dataset.from_csv('# {"R": 1.0, "d": 1}\nx_1,y_1\n0.1,abc\n')

    def test_inputs_outside_the_ball_raise(self):
        with self.assertRaises(e.DatasetError):
            Dataset([[2.0]], [[2.0]], 1.0)

    def test_empty_dataset_raises(self):
        with self.assertRaises(e.DatasetError):
            Dataset(np.empty((0, 2)), np.empty((0, 2)), 1.0)
