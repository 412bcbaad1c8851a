# Standard Imports
import unittest

# ThirdParty Imports
import numpy as np

# Internal Imports
import nearid.errors as e
from nearid.decomposition import (
    NonlinearLayer,
    build_schedule,
    decay_sweep,
    eval_stack,
    fit_decay,
    full_decompose,
    split,
)
from nearid.decomposition.sweep import DecayRow
from nearid.maps import AffineMap, ComposedMap, IdentityMap, normalize, sample_ball
from nearid.maps.base import finite_difference_jacobian
from tests.helpers import tanh_map, triangular_map

SMALL = {"n_domain": 64, "n_pairs": 200, "n_check": 100}
DEPTHS = (4, 8, 16, 32, 64)


class TestFullDecompose(unittest.TestCase):
    def test_identity_decomposes_into_identity_layers(self):
        stack = full_decompose(IdentityMap(2), 4, 8, 0.5, **SMALL)
        self.assertEqual(len(stack), 1 + 8 + 4 + 1)
        self.assertTrue(all(layer.is_identity for layer in stack))
        for cert in stack.certificates:
            self.assertEqual(cert.estimate, 0.0)
        self.assertEqual(stack.composition_error, 0.0)
        self.assertTrue(stack.certified)

    def test_translation_lands_in_the_last_layer(self):
        h = AffineMap(np.eye(2), b=[1.0, -1.0])
        stack = full_decompose(h, 2, 4, 0.5, **SMALL)
        moving = [k for k, layer in enumerate(stack) if not layer.is_identity]
        self.assertEqual(moving, [len(stack) - 1])
        np.testing.assert_array_equal(stack[-1].shift, [1.0, -1.0])
        np.testing.assert_allclose(stack.eval([0.2, 0.3]), [1.2, -0.7])
        self.assertLessEqual(stack.composition_error, 1e-12)

    def test_tanh_map_is_reconstructed_and_certified(self):
        h = tanh_map(d=2, beta=0.1)
        stack = full_decompose(h, 4, 16, 0.5, **SMALL)
        self.assertLessEqual(stack.composition_error, 1e-8)
        self.assertTrue(stack.certified, msg=str(stack.passes()))
        self.assertEqual([layer.kind for layer in stack].count("nonlinear"), 16)
        X = sample_ball(20, 2, seed=3)
        np.testing.assert_allclose(stack.eval(X), h.eval(X), atol=1e-8)

    def test_shifted_anchor(self):
        h = tanh_map(d=2, beta=0.2, x0=[0.3, -0.1])
        stack = full_decompose(h, 4, 16, 0.6, certify=False, **SMALL)
        self.assertLessEqual(stack.composition_error, 1e-8)
        self.assertIsNone(stack.certificates[0])
        self.assertTrue(all(v is None for v in stack.passes()))

    def test_manifest(self):
        stack = full_decompose(tanh_map(d=1), 2, 4, 0.9, **SMALL)
        manifest = stack.to_manifest()
        self.assertEqual(manifest["n_layers"], len(stack))
        self.assertEqual(manifest["layers"][0]["kind"], "translation")
        self.assertEqual(manifest["schedule"]["m"], 4)
        self.assertNotIn("factors", manifest["linear"])

    def test_infeasible_schedule_is_rejected(self):
        with self.assertRaises(e.InfeasibleScheduleError) as context:
            full_decompose(tanh_map(d=2), 4, 4, 0.01, **SMALL)
        self.assertIsInstance(context.exception, e.RejectionError)
        self.assertFalse(context.exception.schedule.feasible)
        self.assertGreater(context.exception.schedule.min_feasible_m, 4)

    def test_reversed_orientation_is_rejected(self):
        with self.assertRaises(e.OrientationError):
            full_decompose(AffineMap(np.diag([1.0, -2.0])), 4, 4, 0.5, **SMALL)


class TestEvalStack(unittest.TestCase):
    def setUp(self):
        self.stack = full_decompose(tanh_map(d=2), 2, 4, 0.9, certify=False, **SMALL)

    def test_no_layers_returns_the_input(self):
        np.testing.assert_array_equal(eval_stack(self.stack, [0.1, 0.2], upto=0), [0.1, 0.2])

    def test_prefixes_compose(self):
        X = sample_ball(10, 2, seed=0)
        half = eval_stack(self.stack, X, upto=3)
        rest = eval_stack(self.stack.layers[3:], half)
        np.testing.assert_allclose(rest, eval_stack(self.stack, X), atol=1e-14)

    def test_out_of_range_raises(self):
        with self.assertRaises(e.LayerError):
            eval_stack(self.stack, [0.0, 0.0], upto=len(self.stack) + 1)
        with self.assertRaises(e.LayerError):
            eval_stack(self.stack, [0.0, 0.0], upto=-1)


class TestNonlinearLayer(unittest.TestCase):
    def setUp(self):
        self.base = normalize(tanh_map(d=2, beta=0.3))
        self.layer = NonlinearLayer(2, self.base, 0.5, 1.0)

    def test_round_trip(self):
        X = sample_ball(30, 2, seed=1)
        np.testing.assert_allclose(self.layer.invert(self.layer.eval(X)), X, atol=1e-10)

    def test_jacobian_matches_finite_differences(self):
        X = sample_ball(15, 2, seed=2)
        fd = finite_difference_jacobian(self.layer.eval, X)
        np.testing.assert_allclose(self.layer.jacobian(X), fd, atol=1e-5)

    def test_layers_telescope_to_the_map(self):
        schedule = build_schedule(5, 0.9, self.base.alpha, self.base.R, self.base.M)
        layers = split(self.base, schedule)
        X = sample_ball(25, 2, seed=4)
        np.testing.assert_allclose(eval_stack(layers, X), self.base.eval(X), atol=1e-10)

    def test_split_refuses_infeasible_schedules(self):
        schedule = build_schedule(2, 1e-4, self.base.alpha, self.base.R, self.base.M)
        with self.assertRaises(e.InfeasibleScheduleError):
            split(self.base, schedule)


class TestDecaySweep(unittest.TestCase):
    def test_deviation_decays_with_depth(self):
        rows = decay_sweep(tanh_map(d=1, beta=0.3), ms=(4, 8, 16), m_linear=2, **SMALL)
        self.assertEqual([r.m for r in rows], [4, 8, 16])
        self.assertTrue(all(r.passed for r in rows))
        targets = [r.epsilon_target for r in rows]
        self.assertEqual(targets, sorted(targets, reverse=True))
        fit = fit_decay(rows)
        self.assertGreater(fit.slope, 0.0)
        self.assertTrue(fit.decreasing)
        self.assertEqual(len(fit.to_dict()["relative_residuals"]), 3)

    def test_built_in_maps_meet_the_decay_criteria(self):
        maps = {
            "tanh d=1": tanh_map(d=1),
            "tanh d=2": tanh_map(d=2),
            "tanh d=4": tanh_map(d=4),
            "triangular": triangular_map(),
            "composition": ComposedMap([tanh_map(d=3), triangular_map()]),
        }
        for name, h in maps.items():
            with self.subTest(map=name):
                rows = decay_sweep(
                    h, ms=DEPTHS, m_linear=2, n_domain=64, n_pairs=200, n_check=1000
                )
                self.assertEqual([r.m for r in rows], list(DEPTHS))
                for row in rows:
                    self.assertLessEqual(row.composition_error, 1e-8)
                    self.assertTrue(row.passed, msg=str(row.to_dict()))
                fit = fit_decay(rows)
                self.assertTrue(fit.decreasing, msg=str(fit.to_dict()))
                self.assertLessEqual(fit.max_relative_residual, 0.25)

    def test_fit_needs_two_rows(self):
        row = DecayRow(m=4, epsilon_target=0.5, max_pair=0.1, max_jac=0.1, composition_error=0.0)
        with self.assertRaises(e.DatasetError):
            fit_decay([row])

    def test_row_verdict(self):
        row = DecayRow(m=4, epsilon_target=0.5, max_pair=0.2, max_jac=0.6, composition_error=0.0)
        self.assertEqual(row.max_cert, 0.6)
        self.assertFalse(row.passed)
        self.assertFalse(row.to_dict()["pass"])
