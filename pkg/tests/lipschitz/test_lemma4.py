# Standard Imports
import unittest

# ThirdParty Imports
import numpy as np

# Internal Imports
import nearid.errors as e
from nearid.decomposition import compute_B, eval_stack, feasibility_threshold, full_decompose
from nearid.functional import SampledFunction, SampledLayer
from nearid.lipschitz import Ball, Cloud, lemma4_suite
from nearid.maps import IdentityMap, normalize, sample_ball
from nearid.resnet import ResNetParams
from tests.helpers import scaling_map, tanh_map


class TestLemma4Suite(unittest.TestCase):
    def test_identity_holds_with_zero_margins(self):
        report = lemma4_suite(IdentityMap(2), 0.0, Ball(1.0, 2), n=500, seed=0)
        self.assertTrue(report.passed)
        for name in ("sandwich", "inverse", "composition"):
            self.assertEqual(report[name].worst_margin, 0.0)
            self.assertEqual(report[name].violations, 0)

    def test_linear_inverse_deviation_is_exact(self):
        report = lemma4_suite(scaling_map(1.2), 0.2, Ball(1.0, 1), n=500, seed=1)
        self.assertTrue(report.passed)
        self.assertAlmostEqual(report["inverse"].bound, 0.25)
        self.assertAlmostEqual(report["inverse"].observed, 0.2 / 1.2, places=9)
        self.assertAlmostEqual(report["sandwich"].observed, 0.2, places=9)

    def test_tanh_map_passes(self):
        for d in (1, 2, 4):
            report = lemma4_suite(tanh_map(d=d, beta=0.1), 0.1, Ball(1.0, d), n=1000, seed=d)
            self.assertTrue(report.passed, msg=str(report.to_dict()))

    def test_plain_callable_is_inverted_numerically(self):
        report = lemma4_suite(lambda X: X + 0.1 * np.tanh(X), 0.1, Ball(1.0, 1), n=100)
        self.assertTrue(report.passed, msg=str(report.to_dict()))
        self.assertGreater(report["inverse"].observed, 0.0)
        self.assertLessEqual(report["inverse"].observed, 0.1 / 0.9)

    def test_layer_without_inverse_fails_its_inverse_part(self):
        P = sample_ball(50, 2, seed=0)
        layer = SampledLayer(SampledFunction(P, 1.05 * P))
        report = lemma4_suite(layer, 0.1, Cloud(P), n=50)
        self.assertFalse(report["inverse"].passed)
        self.assertIn("no inverse", report["inverse"].detail)
        self.assertFalse(report.passed)

    def test_random_residual_layers_pass(self):
        rng = np.random.default_rng(11)
        for trial in range(1000):
            d = int(rng.integers(1, 5))
            bound = float(rng.uniform(0.05, 0.5))
            layer = ResNetParams.random(1, d, 3, bound=bound, seed=trial).layers()[0]
            domain = Cloud(sample_ball(50, d, seed=trial))
            report = lemma4_suite(layer, bound, domain, n=50, seed=trial)
            self.assertTrue(report.passed, msg="trial {}: {}".format(trial, report.to_dict()))

    def test_decomposed_layers_pass_with_their_certified_deviation(self):
        h = tanh_map(d=2, beta=0.3)
        base = normalize(h)
        epsilon = feasibility_threshold(compute_B(base.alpha, base.R, base.M), 16)
        stack = full_decompose(h, 2, 16, epsilon, n_domain=64, n_pairs=200, n_check=100)
        cloud = sample_ball(64, 2, seed=0, method="halton")
        checked = 0
        for k, (layer, cert) in enumerate(zip(stack.layers, stack.certificates)):
            if layer.kind != "nonlinear":
                continue
            domain = Cloud(eval_stack(stack, cloud, upto=k))
            report = lemma4_suite(layer, cert.estimate, domain, n=200, seed=0)
            self.assertTrue(report.passed, msg="layer {}: {}".format(k, report.to_dict()))
            checked += 1
        self.assertEqual(checked, 16)

    def test_understated_alpha_fails(self):
        report = lemma4_suite(scaling_map(1.2), 0.1, Ball(1.0, 1), n=200, seed=0)
        self.assertFalse(report.passed)
        self.assertGreater(report["sandwich"].violations, 0)

    def test_alpha_outside_regime_raises(self):
        with self.assertRaises(e.RegimeError):
            lemma4_suite(IdentityMap(1), 1.0, Ball(1.0, 1))

    def test_report_serializes(self):
        record = lemma4_suite(IdentityMap(1), 0.0, Ball(1.0, 1), n=50).to_dict()
        names = [p["name"] for p in record["parts"]]
        self.assertEqual(names, ["sandwich", "inverse", "composition"])
