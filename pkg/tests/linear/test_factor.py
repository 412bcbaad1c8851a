# Standard Imports
import json
import math
import unittest

# ThirdParty Imports
import numpy as np
from scipy import linalg

# Internal Imports
import nearid.errors as e
from nearid.linear import C_F, allocate_seats, factor_near_identity, gamma_of, rotation_log
from tests.helpers import random_rotation, well_conditioned_matrix


def rotation(theta):
    return np.array([[math.cos(theta), -math.sin(theta)], [math.sin(theta), math.cos(theta)]])


class TestGamma(unittest.TestCase):
    def test_identity(self):
        self.assertEqual(gamma_of(np.eye(3)), 0.0)

    def test_diagonal(self):
        self.assertAlmostEqual(gamma_of(np.diag([2.0, 0.5])), 2.0 * math.log(2.0))

    def test_scalar(self):
        self.assertAlmostEqual(gamma_of([[math.e]]), 2.0)

    def test_singular_matrix_raises(self):
        with self.assertRaises(e.ConditioningError):
            gamma_of(np.zeros((2, 2)))


class TestFactorNearIdentity(unittest.TestCase):
    def test_identity_gives_zero_factors(self):
        fac = factor_near_identity(np.eye(3), 4)
        self.assertEqual(fac.m, 4)
        for A in fac.factors:
            np.testing.assert_array_equal(A, np.zeros((3, 3)))
        self.assertEqual(fac.max_norm, 0.0)

    def test_scalar_stretch_splits_evenly(self):
        fac = factor_near_identity([[2.0]], 4)
        for A in fac.factors:
            self.assertAlmostEqual(float(A[0, 0]), 2.0 ** 0.25 - 1.0, places=12)
        self.assertEqual(fac.seats, {"rotation": 0, "stretch": 4})

    def test_rotation_splits_into_smaller_rotations(self):
        fac = factor_near_identity(rotation(math.pi / 2), 8)
        for A in fac.factors:
            np.testing.assert_allclose(np.eye(2) + A, rotation(math.pi / 16), atol=1e-12)
            self.assertAlmostEqual(np.linalg.norm(A, 2), 2.0 * math.sin(math.pi / 32), places=12)
        self.assertLessEqual(fac.reconstruction_error, 1e-12)

    def test_product_order(self):
        D = rotation(0.7) @ np.diag([3.0, 0.5])
        fac = factor_near_identity(D, 6)
        np.testing.assert_allclose(fac.product(), D, atol=1e-12)

    def test_one_factor_merges_both_blocks(self):
        D = rotation(0.3) @ np.diag([2.0, 1.0])
        fac = factor_near_identity(D, 1)
        self.assertEqual(fac.m, 1)
        np.testing.assert_allclose(np.eye(2) + fac.factors[0], D, atol=1e-12)

    def test_reversed_orientation_raises(self):
        with self.assertRaises(e.OrientationError):
            factor_near_identity(np.diag([1.0, -1.0]), 4)

    def test_singular_matrix_raises(self):
        with self.assertRaises(e.ConditioningError):
            factor_near_identity([[1.0, 1.0], [1.0, 1.0]], 4)

    def test_zero_factors_raise(self):
        with self.assertRaises(e.ScheduleError):
            factor_near_identity(np.eye(2), 0)

    def test_non_square_matrix_raises(self):
        with self.assertRaises(e.DimensionError):
            factor_near_identity(np.ones((2, 3)), 4)

    def test_target_bound_is_recorded(self):
        D = np.diag([2.0, 0.5])
        fac = factor_near_identity(D, 16)
        self.assertEqual(fac.c_f, C_F)
        self.assertAlmostEqual(fac.target_bound, C_F * (gamma_of(D) + math.pi) / 16)
        record = json.loads(json.dumps(fac.to_dict()))
        self.assertEqual(len(record["factors"]), 16)
        self.assertTrue(record["within_target"])

    def test_random_well_conditioned_matrices(self):
        rng = np.random.default_rng(2024)
        for trial in range(100):
            d = int(rng.integers(1, 9))
            D = well_conditioned_matrix(d, rng)
            self.assertLessEqual(np.linalg.cond(D), 100.0 + 1e-9)
            previous = math.inf
            for m in (4, 16, 64):
                fac = factor_near_identity(D, m)
                self.assertLessEqual(fac.reconstruction_error, 1e-9, msg="trial {}".format(trial))
                self.assertTrue(fac.within_target, msg="trial {}, m={}".format(trial, m))
                self.assertLessEqual(fac.max_norm, previous * (1.0 + 1e-12) + 1e-15)
                previous = fac.max_norm
            self.assertLess(previous, 1.0)


class TestRotationLog(unittest.TestCase):
    def test_log_is_skew_and_exponentiates_back(self):
        rng = np.random.default_rng(5)
        for d in (2, 3, 5, 8):
            Q = random_rotation(d, rng)
            S = rotation_log(Q)
            np.testing.assert_allclose(S, -S.T, atol=1e-14)
            np.testing.assert_allclose(linalg.expm(S), Q, atol=1e-10)

    def test_half_turn(self):
        S = rotation_log(-np.eye(2))
        np.testing.assert_allclose(linalg.expm(S), -np.eye(2), atol=1e-12)
        self.assertAlmostEqual(np.linalg.norm(S, 2), math.pi)

    def test_reflection_raises(self):
        with self.assertRaises(e.OrientationError):
            rotation_log(np.diag([1.0, -1.0]))


class TestAllocateSeats(unittest.TestCase):
    def test_larger_block_gets_more_seats(self):
        self.assertEqual(allocate_seats([2.0, 1.0], 3), [2, 1])

    def test_zero_blocks_get_no_seat(self):
        self.assertEqual(allocate_seats([1.0, 0.0], 3), [3, 0])
        self.assertEqual(allocate_seats([0.0, 0.0], 4), [0, 0])

    def test_allocation_only_grows_with_m(self):
        norms = [math.pi / 3, 1.7]
        previous = allocate_seats(norms, 2)
        for m in range(3, 40):
            seats = allocate_seats(norms, m)
            self.assertEqual(sum(seats), m)
            self.assertTrue(all(a >= b for a, b in zip(seats, previous)))
            previous = seats
