# Standard Imports
import math
import unittest

# Internal Imports
import nearid.errors as e
from nearid.decomposition import (
    build_schedule,
    compute_B,
    feasibility_threshold,
    minimal_feasible_m,
)


class TestComputeB(unittest.TestCase):
    def test_unit_constants(self):
        self.assertEqual(compute_B(1.0, 1.0, 1.0), 6.0)

    def test_second_branch_dominates(self):
        self.assertEqual(compute_B(2.0, 1.0, 2.0), 18.0)

    def test_tiny_alpha_approaches_two(self):
        self.assertAlmostEqual(compute_B(1e-12, 1.0, 1.0), 2.0, places=9)

    def test_non_positive_input_raises(self):
        for args in ((0.0, 1.0, 1.0), (1.0, -1.0, 1.0), (1.0, 1.0, 0.0)):
            with self.assertRaises(e.ConstantsError):
                compute_B(*args)


class TestThreshold(unittest.TestCase):
    def test_value(self):
        self.assertAlmostEqual(feasibility_threshold(6.0, 50), 6.0 * math.log(100.0) / 49.0)
        self.assertAlmostEqual(feasibility_threshold(6.0, 50), 0.5639, places=4)

    def test_single_layer_raises(self):
        with self.assertRaises(e.ScheduleError):
            feasibility_threshold(6.0, 1)

    def test_minimal_m_inverts_the_threshold(self):
        self.assertEqual(minimal_feasible_m(6.0, feasibility_threshold(6.0, 50)), 50)
        for m in (2, 3, 17, 1000):
            self.assertEqual(minimal_feasible_m(2.5, feasibility_threshold(2.5, m)), m)

    def test_minimal_m_is_two_for_loose_targets(self):
        self.assertEqual(minimal_feasible_m(1.0, 100.0), 2)

    def test_minimal_m_needs_positive_epsilon(self):
        with self.assertRaises(e.ScheduleError):
            minimal_feasible_m(6.0, 0.0)


class TestBuildSchedule(unittest.TestCase):
    def test_override_gives_geometric_schedule(self):
        schedule = build_schedule(3, 0.5, 0.1, 1.0, 1.0, c_override=0.1)
        self.assertEqual(schedule.c, 0.1)
        for got, expected in zip(schedule.a, (0.81, 0.9, 1.0)):
            self.assertAlmostEqual(got, expected)
        self.assertEqual(schedule.a[-1], 1.0)

    def test_threshold_epsilon_is_feasible(self):
        B = compute_B(0.1, 1.0, 1.0)
        schedule = build_schedule(20, feasibility_threshold(B, 20), 0.1, 1.0, 1.0)
        self.assertTrue(schedule.feasible)
        self.assertLessEqual(schedule.c, schedule.epsilon / schedule.B * (1.0 + 1e-12))
        self.assertLessEqual(schedule.min_feasible_m, 20)
        self.assertTrue(schedule.near_identity_regime)

    def test_schedule_increases_to_one(self):
        schedule = build_schedule(8, 0.8, 0.2, 1.0, 1.0)
        self.assertEqual(len(schedule.a), 8)
        self.assertTrue(all(x < y for x, y in zip(schedule.a, schedule.a[1:])))
        self.assertEqual(schedule.a[-1], 1.0)

    def test_vacuous_first_layer_bound_takes_the_largest_ratio(self):
        schedule = build_schedule(8, 0.5, 0.1, 1.0, 1.0)
        self.assertTrue(schedule.feasible)
        self.assertAlmostEqual(schedule.B, 2.4)
        self.assertAlmostEqual(schedule.c, 0.5 / 2.4)
        self.assertGreater(schedule.c, 1.0 / 8)
        self.assertEqual(build_schedule(8, 5.0, 0.1, 1.0, 1.0).c, 0.9)

    def test_tight_epsilon_is_infeasible(self):
        schedule = build_schedule(2, 0.01, 1.0, 1.0, 1.0)
        self.assertFalse(schedule.feasible)
        self.assertGreater(schedule.min_feasible_m, 2)
        self.assertAlmostEqual(schedule.c, 0.01 / 6.0)

    def test_large_epsilon_leaves_the_regime(self):
        with self.assertLogs("nearid.decomposition.schedule", level="WARNING"):
            schedule = build_schedule(4, 50.0, 0.1, 1.0, 1.0)
        self.assertFalse(schedule.near_identity_regime)
        self.assertLessEqual(schedule.c, 0.9)

    def test_invalid_parameters_raise(self):
        with self.assertRaises(e.ScheduleError):
            build_schedule(1, 0.5, 0.1, 1.0, 1.0)
        with self.assertRaises(e.ScheduleError):
            build_schedule(2.5, 0.5, 0.1, 1.0, 1.0)
        with self.assertRaises(e.ScheduleError):
            build_schedule(4, 0.0, 0.1, 1.0, 1.0)
        with self.assertRaises(e.ScheduleError):
            build_schedule(4, 0.5, 0.1, 1.0, 1.0, c_override=1.0)

    def test_to_dict(self):
        record = build_schedule(3, 0.5, 0.1, 1.0, 1.0, c_override=0.1).to_dict()
        self.assertEqual(record["m"], 3)
        self.assertEqual(len(record["a"]), 3)
        self.assertIn("threshold", record)
