#!/usr/bin/env python3
"""
Oracle tests: brute-force helpers and the verification suite.
"""

import json
import unittest

from tametilt.errors import TametiltError
from tametilt.oracle import (
    OracleBounds,
    branch_count_oracle,
    brute_addt,
    brute_hom,
    brute_realizability,
    verify_suite,
)
from tametilt.registry import TubeRegistry, kronecker, preset
from tametilt.resolving import closure, tube_addt
from tametilt.tube import HomResult, RegPoint, Tube


class TestBruteForce(unittest.TestCase):
    """Test the brute-force oracles against hand-computed values"""

    def setUp(self):
        self.tube = Tube("a", 3)

    def test_brute_hom(self):
        t = self.tube
        self.assertEqual(brute_hom(t.point(1, 1), t.point(1, 2)), 1)
        self.assertEqual(brute_hom(t.point(1, 2), t.point(2, 1)), 1)
        self.assertEqual(brute_hom(t.point(1, 1), t.point(2, 1)), 0)
        self.assertEqual(brute_hom(t.point(1, 1), Tube("b", 3).point(1, 1)), 0)

    def test_brute_hom_bounds(self):
        t = self.tube
        with self.assertRaises(TametiltError) as ctx:
            brute_hom(RegPoint.pruefer(t.qs(1)), t.point(1, 1))
        self.assertEqual(ctx.exception.check, "oracle.finite_only")
        with self.assertRaises(TametiltError) as ctx:
            brute_hom(t.point(1, 10), t.point(1, 1))
        self.assertEqual(ctx.exception.check, "oracle.length_bound")

    def test_brute_addt(self):
        """Test Add T from the definition on the empty filter and on one simple"""
        t = self.tube
        empty = brute_addt(closure(t))
        self.assertEqual(empty.finite_summands, frozenset())
        self.assertEqual(empty.adics_in_class, frozenset(t.quasi_simples()))

        tf = closure(t, [t.point(1, 1)])
        profile = brute_addt(tf)
        self.assertEqual(profile.finite_summands, {t.point(1, 1)})
        self.assertEqual(profile.adics_in_class, {t.qs(1), t.qs(2)})
        self.assertEqual(profile, tube_addt(tf))

    def test_brute_addt_rank_bound(self):
        with self.assertRaises(TametiltError) as ctx:
            brute_addt(closure(Tube("a", 7)))
        self.assertEqual(ctx.exception.check, "oracle.rank_bound")

    def test_catalan(self):
        self.assertEqual([branch_count_oracle(m) for m in range(6)], [1, 1, 2, 5, 14, 42])

    def test_brute_realizability(self):
        reg = preset("custom", tubes=[("a", 3)])
        a = reg.tube("a")
        z = frozenset({a.point(1, 2)})
        self.assertFalse(brute_realizability(frozenset({a.qs(2)}), z, reg))
        self.assertTrue(brute_realizability(frozenset({a.qs(1)}), z, reg))


class TestVerifySuite(unittest.TestCase):
    """Test the exhaustive verification run"""

    def test_bounds(self):
        with self.assertRaises(TametiltError) as ctx:
            OracleBounds(rank_max=7)
        self.assertEqual(ctx.exception.check, "oracle.bounds")
        with self.assertRaises(TametiltError):
            OracleBounds(rank_max=0)

    def test_rank_three_tube_passes(self):
        """Test that every invariant holds on a rank-3 tube"""
        reg = TubeRegistry((("a", 3),), rest=True)
        report = verify_suite(reg, OracleBounds(rank_max=3, sweep=False))
        self.assertEqual(report.failures, [])
        self.assertGreater(report.instances, 500)
        checks = {record.check for record in report.records}
        for check in ("hom.oracle", "addt.oracle", "branch.catalan", "realizability", "localize.compose"):
            self.assertIn(check, checks)
        self.assertNotIn("kronecker.count", checks)

    def test_sweep_adds_missing_ranks(self):
        report = verify_suite(kronecker(), OracleBounds(rank_max=2))
        tubes = {record.params.get("tube") for record in report.records}
        self.assertEqual(tubes, {"t2", "h", None})
        self.assertEqual(report.failures, [])

    def test_kronecker_count(self):
        """Test the power-set count with one named homogeneous tube"""
        report = verify_suite(kronecker().with_homogeneous("h1"), OracleBounds(rank_max=1))
        counts = [record for record in report.records if record.check == "kronecker.count"]
        self.assertEqual(len(counts), 1)
        self.assertTrue(counts[0].passed)

    def test_corrupted_hom_is_caught(self):
        """Test that a wrong Hom formula produces failing records with witnesses"""
        report = verify_suite(
            TubeRegistry((("a", 2),)),
            OracleBounds(rank_max=2, sweep=False),
            hom_fn=lambda x, y: HomResult.dim(0),
        )
        failed = {record.check for record in report.failures}
        self.assertIn("hom.oracle", failed)
        self.assertIn("hom.anchor", failed)
        self.assertTrue(all(record.witness for record in report.failures))
        self.assertGreater(report.totals["failed"], 0)

    def test_json_lines_are_deterministic(self):
        reg = TubeRegistry((("a", 2),), rest=True)
        bounds = OracleBounds(rank_max=2, sweep=False)
        first = verify_suite(reg, bounds).to_json_lines()
        second = verify_suite(reg, bounds).to_json_lines()
        self.assertEqual(first, second)
        last = json.loads(first[-1])
        self.assertEqual(last["totals"]["checks"], len(first) - 1)
        self.assertEqual(last["totals"]["failed"], 0)


if __name__ == "__main__":
    unittest.main()
