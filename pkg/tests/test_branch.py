#!/usr/bin/env python3
"""
Branch module tests: recognition, enumeration, vertices and completion.
"""

import itertools
import unittest
from math import comb

import hypothesis.strategies as st
from hypothesis import given

from tametilt.branch import (
    BranchModule,
    branch_violation,
    check_branch_module,
    complete_to_branch,
    enumerate_branch_modules,
    is_branch_module,
    reg_comp_factor_set,
    tube_branch_modules,
    vertices,
)
from tametilt.errors import TametiltError
from tametilt.oracle import branch_count_oracle
from tametilt.registry import TubeRegistry, kronecker, preset
from tametilt.tube import Tube, in_wing, wing


class TestRecognition(unittest.TestCase):
    """Test is_branch_module and its diagnostics"""

    def setUp(self):
        self.t3 = Tube("a", 3)
        self.t2 = Tube("a", 2)

    def test_wing_with_vertex(self):
        """Test a vertex with a full wing"""
        self.assertTrue(is_branch_module({self.t3.point(1, 2), self.t3.point(1, 1)}))

    def test_condition_b(self):
        """Test a vertex missing summands in its wing"""
        error = branch_violation({self.t3.point(1, 2)})
        self.assertIsNotNone(error)
        self.assertEqual(error.check, "branch.condition_b")

    def test_clique_is_not_exceptional(self):
        """Test that a complete rank-2 clique has extensions"""
        error = branch_violation({self.t2.point(1, 1), self.t2.point(2, 1)})
        self.assertEqual(error.check, "branch.not_exceptional")

    def test_length_and_homogeneous(self):
        """Test the length bound and homogeneous points"""
        self.assertEqual(branch_violation({self.t3.point(1, 3)}).check, "branch.length")
        self.assertEqual(branch_violation({Tube("h", 1).point(1, 1)}).check, "branch.homogeneous")

    def test_check_raises(self):
        """Test that check_branch_module raises the failing clause"""
        with self.assertRaises(TametiltError) as ctx:
            check_branch_module({self.t3.point(1, 2)})
        self.assertEqual(ctx.exception.check, "branch.condition_b")
        self.assertEqual(check_branch_module(set()), BranchModule())


class TestEnumeration(unittest.TestCase):
    """Test branch module enumeration"""

    def test_kronecker(self):
        """Test that Kronecker has only the empty branch module"""
        self.assertEqual(enumerate_branch_modules(kronecker()), [BranchModule()])

    def test_rank_two(self):
        """Test the single rank-2 tube"""
        t = Tube("a", 2)
        reg = preset("custom", tubes=[("a", 2)])
        self.assertEqual(
            enumerate_branch_modules(reg),
            [BranchModule(), BranchModule.of(t.point(1, 1)), BranchModule.of(t.point(2, 1))],
        )

    def test_vertex_of_size_two(self):
        """Test the two branch modules under U_1[2] in rank 3"""
        t = Tube("a", 3)
        vertex = t.point(1, 2)
        under = [
            s for s in tube_branch_modules(t) if vertices(BranchModule(s)).get("a") == [vertex]
        ]
        self.assertEqual(
            set(under),
            {frozenset({vertex, t.point(1, 1)}), frozenset({vertex, t.point(2, 1)})},
        )

    def test_completeness_against_subsets(self):
        """Test enumeration against every subset of exceptional points"""
        for r in range(2, 5):
            tube = Tube("a", r)
            with self.subTest(rank=r):
                brute = {
                    frozenset(chosen)
                    for size in range(r)
                    for chosen in itertools.combinations(tube.exceptional_points(), size)
                    if is_branch_module(chosen)
                }
                self.assertEqual(set(tube_branch_modules(tube)), brute)

    def test_product_over_tubes(self):
        """Test that tubes combine independently"""
        reg = TubeRegistry((("a", 3), ("b", 2)))
        count_a = len(tube_branch_modules(Tube("a", 3)))
        self.assertEqual(len(enumerate_branch_modules(reg)), count_a * 3)

    def test_canonical_order(self):
        """Test the deterministic order: empty first, then by size"""
        modules = enumerate_branch_modules(TubeRegistry((("a", 4),)))
        self.assertEqual(modules[0], BranchModule())
        sizes = [len(y) for y in modules]
        self.assertEqual(sizes, sorted(sizes))

    def test_catalan_counts(self):
        """Test branch counts under a fixed vertex"""
        for m in range(0, 7):
            self.assertEqual(branch_count_oracle(m), comb(2 * m, m) // (m + 1))
        tube = Tube("a", 4)
        for m in range(1, 4):
            vertex = tube.point(1, m)
            count = sum(
                1 for s in tube_branch_modules(tube) if vertices(BranchModule(s)).get("a") == [vertex]
            )
            self.assertEqual(count, branch_count_oracle(m))

    @given(st.integers(min_value=2, max_value=5), st.data())
    def test_summand_count_matches_vertex_wings(self, r, data):
        """Test that summands per tube equal the quasi-simples under the vertices"""
        tube = Tube("a", r)
        summands = data.draw(st.sampled_from(tube_branch_modules(tube)))
        tops = vertices(BranchModule(summands)).get("a", [])
        covered = set()
        for v in tops:
            covered |= {qs for p in wing(v) for qs in [p.qs] if p.length == 1}
        self.assertEqual(len(summands), len(covered))
        self.assertLessEqual(len(summands), r - 1)
        for x, y in itertools.combinations(tops, 2):
            self.assertTrue(wing(x).isdisjoint(wing(y)))
        for p in summands:
            self.assertTrue(any(in_wing(p, v) for v in tops))


class TestVerticesAndFactors(unittest.TestCase):
    """Test vertices, completion and composition factors"""

    def setUp(self):
        self.t3 = Tube("a", 3)

    def test_vertices(self):
        """Test vertex extraction"""
        t3, t4 = self.t3, Tube("a", 4)
        self.assertEqual(vertices(BranchModule.of(t3.point(1, 2), t3.point(1, 1))), {"a": [t3.point(1, 2)]})
        self.assertEqual(
            vertices(BranchModule.of(t4.point(1, 1), t4.point(3, 1))),
            {"a": [t4.point(1, 1), t4.point(3, 1)]},
        )
        self.assertEqual(vertices(BranchModule()), {})

    def test_complete_to_branch(self):
        """Test completions with the same composition factors"""
        t3 = self.t3
        self.assertEqual(
            complete_to_branch({t3.point(1, 2)}),
            [BranchModule.of(t3.point(1, 1), t3.point(1, 2)), BranchModule.of(t3.point(1, 2), t3.point(2, 1))],
        )
        full = BranchModule.of(t3.point(1, 2), t3.point(1, 1))
        self.assertEqual(complete_to_branch(full.summands), [full])
        self.assertEqual(complete_to_branch(set()), [BranchModule()])

    def test_complete_rejects_non_exceptional(self):
        """Test that completion needs an exceptional set"""
        t2 = Tube("a", 2)
        with self.assertRaises(TametiltError):
            complete_to_branch({t2.point(1, 1), t2.point(2, 1)})

    def test_composition_factors(self):
        """Test factors of Y and of tau_inv(Y)"""
        y = BranchModule.of(self.t3.point(1, 2))
        self.assertEqual(reg_comp_factor_set(y), {self.t3.qs(1), self.t3.qs(2)})
        self.assertEqual(reg_comp_factor_set(y, shifted=True), {self.t3.qs(2), self.t3.qs(3)})
        self.assertEqual(reg_comp_factor_set(BranchModule()), frozenset())

    def test_to_json(self):
        """Test the text form of a branch module"""
        y = BranchModule.of(self.t3.point(1, 2), self.t3.point(1, 1))
        self.assertEqual(y.to_json(), ["a:1[1]", "a:1[2]"])


if __name__ == "__main__":
    unittest.main()
