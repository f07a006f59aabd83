#!/usr/bin/env python3
"""
Universal localization tests: tube surgery, quotients and localization tilting.
"""

import unittest

from hypothesis import given
from hypothesis import strategies as st

from tametilt.branch import BranchModule
from tametilt.classify import TiltingDescriptor
from tametilt.errors import PointError, TametiltError
from tametilt.localize import (
    FiniteDimensional,
    QuasiSimpleSet,
    localization_tilting,
    localize_registry,
    parse_qs_set,
    quotient_decomposition,
    segment_corays,
    segments,
    tensor_qs,
    universal_ring,
)
from tametilt.registry import LambdaSet, MultiplicityMap, TubeRegistry, preset
from tametilt.tube import QuasiSimple, RegPoint, Tube


class TestTensor(unittest.TestCase):
    """Test quasi-simples tensored with R_u"""

    def setUp(self):
        self.tube = Tube("a", 3)

    def test_absorbs_following_quasi_simples(self):
        """Test that S picks up the run of u that follows it"""
        t = self.tube
        u = QuasiSimpleSet.of(t.qs(2))
        self.assertEqual(tensor_qs(t.qs(1), u), t.point(1, 2))
        self.assertEqual(tensor_qs(t.qs(3), u), t.point(3, 1))
        self.assertIsNone(tensor_qs(t.qs(2), u))
        self.assertEqual(tensor_qs(t.qs(1), QuasiSimpleSet.of(t.qs(2), t.qs(3))), t.point(1, 3))


class TestLocalizedRegistry(unittest.TestCase):
    """Test localize_registry"""

    def setUp(self):
        self.reg = preset("a32")

    def test_rank_drops(self):
        """Test that localizing a rank-3 tube at one quasi-simple leaves rank 2"""
        a = self.reg.tube("a")
        localized = localize_registry(self.reg, QuasiSimpleSet.of(a.qs(2)))
        self.assertEqual(localized.tube("a").new_rank, 2)
        self.assertEqual(localized.tube("b").new_rank, 2)
        self.assertFalse(localized.order_flag)
        self.assertEqual(localized.qs_map()["a"], {1: 1, 3: 2})
        self.assertIsNone(localized.image(a.qs(2)))
        self.assertEqual(localized.image(a.qs(3)), QuasiSimple("a", 2, 2))
        self.assertEqual(localized.image(a.qs(1)).tau_inv(), localized.image(a.qs(3)))
        self.assertEqual(localized.registry().ranks["a"], 2)

    def test_full_clique_removes_tube(self):
        """Test that a full clique removes its tube and makes R_u an order"""
        reg = preset("d4")
        localized = localize_registry(reg, parse_qs_set("clique:a", reg))
        self.assertTrue(localized.order_flag)
        self.assertTrue(localized.tube("a").removed)
        self.assertNotIn("a", localized.registry().ranks)
        self.assertEqual(localized.to_json()["tubes"]["a"]["removed"], True)

    def test_rank_two_becomes_homogeneous(self):
        """Test that a rank-1 survivor is registered as a named homogeneous tube with its alpha"""
        reg = TubeRegistry((("a", 2),), rest=True, alpha=MultiplicityMap.from_dict({"a:2": 4}))
        localized = localize_registry(reg, parse_qs_set("a:1", reg)).registry()
        self.assertEqual(localized.nonhomogeneous, ())
        self.assertEqual(localized.homogeneous_named, frozenset({"a"}))
        self.assertEqual(localized.alpha.to_json(), {"a:1": 4})

    def test_composition(self):
        """Test that localizing twice matches localizing at the union"""
        a = self.reg.tube("a")
        first = localize_registry(self.reg, QuasiSimpleSet.of(a.qs(1)))
        self.assertEqual(first.image(a.qs(2)), QuasiSimple("a", 1, 2))
        second = localize_registry(first.registry(), first.image_set(QuasiSimpleSet.of(a.qs(2))))
        direct = localize_registry(self.reg, QuasiSimpleSet.of(a.qs(1), a.qs(2)))
        self.assertEqual(second.registry().ranks, direct.registry().ranks)
        self.assertEqual(second.registry().homogeneous_named, frozenset({"a"}))

    def test_unknown_quasi_simple(self):
        """Test rejection of quasi-simples outside the registry"""
        with self.assertRaises(TametiltError) as ctx:
            localize_registry(self.reg, QuasiSimpleSet.of(QuasiSimple("z", 1, 2)))
        self.assertEqual(ctx.exception.check, "localize.unknown_tube")

    @given(st.integers(min_value=2, max_value=6), st.data())
    def test_rank_formula(self, rank, data):
        """Test new rank = rank - |u| for u without the full clique"""
        reg = TubeRegistry((("a", rank),))
        chosen = data.draw(st.sets(st.integers(min_value=1, max_value=rank), max_size=rank - 1))
        u = QuasiSimpleSet(frozenset(QuasiSimple("a", i, rank) for i in chosen))
        self.assertEqual(localize_registry(reg, u).tube("a").new_rank, rank - len(chosen))


class TestSegments(unittest.TestCase):
    """Test segments and their coray modules"""

    def test_wrapping_segment(self):
        """Test a segment that wraps past the last index"""
        t = Tube("a", 4)
        u = QuasiSimpleSet.of(t.qs(4), t.qs(1))
        self.assertEqual(segments(u, t), [[t.qs(4), t.qs(1)]])
        self.assertEqual(segment_corays(u, t), [t.point(4, 2), t.point(1, 1)])

    def test_two_segments(self):
        t = Tube("a", 5)
        u = QuasiSimpleSet.of(t.qs(1), t.qs(3), t.qs(4))
        self.assertEqual(segments(u, t), [[t.qs(1)], [t.qs(3), t.qs(4)]])

    def test_full_clique_is_not_segmented(self):
        t = Tube("a", 2)
        with self.assertRaises(TametiltError) as ctx:
            segments(QuasiSimpleSet(frozenset(t.quasi_simples())), t)
        self.assertEqual(ctx.exception.check, "localize.segment")


class TestQuotient(unittest.TestCase):
    """Test the decomposition of R_u/R"""

    def setUp(self):
        self.reg = preset("d4")

    def test_segment_with_multiplicity(self):
        """Test a coray module repeated alpha times"""
        u = parse_qs_set("a:1", self.reg)
        parts = quotient_decomposition(u, MultiplicityMap.from_dict({"a:1": 3}), self.reg)
        self.assertEqual(dict(parts), {self.reg.parse_point("a:1[1]"): 3})

    def test_clique_gives_pruefers(self):
        a = self.reg.tube("a")
        parts = quotient_decomposition(parse_qs_set("clique:a", self.reg), MultiplicityMap(), self.reg)
        self.assertEqual(dict(parts), {RegPoint.pruefer(a.qs(1)): 1, RegPoint.pruefer(a.qs(2)): 1})


class TestLocalizationTilting(unittest.TestCase):
    """Test R_u + R_u/R"""

    def setUp(self):
        self.reg = preset("d4")

    def test_finite_dimensional_without_clique(self):
        result = localization_tilting(parse_qs_set("a:1", self.reg), self.reg)
        self.assertIsInstance(result, FiniteDimensional)
        self.assertEqual(result.to_json(self.reg)["kind"], "finite_dimensional")

    def test_clique_and_segment(self):
        """Test a full clique plus a segment in another tube"""
        result = localization_tilting(parse_qs_set("clique:a,b:1", self.reg), self.reg)
        self.assertIsInstance(result, TiltingDescriptor)
        b = self.reg.tube("b")
        self.assertEqual(result.pair, (BranchModule.of(b.point(1, 1)), LambdaSet.of("a")))

    def test_rest_clique(self):
        """Test that the rest token puts the homogeneous family into lambda"""
        result = localization_tilting(parse_qs_set("*", self.reg), self.reg)
        self.assertEqual(result.pair, (BranchModule(), LambdaSet.of(rest=True)))


class TestQuasiSimpleSets(unittest.TestCase):
    """Test parsing and listing quasi-simple sets"""

    def setUp(self):
        self.reg = preset("d4")

    def test_parse_and_render(self):
        u = parse_qs_set("clique:a, b:2", self.reg)
        self.assertEqual(len(u), 3)
        self.assertEqual(u.to_json(self.reg), ["clique:a", "b:2"])
        self.assertTrue(parse_qs_set(["*"], self.reg).includes_rest)

    def test_bad_input(self):
        with self.assertRaises(PointError):
            parse_qs_set(5, self.reg)
        with self.assertRaises(TametiltError):
            parse_qs_set("a:1[2]", self.reg)

    def test_universal_ring(self):
        ring = universal_ring(self.reg.with_alpha(MultiplicityMap(alpha_generic=2)))
        self.assertEqual(ring.to_json()["matrix_size"], 2)
        self.assertEqual(ring.to_json()["as_module"], "G^2")


if __name__ == "__main__":
    unittest.main()
