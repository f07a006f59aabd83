#!/usr/bin/env python3
"""
CLI tests: each subcommand end to end through main().
"""

import io
import json
import os
import shutil
import tempfile
import unittest
from unittest.mock import patch

from tametilt.cli import create_argument_parser, main
from tametilt.oracle import CheckRecord, OracleReport
from tametilt.registry import SCHEMA

RR_PAIR = '{"branch": [], "lambda": {"named": [], "rest": true}}'
RAY_PAIR = '{"branch": ["a:1[1]", "a:1[2]"], "lambda": {"named": ["a"], "rest": false}}'


def run_cli(*argv):
    """Run main() and return (exit code, parsed stdout document, stderr text)"""
    with patch("sys.stdout", new_callable=io.StringIO) as out, patch("sys.stderr", new_callable=io.StringIO) as err:
        code = main(list(argv))
    text = out.getvalue()
    return code, json.loads(text) if text else None, err.getvalue()


class TestCommands(unittest.TestCase):
    """Test successful runs of every subcommand"""

    def setUp(self):
        self.test_dir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.test_dir)

    def test_presets(self):
        code, doc, _ = run_cli("presets")
        self.assertEqual(code, 0)
        self.assertEqual(doc["schema"], SCHEMA)
        self.assertEqual(doc["command"], "presets")
        self.assertEqual(len(doc["d4"]["tubes"]), 3)
        self.assertIn("kronecker", doc)

    def test_branch_enumerate_kronecker(self):
        code, doc, err = run_cli("branch-enumerate")
        self.assertEqual(code, 0)
        self.assertEqual(doc["result"], [[]])
        self.assertEqual(doc["registry"]["name"], "kronecker")
        self.assertIn("✅", err)

    def test_branch_enumerate_custom(self):
        code, doc, _ = run_cli("branch-enumerate", "--preset", "custom", "--tube", "a:2")
        self.assertEqual(code, 0)
        self.assertEqual(doc["result"], [[], ["a:1[1]"], ["a:2[1]"]])

    def test_classify_reiten_ringel(self):
        code, doc, _ = run_cli("classify", "--pair", RR_PAIR)
        self.assertEqual(code, 0)
        self.assertEqual(doc["descriptor"]["tf_label"]["kind"], "projgen")
        self.assertTrue(doc["descriptor"]["flags"]["sigma_pure_injective"])
        self.assertIn("lukas_form", doc)

    def test_classify_from_filter(self):
        code, doc, _ = run_cli(
            "classify", "--preset", "e6",
            "--filter", '{"b": {"rays": [], "region": ["1[1]", "1[2]", "2[1]"]}}',
        )
        self.assertEqual(code, 0)
        self.assertIn("b:1[2]", doc["descriptor"]["branch"])

    def test_decompose_ray(self):
        code, doc, _ = run_cli("decompose", "--preset", "custom", "--tube", "a:3", "--pair", RAY_PAIR)
        self.assertEqual(code, 0)
        tube = doc["decomposition"]["tubes"]["a"]
        self.assertEqual(tube["case"], "ii")
        self.assertEqual(tube["classes"], 3)

    def test_dual(self):
        pair = '{"branch": [], "lambda": {"named": ["a", "b", "c"], "rest": true}}'
        code, doc, _ = run_cli("dual", "--preset", "d4", "--pair", pair)
        self.assertEqual(code, 0)
        self.assertTrue(doc["dual"]["generic"])
        self.assertEqual(doc["dual"]["tubes"]["a"]["adic"], ["a:1", "a:2"])

    def test_predicates_with_realizability(self):
        code, doc, _ = run_cli(
            "predicates", "--preset", "custom", "--tube", "a:3",
            "--pair", '{"branch": [], "lambda": {}}', "--delta", "a:1", "--z", "a:1[2]",
        )
        self.assertEqual(code, 0)
        self.assertTrue(doc["predicates"]["noetherian_over_endo"])
        self.assertTrue(doc["predicates"]["realizable"])
        self.assertIn("a:1[2]", doc["witness"]["branch"])

    def test_localize_clique(self):
        code, doc, _ = run_cli("localize", "--preset", "d4", "--at", "clique:a")
        self.assertEqual(code, 0)
        self.assertTrue(doc["localized"]["order"])
        self.assertEqual(doc["at"], ["clique:a"])
        self.assertEqual(doc["tilting"]["lambda"], {"named": ["a"], "rest": False})

    def test_quotient_with_alpha(self):
        code, doc, _ = run_cli("quotient", "--preset", "d4", "--at", "a:1", "--alpha", '{"a:1": 3}')
        self.assertEqual(code, 0)
        self.assertEqual(doc["result"], {"a:1[1]": 3})

    def test_verify(self):
        code, doc, _ = run_cli("verify", "--rank-max", "2")
        self.assertEqual(code, 0)
        self.assertEqual(doc["totals"]["failed"], 0)
        self.assertGreater(doc["instances"], 0)

    def test_localize_everywhere_reports_universal_ring(self):
        code, doc, _ = run_cli("localize", "--preset", "d4", "--at", "clique:a,clique:b,clique:c,*")
        self.assertEqual(code, 0)
        self.assertEqual(doc["universal_ring"]["matrix_size"], 1)
        code, doc, _ = run_cli("localize", "--preset", "d4", "--at", "clique:a")
        self.assertNotIn("universal_ring", doc)

    def test_verify_json_lines(self):
        with patch("sys.stdout", new_callable=io.StringIO) as out, patch("sys.stderr", new_callable=io.StringIO):
            code = main(["verify", "--rank-max", "2", "--output", "jsonl"])
        self.assertEqual(code, 0)
        lines = [json.loads(line) for line in out.getvalue().splitlines()]
        self.assertGreater(len(lines), 1)
        self.assertEqual(lines[-1]["totals"]["failed"], 0)
        self.assertTrue(all("check" in line for line in lines[:-1]))

    def test_config_file(self):
        path = os.path.join(self.test_dir, "registry.json")
        with open(path, "w") as f:
            json.dump({"name": "mine", "tubes": [{"id": "x", "rank": 2}], "rest": False}, f)
        code, doc, err = run_cli("branch-enumerate", "--config", path)
        self.assertEqual(code, 0)
        self.assertEqual(doc["registry"]["name"], "mine")
        self.assertEqual(len(doc["result"]), 3)
        self.assertIn("📋 Loaded registry from", err)

    def test_output_is_stable(self):
        first = run_cli("classify", "--preset", "custom", "--tube", "a:3", "--pair", RAY_PAIR)
        second = run_cli("classify", "--preset", "custom", "--tube", "a:3", "--pair", RAY_PAIR)
        self.assertEqual(first[:2], second[:2])


class TestErrors(unittest.TestCase):
    """Test error documents and exit codes"""

    def assert_error(self, check, *argv):
        code, doc, err = run_cli(*argv)
        self.assertEqual(code, 1)
        self.assertEqual(doc["error"]["check"], check)
        self.assertIn("❌ Error:", err)

    def test_unknown_tube_in_pair(self):
        self.assert_error("point.unknown_tube", "classify", "--pair", '{"branch": ["z:1[1]"]}')

    def test_missing_and_conflicting_inputs(self):
        self.assert_error("cli.arguments", "classify")
        self.assert_error("cli.arguments", "classify", "--pair", RR_PAIR, "--filter", "{}")
        self.assert_error("cli.arguments", "localize")

    def test_invalid_json(self):
        self.assert_error("cli.json", "classify", "--pair", "{bad")

    def test_pair_syntax(self):
        self.assert_error("pair.syntax", "classify", "--pair", '{"lambda": {}}')

    def test_not_a_branch_module(self):
        self.assert_error(
            "branch.condition_b", "classify", "--preset", "custom", "--tube", "a:3",
            "--pair", '{"branch": ["a:1[2]"], "lambda": {}}',
        )

    def test_missing_config(self):
        self.assert_error("registry.config", "branch-enumerate", "--config", "/nonexistent/registry.json")

    def test_malformed_json_values(self):
        self.assert_error("registry.syntax", "quotient", "--preset", "d4", "--at", "a:1", "--alpha", '{"a:1": "x"}')
        self.assert_error("filter.syntax", "classify", "--preset", "d4", "--filter", '{"a": {"rays": ["x"]}}')
        self.assert_error("lambda.syntax", "classify", "--pair", '{"branch": [], "lambda": {"named": 5}}')

    def test_rest_must_be_boolean(self):
        self.assert_error(
            "lambda.syntax", "classify", "--preset", "custom", "--tube", "a:3",
            "--pair", '{"branch": [], "lambda": {"named": ["a"], "rest": "false"}}',
        )

    def test_unreadable_config(self):
        with tempfile.NamedTemporaryFile(suffix=".json") as f:
            with patch("tametilt.cli.RegistryParser.parse_file", side_effect=PermissionError("denied")):
                self.assert_error("cli.io", "branch-enumerate", "--config", f.name)

    def test_rank_bound(self):
        self.assert_error("oracle.bounds", "verify", "--rank-max", "9")

    def test_verify_failures_exit_nonzero(self):
        report = OracleReport([CheckRecord("hom.oracle", {"tube": "a"}, False, ["a:1[1]", "a:1[1]"])])
        with patch("tametilt.cli.verify_suite", return_value=report):
            code, doc, err = run_cli("verify")
        self.assertEqual(code, 1)
        self.assertEqual(doc["totals"]["failed"], 1)
        self.assertIn("❌", err)

    def test_bad_command(self):
        with patch("sys.stderr", new_callable=io.StringIO):
            with self.assertRaises(SystemExit) as ctx:
                main(["nonsense"])
        self.assertEqual(ctx.exception.code, 2)

    def test_parser_defaults(self):
        args = create_argument_parser().parse_args(["verify"])
        self.assertEqual(args.preset, "kronecker")
        self.assertEqual(args.rank_max, 4)
        self.assertTrue(args.rest)


if __name__ == "__main__":
    unittest.main()
