from __future__ import absolute_import
import io
import json
import sys
import unittest
from fractions import Fraction
import numpy as np
sys.path.insert(0, "..")
from phstair import report
from phstair.config import default_config
from phstair.stats import GateReport


class TestJsonValues(unittest.TestCase):
    def test_scalars(self):
        self.assertEqual(report.to_json_value(Fraction(1, 3)), "1/3")
        self.assertEqual(report.to_json_value(2), 2)
        self.assertEqual(report.to_json_value(np.int64(7)), 7)
        self.assertEqual(report.to_json_value(np.float64("nan")), "nan")
        self.assertEqual(report.to_json_value(float("inf")), "inf")
        self.assertEqual(report.to_json_value(0.5), 0.5)
        self.assertEqual(report.to_json_value(True), True)
        self.assertEqual(report.to_json_value("text"), "text")

    def test_containers(self):
        self.assertEqual(report.to_json_value({"bins": [[1], [2]], "p": Fraction(1, 2)}),
                         {"bins": [[1], [2]], "p": "1/2"})


class TestVerificationReport(unittest.TestCase):
    def build(self):
        result = report.VerificationReport(default_config(), "generator")
        result.add_gate(report.MONTE_CARLO_SECTION, GateReport("z_gate", 0.01, 0.02, 5000, "law"))
        result.add_gate(report.MONTE_CARLO_SECTION, GateReport("a_gate", 0.01, 0.02, 5000, "law"))
        result.add_check(report.QUADRATURE_SECTION, "b_check", True, 1e-12, 0.0, 1e-10)
        result.add_check(report.EXACT_SECTION, "a_check", True, "equal", "equal")
        return result

    def test_passed(self):
        result = self.build()
        self.assertTrue(result.passed)
        self.assertEqual(result.failures(), [])
        self.assertEqual(result.counts(), (4, 0))
        result.add_check(report.EXACT_SECTION, "broken", False, Fraction(1, 3), Fraction(1, 2))
        result.add_gate(report.MONTE_CARLO_SECTION, GateReport("loose", 0.5, 0.02, 5000, "law"))
        self.assertFalse(result.passed)
        self.assertEqual(result.failures(), ["1_exact/broken", "3_monte_carlo/loose"])
        self.assertEqual(result.counts(), (6, 2))

    def test_ordering(self):
        data = self.build().to_dict(include_timing=False)
        self.assertEqual(list(data["sections"]), list(report.SECTIONS))
        self.assertEqual([g["name"] for g in data["sections"]["3_monte_carlo"]["gates"]], ["a_gate", "z_gate"])
        self.assertNotIn("runtime_seconds", data)
        self.assertEqual(data["generator"], "generator")
        self.assertEqual(data["config"]["p"], "1/2")

    def test_timing(self):
        result = self.build()
        result.timings[report.EXACT_SECTION] = 0.12345
        self.assertEqual(result.to_dict()["runtime_seconds"], {"1_exact": 0.123})

    def test_rows(self):
        rows = list(self.build().rows())
        self.assertEqual([row[1] for row in rows], ["a_check", "b_check", "a_gate", "z_gate"])
        self.assertEqual(rows[2][:4], ["3_monte_carlo", "a_gate", "gate", True])
        fd = io.StringIO()
        report.write_csv(report.REPORT_CSV_COLUMNS, rows, fd)
        lines = fd.getvalue().splitlines()
        self.assertEqual(lines[0], "section,name,kind,passed,observed,reference,tolerance")
        self.assertEqual(len(lines), 5)

    def test_write_json(self):
        fd = io.StringIO()
        report.write_json(self.build().to_dict(include_timing=False), fd)
        self.assertTrue(fd.getvalue().endswith("}\n"))
        self.assertTrue(json.loads(fd.getvalue())["passed"])


if __name__ == "__main__":
    unittest.main()
