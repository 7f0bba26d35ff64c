from __future__ import absolute_import
import io
import json
import os
import shutil
import sys
import tempfile
import unittest
from fractions import Fraction
from unittest import mock
sys.path.insert(0, "..")
from phstair import __main__ as cli
from phstair import verify
from phstair.errors import QuadratureFailure


# Small enough to run in seconds.
SMALL_VERIFY = dict(PMF_SWEEP=(Fraction(1, 2), Fraction(1)), PMF_HORIZON=4, ZERO_COUNT_HORIZON=8,
                    LAPLACE_P=(0.7,), LAPLACE_T=(1.0,), LAPLACE_HORIZON=3, GF_N=(5,),
                    MARTINGALE_P=(0.7,), MARTINGALE_HORIZON=3, DERIVATIVE_HORIZONS=(1, 2),
                    MC_LAWS=((Fraction(1), 4),), JOINT_TRIPLES=3, CONTROL_PATHS=2000)

MINIMAL_ARGS = {
    "simulate": ["--p", "1/3", "--n", "2"],
    "cdf": ["--p", "1/3", "--x", "1/2"],
    "joint": ["--p", "1/3", "--thresholds", "1/2"],
    "pmf": ["--p", "1/3", "--n", "3"],
    "pgf": ["--p", "1/3", "--z", "1/2"],
    "laplace": ["--p", "0.3", "--n", "2"],
    "martingale": ["--p", "0.3", "--n-max", "1", "--x", "0.5"],
}


class TestCommandLine(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.tmp)

    def run_cli(self, argv):
        with mock.patch("sys.stdout", new_callable=io.StringIO) as out, \
             mock.patch("sys.stderr", new_callable=io.StringIO) as err:
            code = cli.main(argv)
        return code, out.getvalue(), err.getvalue()

    def run_json(self, argv):
        code, out, err = self.run_cli(argv + ["--format", "json"])
        self.assertEqual(code, cli.EXIT_OK, err)
        return json.loads(out)

    def write_config(self, **data):
        path = os.path.join(self.tmp, "config.json")
        with open(path, "w") as fd:
            json.dump(data, fd)
        return path

    def test_pmf(self):
        records = self.run_json(["pmf", "--p", "1/2", "--n", "2", "--mode", "exact"])
        self.assertEqual([r["prob_exact"] for r in records], ["1/4", "5/8", "1/8"])
        self.assertEqual([r["k"] for r in records], [0, 1, 2])
        oracle = self.run_json(["pmf", "--p", "1/2", "--n", "2", "--oracle"])
        self.assertEqual(oracle, records)

    def test_pmf_csv(self):
        code, out, _ = self.run_cli(["pmf", "--p", "0.5", "--n", "1", "--format", "csv"])
        self.assertEqual(code, cli.EXIT_OK)
        self.assertEqual(out.splitlines(), ["k,prob,prob_exact", "0,0.5,", "1,0.5,"])

    def test_oracle_needs_exact_mode(self):
        code, _, err = self.run_cli(["pmf", "--p", "0.5", "--oracle"])
        self.assertEqual(code, cli.EXIT_USAGE)
        self.assertIn("exact", err)

    def test_cdf(self):
        records = self.run_json(["cdf", "--p", "1/2", "--n", "0", "--x", "0.9"])
        self.assertEqual(Fraction(records[0]["cdf"]), 0)
        records = self.run_json(["cdf", "--p", "1/2", "--n", "2", "--x", "1/2,1"])
        self.assertEqual(Fraction(records[0]["cdf"]), Fraction(7, 16))
        self.assertEqual(Fraction(records[1]["cdf"]), 1)
        self.assertEqual(Fraction(records[1]["atom"]), Fraction(1, 4))

    def test_joint(self):
        records = self.run_json(["joint", "--p", "1/2", "--thresholds", "1/2,1/4"])
        # (1 - p/2)(1 - p/4) with the running maximum of the thresholds
        self.assertEqual(Fraction(records[0]["survival"]), Fraction(3, 4) * Fraction(7, 8))

    def test_pgf(self):
        records = self.run_json(["pgf", "--p", "1/2", "--n", "2", "--z=-1,0,1", "--oracle"])
        self.assertEqual([Fraction(r["pgf"]) for r in records], [Fraction(-1, 4), Fraction(1, 4), 1])
        for record in records:
            self.assertEqual(record["pgf"], record["G_n"])
            self.assertEqual(record["pgf"], record["oracle"])

    def test_laplace(self):
        records = self.run_json(["laplace", "--p", "0.5", "--n", "2", "--t", "0,1"])
        self.assertEqual(len(records), 6)
        self.assertLess(abs(float(records[0]["W_n"]) - 1.0), 1e-12)
        self.assertLess(abs(float(records[4]["W_n"]) - 0.5), 1e-9)
        for record in records:
            self.assertLess(float(record["abs_diff"]), 1e-7)

    def test_generating_function(self):
        records = self.run_json(["laplace", "--p", "0.5", "--n", "10", "--z", "0.3,0.8"])
        self.assertEqual(len(records), 2)
        self.assertTrue(all(record["pass"] for record in records))

    def test_martingale(self):
        records = self.run_json(["martingale", "--p", "0.7", "--n-max", "2", "--x", "0.2,0.5"])
        self.assertEqual(len(records), 4)
        self.assertTrue(all(record["pass"] is True for record in records))
        control = self.run_json(["martingale", "--p", "0.7", "--n-max", "1", "--family", "coordinate"])
        self.assertFalse(any(record["pass"] for record in control))

    def test_martingale_singular_note(self):
        code, out, err = self.run_cli(["martingale", "--p", "1", "--n-max", "1", "--x", "0.5"])
        self.assertEqual(code, cli.EXIT_OK)
        self.assertIn("restricted", err)

    def test_martingale_monte_carlo(self):
        code, out, _ = self.run_cli(["martingale", "--p", "0.5", "--family", "example", "--n-max", "1",
                                     "--mc", "--martingale-paths", "20000", "--seed", "7"])
        gates = json.loads(out)
        self.assertEqual(gates[0]["name"], "martingale_mean_n1")
        self.assertEqual(code, cli.EXIT_OK)
        self.assertTrue(all(g["passed"] is True for g in gates))

    def test_martingale_monte_carlo_at_p_one(self):
        code, out, _ = self.run_cli(["martingale", "--p", "1", "--family", "coordinate", "--n-max", "1",
                                     "--mc", "--martingale-paths", "5000", "--seed", "7"])
        gates = json.loads(out)
        self.assertEqual(code, cli.EXIT_GATE_FAILURE)
        self.assertLess(abs(gates[0]["detail"]["mean"] - 0.5), 0.05)
        code, _, err = self.run_cli(["martingale", "--p", "1", "--n-max", "1", "--mc", "--martingale-paths", "5000"])
        self.assertEqual(code, cli.EXIT_USAGE)
        self.assertIn("not finite", err)

    def test_simulate(self):
        code, out, _ = self.run_cli(["simulate", "--p", "1/2", "--n", "3", "--paths", "4", "--seed", "5"])
        self.assertEqual(code, cli.EXIT_OK)
        paths = [json.loads(line) for line in out.splitlines()]
        self.assertEqual([path["index"] for path in paths], [0, 1, 2, 3])
        self.assertTrue(all(len(path["states"]) == 4 for path in paths))
        _, again, _ = self.run_cli(["simulate", "--p", "1/2", "--n", "3", "--paths", "4", "--seed", "5"])
        self.assertEqual(out, again)

    def test_out_file(self):
        path = os.path.join(self.tmp, "pmf.csv")
        code, out, _ = self.run_cli(["pmf", "--p", "1/3", "--n", "1", "--format", "csv", "--out", path])
        self.assertEqual(code, cli.EXIT_OK)
        self.assertEqual(out, "")
        with open(path) as fd:
            self.assertEqual(fd.readline().strip(), "k,prob,prob_exact")

    def test_bad_parameter(self):
        for p in ("3/2", "abc", "0", "1/0"):
            code, _, err = self.run_cli(["pmf", "--p", p])
            self.assertEqual(code, cli.EXIT_USAGE, p)
            self.assertIn("Error", err)

    def test_domain_error(self):
        code, _, _ = self.run_cli(["joint", "--p", "1/2", "--thresholds", "1/2,1"])
        self.assertEqual(code, cli.EXIT_USAGE)

    def test_quadrature_failure(self):
        with mock.patch("phstair.transform.laplace_partial_sums", side_effect=QuadratureFailure("no convergence")):
            code, _, err = self.run_cli(["laplace", "--p", "0.5"])
        self.assertEqual(code, cli.EXIT_QUADRATURE)
        self.assertIn("no convergence", err)

    def test_config_file(self):
        path = self.write_config(p="1/3", seed=9)
        records = self.run_json(["pmf", "--n", "1", "--config", path])
        self.assertEqual(records[0]["prob_exact"], "2/3")
        records = self.run_json(["pmf", "--n", "1", "--config", path, "--p", "1/2"])
        self.assertEqual(records[0]["prob_exact"], "1/2")
        with mock.patch.dict(os.environ, {"PHSTAIR_CONFIG": path}):
            records = self.run_json(["pmf", "--n", "1"])
        self.assertEqual(records[0]["prob_exact"], "2/3")

    def test_every_command_runs(self):
        self.assertEqual(set(MINIMAL_ARGS) | set(["verify"]), set(cli.COMMANDS))
        for name, argv in MINIMAL_ARGS.items():
            for output_format in ("json", "csv"):
                code, out, err = self.run_cli([name] + argv + ["--format", output_format])
                self.assertEqual(code, cli.EXIT_OK, "%s: %s" % (name, err))
                self.assertNotEqual(out, "")

    def test_every_command_has_help(self):
        parser = cli.build_parser()
        for name in cli.COMMANDS:
            with mock.patch("sys.stdout", new_callable=io.StringIO) as out:
                with self.assertRaises(SystemExit) as raised:
                    parser.parse_args([name, "--help"])
            self.assertEqual(raised.exception.code, 0)
            self.assertIn("--format", out.getvalue())

    def verify_config(self, p, seed):
        return self.write_config(p=p, seed=seed, paths=5000, martingale_paths=5000, tolerances={"mc_alpha": 1e-4})

    def run_verify(self, path, *extra):
        with mock.patch.multiple(verify, **SMALL_VERIFY):
            return self.run_cli(["verify", "--config", path] + list(extra))

    def gate_names(self, data):
        return [g["name"] for g in data["sections"]["3_monte_carlo"]["gates"]]

    def test_verify_at_p_one(self):
        code, out, err = self.run_verify(self.verify_config("1", 11), "--no-timing")
        self.assertEqual(code, cli.EXIT_OK, err)
        data = json.loads(out)
        self.assertTrue(data["passed"])
        names = self.gate_names(data)
        self.assertIn("laplace_mean[p=1,t=1,n=5]", names)
        self.assertIn("mean_X[p=1,n=5]", names)
        self.assertFalse(any("1/1" in name for name in names))

    def test_verify(self):
        path = self.verify_config("1/2", 3)
        code, out, err = self.run_verify(path, "--no-timing")
        _, again, _ = self.run_verify(path, "--no-timing")
        _, csv_out, _ = self.run_verify(path, "--format", "csv")
        data = json.loads(out)
        self.assertEqual(out, again)
        self.assertEqual(code, cli.EXIT_OK, err)
        self.assertTrue(data["passed"])
        self.assertIn("Checks:", err)
        self.assertEqual(list(data["sections"]), ["1_exact", "2_quadrature", "3_monte_carlo"])
        self.assertIn("laplace_mean[p=1/2,t=1,n=5]", self.gate_names(data))
        self.assertNotIn("runtime_seconds", data)
        for section in ("1_exact", "2_quadrature"):
            failed = [c["name"] for c in data["sections"][section]["checks"] if not c["passed"]]
            self.assertEqual(failed, [])
        self.assertEqual(csv_out.splitlines()[0], "section,name,kind,passed,observed,reference,tolerance")


if __name__ == "__main__":
    unittest.main()
