"""End-to-end checks of the stlasso command line.

usage: cli_test.py <stlasso binary> <fit_result schema> <scratch dir>
"""

import csv
import json
import shutil
import subprocess
import sys
import unittest
from pathlib import Path

import jsonschema

CLI = SCHEMA = SCRATCH = None


def run(*args, check=True):
    proc = subprocess.run([str(CLI), *map(str, args)], capture_output=True, text=True)
    if check and proc.returncode != 0:
        raise AssertionError(f"{args} exited {proc.returncode}: {proc.stderr}")
    return proc


def fresh(name):
    d = SCRATCH / name
    shutil.rmtree(d, ignore_errors=True)
    d.mkdir(parents=True)
    return d


def read_rows(path):
    with open(path, newline="") as f:
        return list(csv.DictReader(f))


class Simulated(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.dir = fresh("simulated")
        run("--seed", 11, "--out", cls.dir / "sim", "simulate", "--side", 3, "--T", 150)
        cls.panel = cls.dir / "sim" / "panel.csv"

    def test_fit_result_matches_schema(self):
        out = self.dir / "fit"
        run("--out", out, "fit", "--panel", self.panel, "--lambda1", 0.5)
        doc = json.loads((out / "fit_result.json").read_text())
        jsonschema.validate(doc, json.loads(SCHEMA.read_text()))
        self.assertEqual(doc["n"], 9)
        self.assertEqual(len(doc["params"]["w"]), 81)

    def test_spatiotemporal_model_wins_on_spatial_data(self):
        out = self.dir / "compare"
        run("--out", out, "compare", "--panel", self.panel, "--lambda1", 0.1, "--lambda2", 0.1, "--lambda3", 0.1)
        rows = {r["model"]: r for r in read_rows(out / "comparison.csv")}
        self.assertEqual(set(rows), {"ols", "var1", "spatiotemporal"})
        for col in ("mse", "aic", "bic"):
            best = min(rows, key=lambda m: float(rows[m][col]))
            self.assertEqual(best, "spatiotemporal", col)

    def test_thread_count_does_not_change_results(self):
        outputs = []
        for threads in (1, 3):
            out = self.dir / f"cv{threads}"
            run("--threads", threads, "--out", out, "cv", "--panel", self.panel)
            outputs.append(((out / "cv_scores.csv").read_bytes(), (out / "fit_result.json").read_bytes()))
        self.assertEqual(outputs[0], outputs[1])

    def test_check_reports_feasibility(self):
        out = self.dir / "check"
        run("--out", out, "check", "--params", self.dir / "sim" / "truth.json")
        report = json.loads((out / "check.json").read_text())
        self.assertTrue(report["feasible"])


class Errors(unittest.TestCase):
    def test_unknown_flag(self):
        self.assertEqual(run("fit", "--no-such-flag", check=False).returncode, 2)

    def test_unknown_subcommand(self):
        self.assertEqual(run("frobnicate", check=False).returncode, 2)

    def test_unknown_config_key(self):
        d = fresh("errors")
        (d / "config.json").write_text('{"seed": 1, "penalty": {"lambda4": 1.0}}')
        proc = run("--config", d / "config.json", "--out", d / "out", "simulate", check=False)
        self.assertEqual(proc.returncode, 2)
        self.assertIn("lambda4", proc.stderr)

    def test_infer_needs_a_fit(self):
        d = fresh("nofit")
        run("--out", d / "sim", "simulate", "--T", 40)
        proc = run("--out", d / "infer", "infer", "--panel", d / "sim" / "panel.csv", check=False)
        self.assertEqual(proc.returncode, 2)

    def test_missing_panel_file(self):
        d = fresh("nopanel")
        proc = run("--out", d / "fit", "fit", "--panel", d / "absent.csv", check=False)
        self.assertNotEqual(proc.returncode, 0)


if __name__ == "__main__":
    CLI, SCHEMA, SCRATCH = (Path(a) for a in sys.argv[1:4])
    unittest.main(argv=sys.argv[:1], verbosity=2)
