# SPDX-License-Identifier: Apache-2.0
# Copyright (c) 2026 The nbcav Authors
"""End-to-end tests of the nbcav command line.

Usage: test_cli.py <path-to-nbcav> <project-dir>
"""

import json
import math
import os
import subprocess
import sys
import tempfile
import unittest
import xml.etree.ElementTree as ET

import jsonschema

CLI = None
PROJECT = None


def run(*args, stdin=None, cwd=None):
    return subprocess.run([CLI, *args], input=stdin, capture_output=True, cwd=cwd, timeout=300)


def values(doc):
    return {k: v["value"] for k, v in doc["result"]["fit"]["parameters"].items()}


class CliTest(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        with open(os.path.join(PROJECT, "schemas", "nbcav-output.schema.json")) as f:
            cls.schema = json.load(f)
        cls.validator = jsonschema.Draft202012Validator(cls.schema)

    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.tmp = self._tmp.name

    def tearDown(self):
        self._tmp.cleanup()

    def path(self, name):
        return os.path.join(self.tmp, name)

    def ok(self, *args, stdin=None):
        r = run(*args, stdin=stdin)
        self.assertEqual(r.returncode, 0, msg=r.stderr.decode())
        return r

    def fit_json(self, *args):
        doc = json.loads(self.ok(*args).stdout)
        self.validator.validate(doc)
        return doc

    def stderr_error(self, r):
        lines = [l for l in r.stderr.decode().splitlines() if l.strip()]
        self.assertTrue(lines, "expected a JSON error on stderr")
        return json.loads(lines[0])["error"]

    def test_s11_round_trip_through_files(self):
        self.ok("synth", "s11", "--seed", "7", "--sigma", "0.01", "-o", self.path("s11.csv"))
        doc = self.fit_json("fit-s11", self.path("s11.csv"))
        v = values(doc)
        self.assertLess(abs(v["qInt"] / 1.4e9 - 1), 0.02)
        self.assertLess(abs(v["qCoupling"] / 1.4e9 - 1), 0.02)
        self.assertTrue(doc["result"]["fit"]["converged"])

    def test_s11_round_trip_through_pipe(self):
        data = self.ok("synth", "s11", "--seed", "7", "--set", "qInt=2e9").stdout
        v = values(json.loads(self.ok("fit-s11", "-", stdin=data).stdout))
        self.assertLess(abs(v["qInt"] / 2e9 - 1), 1e-6)

    def test_every_generator_feeds_its_fitter(self):
        cases = [
            ("ringdown", ["fit-ringdown"], "tau", 0.012, 0.05),
            ("tls", ["fit-tls", "--f0", "6.5GHz"], "lossTangentProduct", 5e-10, 0.10),
            ("numbersplit", ["fit-numbersplit"], "chi", 28e3, 0.05),
            ("t1", ["fit-t1"], "t1", 0.0113, 0.04),
        ]
        for gen, fit, key, truth, tol in cases:
            with self.subTest(gen=gen):
                out = self.path(gen + ".csv")
                sigma = "0.01" if gen != "tls" else "0.03"
                self.ok("synth", gen, "--seed", "11", "--sigma", sigma, "-o", out)
                v = values(self.fit_json(*fit, out))
                self.assertLess(abs(v[key] / truth - 1), tol)

    def test_xps_fit_recovers_areas(self):
        self.ok("synth", "nb3d", "--seed", "3", "-o", self.path("nb3d.csv"))
        doc = self.fit_json("xps", "fit", self.path("nb3d.csv"), "--fixed-widths")
        areas = {s["species"]: s["area"] for s in doc["result"]["species"]}
        # Endpoint levels include the Lorentzian wings, so areas are biased by a few 0.1%.
        self.assertAlmostEqual(areas["NbMetal"] / 1000.0, 1.0, delta=0.01)
        self.assertAlmostEqual(areas["Nb2O5"] / 2000.0, 1.0, delta=0.01)
        self.assertTrue(doc["result"]["shirley"]["converged"])

    def test_malformed_header_exits_2_without_output(self):
        with open(self.path("bad.csv"), "w") as f:
            f.write("frequency,re,im\n1,0,0\n")
        out = self.path("bad.json")
        plot = self.path("bad.svg")
        r = run("fit-s11", self.path("bad.csv"), "-o", out, "--plot", plot)
        self.assertEqual(r.returncode, 2)
        self.assertFalse(os.path.exists(out))
        self.assertFalse(os.path.exists(plot))
        err = self.stderr_error(r)
        self.assertEqual(err["code"], 2)
        self.assertIn("header", err["message"])

    def test_unknown_override_rejected(self):
        self.ok("synth", "s11", "-o", self.path("s11.csv"))
        r = run("fit-s11", self.path("s11.csv"), "--set", "qint=1e9", "-o", self.path("x.json"))
        self.assertEqual(r.returncode, 2)
        self.assertFalse(os.path.exists(self.path("x.json")))
        self.assertIn("qint", self.stderr_error(r)["message"])
        r = run("synth", "t1", "--set", "tau=1", "-o", self.path("t1.csv"))
        self.assertEqual(r.returncode, 2)
        self.assertFalse(os.path.exists(self.path("t1.csv")))

    def test_precondition_violation_exits_4(self):
        r = run("synth", "s11", "--set", "qInt=-1")
        self.assertEqual(r.returncode, 4)
        self.assertEqual(self.stderr_error(r)["kind"], "precondition_violation")
        r = run("xps", "sputter-cal", "--film-nm", "73", "--cycles", "0", "--dwell-s", "180")
        self.assertEqual(r.returncode, 4)

    def test_usage_error_exits_2(self):
        r = run("fit-s11")
        self.assertEqual(r.returncode, 2)
        self.assertEqual(self.stderr_error(r)["kind"], "usage_error")

    def test_sputter_calibration(self):
        doc = self.fit_json("xps", "sputter-cal", "--film-nm", "73", "--cycles", "11", "--dwell-s", "180")
        rate = doc["result"]["angstrom_per_second"]
        self.assertEqual(round(rate, 3), 0.369)
        self.assertTrue(0.3 <= rate <= 0.4)

    def test_pipeline_is_byte_identical(self):
        outputs = []
        for rep in range(2):
            d = self.path("run%d" % rep)
            os.mkdir(d)
            steps = [("synth", "s11", "--seed", "42", "--sigma", "0.01", "-o", "t.csv"),
                     ("fit-s11", "t.csv", "-o", "fit.json", "--plot", "fit.svg")]
            for step in steps:
                r = run(*step, cwd=d)
                self.assertEqual(r.returncode, 0, msg=r.stderr.decode())
            blobs = []
            for name in ("t.csv", "fit.json", "fit.svg"):
                with open(os.path.join(d, name), "rb") as f:
                    blobs.append(f.read())
            outputs.append(blobs)
        self.assertEqual(outputs[0], outputs[1])

    def test_svg_is_well_formed(self):
        self.ok("synth", "s11", "--seed", "1", "--sigma", "0.01", "-o", self.path("s.csv"))
        self.ok("fit-s11", self.path("s.csv"), "--plot", self.path("s.svg"))
        root = ET.parse(self.path("s.svg")).getroot()
        self.assertTrue(root.tag.endswith("svg"))
        self.assertEqual(len(root.findall("{http://www.w3.org/2000/svg}polyline")), 2)

    def test_batch_isolates_failures_and_sorts(self):
        d = self.path("batch")
        os.mkdir(d)
        for i, name in enumerate(["c.csv", "a.csv"]):
            self.ok("synth", "ringdown", "--seed", str(i), "--sigma", "0.01", "-o", os.path.join(d, name))
        with open(os.path.join(d, "b.csv"), "w") as f:
            f.write("delay_s,power\n0,1\n1,oops\n")
        with open(os.path.join(d, "notes.txt"), "w") as f:
            f.write("ignored\n")
        r = run("fit-ringdown", d)
        self.assertEqual(r.returncode, 2)
        doc = json.loads(r.stdout)
        self.validator.validate(doc)
        names = [os.path.basename(e["input"]) for e in doc["files"]]
        self.assertEqual(names, ["a.csv", "b.csv", "c.csv"])
        self.assertEqual([e["status"] for e in doc["files"]], [0, 2, 0])
        self.assertIn("b.csv:3", doc["files"][1]["error"]["message"])

    def test_survey_groups(self):
        for group, q in (("h2o", 1.4e9), ("hno3", 0.7e9)):
            os.makedirs(self.path("survey/" + group))
            for seed in range(3):
                self.ok("synth", "s11", "--seed", str(seed + int(q / 1e8)), "--sigma", "0.005",
                        "--set", "qInt=%g" % q, "-o", self.path("survey/%s/c%d.csv" % (group, seed)))
        doc = self.fit_json("survey", self.path("survey"))
        groups = {g["group"]: g for g in doc["result"]["groups"]}
        self.assertEqual(set(groups), {"h2o", "hno3"})
        self.assertEqual(groups["h2o"]["files"], 3)
        self.assertLess(abs(groups["h2o"]["q_int_mean"] / 1.4e9 - 1), 0.02)
        self.assertLess(abs(groups["hno3"]["q_int_mean"] / 0.7e9 - 1), 0.02)
        self.assertGreater(groups["h2o"]["q_int_std"], 0)
        csv = self.ok("survey", self.path("survey"), "--format", "csv").stdout.decode().splitlines()
        self.assertEqual(csv[0], "group,files,q_int_mean,q_int_std,q_coupling_mean,q_coupling_std")
        self.assertEqual([l.split(",")[0] for l in csv[1:]], ["h2o", "hno3"])

    def test_schema_rejects_malformed_documents(self):
        self.ok("synth", "t1", "--seed", "5", "-o", self.path("t1.csv"))
        doc = self.fit_json("fit-t1", self.path("t1.csv"))
        broken = json.loads(json.dumps(doc))
        del broken["result"]["derived"]
        with self.assertRaises(jsonschema.ValidationError):
            self.validator.validate(broken)
        broken = json.loads(json.dumps(doc))
        del broken["result"]["fit"]["parameters"]["t1"]
        with self.assertRaises(jsonschema.ValidationError):
            self.validator.validate(broken)

    def test_indirect_thickness_fixture(self):
        with open(os.path.join(PROJECT, "tests", "fixtures", "oxide_intensity_ratios.json")) as f:
            fixture = json.load(f)
        totals = {}
        for key in ("30min", "3week"):
            p = self.path(key + ".json")
            with open(p, "w") as f:
                json.dump(fixture[key], f)
            doc = self.fit_json("xps", "thickness", p, "--mode", "indirect")
            totals[key] = doc["result"]["thickness_nm"]
        self.assertAlmostEqual(totals["30min"], 3.589, delta=5e-4)
        self.assertAlmostEqual(totals["3week"], 4.974, delta=5e-4)

    def test_direct_thickness(self):
        with open(self.path("profile.csv"), "w") as f:
            f.write("cycle,oxygen_fraction\n")
            for c in range(25):
                f.write("%d,%r\n" % (c, 0.02 + 0.6 * math.exp(-c / 3.0)))
        doc = self.fit_json("xps", "thickness", self.path("profile.csv"), "--mode", "direct",
                            "--nm-per-cycle", "0.47")
        self.assertTrue(doc["result"]["resolved"])
        self.assertAlmostEqual(doc["result"]["thickness_nm"],
                               0.47 * doc["result"]["fractional_cycle"], places=12)

    def test_roughness_csv(self):
        with open(self.path("map.csv"), "w") as f:
            f.write("# pitch_m=1e-6\n")
            for r in range(4):
                f.write(",".join("1e-9" if (r + c) % 2 == 0 else "-1e-9" for c in range(4)) + "\n")
        doc = self.fit_json("roughness", self.path("map.csv"))
        self.assertAlmostEqual(doc["result"]["ra_nm"], 1.0, places=9)
        self.assertAlmostEqual(doc["result"]["rms_nm"], 1.0, places=9)

    def test_etch_budget(self):
        with open(self.path("plan.json"), "w") as f:
            json.dump({"surface_area_m2": 0.007, "etch_depth_um": 100, "bath_volume_l": 0.6,
                       "etch_rate_um_per_min": 1}, f)
        doc = self.fit_json("etch", "budget", self.path("plan.json"))
        nb = doc["result"]["dissolved_nb"]
        self.assertAlmostEqual(nb["grams_per_liter"], 9.998, delta=1e-3)
        self.assertTrue(nb["below_design"])
        self.assertLessEqual(doc["result"]["dissipated_power_w"]["hi"], 10.0)
        with open(self.path("bad_plan.json"), "w") as f:
            json.dump({"surface_area_m2": 0.007, "etch_depth": 100}, f)
        r = run("etch", "budget", self.path("bad_plan.json"))
        self.assertEqual(r.returncode, 2)

    def test_photon_number_from_attenuation_sidecar(self):
        self.ok("synth", "s11", "--seed", "9", "-o", self.path("p.csv"))
        with open(self.path("p.attenuation.json"), "w") as f:
            json.dump({"source_dbm": -20, "attenuation_db": [20, 30, 30, 10]}, f)
        derived = self.fit_json("fit-s11", self.path("p.csv"))["result"]["derived"]
        self.assertAlmostEqual(derived["input_power_w"], 1e-14, delta=1e-26)
        self.assertGreater(derived["mean_photon_number"], 0)

    def test_csv_output(self):
        self.ok("synth", "t1", "--seed", "2", "-o", self.path("t1.csv"))
        lines = self.ok("fit-t1", self.path("t1.csv"), "--format", "csv").stdout.decode().splitlines()
        self.assertEqual(lines[0], "key,value")
        keys = dict(l.split(",", 1) for l in lines[1:])
        self.assertIn("fit.parameters.t1.value", keys)
        self.assertIn("derived.t1_ms", keys)


if __name__ == "__main__":
    CLI = os.path.abspath(sys.argv[1])
    PROJECT = os.path.abspath(sys.argv[2])
    unittest.main(argv=[sys.argv[0]], verbosity=2)
