# Standard Imports
import json
import shutil
import tempfile
import unittest

# ThirdParty Imports
import numpy as np

# Internal Imports
import nearid.errors as e
from nearid.cli import output, plots


class TestOutput(unittest.TestCase):
    def setUp(self):
        self.directory = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.directory)

    def test_json_document(self):
        path = output.write_json(
            self.directory, "r.json", {"m": 4}, "abc", {"x": np.float64(0.5), "ok": np.bool_(True)}
        )
        with open(path) as fh:
            document = json.load(fh)
        self.assertEqual(document["config"], {"m": 4})
        self.assertEqual(document["config_sha256"], "abc")
        self.assertEqual(document["result"], {"ok": True, "x": 0.5})

    def test_cells(self):
        self.assertEqual(output.cell(None), "")
        self.assertEqual(output.cell(True), "true")
        self.assertEqual(output.cell(0.1), "0.1")
        self.assertEqual(output.cell(3), "3")

    def test_csv_round_trip(self):
        rows = [{"step": 0, "loss": 0.5}, {"step": 1, "loss": None}]
        path = output.write_csv(self.directory, "t.csv", "abc", ["step", "loss"], rows)
        digest, columns, read = output.read_csv(path)
        self.assertEqual(digest, "abc")
        self.assertEqual(columns, ["step", "loss"])
        self.assertEqual(read, [{"step": "0", "loss": "0.5"}, {"step": "1", "loss": ""}])

    def test_header_without_rows_raises(self):
        path = output.write_csv(self.directory, "t.csv", "abc", ["step", "loss"], [])
        with self.assertRaises(e.DatasetError):
            output.read_csv(path)

    def test_plot_kinds(self):
        self.assertEqual(plots.kind_of(["m", "epsilon_target", "max_cert"]), "decay")
        self.assertEqual(plots.kind_of(["step", "loss", "grad_norm"]), "trajectory")
        with self.assertRaises(e.DatasetError):
            plots.kind_of(["a", "b"])
