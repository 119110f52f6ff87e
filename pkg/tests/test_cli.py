import json
import math
import subprocess
import sys
from fractions import Fraction

import numpy as np
import pytest

from gstwalk import graphs as G
from gstwalk.cli import dumps, main, run, to_jsonable
from gstwalk.dsl import format_edge_list


def invoke(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def reject_constant(name):
    raise AssertionError(f"non-JSON constant {name}")


def load_strict(text):
    return json.loads(text, parse_constant=reject_constant)


class TestJsonEncoding:
    def test_scalars(self):
        out = to_jsonable({"z": 1 + 2j, "r": Fraction(3, 6), "nan": math.nan, "inf": -math.inf, "b": np.bool_(True), "i": np.int64(4)})
        assert out == {"z": [1.0, 2.0], "r": "1/2", "nan": None, "inf": None, "b": True, "i": 4}

    def test_dumps_sorted_and_strict(self):
        text = dumps({"b": [np.float64("nan")], "a": 1})
        assert text.index('"a"') < text.index('"b"')
        assert load_strict(text) == {"a": 1, "b": [None]}


class TestVerbs:
    def test_check_holds(self, capsys):
        code, out, err = invoke(capsys, "check", "--graph", "doublestar:2", "--source", "1,2", "--target", "1,2", "--time", "2pi/3")
        rep = load_strict(out)
        assert code == 0 and rep["error"] is None
        assert rep["results"]["gst"]["holds"] is True
        assert rep["results"]["equal_card_structure"]["all_hold"] is True
        assert "GST holds" in err

    def test_check_fails_with_exit_1(self, capsys):
        code, out, _ = invoke(capsys, "check", "--graph", "complete:3", "--source", "1", "--target", "2", "--time", "1")
        assert code == 1 and load_strict(out)["results"]["gst"]["holds"] is False

    def test_certify(self, capsys):
        code, out, _ = invoke(capsys, "certify", "--graph", "hypercube:3", "--source", "1", "--target", "8", "--time", "2pi:1/4")
        assert code == 0
        assert load_strict(out)["results"]["certificate"]["verdict"] == "certified-GST"

    def test_certify_not_gst(self, capsys):
        code, out, _ = invoke(capsys, "certify", "--graph", "complete:2", "--source", "1", "--target", "1", "--time", "2pi:1/4")
        assert code == 1
        assert load_strict(out)["results"]["certificate"]["verdict"] == "certified-not-GST"

    def test_certify_needs_exact_time(self, capsys):
        code, out, _ = invoke(capsys, "certify", "--graph", "complete:2", "--source", "1", "--target", "2", "--time", "pi/2")
        assert code == 2 and load_strict(out)["error"]

    @pytest.mark.parametrize(
        "argv",
        [
            ("check", "--graph", "hypercube(3", "--source", "1", "--target", "8", "--time", "pi/2"),
            ("check", "--graph", "hypercube:3", "--source", "9", "--target", "8", "--time", "pi/2"),
            ("check", "--graph", "hypercube:3", "--source", "1", "--target", "8", "--time", "pie"),
            ("check", "--source", "1", "--target", "8", "--time", "pi/2"),
            ("orbits", "--graph", "petersen", "--source", "1", "--target", "1,2,3,4,5,6,7,8,9,10", "--time", "1"),
        ],
    )
    def test_errors_exit_2(self, capsys, argv):
        code, out, err = invoke(capsys, *argv)
        rep = load_strict(out)
        assert code == 2 and rep["error"]["type"] and rep["results"] is None
        assert "error" in err

    def test_spectrum_and_evolve(self, capsys):
        code, out, _ = invoke(capsys, "spectrum", "--graph", "complete:2")
        assert code == 0
        code, out, _ = invoke(capsys, "evolve", "--graph", "complete:2", "--time", "pi/2")
        rep = load_strict(out)
        assert code == 0
        # complex entries as [re, im]; U(pi/2)_{21} = i
        re, im = rep["results"]["entries"][1][0]
        assert abs(re) < 1e-15 and im == pytest.approx(1.0)
        assert rep["results"]["unitarity_error"] < 1e-14

    def test_scan(self, capsys):
        code, out, err = invoke(capsys, "scan", "--graph", "complete:2", "--from", "0.1", "--to", "2")
        rep = load_strict(out)
        assert code == 0
        assert rep["results"]["scan"]["events"][0]["bijective_pairs"] == [[[1], [2]], [[2], [1]]]
        assert "1 events" in err

    def test_poset_and_topology(self, capsys):
        code, out, _ = invoke(capsys, "poset", "--graph", "path:3", "--time", "pi/sqrt(2)")
        assert code == 0 and load_strict(out)["error"] is None
        code, out, _ = invoke(capsys, "topology", "--graph", "hypercube:2", "--time", "pi/2")
        assert code == 0 and "discrete" in json.dumps(load_strict(out)["results"])

    def test_orbits_double_star(self, capsys):
        code, out, _ = invoke(capsys, "orbits", "--graph", "doublestar:2", "--source", "1,2", "--target", "1,2", "--time", "2pi/3")
        rep = load_strict(out)
        assert code == 0 and rep["results"]["symmetry"]["group_order"] == 8
        assert rep["results"]["symmetry"]["all_hold"] is True

    def test_group_file(self, capsys, tmp_path):
        gfile = tmp_path / "gens.txt"
        gfile.write_text("3 2 1\n")
        code, out, _ = invoke(capsys, "orbits", "--graph", "path:3", "--source", "1", "--target", "3", "--time", "pi/sqrt(2)", "--group", f"@{gfile}")
        assert code == 0 and load_strict(out)["results"]["symmetry"]["group_order"] == 2

    def test_edge_list_source(self, capsys, tmp_path):
        gfile = tmp_path / "k2.txt"
        gfile.write_text(format_edge_list(G.complete(2)))
        code, out, _ = invoke(capsys, "check", "--graph", f"@{gfile}", "--source", "1", "--target", "2", "--time", "pi/2")
        assert code == 0


class TestReports:
    def test_round_trip_byte_identical(self, capsys):
        _, out, _ = invoke(capsys, "scan", "--graph", "doublestar:2", "--from", "0.001", "--to", "6.3")
        assert dumps(load_strict(out)) == out

    def test_out_file(self, capsys, tmp_path):
        path = tmp_path / "rep.json"
        code, out, _ = invoke(capsys, "check", "--graph", "complete:2", "--source", "1", "--target", "2", "--time", "pi/2", "--out", str(path))
        assert code == 0 and out == ""
        rep = load_strict(path.read_text())
        assert rep["schema_version"] == "1.0"
        assert rep["command"]["verb"] == "check"

    def test_deterministic(self):
        argv = ["scan", "--graph", "hypercube:2", "--from", "0.001", "--to", "6.3"]
        assert dumps(run(argv)[0]) == dumps(run(argv)[0])

    def test_module_entry_point(self):
        proc = subprocess.run(
            [sys.executable, "-m", "gstwalk", "check", "--graph", "complete:2", "--source", "1", "--target", "2", "--time", "pi/2"],
            capture_output=True,
            text=True,
            check=False,
        )
        assert proc.returncode == 0
        assert load_strict(proc.stdout)["results"]["gst"]["holds"] is True
