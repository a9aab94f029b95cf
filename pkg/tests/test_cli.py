import csv
import io
import json
import subprocess
import sys

import pytest

from conekit.cli import main
from conekit.problem import ProblemError, parse_problem

from conftest import DATA

DP = json.loads((DATA / "diag_pair.json").read_text())


def write(tmp_path, obj, name="p.json"):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


class TestProblem:
    def test_example_file(self):
        prob = parse_problem(DP)
        assert prob.dim == 2 and prob.system.symbols == ["0", "1"]
        assert set(prob.cones) == {"q0", "q1"}

    @pytest.mark.parametrize(
        "patch",
        [
            {"matrices": {}},
            {"matrices": {"0": [[1, "x"], [0, 1]]}},
            {"dim": 3},
            {"cones": {"q0": {}}},
            {"cones": {"zz": {"generators": [[1, 0], [0, 1]]}}},
            {"initial": {"x0": [1, 2, 3]}},
        ],
    )
    def test_rejects(self, patch):
        with pytest.raises(ProblemError):
            parse_problem({**DP, **patch})

    def test_decimal_strings(self):
        data = {**DP, "matrices": {"0": [["5", "0"], ["0", "1.0"]], "1": [["1", "0"], ["0", "3e0"]]}}
        assert parse_problem(data).system["1"][1, 1] == 3.0


class TestVerify:
    def test_diag_pair(self, capsys):
        code, out, _ = run(["verify", str(DATA / "diag_pair.json")], capsys)
        assert code == 0
        assert json.loads(out)["verdict"] == "StrictlyPathPositive"

    def test_deterministic(self, capsys):
        a = run(["verify", str(DATA / "diag_pair.json")], capsys)[1]
        b = run(["verify", str(DATA / "diag_pair.json")], capsys)[1]
        assert a == b

    def test_swapped_cones(self, tmp_path, capsys):
        data = dict(DP, cones={"q0": DP["cones"]["q1"], "q1": DP["cones"]["q0"]})
        code, out, _ = run(["verify", write(tmp_path, data)], capsys)
        assert code == 1
        cert = json.loads(out)
        assert any("witness" in t for t in cert["transitions"])

    def test_missing_cone(self, tmp_path, capsys):
        data = dict(DP, cones={"q0": DP["cones"]["q0"]})
        assert run(["verify", write(tmp_path, data)], capsys)[0] == 64

    def test_identity_is_nonstrict(self, tmp_path, capsys):
        data = {"matrices": {"0": [[1, 0], [0, 1]]}, "cones": {"K": {"generators": [[1, 0], [0, 1]]}}}
        assert run(["verify", write(tmp_path, data)], capsys)[0] == 2

    def test_schema_errors(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        assert run(["verify", str(bad)], capsys)[0] == 64
        assert run(["verify", str(tmp_path / "missing.json")], capsys)[0] == 64
        assert run(["verify", write(tmp_path, {"cones": {}})], capsys)[0] == 64


class TestFindCone:
    def test_diag_pair_refuted(self, capsys):
        code, out, _ = run(["find-cone", str(DATA / "diag_pair.json"), "--gamma", "0.9"], capsys)
        assert code == 1 and json.loads(out)["status"] == "No"

    def test_gamma_must_be_open(self, capsys):
        for g in ("1.0", "0", "abc"):
            with pytest.raises(SystemExit) as exc:
                main(["find-cone", str(DATA / "diag_pair.json"), "--gamma", g])
            assert exc.value.code == 64

    def test_gamma_required(self, tmp_path, capsys):
        assert run(["find-cone", write(tmp_path, {"matrices": DP["matrices"]})], capsys)[0] == 64

    def test_roundtrip_into_verify(self, tmp_path, capsys):
        prob = {"matrices": {"b": [[2, 1], [1, 2]]}}
        out_file = tmp_path / "cone.json"
        trace = tmp_path / "trace.csv"
        code, _, _ = run(
            ["find-cone", write(tmp_path, prob), "--gamma", "0.4", "--out", str(out_file), "--trace", str(trace)],
            capsys,
        )
        assert code == 0
        assert trace.read_text().startswith("iter,generator_count,best_gamma,verdict_flags\n")
        cone = json.loads(out_file.read_text())["cone"]
        again = dict(prob, cones={"K": {"generators": cone["generators"]}})
        code, out, _ = run(["verify", write(tmp_path, again, "v.json")], capsys)
        assert code == 0
        assert json.loads(out)["global_gamma"] <= 0.4 + 1e-9


class TestSimulate:
    def test_diag_pair(self, capsys):
        code, out, _ = run(["simulate", str(DATA / "diag_pair.json"), "--steps", "50", "--seed", "3"], capsys)
        assert code == 0
        rows = list(csv.DictReader(io.StringIO(out)))
        assert len(rows) == 51
        d = [float(r["hilbert_d"]) for r in rows]
        assert d[-1] < 1e-6 * max(d[0], 1e-12) + 1e-9

    def test_zero_steps_and_pairs(self, capsys):
        code, out, _ = run(["simulate", str(DATA / "diag_pair.json"), "--steps", "0", "--pairs", "2"], capsys)
        lines = out.strip().splitlines()
        assert code == 0 and len(lines) == 3
        assert lines[0] == "pair,step,symbol,state,hilbert_d,normalized_gap,log_scale"

    def test_bad_seed(self):
        with pytest.raises(SystemExit) as exc:
            main(["simulate", str(DATA / "diag_pair.json"), "--seed", "x"])
        assert exc.value.code == 64


def test_pf_cycles(capsys):
    code, out, _ = run(["pf-cycles", str(DATA / "diag_pair.json")], capsys)
    cycles = json.loads(out)
    assert code == 0 and [c["labels"] for c in cycles] == [["0", "1"], ["0"]]
    assert cycles[0]["eigenvalue"] == pytest.approx(5.0)


def test_module_entry_point():
    r = subprocess.run(
        [sys.executable, "-m", "conekit", "verify", str(DATA / "diag_pair.json")],
        capture_output=True,
        text=True,
    )
    assert r.returncode == 0 and '"StrictlyPathPositive"' in r.stdout
