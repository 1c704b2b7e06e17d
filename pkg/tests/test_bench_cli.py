import json
import math
import subprocess
import sys

import pytest

from unionbound import __version__
from unionbound.bench import (InstanceRecord, StatsRow, emit_report, parse_models, run_benchmark,
                              run_records, summarize)
from unionbound.cli import EXIT_INFEASIBLE, EXIT_OK, EXIT_USAGE, main
from unionbound.hailperin import hailperin_bounds
from unionbound.model import Instance, generate_instance


@pytest.fixture
def write(tmp_path):
    def _write(name, text):
        p = tmp_path / name
        p.write_text(text)
        return str(p)
    return _write


def lines(text):
    return [json.loads(s) for s in text.splitlines()]


class TestBoundsCommand:
    def test_symmetric_three(self, write, capsys):
        path = write("sym3.json", Instance.symmetric(3, 0.5, 0.25).dumps())
        assert main(["bounds", "--model", "hailperin,bm", "--in", path]) == EXIT_OK
        out = lines(capsys.readouterr().out)
        assert [d["model"] for d in out] == ["hailperin", "bm"]
        for d in out:
            assert d["lb"] == pytest.approx(0.75) and d["ub"] == pytest.approx(1.0)

    def test_exact_mode(self, write, capsys):
        path = write("sym3.json", Instance.symmetric(3, 0.5, 0.25).dumps())
        assert main(["bounds", "--in", path, "--mode", "exact"]) == EXIT_OK
        assert lines(capsys.readouterr().out)[0]["lb"] == 0.75

    def test_every_model(self, write, capsys):
        path = write("two.json", Instance(2, (0.5, 0.5), {(0, 1): 0.25}).dumps())
        assert main(["bounds", "--model", "hailperin,bm,pg,ipg,yat,qpbm", "--in", path]) == EXIT_OK
        out = lines(capsys.readouterr().out)
        assert len(out) == 6
        assert all(d["lb"] == pytest.approx(0.75) and d["ub"] == pytest.approx(0.75) for d in out)

    def test_inconsistent_exits_two(self, write, capsys):
        path = write("bad.json", Instance(2, (0.3, 0.3), {(0, 1): 0.4}).dumps())
        assert main(["bounds", "--in", path]) == EXIT_INFEASIBLE
        assert lines(capsys.readouterr().out)[0]["status"] == "prob_infeasible"

    def test_output_file_and_cut_log(self, write, tmp_path, capsys):
        path = write("inst.json", generate_instance(8, 3, 0.3).dumps())
        out, log = tmp_path / "out.jsonl", tmp_path / "cuts.csv"
        assert main(["bounds", "--model", "qpbm", "--in", path, "--out", str(out),
                     "--cut-log", str(log)]) == EXIT_OK
        assert capsys.readouterr().out == ""
        res = lines(out.read_text())[0]
        rows = log.read_text().splitlines()
        assert rows[0] == "round,k,indices,polarity,gamma,violation"
        assert res["cuts_added"] == len(rows) - 1 > 0

    @pytest.mark.parametrize("argv", [
        ["bounds", "--model", "nosuch", "--in", "x.json"],
        ["bounds", "--model", "", "--in", "x.json"],
        ["bounds", "--model", "qpbm", "--in", "x.json", "--batch", "0"],
        ["bounds", "--model", "qpbm", "--in", "x.json", "--w-size", "3"],
        ["bounds", "--model", "qpbm", "--in", "x.json", "--max-rounds", "-1"],
        ["bounds", "--mode", "rational", "--in", "x.json"],
        ["bench", "--n", "3", "--count", "-1"],
        ["bench", "--n", "3,a"],
        ["bench", "--n", "1"],
        ["generate", "--n", "1"],
        ["frobnicate"],
        [],
    ])
    def test_usage_errors(self, argv, write, capsys):
        write("x.json", Instance.symmetric(3, 0.5, 0.25).dumps())
        assert main(argv) == EXIT_USAGE
        capsys.readouterr()

    def test_missing_file(self, tmp_path, capsys):
        assert main(["bounds", "--in", str(tmp_path / "absent.json")]) == EXIT_USAGE
        assert "cannot read" in capsys.readouterr().err

    def test_malformed_json(self, write, capsys):
        assert main(["bounds", "--in", write("m.json", "{not json")]) == EXIT_USAGE
        assert "malformed JSON" in capsys.readouterr().err

    def test_wrong_shape(self, write, capsys):
        assert main(["bounds", "--in", write("s.json", '{"n": 3}')]) == EXIT_USAGE
        assert "not a valid instance" in capsys.readouterr().err


class TestBenchCommand:
    def test_count_zero_prints_header(self, capsys):
        assert main(["bench", "--n", "4", "--count", "0"]) == EXIT_OK
        assert capsys.readouterr().out == "n,model,side,mean,std,max\n"

    def test_markdown(self, capsys):
        assert main(["bench", "--n", "4", "--count", "3", "--model", "bm,pg", "--format", "markdown"]) == EXIT_OK
        out = capsys.readouterr().out.splitlines()
        assert out[0] == "| n | model | side | mean | std | max |"
        assert len(out) == 2 + 4

    def test_reproducible(self, tmp_path):
        paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
        for p in paths:
            assert main(["bench", "--n", "4,5", "--count", "4", "--seed", "11", "--out", str(p)]) == EXIT_OK
        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_seed_changes_table(self):
        a = run_benchmark([5], 4, 1, ["bm"])
        b = run_benchmark([5], 4, 2, ["bm"])
        assert a != b


class TestGenerateCommand:
    def test_round_trip(self, tmp_path, capsys):
        out = tmp_path / "g.json"
        assert main(["generate", "--n", "5", "--seed", "3", "--out", str(out)]) == EXIT_OK
        inst = Instance.from_json(json.loads(out.read_text()))
        ref = generate_instance(5, 3, 0.3)
        # the generator is exact; the file carries floats
        assert inst.p1 == pytest.approx([float(v) for v in ref.p1])
        assert inst.p2 == pytest.approx({q: float(v) for q, v in ref.p2.items()})
        assert hailperin_bounds(inst).ok

    def test_one_based_on_disk(self, capsys):
        assert main(["generate", "--n", "3", "--seed", "0"]) == EXIT_OK
        d = json.loads(capsys.readouterr().out)
        assert [(q["i"], q["j"]) for q in d["p2"]] == [(1, 2), (1, 3), (2, 3)]

    def test_version(self, capsys):
        with pytest.raises(SystemExit) as e:
            main(["--version"])
        assert e.value.code == 0
        assert capsys.readouterr().out.strip() == f"unionbound {__version__}"

    def test_console_script_module(self):
        res = subprocess.run([sys.executable, "-m", "unionbound.cli", "generate", "--n", "2"],
                             capture_output=True, text=True)
        assert res.returncode == 0 and json.loads(res.stdout)["n"] == 2


class TestReport:
    def test_single_instance_has_zero_spread(self):
        table = run_benchmark([4], 1, 0, ["bm"])
        assert [r.bound_side for r in table] == ["lb", "ub"]
        assert all(r.std == 0.0 and r.instances == 1 for r in table)
        assert ",0.00," in emit_report(table)

    def test_population_std(self):
        recs = run_records([4], 5, 0, ["bm"])
        row = summarize(recs, ["bm"])[1]
        errs = [100 * abs(r.results["bm"].ub - r.results["hailperin"].ub) / r.results["hailperin"].ub
                for r in recs]
        mean = sum(errs) / len(errs)
        assert row.mean == pytest.approx(mean)
        assert row.std == pytest.approx(math.sqrt(sum((e - mean) ** 2 for e in errs) / len(errs)))
        assert row.max == pytest.approx(max(errs))

    def test_zero_optimum_is_skipped_with_a_note(self):
        zero = Instance.symmetric(3, 0.0, 0.0)
        live = generate_instance(3, 1, 0.3)
        recs = []
        for j, inst in enumerate([zero, live]):
            recs.append(InstanceRecord(3, j, j, {"hailperin": hailperin_bounds(inst),
                                                 "bm": hailperin_bounds(inst)}))
        table = summarize(recs, ["bm"])
        assert all(r.instances == 1 and r.skipped == 1 for r in table)
        csv_text = emit_report(table, "csv")
        assert "# n=3 bm lb: 1 instance(s) skipped" in csv_text
        assert "* n=3 bm ub: 1 instance(s) skipped" in emit_report(table, "markdown")

    def test_empty_group_renders_nan(self):
        row = StatsRow(3, "bm", "lb", math.nan, math.nan, math.nan, 0, 2)
        assert "3,bm,lb,nan,nan,nan" in emit_report([row])

    def test_unknown_format(self):
        with pytest.raises(ValueError):
            emit_report([], "xml")

    def test_parse_models(self):
        assert parse_models("pg, bm") == ["pg", "bm"]
        with pytest.raises(ValueError):
            parse_models("bm,lp")
