"""Command-line surface, expression parsing, disk cache, and claim runner."""

import json
import xml.etree.ElementTree as ET

import pytest
from click.testing import CliRunner

from mayext.may_core import ParseError, PrimeContext
from mayext.may_diff import SCHEMA_VERSION, e2_at
from mayext.cli_runner import (
    DiskCache,
    Session,
    eval_expr,
    load_claims,
    main,
    run_claims,
    summary_to_report,
)

C5 = PrimeContext(5)
C7 = PrimeContext(7)


@pytest.fixture()
def runner():
    return CliRunner()


class TestEvalExpr:
    def test_precedence(self):
        assert eval_expr("2+3*4", C5) == 14
        assert eval_expr("2*3^2", C5) == 18
        assert eval_expr("(2+3)*4", C5) == 20
        assert eval_expr("2^3^2", C5) == 512

    def test_variables(self):
        assert eval_expr("p^2*q", C5) == 200
        assert eval_expr("p*(p+1)*q - 4*q", C5) == 208

    def test_unary_minus(self):
        assert eval_expr("-p^2", C7) == -49
        assert eval_expr("3--2", C5) == 5
        assert eval_expr("-(p+1)", C5) == -6

    def test_int_passthrough(self):
        assert eval_expr(12, C5) == 12
        assert eval_expr(-3, C5) == -3

    def test_whitespace(self):
        assert eval_expr("  p ^ 2  * q ", C5) == 200

    def test_unknown_name_reports_column(self):
        with pytest.raises(ParseError) as err:
            eval_expr("q + foo", C5)
        assert "foo" in str(err.value)

    @pytest.mark.parametrize("bad", ["", "2+", "(2", "2^-1", "p q", "3..2", True, None, 2.5])
    def test_rejects(self, bad):
        with pytest.raises(ParseError):
            eval_expr(bad, C5)


class TestDiskCache:
    def test_round_trip(self, tmp_path):
        cache = DiskCache(tmp_path)
        key = {"module": "e2", "p": 5, "s": 1, "t": 8, "schema_version": SCHEMA_VERSION}
        assert cache.get(key) is None
        cache.put(key, {"answer": 41})
        assert cache.get(key) == {"answer": 41}

    def test_path_is_key_canonical(self, tmp_path):
        cache = DiskCache(tmp_path)
        a = cache.path_for({"x": 1, "y": 2})
        b = cache.path_for({"y": 2, "x": 1})
        assert a == b

    def test_corrupt_file_is_a_miss(self, tmp_path, capsys):
        cache = DiskCache(tmp_path)
        key = {"p": 5}
        cache.put(key, 7)
        cache.path_for(key).write_text("{not json")
        assert cache.get(key) is None
        assert "corrupt" in capsys.readouterr().err

    def test_key_mismatch_is_a_miss(self, tmp_path, capsys):
        cache = DiskCache(tmp_path)
        key = {"p": 5, "s": 1}
        cache.put(key, 7)
        cache.path_for(key).write_text(json.dumps({"key": {"p": 7}, "value": 9}))
        assert cache.get(key) is None
        assert "mismatch" in capsys.readouterr().err

    def test_no_stray_tmp_files(self, tmp_path):
        cache = DiskCache(tmp_path)
        cache.put({"p": 5}, list(range(50)))
        assert not list(tmp_path.glob("*.tmp"))


class TestSession:
    def test_memo_returns_same_report(self):
        session = Session(C7)
        assert session.report(1, 588) is session.report(1, 588)

    def test_disk_round_trip(self, tmp_path):
        first = Session(C7, cache_dir=tmp_path)
        direct = first.report(1, 588)
        assert list(tmp_path.glob("*.json"))
        second = Session(C7, cache_dir=tmp_path)
        cached = second.report(1, 588)
        assert cached.serialize() == direct.serialize()

    def test_summary_round_trip(self):
        rep = e2_at(C7, 5, 29413)
        back = summary_to_report(C7, rep.serialize())
        assert back.e1_total == rep.e1_total
        assert back.e2_total == rep.e2_total
        assert back.serialize() == rep.serialize()


class TestBasicCommands:
    def test_basis(self, runner):
        res = runner.invoke(main, ["-p", "7", "basis", "1", "p^2*q"])
        assert res.exit_code == 0
        assert res.stdout == "h[1,2]  u=1\n"
        assert "total 1" in res.stderr

    def test_d1(self, runner):
        res = runner.invoke(main, ["-p", "7", "d1", "a2"])
        assert res.exit_code == 0
        assert res.stdout.strip() == "6 a0 h[2,0] + 6 a1 h[1,1]"

    def test_e2_text(self, runner):
        res = runner.invoke(main, ["-p", "7", "e2", "1", "588"])
        assert res.exit_code == 0
        assert "first-term dim 1" in res.stdout
        assert "second-term dim 1" in res.stdout
        assert "h[1,2]" in res.stdout

    def test_e2_json(self, runner):
        res = runner.invoke(main, ["-p", "7", "e2", "1", "p^2*q", "--json"])
        data = json.loads(res.stdout)
        assert data["schema"] == SCHEMA_VERSION
        assert (data["p"], data["s"], data["t"]) == (7, 1, 588)
        assert data["e2"] == 1

    def test_vanish_exact(self, runner):
        res = runner.invoke(main, ["-p", "7", "vanish", "1", "q"])
        assert res.exit_code == 0
        assert res.stdout.strip() == "(1,12): DimCertified, dim = 1"

    def test_vanish_upper_bound(self, runner):
        res = runner.invoke(main, ["-p", "7", "vanish", "1", "p^2*q"])
        assert res.stdout.strip() == "(1,588): UpperBound, dim <= 1"

    def test_window_text(self, runner):
        res = runner.invoke(main, ["-p", "7", "window", "1", "p^2*q", "--r-max", "2"])
        assert res.exit_code == 0
        assert "r=2: target (3,589) UpperBound; source vacuous" in res.stdout
        assert "permanent cycle up to r=1; not a boundary: full" in res.stdout

    def test_window_json(self, runner):
        res = runner.invoke(
            main, ["-p", "7", "window", "1", "p^2*q", "--r-max", "3", "--json"]
        )
        data = json.loads(res.stdout)
        assert data["not_boundary"] == "full"
        assert len(data["rows"]) == 2
        assert data["rows"][0]["source"] == {"vacuous": True}

    def test_les_text(self, runner):
        res = runner.invoke(main, ["-p", "5", "les", "M", "1", "p^2*q"])
        assert res.exit_code == 0
        assert res.stdout.splitlines()[0] == "M(1,200): dim in [1,1] (exact)"

    def test_les_json(self, runner):
        res = runner.invoke(main, ["-p", "5", "les", "K", "1", "p^2*q", "--json"])
        data = json.loads(res.stdout)
        assert data == {
            "spectrum": "K",
            "s": 1,
            "t": 200,
            "lo": 1,
            "hi": 1,
            "exact": True,
            "provenance": data["provenance"],
        }

    def test_stems(self, runner):
        res = runner.invoke(main, ["-p", "5", "stems", "h0h", "-P", "n=2"])
        assert res.stdout.strip() == str(5**2 * 8 + 8 - 2)

    def test_stems_expression_value(self, runner):
        res = runner.invoke(main, ["-p", "5", "stems", "alpha", "-P", "t=1", "-P", "n=1"])
        assert res.stdout.strip() == "39"

    def test_stems_bad_param(self, runner):
        res = runner.invoke(main, ["-p", "5", "stems", "h0h", "-P", "n2"])
        assert res.exit_code == 2


class TestGreekCommands:
    def test_beta_list(self, runner):
        res = runner.invoke(main, ["greek", "beta-list", "p*(p+1)*q-4*q"])
        assert res.stdout.strip() == "beta[1,1,4,0]"

    def test_beta_check_admissible(self, runner):
        res = runner.invoke(main, ["greek", "beta-check", "beta[1,1,4,0]"])
        assert res.exit_code == 0
        assert res.stdout.strip() == "admissible"

    def test_beta_check_inadmissible_exit_one(self, runner):
        res = runner.invoke(main, ["greek", "beta-check", "beta[5,1,4,0]"])
        assert res.exit_code == 1
        assert res.stdout.strip() == "inadmissible"

    def test_beta_check_strict(self, runner):
        res = runner.invoke(main, ["greek", "beta-check", "beta[1,1,4,0]", "--strict"])
        assert res.exit_code == 1

    def test_beta_check_wrong_family(self, runner):
        res = runner.invoke(main, ["greek", "beta-check", "alpha[1,1]"])
        assert res.exit_code == 2

    def test_ext0(self, runner):
        res = runner.invoke(main, ["greek", "ext0", "2"])
        assert res.stdout.splitlines() == ["v2^25", "v1^24 c1~[21,0]"]
        assert "degree 1200" in res.stderr

    def test_ext0_outer_exponent(self, runner):
        res = runner.invoke(main, ["greek", "ext0", "2", "-t", "2"])
        assert res.stdout.splitlines() == ["v2^50", "v1^24 c1~[46,0]"]

    def test_ext1(self, runner):
        res = runner.invoke(main, ["greek", "ext1", "4"])
        assert res.stdout.splitlines() == ["h4", "v2^100 h2", "v2^104 h0", "c2[1,2]"]

    def test_alpha(self, runner):
        res = runner.invoke(main, ["greek", "alpha", "p*q"])
        assert res.stdout.strip() == "alpha[1,1]  denominator 2"

    def test_thom(self, runner):
        res = runner.invoke(main, ["greek", "thom", "beta[1,1,4,0]"])
        assert res.stdout.strip() == "h0h[2]"

    def test_thom_no_entry(self, runner):
        res = runner.invoke(main, ["greek", "thom", "alpha[1,1]"])
        assert res.exit_code == 0
        assert res.stdout.strip() == "NoDictionaryEntry"

    def test_thom_parse_error(self, runner):
        res = runner.invoke(main, ["greek", "thom", "beta[1,2]"])
        assert res.exit_code == 2


class TestChart:
    def test_json_cells(self, runner):
        res = runner.invoke(main, ["chart", "--s-max", "2", "--t-max", "20"])
        data = json.loads(res.stdout)
        assert data["schema"] == SCHEMA_VERSION and data["p"] == 5
        cells = {(c["s"], c["t"]): c for c in data["cells"]}
        assert cells[(1, 1)]["reps"] == ["a0"]
        assert cells[(1, 8)]["reps"] == ["h[1,0]"]
        assert cells[(2, 2)]["reps"] == ["a0^2"]
        for cell in data["cells"]:
            assert cell["stem"] == cell["t"] - cell["s"]
            assert cell["e2"] >= 1

    def test_tsv(self, runner):
        res = runner.invoke(main, ["chart", "--s-max", "1", "--t-max", "10", "--format", "tsv"])
        lines = res.stdout.splitlines()
        assert lines[0] == "s\tt\tstem\te1\te2\tverdict\treps"
        assert any(line.startswith("1\t1\t0\t") for line in lines[1:])

    def test_svg_is_well_formed(self, runner):
        res = runner.invoke(main, ["chart", "--s-max", "2", "--t-max", "20", "--format", "svg"])
        root = ET.fromstring(res.stdout)
        assert root.tag.endswith("svg")
        ns = {"svg": "http://www.w3.org/2000/svg"}
        assert len(root.findall(".//svg:circle", ns)) >= 3
        assert root.findall(".//svg:title", ns)

    def test_output_file(self, runner, tmp_path):
        out = tmp_path / "chart.json"
        res = runner.invoke(
            main, ["chart", "--s-max", "1", "--t-max", "10", "-o", str(out)]
        )
        assert res.exit_code == 0
        assert json.loads(out.read_text())["cells"]

    def test_bad_window(self, runner):
        res = runner.invoke(main, ["chart", "--s-max", "-1", "--t-max", "10"])
        assert res.exit_code == 1


SMALL_CLAIMS = {
    "claims": [
        {"kind": "e2_dim", "p": 5, "s": 1, "t": "q", "expect": 1},
        {"kind": "e2_dim", "p": 5, "s": 1, "t": "q", "expect": 2},
        {"kind": "ext_vanishing", "p": 5, "s": 1, "t": "q", "expect": "zero"},
        {
            "kind": "stem",
            "p": 5,
            "family": "beta_tilde",
            "params": {"s": 2},
            "expect": "2*p*q+q-2",
            "conjectural": True,
        },
        {"kind": "no_such_kind", "p": 5, "expect": 1},
        {"kind": "e2_dim", "s": 1, "t": 8, "expect": 1},
    ]
}


def write_claims(tmp_path, doc):
    path = tmp_path / "claims.json"
    path.write_text(json.dumps(doc))
    return str(path)


class TestRunClaims:
    def test_statuses(self, tmp_path):
        results = run_claims(SMALL_CLAIMS["claims"])
        statuses = [r.status for r in results]
        assert statuses == [
            "pass",
            "fail",
            "uncertified",
            "skipped-conjectural",
            "error",
            "error",
        ]
        assert "cannot certify zero" in results[2].detail
        assert "unknown claim kind" in results[4].detail
        assert "needs a prime" in results[5].detail

    def test_include_conjectures_runs_them(self):
        results = run_claims(SMALL_CLAIMS["claims"][3:4], include_conjectures=True)
        assert results[0].status == "pass"

    def test_jobs_preserve_order(self):
        claims = SMALL_CLAIMS["claims"][:3] * 2
        serial = [r.status for r in run_claims(claims)]
        threaded = [r.status for r in run_claims(claims, jobs=3)]
        assert serial == threaded

    def test_load_claims_accepts_bare_list(self, tmp_path):
        path = write_claims(tmp_path, [{"kind": "e2_dim"}])
        assert load_claims(path) == [{"kind": "e2_dim"}]

    def test_load_claims_rejects_other_shapes(self, tmp_path):
        from mayext.may_core import InvalidParams

        path = write_claims(tmp_path, {"claims": 3})
        with pytest.raises(InvalidParams):
            load_claims(path)

    def test_shipped_corpus_loads(self):
        claims = load_claims()
        assert len(claims) > 200
        assert all("kind" in c and "p" in c and "source" in c for c in claims)


class TestVerifyCommand:
    def test_mixed_file_exits_one(self, runner, tmp_path):
        path = write_claims(tmp_path, SMALL_CLAIMS)
        res = runner.invoke(main, ["verify", path])
        assert res.exit_code == 1
        assert "6 claims:" in res.stdout
        assert "1 error" not in res.stdout  # two errors aggregate
        assert "2 error" in res.stdout

    def test_passing_file_exits_zero(self, runner, tmp_path):
        doc = {"claims": [SMALL_CLAIMS["claims"][0], SMALL_CLAIMS["claims"][3]]}
        path = write_claims(tmp_path, doc)
        res = runner.invoke(main, ["verify", path])
        assert res.exit_code == 0
        assert "skipped-conjectural" in res.stdout

    def test_include_conjectures_flag(self, runner, tmp_path):
        doc = {"claims": [SMALL_CLAIMS["claims"][3]]}
        path = write_claims(tmp_path, doc)
        res = runner.invoke(main, ["verify", path, "--include-conjectures"])
        assert res.exit_code == 0
        assert "skipped" not in res.stdout

    def test_json_output(self, runner, tmp_path):
        path = write_claims(tmp_path, SMALL_CLAIMS)
        res = runner.invoke(main, ["verify", path, "--json"])
        data = json.loads(res.stdout)
        assert data["ok"] is False
        assert data["counts"]["pass"] == 1
        assert data["counts"]["error"] == 2
        assert data["results"][0]["status"] == "pass"

    def test_json_output_is_deterministic(self, runner, tmp_path):
        path = write_claims(tmp_path, SMALL_CLAIMS)
        one = runner.invoke(main, ["verify", path, "--json"]).stdout
        two = runner.invoke(main, ["verify", path, "--json"]).stdout
        assert one == two

    def test_source_is_echoed(self, runner, tmp_path):
        doc = {"claims": [dict(SMALL_CLAIMS["claims"][0], source="unit fixture")]}
        path = write_claims(tmp_path, doc)
        res = runner.invoke(main, ["verify", path])
        assert "(unit fixture)" in res.stdout

    def test_invalid_json_file(self, runner, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{nope")
        res = runner.invoke(main, ["verify", str(path)])
        assert res.exit_code == 2


class TestCacheThroughCli:
    def invoke_e2(self, runner, cache_dir):
        return runner.invoke(
            main,
            ["-p", "7", "--cache-dir", str(cache_dir), "e2", "1", "p^2*q", "--json"],
        )

    def test_cached_rerun_matches(self, runner, tmp_path):
        first = self.invoke_e2(runner, tmp_path)
        assert first.exit_code == 0
        assert list(tmp_path.glob("*.json"))
        second = self.invoke_e2(runner, tmp_path)
        assert second.stdout == first.stdout

    def test_corrupt_cache_recovers(self, runner, tmp_path):
        first = self.invoke_e2(runner, tmp_path)
        for path in tmp_path.glob("*.json"):
            path.write_text("{nope")
        second = self.invoke_e2(runner, tmp_path)
        assert second.exit_code == 0
        assert second.stdout == first.stdout
        assert "corrupt" in second.stderr

    def test_foreign_record_recovers(self, runner, tmp_path):
        first = self.invoke_e2(runner, tmp_path)
        for path in tmp_path.glob("*.json"):
            path.write_text(json.dumps({"key": {"module": "other"}, "value": {}}))
        second = self.invoke_e2(runner, tmp_path)
        assert second.exit_code == 0
        assert second.stdout == first.stdout
        assert "mismatch" in second.stderr

    def test_envvar_cache_dir(self, runner, tmp_path):
        res = runner.invoke(
            main,
            ["-p", "7", "e2", "1", "q", "--json"],
            env={"MAYEXT_CACHE": str(tmp_path)},
        )
        assert res.exit_code == 0
        assert list(tmp_path.glob("*.json"))


class TestErrorSurface:
    def test_bad_prime_is_usage_error(self, runner):
        res = runner.invoke(main, ["-p", "4", "basis", "1", "1"])
        assert res.exit_code == 2
        assert "odd prime" in res.stderr

    def test_parse_error_is_usage_error(self, runner):
        res = runner.invoke(main, ["basis", "1", "p+"])
        assert res.exit_code == 2

    def test_domain_error_is_exit_one(self, runner):
        res = runner.invoke(main, ["e2", "0-1", "5"])
        assert res.exit_code == 1
        assert "Error" in res.stderr

    def test_window_range_error(self, runner):
        res = runner.invoke(main, ["window", "1", "q", "--r-min", "1", "--r-max", "2"])
        assert res.exit_code == 1
