import json
from fractions import Fraction

import pytest

from dsloc.cli import EXIT_FAIL, EXIT_CONFIG, EXIT_PASS, EXIT_UNSTABLE, execute, exit_code, main
from dsloc.cohomology import DSReport
from dsloc.config import parse_config, render_config
from dsloc.errors import ConfigError
from dsloc.report import emit_report, parse_structured, report_from_data, report_to_data
from dsloc.scenarios import ScenarioResult, run_catalog

MINIMAL = """\
[algebra]
even = t
odd = xi
[derivation]
image xi = 1
[window]
cap = 3
[task]
kind = ds
"""

LOCALIZE = """\
# localization on A^{2|2}
[algebra]
even = t1, t2
odd = xi1, xi2
[derivation]
image xi1 = t1
image t1 = xi1
[window]
cap = 3
margin = 2
[grading]
functional deg = t1:1, t2:1, xi1:1, xi2:1
[task]
kind = localize
output = structured
[geometry]
subvariety = [t1, xi1]
probe_points = [{t2: 0}, {t2: -1/2}]
"""


def write(tmp_path, text, name="run.cfg"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


class TestParse:
    def test_minimal(self):
        cfg = parse_config(MINIMAL)
        assert cfg.even == ("t",) and cfg.odd == ("xi",) and cfg.images == (("xi", "1"),)
        assert cfg.cap == 3 and cfg.kind == "ds"

    def test_localize_fields(self):
        cfg = parse_config(LOCALIZE)
        assert cfg.subvariety == ("t1", "xi1")
        assert cfg.probe_points[1] == (("t2", Fraction(-1, 2)),)
        assert cfg.functionals[0][0] == "deg"

    def test_undeclared_variable(self):
        text = MINIMAL.replace("image xi = 1", "image xi = 1 + y")
        with pytest.raises(ConfigError, match="'y'") as info:
            parse_config(text)
        assert info.value.line == 5 and info.value.column == 16

    def test_negative_bound_on_polynomial_variable(self):
        text = MINIMAL.replace("cap = 3", "bounds t = -1..2")
        with pytest.raises(ConfigError, match="negative"):
            parse_config(text)

    def test_unknown_key(self):
        with pytest.raises(ConfigError) as info:
            parse_config(MINIMAL.replace("cap = 3", "capp = 3"))
        assert info.value.line == 7

    def test_unknown_section(self):
        with pytest.raises(ConfigError):
            parse_config("[nope]\n")

    def test_missing_derivation_block_for_ds(self):
        with pytest.raises(ConfigError):
            parse_config("[algebra]\neven = t\n[window]\ncap = 2\n[task]\nkind = ds\n")

    @pytest.mark.parametrize("text", [MINIMAL, LOCALIZE])
    def test_round_trip(self, text):
        cfg = parse_config(text)
        canon = render_config(cfg)
        assert parse_config(canon) == cfg
        assert render_config(parse_config(canon)) == canon


class TestExecute:
    def test_d_xi_zero(self):
        res, = execute(parse_config(MINIMAL))
        assert res.passed and res.reports["ds"].is_zero()
        assert exit_code([res]) == EXIT_PASS

    def test_localize(self):
        res, = execute(parse_config(LOCALIZE))
        assert res.passed and res.stable

    def test_expectation_failure(self):
        cfg = parse_config(MINIMAL + "expect_superdim = 1, 0\n")
        res, = execute(cfg)
        assert not res.passed and exit_code([res]) == EXIT_FAIL

    def test_koszul_and_derham(self):
        k = parse_config("[koszul]\nt = [t1, t2]\nbase = [s]\n[task]\nkind = koszul\n")
        assert execute(k)[0].passed
        d = parse_config("[pi_tangent]\nbase_vars = [x, y]\nlaurent = [x, y]\n"
                         "[task]\nkind = derham\nexpect_dims = 1, 2, 1\n")
        assert execute(d)[0].passed

    def test_primitive(self):
        text = MINIMAL.replace("image xi = 1", "image xi = 1 + s*t\nimage eta = -t").replace(
            "even = t", "even = t, s").replace("odd = xi", "odd = xi, eta").replace(
            "kind = ds", "kind = primitive\n[geometry]\ncertificate = [(1, xi), (s, eta)]")
        res, = execute(parse_config(text))
        assert res.passed


class TestMain:
    def test_ok(self, tmp_path, capsys):
        assert main(["run", write(tmp_path, MINIMAL)]) == EXIT_PASS
        assert "PASS" in capsys.readouterr().out

    def test_config_error_exit(self, tmp_path, capsys):
        bad = MINIMAL.replace("image xi = 1", "image xi = 1 + y")
        assert main(["run", write(tmp_path, bad)]) == EXIT_CONFIG
        assert "line 5, column 16" in capsys.readouterr().err

    def test_missing_file(self, tmp_path):
        assert main(["run", str(tmp_path / "absent.cfg")]) == EXIT_CONFIG

    def test_unstable_exit(self, tmp_path, capsys):
        text = ("[algebra]\neven = x\nodd = dx\nlaurent = x\n[derivation]\nimage x = dx\n"
                "[window]\nbounds x = -2..2\n[task]\nkind = ds\n")
        assert main(["run", write(tmp_path, text), "--window-margin", "0"]) == EXIT_UNSTABLE
        assert "UNSTABLE" in capsys.readouterr().out
        assert main(["run", write(tmp_path, text)]) == EXIT_PASS

    def test_unstable_beats_check_failure(self, tmp_path):
        text = ("[algebra]\neven = x\nodd = dx\nlaurent = x\n[derivation]\nimage x = dx\n"
                "[window]\nbounds x = -2..2\n[task]\nkind = ds\nexpect_superdim = 5, 5\n")
        assert main(["run", write(tmp_path, text), "--window-margin", "0"]) == EXIT_UNSTABLE

    def test_catalog_structured(self, capsys):
        assert main(["catalog", "q1-adjoint", "--format", "structured"]) == EXIT_PASS
        data = json.loads(capsys.readouterr().out)
        assert data["schema_version"] == 1 and data["results"][0]["name"] == "q1-adjoint"

    def test_catalog_unknown(self, capsys):
        assert main(["catalog", "nope"]) == EXIT_CONFIG
        assert "available" in capsys.readouterr().err

    def test_negative_margin(self):
        assert main(["catalog", "q1-adjoint", "--window-margin", "-1"]) == EXIT_CONFIG

    def test_probe_points_file(self, tmp_path):
        pts = write(tmp_path, "[{t2: 3}]\n# comment\n[{t2: 0}]\n", "points.txt")
        assert main(["run", write(tmp_path, LOCALIZE), "--probe-points", pts]) == EXIT_PASS


class TestReport:
    def test_empty_report_header_only(self):
        res = ScenarioResult("empty")
        res.add_report("ds", DSReport((), {}, {}, True, None, 2))
        text = emit_report([res])
        table = [l for l in text.splitlines() if l.startswith("     ")]
        assert len(table) == 1 and "parity" in table[0]

    def test_appendix_has_z_column(self):
        text = emit_report(run_catalog(["appendix-d21a"]))
        assert any(l.split()[:2] == ["z", "g"] for l in text.splitlines())

    def test_structured_round_trip(self):
        results = run_catalog(["q1-adjoint", "sheaf-counterexample"])
        back = parse_structured(emit_report(results, "structured"))
        for a, b in zip(results, back):
            assert a.name == b.name and a.checks == b.checks
            for label in a.reports:
                ra, rb = a.reports[label], b.reports[label]
                assert ra.dims == rb.dims and ra.stable == rb.stable
                assert ra.representatives == rb.representatives

    def test_report_data_round_trip(self):
        rep = run_catalog(["q1-adjoint"])[0].reports["ds"]
        assert report_to_data(report_from_data(report_to_data(rep))) == report_to_data(rep)

    def test_bad_schema_version(self):
        with pytest.raises(ValueError):
            parse_structured('{"schema_version": 99, "results": []}')


def test_config_catalog_unknown_name():
    with pytest.raises(ConfigError, match="available"):
        parse_config("[task]\nkind = catalog\nname = nope\n")


def test_catalog_unknown_name_position():
    with pytest.raises(ConfigError) as info:
        parse_config("[task]\nkind = catalog\nname = nope\n")
    assert info.value.line == 3


@pytest.mark.parametrize("extra, kind", [("expect_dims = 1, 0", "ds"),
                                         ("expect_superdim = 1, 0", "koszul")])
def test_expectation_not_checkable_is_rejected(extra, kind):
    text = MINIMAL if kind == "ds" else "[koszul]\nt = [t1]\n[task]\nkind = koszul\n"
    with pytest.raises(ConfigError, match="expect_") as info:
        parse_config(text + extra + "\n")
    assert info.value.line == len(text.splitlines()) + 1


def test_localize_checks_expected_superdim():
    # DS on X is k[t2] restricted to the window, so a superdimension of (1, 0) is wrong
    bad = LOCALIZE.replace("output = structured", "output = structured\nexpect_superdim = 1, 0")
    res, = execute(parse_config(bad))
    assert not res.passed and any(label.startswith("superdimension") and not ok for label, ok, _ in res.checks)
