from __future__ import annotations

import csv
import io
import json
import subprocess
import sys

import pytest
from conftest import FIXTURES
from test_model import call, iface, klass

from ifaceaudit.cli import exceeded_gates, main
from ifaceaudit.detect import FilterConfig
from ifaceaudit.facts import dumps
from ifaceaudit.model import build_model
from ifaceaudit.report import (
    CSV_HEADER,
    InputError,
    analyze_model,
    render,
    result_from_dict,
    run_analysis,
    worst_first,
)

DM = "org.gudy.azureus2.plugins.download.DownloadManager"


def csv_rows(text: str) -> list[list[str]]:
    return list(csv.reader(io.StringIO(text)))


@pytest.fixture(scope="module")
def dm_result():
    return run_analysis(source=FIXTURES / "downloadmanager")


@pytest.fixture
def clean_facts(tmp_path):
    m = build_model(
        [iface("I", "void a()")],
        [klass("C", "void a()", implements=["I"]), klass("X")],
        [call("X", "I", "a")],
    )
    path = tmp_path / "m.facts"
    path.write_text(dumps(m), encoding="utf-8")
    return path


class TestRender:
    def test_setmap_system_row(self):
        result = run_analysis(source=FIXTURES / "setmap", config=FilterConfig(min_implementations=0))
        rows = csv_rows(render(result, "csv"))
        assert rows[0] == list(CSV_HEADER)
        system = next(r for r in rows if r[0] == "__system__")
        assert system[1:4] == ["25", "6", "0.24"]

    def test_csv_shape_and_missing_values(self):
        result = run_analysis(source=FIXTURES / "filters")
        rows = csv_rows(render(result, "csv"))
        assert {len(r) for r in rows} == {len(CSV_HEADER)}
        plugin = next(r for r in rows if r[0] == "org.app.core.Plugin")
        assert plugin[CSV_HEADER.index("rum")] == "NA"
        assert plugin[CSV_HEADER.index("iuc")] == "NA"
        assert [r[0] for r in rows[-2:]] == ["__pearson__", "__spearman__"]

    def test_single_correlation_method(self, dm_result):
        rows = csv_rows(render(dm_result, "csv", correlation="spearman"))
        assert rows[-1][0] == "__spearman__" and rows[-2][0] == "__system__"

    @pytest.mark.parametrize("fmt", ["text", "csv", "machine"])
    def test_rendering_is_byte_stable(self, fmt):
        a = run_analysis(source=FIXTURES / "fig2")
        b = run_analysis(source=FIXTURES / "fig2")
        assert render(a, fmt) == render(b, fmt)

    @pytest.mark.parametrize("name", ["downloadmanager", "fig2", "setmap", "filters"])
    def test_machine_output_round_trips(self, name):
        result = run_analysis(source=FIXTURES / name)
        assert result_from_dict(json.loads(render(result, "machine"))) == result

    def test_text_sections(self, dm_result):
        text = render(dm_result, "text")
        for heading in ("System", "Correlation with IUC", "Unused methods", "Suggestions"):
            assert heading in text
        assert "getDefaultSaveLocationManager" in text

    def test_library_mode_heading(self):
        result = run_analysis(source=FIXTURES / "downloadmanager", config=FilterConfig(treat_as_library=True))
        assert "Unused methods (review: possible external API)" in render(result, "text")

    def test_unknown_format(self, dm_result):
        with pytest.raises(ValueError):
            render(dm_result, "xml")


class TestAnalysis:
    def test_provenance(self, dm_result):
        p = dm_result.provenance
        assert p["frontend"] == "source"
        assert p["interfaces_analyzed"] == 1
        assert p["filters"]["exclude_tests"] is True

    def test_worst_first_puts_undefined_last(self):
        m = build_model(
            [iface("A", "void a()", "void b()"), iface("B", "void a()"), iface("Z", "void z()")],
            [klass("C", "void a()", "void b()", implements=["A", "B"]), klass("X")],
            [call("X", "A", "a")],
        )
        result = analyze_model(m)
        # B: rum 1, A: rum 1/2, Z has no implementations so it is exempt and sorts last
        assert [x.interface.simple_name for x in result.interfaces] == ["B", "A", "Z"]
        assert result.interfaces[-1].rum is None
        by_iuc = [x.interface.simple_name for x in worst_first(result.interfaces, ["iuc"])]
        assert by_iuc == ["A", "B", "Z"]

    def test_both_or_neither_input_rejected(self, clean_facts):
        with pytest.raises(InputError):
            run_analysis()
        with pytest.raises(InputError):
            run_analysis(source=FIXTURES / "fig2", facts=clean_facts)

    def test_source_and_facts_frontends_agree(self, tmp_path):
        m = run_analysis(source=FIXTURES / "fig2")
        path = tmp_path / "fig2.facts"
        assert main(["facts", "--source", str(FIXTURES / "fig2"), "--out", str(path)]) == 0
        f = run_analysis(facts=path)
        assert render(m, "csv") == render(f, "csv")


class TestCli:
    def test_clean_facts_exit_zero(self, clean_facts, capsys):
        assert main(["analyze", "--facts", str(clean_facts), "--format", "csv"]) == 0
        assert capsys.readouterr().out.startswith(",".join(CSV_HEADER))

    def test_gate_exceeded_exits_one(self, capsys):
        code = main(["analyze", "--source", str(FIXTURES / "downloadmanager"), "--fail-on", "rum:0.2"])
        assert code == 1
        assert "rum(" + DM in capsys.readouterr().err

    def test_gate_is_strict(self, dm_result):
        rum = dm_result.interfaces[0].rum
        assert exceeded_gates(dm_result, [("rum", rum)]) == []
        assert exceeded_gates(dm_result, [("rsum", 0.0)])

    @pytest.mark.parametrize(
        "argv",
        [
            [],
            ["analyze"],
            ["analyze", "--source", "x", "--facts", "y"],
            ["analyze", "--facts", "f", "--fail-on", "rum"],
            ["analyze", "--facts", "f", "--fail-on", "loc:0.1"],
            ["analyze", "--facts", "f", "--fail-on", "rum:1.5"],
            ["analyze", "--facts", "f", "--min-impl", "-1"],
        ],
    )
    def test_usage_errors_exit_two(self, argv, capsys):
        assert main(argv) == 2

    def test_help_exits_zero(self, capsys):
        assert main(["--help"]) == 0

    def test_malformed_facts_exit_two(self, tmp_path, capsys):
        bad = tmp_path / "bad.facts"
        bad.write_text('{"kind": "meta"}\n{"kind": "interface"\n', encoding="utf-8")
        assert main(["analyze", "--facts", str(bad)]) == 2
        assert "error" in capsys.readouterr().err

    def test_missing_inputs_exit_two(self, tmp_path, capsys):
        assert main(["analyze", "--facts", str(tmp_path / "nope.facts")]) == 2
        assert main(["analyze", "--source", str(tmp_path / "nope")]) == 2

    def test_malformed_source_exit_two(self, tmp_path, capsys):
        (tmp_path / "Bad.java").write_text("class C { void f() { }", encoding="utf-8")
        assert main(["analyze", "--source", str(tmp_path)]) == 2

    def test_empty_source_dir_is_clean(self, tmp_path, capsys):
        assert main(["analyze", "--source", str(tmp_path), "--format", "csv"]) == 0
        rows = csv_rows(capsys.readouterr().out)
        assert rows[1][0] == "__system__"

    def test_out_file(self, tmp_path, capsys):
        out = tmp_path / "r.json"
        assert main(["analyze", "--source", str(FIXTURES / "setmap"), "--format", "machine", "--out", str(out)]) == 0
        assert capsys.readouterr().out == ""
        assert json.loads(out.read_text(encoding="utf-8"))["system"]["sdm"] == 6

    def test_module_entry_point(self):
        proc = subprocess.run(
            [sys.executable, "-m", "ifaceaudit", "analyze", "--source", str(FIXTURES / "fig2"), "--format", "csv"],
            capture_output=True,
            text=True,
            check=False,
        )
        assert proc.returncode == 0
        assert proc.stdout.splitlines()[0] == ",".join(CSV_HEADER)
