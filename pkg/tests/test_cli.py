import json


from fusecast.cli import main

from conftest import FIXTURES

SEASIDE = FIXTURES / "seaside"


def pipeline_args(tmp_path, out_name="bulletin.txt", fmt="text", extra=()):
    return [
        "pipeline",
        "--source", str(SEASIDE / "gfs.json"),
        "--source", str(SEASIDE / "ecmwf.json"),
        "--obs", str(SEASIDE / "obs.json"),
        "--kb", str(SEASIDE / "kb.json"),
        "--now", "h0",
        "--format", fmt,
        "--out", str(tmp_path / out_name),
        *extra,
    ]


class TestPipeline:
    def test_seaside_run(self, tmp_path):
        assert main(pipeline_args(tmp_path)) == 0
        text = (tmp_path / "bulletin.txt").read_text()
        assert "North: Mostly Cloudy, Light Winds from North East." in text

    def test_missing_kb_names_the_path(self, tmp_path, capsys):
        args = pipeline_args(tmp_path)
        args[args.index("--kb") + 1] = str(tmp_path / "nope.json")
        assert main(args) != 0
        err = capsys.readouterr().err
        assert "nope.json" in err and "[kb]" in err

    def test_invalid_source_names_stage_and_path(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text('{"method": "X", "generated_at": "h0", "entries": [{}]}')
        args = pipeline_args(tmp_path)
        args[args.index("--source") + 1] = str(bad)
        assert main(args) != 0
        err = capsys.readouterr().err
        assert "[source]" in err and "bad.json" in err

    def test_emitted_theory_reproduces_conclusions(self, tmp_path):
        args = pipeline_args(tmp_path, extra=[
            "--emit-theory", str(tmp_path / "theory.dfl"),
            "--emit-conclusions", str(tmp_path / "conclusions.json"),
        ])
        assert main(args) == 0
        assert main(["reason", str(tmp_path / "theory.dfl"),
                     "--out", str(tmp_path / "re.json")]) == 0
        assert (tmp_path / "re.json").read_bytes() == \
            (tmp_path / "conclusions.json").read_bytes()

    def test_pipeline_equals_composed_stages(self, tmp_path):
        assert main(pipeline_args(tmp_path, "direct.txt")) == 0
        assert main([
            "tournament",
            "--source", str(SEASIDE / "gfs.json"),
            "--source", str(SEASIDE / "ecmwf.json"),
            "--obs", str(SEASIDE / "obs.json"),
            "--kb", str(SEASIDE / "kb.json"),
            "--now", "h0",
            "--out", str(tmp_path / "stage.dfl"),
        ]) == 0
        assert main(["reason", str(tmp_path / "stage.dfl"),
                     "--out", str(tmp_path / "stage.json")]) == 0
        assert main(["bulletin", str(tmp_path / "stage.json"),
                     "--now", "h0",
                     "--out", str(tmp_path / "composed.txt")]) == 0
        assert (tmp_path / "composed.txt").read_bytes() == \
            (tmp_path / "direct.txt").read_bytes()

    def test_json_format_round_trips(self, tmp_path):
        assert main(pipeline_args(tmp_path, "bulletin.json", fmt="json")) == 0
        doc = json.loads((tmp_path / "bulletin.json").read_text())
        assert doc["header"]["sources"] == ["ecmwf", "gfs"]
        assert any(s["horizon"] == 1 for s in doc["sections"])

    def test_html_format(self, tmp_path):
        assert main(pipeline_args(tmp_path, "bulletin.html", fmt="html")) == 0
        html = (tmp_path / "bulletin.html").read_text()
        assert html.startswith("<!DOCTYPE html>")

    def test_min_accuracy_filters_models(self, tmp_path):
        args = pipeline_args(tmp_path, extra=["--min-accuracy", "0.5"])
        assert main(args) == 0
        text = (tmp_path / "bulletin.txt").read_text()
        # GFS (0.45/0.40) is below threshold: ECMWF raw values pass through,
        # so tomorrow's cloudiness is 75 (Mostly Cloudy) everywhere.
        assert "North: Mostly Cloudy, Light Winds from North East." in text

    def test_timings_flag(self, tmp_path, capsys):
        assert main(pipeline_args(tmp_path, extra=["--timings"])) == 0
        assert "tournament" in capsys.readouterr().err

    def test_stdout_when_no_out_path(self, capsys):
        assert main([
            "pipeline",
            "--source", str(SEASIDE / "ecmwf.json"),
            "--kb", str(SEASIDE / "kb.json"),
            "--now", "h0",
        ]) == 0
        assert "Tomorrow" in capsys.readouterr().out


class TestValidate:
    def test_clean_inputs(self, capsys):
        assert main([
            "validate",
            "--source", str(SEASIDE / "gfs.json"),
            "--source", str(SEASIDE / "ecmwf.json"),
            "--obs", str(SEASIDE / "obs.json"),
            "--kb", str(SEASIDE / "kb.json"),
        ]) == 0
        out = capsys.readouterr().out
        assert out.count(": ok") == 4

    def test_bad_magnitude_fails(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({
            "method": "GFS", "generated_at": "h0",
            "entries": [{"condition": "cloudiness", "location": "North",
                         "valid_at": "h1", "magnitude": 120}],
        }))
        assert main(["validate", "--kb", str(SEASIDE / "kb.json"),
                     "--source", str(bad)]) == 1
        assert "percentage" in capsys.readouterr().out


class TestReason:
    def test_reference_theory_conclusions(self, tmp_path):
        assert main(["reason", str(SEASIDE / "reference_theory.dfl"),
                     "--out", str(tmp_path / "out.json")]) == 0
        doc = json.loads((tmp_path / "out.json").read_text())
        assert "CNorth_h1_78" in doc["+d"]
        assert "CNorth_h0_90" in doc["+D"]
        assert doc["undetermined"] == []

    def test_parse_error_is_reported(self, tmp_path, capsys):
        bad = tmp_path / "bad.dfl"
        bad.write_text("r1: => A\n???\n")
        assert main(["reason", str(bad)]) == 1
        assert "line 2" in capsys.readouterr().err
