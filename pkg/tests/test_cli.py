import os

import pytest

from cdrloc.cli import RunConfig, build_config, main, parse_config_file

FAST_WORLD = [
    "--world-users", "60",
    "--world-days", "4",
    "--world-district-cols", "2",
    "--seed", "3",
]

ARTIFACTS = [
    "clean_cdr.csv",
    "ingest_report.txt",
    "kept_users.csv",
    "entropy_report.txt",
    "model.txt",
    "segments.csv",
    "profiling_report.csv",
    "speed_table.csv",
    "flags.csv",
    "loadshare_report.csv",
    "anchors.csv",
    "params.csv",
    "od_matrix.csv",
    "od_matrix_calldays.csv",
    "eval_report.txt",
]


class TestConfig:
    def test_parse_config_file(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("seed = 9\n# comment\nworld_users = 77  # trailing\n")
        cfg = build_config(str(path), {})
        assert cfg.seed == 9
        assert cfg.world_users == 77

    def test_flags_override_file(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("seed = 9\n")
        cfg = build_config(str(path), {"seed": "4"})
        assert cfg.seed == 4

    def test_unknown_key_rejected(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("nonsense = 1\n")
        from cdrloc.exceptions import UsageError

        with pytest.raises(UsageError):
            build_config(str(path), {})

    def test_bad_line_rejected(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("just a line without equals\n")
        from cdrloc.exceptions import UsageError

        with pytest.raises(UsageError):
            parse_config_file(str(path))


class TestExitCodes:
    def test_unknown_stage_flag_usage_error(self, tmp_path, capsys):
        code = main(["run", "--out-dir", str(tmp_path), "--stages", "nonsense"])
        assert code == 1
        assert "usage error" in capsys.readouterr().err

    def test_unknown_config_key_usage_error(self, tmp_path, capsys):
        cfgfile = tmp_path / "c.cfg"
        cfgfile.write_text("bogus = 1\n")
        code = main(["run", "--config", str(cfgfile)])
        assert code == 1

    def test_missing_towers_is_data_error_naming_stage(self, tmp_path, capsys):
        code = main(["ingest", "--out-dir", str(tmp_path)])
        assert code == 2
        err = capsys.readouterr().err
        assert "ingest" in err

    def test_bad_flag_value_usage_error(self, tmp_path, capsys):
        code = main(["run", "--out-dir", str(tmp_path), "--seed", "xyz"])
        assert code == 1


@pytest.fixture(scope="module")
def full_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("run")
    code = main(["run", "--out-dir", str(out)] + FAST_WORLD)
    return code, str(out)


class TestFullRun:
    def test_exit_zero(self, full_run):
        code, _ = full_run
        assert code == 0

    def test_all_artifacts_present(self, full_run):
        _, out = full_run
        for name in ARTIFACTS:
            assert os.path.exists(os.path.join(out, name)), name
        for name in ("cdr", "towers", "gps", "labels", "regions", "districts",
                     "speeds", "truth_flags", "truth_anchors"):
            assert os.path.exists(os.path.join(out, "world", f"{name}.csv"))

    def test_reports_are_key_value_text(self, full_run):
        _, out = full_run
        for line in open(os.path.join(out, "eval_report.txt")):
            assert " = " in line

    def test_single_stage_rerun_is_resumable(self, full_run):
        _, out = full_run
        before = open(os.path.join(out, "od_matrix.csv"), "rb").read()
        code = main(["odmatrix", "--out-dir", out] + FAST_WORLD)
        assert code == 0
        after = open(os.path.join(out, "od_matrix.csv"), "rb").read()
        assert before == after


class TestDeterminism:
    def test_identical_config_byte_identical_outputs(self, tmp_path):
        out1, out2 = str(tmp_path / "a"), str(tmp_path / "b")
        assert main(["run", "--out-dir", out1] + FAST_WORLD) == 0
        assert main(["run", "--out-dir", out2] + FAST_WORLD) == 0
        for name in ("od_matrix.csv", "anchors.csv", "model.txt", "speed_table.csv",
                     "clean_cdr.csv", "eval_report.txt"):
            b1 = open(os.path.join(out1, name), "rb").read()
            b2 = open(os.path.join(out2, name), "rb").read()
            assert b1 == b2, name


def test_default_config_covers_all_stages():
    cfg = RunConfig()
    assert cfg.stages.split(",") == [
        "generate", "ingest", "filter", "profile",
        "loadshare", "localize", "odmatrix", "evaluate",
    ]
