"""Command-line surface tests.

The parity table mirrors the published R-notation calls flag for flag and
asserts the printed outputs; the rest covers exit codes, the config file,
final-data verdicts, and byte-stable output.
"""

import json
import math
from pathlib import Path

import pytest

from succprob import cli
from succprob.errors import NumericalError

SE_EXP_EX1 = 0.12 * math.sqrt(1 / 776 + 1 / 776)
STDERR_EX2 = math.sqrt(0.379 * 0.621 / 105 + 0.222 * 0.778 / 53)


def run(argv, capsys):
    try:
        code = cli.main(argv)
    except SystemExit as exc:  # argparse's own usage failures
        code = exc.code
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def run_json(argv, capsys):
    code, out, err = run(argv + ["--format", "json"], capsys)
    assert code == 0, err
    return json.loads(out)


# every published R-notation call, transliterated flag for flag
PARITY = [
    ("pos_cont_ex1",
     ["pos", "--type", "cont", "--nsamples", "2", "--null-value", "-0.05",
      "--alternative", "greater", "--N", "1552", "--a", "1",
      "--succ-crit", "trial", "--Z-crit-final", "1.97",
      "--se-exp", repr(SE_EXP_EX1),
      "--meandiff-prior", "0", "--sd-prior", "0.02"],
     {"pos": (0.965, 0.002)}),
    ("pos_surv_ex3_trial",
     ["pos", "--type", "surv", "--nsamples", "2", "--null-value", "1",
      "--alternative", "less", "--D", "441",
      "--succ-crit", "trial", "--Z-crit-final", "1.96",
      "--hr-prior", "0.71", "--D-prior", "133"],
     {"pos": (0.785, 0.002)}),
    ("pos_surv_ex3_clinical",
     ["pos", "--type", "surv", "--nsamples", "2", "--null-value", "1",
      "--alternative", "less", "--D", "441",
      "--succ-crit", "clinical", "--clin-succ-threshold", "0.8",
      "--hr-prior", "0.71", "--D-prior", "133"],
     {"pos": (0.727, 0.002)}),
    ("succ_ia_cont_ex1",
     ["succ-ia", "--type", "cont", "--nsamples", "2",
      "--null-value", "-0.05", "--alternative", "greater",
      "--N", "1552", "--n", "776", "--a", "1",
      "--meandiff-ia", "-0.025", "--sd-ia", "0.16",
      "--succ-crit", "trial", "--Z-crit-final", "1.97",
      "--meandiff-exp", "-0.030",
      "--meandiff-prior", "0", "--sd-prior", "0.02"],
     {"cp_trend": (0.941, 0.002), "cp_specified": (0.871, 0.002),
      "ppos_no_prior": (0.866, 0.002), "ppos_with_prior": (0.944, 0.002)}),
    ("succ_ia_bin_ex2_trial",
     ["succ-ia", "--type", "bin", "--nsamples", "2", "--null-value", "0",
      "--alternative", "greater", "--N", "210", "--n", "158", "--a", "2",
      "--propdiff-ia", repr(0.379 - 0.222), "--stderr-ia", repr(STDERR_EX2),
      "--succ-crit", "trial", "--Z-crit-final", "2.012",
      "--propdiff-exp", "0.20",
      "--propdiff-prior", "0.20", "--sd-prior", repr(math.sqrt(0.06))],
     {"cp_specified": (0.884, 0.005), "cp_trend": (0.804, 0.005),
      "ppos_with_prior": (0.782, 0.005), "ppos_no_prior": (0.772, 0.005)}),
    ("succ_ia_bin_ex2_clinical",
     ["succ-ia", "--type", "bin", "--nsamples", "2", "--null-value", "0",
      "--alternative", "greater", "--N", "210", "--n", "158", "--a", "2",
      "--propdiff-ia", repr(0.379 - 0.222), "--stderr-ia", repr(STDERR_EX2),
      "--succ-crit", "clinical", "--clin-succ-threshold", "0.15",
      "--propdiff-exp", "0.20",
      "--propdiff-prior", "0.20", "--sd-prior", repr(math.sqrt(0.06))],
     {"cp_specified": (0.709, 0.005), "cp_trend": (0.587, 0.005),
      "ppos_with_prior": (0.586, 0.005), "ppos_no_prior": (0.575, 0.005)}),
    ("succ_ia_surv_ex3_trial",
     ["succ-ia", "--type", "surv", "--nsamples", "2", "--null-value", "1",
      "--alternative", "less", "--D", "441", "--d", "346", "--a", "1",
      "--hr-ia", "0.82",
      "--succ-crit", "trial", "--Z-crit-final", "2.012",
      "--hr-exp", "0.75", "--hr-prior", "0.71", "--D-prior", "133"],
     {"cp_specified": (0.722, 0.002), "cp_trend": (0.561, 0.002),
      "ppos_with_prior": (0.625, 0.002), "ppos_no_prior": (0.554, 0.002)}),
    ("succ_ia_surv_ex3_clinical",
     ["succ-ia", "--type", "surv", "--nsamples", "2", "--null-value", "1",
      "--alternative", "less", "--D", "441", "--d", "346", "--a", "1",
      "--hr-ia", "0.82",
      "--succ-crit", "clinical", "--clin-succ-threshold", "0.80",
      "--hr-exp", "0.75", "--hr-prior", "0.71", "--D-prior", "133"],
     {"cp_specified": (0.451, 0.002), "cp_trend": (0.288, 0.002),
      "ppos_with_prior": (0.370, 0.002), "ppos_no_prior": (0.310, 0.002)}),
    ("betabinom_ex4_z",
     ["betabinom", "--N-trt", "325", "--N-con", "323",
      "--n-trt", "155", "--x-trt", "13", "--n-con", "152", "--x-con", "21",
      "--alternative", "less", "--test", "z",
      "--succ-crit", "trial", "--Z-crit-final", "1.96",
      "--a-trt", "1", "--b-trt", "1", "--a-con", "1", "--b-con", "1"],
     {"ppos": (0.536, 0.005)}),
    ("betabinom_ex4_fisher",
     ["betabinom", "--N-trt", "325", "--N-con", "323",
      "--n-trt", "155", "--x-trt", "13", "--n-con", "152", "--x-con", "21",
      "--alternative", "less", "--test", "fisher",
      "--succ-crit", "trial", "--Z-crit-final", "1.96",
      "--a-trt", "1", "--b-trt", "1", "--a-con", "1", "--b-con", "1"],
     {"ppos": (0.536, 0.005)}),
]


class TestParityTable:
    @pytest.mark.parametrize("name,argv,expected",
                             PARITY, ids=[p[0] for p in PARITY])
    def test_published_call(self, name, argv, expected, capsys):
        got = run_json(argv, capsys)
        for key, (value, tol) in expected.items():
            assert got[key] == pytest.approx(value, abs=tol), key


class TestExitCodes:
    def test_missing_subcommand_is_usage_error(self, capsys):
        code, _, _ = run([], capsys)
        assert code == 2

    def test_foreign_family_flag_is_usage_error(self, capsys):
        code, _, err = run(
            ["succ-ia", "--type", "cont", "--nsamples", "2", "--N", "1552",
             "--n", "776", "--meandiff-ia", "-0.025", "--sd-ia", "0.16",
             "--Z-crit-final", "1.97", "--hr-prior", "0.7", "--D-prior", "9"],
            capsys)
        assert code == 2 and "--hr-prior" in err

    def test_incomplete_cell_is_usage_error(self, capsys):
        code, _, err = run(
            ["succ-ia", "--type", "bin", "--nsamples", "2", "--N", "210",
             "--Z-crit-final", "1.96"], capsys)
        assert code == 2 and "needs" in err

    def test_domain_error_exit(self, capsys):
        code, _, err = run(
            ["succ-ia", "--type", "cont", "--nsamples", "2", "--N", "100",
             "--n", "50", "--meandiff-ia", "0.1", "--sd-ia", "-1",
             "--Z-crit-final", "1.96"], capsys)
        assert code == 3 and "sd_nonpositive" in err

    def test_numerical_error_exit(self, capsys, monkeypatch):
        def boom(*a, **kw):
            raise NumericalError("did_not_converge", "iteration stalled")
        monkeypatch.setattr(cli, "evaluate", boom)
        code, _, err = run(
            ["succ-ia", "--type", "cont", "--nsamples", "2", "--N", "100",
             "--n", "50", "--meandiff-ia", "0.1", "--sd-ia", "1.0",
             "--Z-crit-final", "1.96"], capsys)
        assert code == 4 and "did_not_converge" in err

    def test_error_message_states_the_precondition(self, capsys):
        code, _, err = run(
            ["mc-se", "--D", "80", "--N", "40", "--med", "12", "--M", "10"],
            capsys)
        assert code == 3
        assert "target events D=80 exceeds N=40" in err


class TestConfigFile:
    EX1 = {
        "subcommand": "succ-ia", "type": "cont", "nsamples": 2,
        "null.value": -0.05, "alternative": "greater", "N": 1552, "n": 776,
        "meandiff.ia": -0.025, "sd.ia": 0.16, "succ.crit": "trial",
        "Z.crit.final": 1.97, "meandiff.exp": -0.030,
        "meandiff.prior": 0, "sd.prior": 0.02,
    }

    def test_dotted_keys_round_trip(self, capsys, tmp_path):
        cfg = tmp_path / "ex1.json"
        cfg.write_text(json.dumps(self.EX1))
        got = run_json(["succ-ia", "--config", str(cfg)], capsys)
        assert got["cp_trend"] == pytest.approx(0.941, abs=0.002)
        assert got["ppos_with_prior"] == pytest.approx(0.944, abs=0.002)

    def test_explicit_flag_overrides_config(self, capsys, tmp_path):
        cfg = tmp_path / "ex1.json"
        cfg.write_text(json.dumps(self.EX1))
        base = run_json(["succ-ia", "--config", str(cfg)], capsys)
        bumped = run_json(["succ-ia", "--config", str(cfg),
                           "--meandiff-ia", "-0.020"], capsys)
        assert bumped["cp_trend"] > base["cp_trend"]

    def test_schema_version_1_is_accepted(self, capsys, tmp_path):
        cfg = tmp_path / "ex1.json"
        cfg.write_text(json.dumps({"v": 1, **self.EX1}))
        got = run_json(["succ-ia", "--config", str(cfg)], capsys)
        assert got["cp_trend"] == pytest.approx(0.941, abs=0.002)

    def test_unknown_schema_version_is_rejected(self, capsys, tmp_path):
        cfg = tmp_path / "ex1.json"
        cfg.write_text(json.dumps({"v": 2, **self.EX1}))
        code, _, err = run(["succ-ia", "--config", str(cfg)], capsys)
        assert code == 2 and "version" in err

    def test_subcommand_mismatch_rejected(self, capsys, tmp_path):
        cfg = tmp_path / "ex1.json"
        cfg.write_text(json.dumps(self.EX1))
        code, _, err = run(["pos", "--config", str(cfg)], capsys)
        assert code == 2 and "subcommand" in err

    def test_unreadable_config_rejected(self, capsys, tmp_path):
        code, _, err = run(
            ["succ-ia", "--config", str(tmp_path / "missing.json")], capsys)
        assert code == 2 and "config" in err


DASHBOARD_FIXTURES = (Path(__file__).resolve().parent.parent
                      / "frontend" / "tests" / "fixtures")


def _scenario_stems():
    if not DASHBOARD_FIXTURES.is_dir():
        return []
    return sorted(p.name[:-len("_request.json")]
                  for p in DASHBOARD_FIXTURES.glob("*_request.json"))


def _scenario_subcommand(stem):
    for sub in ("curves", "betabinom", "pos"):
        if stem.endswith("_" + sub):
            return sub
    return "succ-ia"


@pytest.mark.skipif(not DASHBOARD_FIXTURES.is_dir(),
                    reason="dashboard fixtures not checked out")
class TestScenarioRoundTrip:
    """Dashboard-saved scenario files drive --config to the recorded replies.

    Each request fixture under frontend/tests/fixtures is a body the
    dashboard's save button wraps as {"v": 1, "subcommand": ...}; the paired
    response fixture is the service reply recorded for that body.  Feeding
    the saved file to the CLI must reproduce every number exactly.
    """

    # the service renames the clinical gamma; the CLI keeps the plain key
    ALIASES = {"gamma_clinical": "gamma"}

    @pytest.mark.parametrize("stem", _scenario_stems())
    def test_saved_scenario_reproduces_reply(self, stem, capsys, tmp_path):
        body = json.loads(
            (DASHBOARD_FIXTURES / f"{stem}_request.json").read_text())
        reply = json.loads(
            (DASHBOARD_FIXTURES / f"{stem}_response.json").read_text())
        sub = _scenario_subcommand(stem)
        cfg = tmp_path / "scenario.json"
        cfg.write_text(json.dumps({"v": 1, "subcommand": sub, **body}))
        out = run_json([sub, "--config", str(cfg)], capsys)
        if sub == "curves":
            self._check_curves(out, reply["result"])
        else:
            self._check_flat(out, reply, sub)

    def _check_flat(self, out, reply, sub):
        want = dict(reply["result"])
        if sub != "pos":  # pos output has no interim echo block to mirror
            want.update(reply["echo"])
        for key, val in want.items():
            assert out[self.ALIASES.get(key, key)] == val, key

    @staticmethod
    def _check_curves(out, result):
        cols = {name: [row[i] for row in out["rows"]]
                for i, name in enumerate(out["columns"])}
        for name, values in result["measures"].items():
            assert cols[name] == values, name
        ref = result["reference"]
        assert out["crossing"] == ref["crossing"]
        assert out["observed"] == ref["observed"]
        assert out["gamma"] == ref["gamma"]


class TestFinalDataVerdict:
    BASE = ["succ-ia", "--type", "cont", "--nsamples", "2",
            "--null-value", "-0.05", "--alternative", "greater",
            "--N", "1552", "--n", "1552",
            "--meandiff-ia", "-0.025", "--sd-ia", "0.16",
            "--Z-crit-final", "1.97"]

    def test_success_at_full_information(self, capsys):
        got = run_json(self.BASE, capsys)
        assert got["deterministic"] is True and got["t"] == 1.0
        assert got["success"] is True

    def test_failure_at_full_information(self, capsys):
        argv = list(self.BASE)
        argv[argv.index("--meandiff-ia") + 1] = "-0.045"
        got = run_json(argv, capsys)
        assert got["success"] is False

    def test_survival_clinical_verdict(self, capsys):
        got = run_json(
            ["succ-ia", "--type", "surv", "--nsamples", "2", "--D", "441",
             "--d", "441", "--hr-ia", "0.82", "--alternative", "less",
             "--succ-crit", "clinical", "--clin-succ-threshold", "0.9"],
            capsys)
        assert got["deterministic"] and got["success"] is True
        assert got["gamma"] == pytest.approx(
            math.log(1 / 0.9) / (2 / math.sqrt(441)), rel=1e-9)


class TestOutputs:
    def test_identical_flags_identical_bytes(self, capsys):
        argv = ["mc-se", "--D", "30,40", "--inflation", "1.0,1.5",
                "--med", "12", "--M", "40", "--seed", "5", "--format", "csv"]
        _, out1, _ = run(argv, capsys)
        _, out2, _ = run(argv, capsys)
        assert out1 == out2 and out1.count("\r\n") == 5  # header + 4 rows

    def test_mc_se_threads_do_not_change_output(self, capsys):
        base = ["mc-se", "--D", "25,35", "--inflation", "1.0,1.3",
                "--med", "10", "--M", "30", "--seed", "1", "--format", "csv"]
        _, seq, _ = run(base + ["--threads", "1"], capsys)
        _, par, _ = run(base + ["--threads", "3"], capsys)
        assert seq == par

    def test_json_carries_full_precision(self, capsys):
        argv = ["succ-ia", "--type", "cont", "--nsamples", "2",
                "--null-value", "-0.05", "--N", "1552", "--n", "776",
                "--meandiff-ia", "-0.025", "--sd-ia", "0.16",
                "--Z-crit-final", "1.97"]
        got = run_json(argv, capsys)
        code, table, _ = run(argv, capsys)
        assert code == 0
        # table rounds to 4 decimals, json does not
        assert f"{got['cp_trend']:.4f}" in table
        assert repr(got["cp_trend"]) not in table
        assert len(repr(got["cp_trend"])) > 6

    def test_out_file(self, capsys, tmp_path):
        target = tmp_path / "run.json"
        code, out, _ = run(
            ["pos", "--type", "surv", "--nsamples", "2", "--D", "441",
             "--alternative", "less", "--Z-crit-final", "1.96",
             "--hr-prior", "0.71", "--D-prior", "133",
             "--format", "json", "--out", str(target)], capsys)
        assert code == 0 and out == ""
        assert json.loads(target.read_text())["pos"] == pytest.approx(
            0.785, abs=0.002)


class TestCurves:
    ARGS = ["curves", "--type", "cont", "--nsamples", "2",
            "--null-value", "-0.05", "--alternative", "greater",
            "--N", "1552", "--n", "776",
            "--meandiff-ia", "-0.025", "--sd-ia", "0.16",
            "--Z-crit-final", "1.97",
            "--meandiff-prior", "0", "--sd-prior", "0.02"]

    def test_grid_contains_the_observed_point(self, capsys):
        got = run_json(self.ARGS, capsys)
        cols = got["columns"]
        row = next(r for r in got["rows"]
                   if r[cols.index("estimate")] == -0.025)
        assert row[cols.index("cp_trend")] == pytest.approx(0.941, abs=0.002)
        assert row[cols.index("ppos_no_prior")] == pytest.approx(
            0.866, abs=0.002)
        assert row[cols.index("ppos_with_prior")] == pytest.approx(
            0.944, abs=0.002)

    def test_crossing_sits_where_cp_is_half(self, capsys):
        got = run_json(self.ARGS, capsys)
        cols = got["columns"]
        crossing = got["crossing"]
        row = next(r for r in got["rows"]
                   if r[cols.index("estimate")] == crossing)
        assert row[cols.index("cp_trend")] == pytest.approx(0.5, abs=1e-9)

    def test_density_table_normalizes(self, capsys):
        got = run_json(self.ARGS + ["--what", "density"], capsys)
        cols = got["columns"]
        xs = [r[cols.index("x")] for r in got["rows"]]
        for name in ("no_prior", "with_prior"):
            dens = [r[cols.index(name)] for r in got["rows"]]
            area = sum((dens[i] + dens[i + 1]) * (xs[i + 1] - xs[i]) / 2
                       for i in range(len(xs) - 1))
            assert area == pytest.approx(1.0, abs=1e-6)

    def test_prefix_writes_both_artifacts(self, capsys, tmp_path):
        prefix = str(tmp_path / "ex1")
        code, out, _ = run(self.ARGS + ["--out-prefix", prefix,
                                        "--format", "csv"], capsys)
        assert code == 0 and out == ""
        measures = (tmp_path / "ex1-measures.csv").read_text()
        density = (tmp_path / "ex1-density.csv").read_text()
        assert measures.startswith("estimate,cp_trend,ppos_no_prior")
        assert density.startswith("x,no_prior,with_prior")


class TestMcSeSweep:
    def test_event_grid_with_inflation_levels(self, capsys):
        code, out, _ = run(
            ["mc-se", "--D", "20,30,40,50,60", "--inflation", "1.0,1.3,1.5",
             "--med", "12", "--ltfu-rate", "5e-06", "--M", "20",
             "--seed", "2", "--format", "csv"], capsys)
        assert code == 0
        lines = out.strip().split("\r\n")
        assert lines[0] == "N,D,med,sd_obs,sd_1_over_sqrtd,sd_log2,ltfu_rate,M"
        assert len(lines) == 16
        first = lines[1].split(",")
        assert first[0] == "20" and first[1] == "20"
        # round(30 * 1.3) = 39
        assert any(ln.startswith("39,30,") for ln in lines)

    def test_single_replicate_rejected(self, capsys):
        code, _, err = run(
            ["mc-se", "--D", "20", "--N", "20", "--med", "12", "--M", "1"],
            capsys)
        assert code == 3 and "too_few_replicates" in err
