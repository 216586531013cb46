"""End-to-end tests for the diffset command line."""
import csv
import json

import pytest

from app.main import main
from app.schemas.report import VerificationReport
from app.services.search import hill_climb
from app.services.suites import CovmSuite
from app.worker import SweepWorker

pytestmark = pytest.mark.integration


def run_cli(capsys, *argv: str) -> tuple[int, list[dict], str]:
    code = main(list(argv))
    captured = capsys.readouterr()
    rows = [json.loads(line) for line in captured.out.splitlines() if line.strip()]
    return code, rows, captured.err


class TestCompute:
    def test_minimal_d_forced(self, capsys):
        code, (row,), _ = run_cli(capsys, "compute", "minimal_d", "--q", "4", "--A", "{0,2}", "--B", "{0,2}")
        assert code == 0
        assert row["value"] == 4
        assert row["witness"] == "q=4; {0}"

    def test_cov_times_interval(self, capsys):
        code, (row,), _ = run_cli(capsys, "compute", "cov", "--kind", "times", "--q", "13", "--S", "{5,6,7,8}")
        assert code == 0
        assert row["value"] == 5
        assert row["witness"]["verified"] is True
        assert row["witness"]["size"] == 5

    def test_kloosterman(self, capsys):
        code, (row,), _ = run_cli(capsys, "compute", "kloosterman", "--q", "5", "--lam", "1", "--r", "1")
        assert code == 0
        assert row["value"] == pytest.approx(0.381966, abs=1e-6)

    def test_pair_literals(self, capsys):
        code, (row,), _ = run_cli(
            capsys, "compute", "minimal_d", "--A", "q=5; {(0,0),(1,2)}", "--B", "q=5; {(0,0),(3,4)}", "--mode", "units"
        )
        assert code == 0
        assert row["instance"]["mode"] == "units"

    def test_bohr(self, capsys):
        code, (row,), _ = run_cli(capsys, "compute", "bohr", "--q", "7", "--gamma", "1", "--epsilon", "0.3334")
        assert code == 0
        assert row["value"] == "q=7; {0,1,2,5,6}"
        assert row["details"]["cov_times"] == 2

    def test_replay_of_verify_row(self, capsys):
        _, (recorded,), _ = run_cli(capsys, "verify", "cov2a2a", "--q", "11", "--samples", "1", "--seed", "2")
        code, (row,), _ = run_cli(capsys, "compute", "replay", "--row", json.dumps(recorded))
        assert code == 0
        assert row.get("value") == recorded.get("lhs")
        assert row.get("rhs") == recorded.get("rhs")
        assert row["pass"] == recorded["pass"]

    def test_replay_failing_row_exits_1(self, capsys, mocker):
        failed = VerificationReport(suite="covm", instance={"q": 11}, claim="c", lhs=5, rhs=3, passed=False)
        mocker.patch.object(CovmSuite, "check", return_value=failed)
        row = VerificationReport(suite="covm", instance={"q": 11, "A": "{0,1,2}"}, claim="c", passed=True)
        code, (result,), _ = run_cli(capsys, "compute", "replay", "--row", row.to_json_line())
        assert code == 1
        assert result["pass"] is False
        assert result["details"]["recorded_pass"] is True

    def test_intersection_sets(self, capsys):
        code, (row,), _ = run_cli(
            capsys, "compute", "cov_intersection", "--q", "13", "--set", "{0,1,2,3,4,5,6}",
            "--set", "{0,2,3,5,7,8,10}", "--seed", "3",
        )
        assert code == 0
        assert len(row["instance"]["sets"]) == 2
        assert row["pass"] in (True, "informational")

    @pytest.mark.parametrize(
        "argv,error",
        [
            (["compute", "diffset", "--q", "7", "--A", "{0,1"], "MalformedLiteral"),
            (["compute", "volume", "--q", "7"], "UnknownSuite"),
            (["compute", "cov", "--kind", "times", "--q", "4", "--S", "{0,2}"], "InfeasibleCover"),
            (["compute", "legendre", "--q", "9", "--a", "2"], "NotPrime"),
        ],
    )
    def test_invalid_input_exits_2(self, capsys, argv, error):
        code, rows, err = run_cli(capsys, *argv)
        assert code == 2
        assert rows == []
        payload = json.loads(err.strip().splitlines()[-1])
        assert payload["error"] == error


class TestVerify:
    def test_weil_sweep(self, capsys):
        code, rows, _ = run_cli(capsys, "verify", "weil", "--q", "2..30")
        assert code == 0
        assert len(rows) == 29
        assert all(row["pass"] is True for row in rows)

    def test_unknown_suite(self, capsys):
        code, _, err = run_cli(capsys, "verify", "nope")
        assert code == 2
        assert json.loads(err.strip().splitlines()[-1])["error"] == "UnknownSuite"

    def test_bad_range(self, capsys):
        code, _, _ = run_cli(capsys, "verify", "covm", "--q", "13..11")
        assert code == 2

    def test_failed_row_exits_1(self, capsys, mocker):
        failed = VerificationReport(suite="weil", instance={"q": 5}, claim="c", passed=False)
        mocker.patch.object(SweepWorker, "run", return_value=iter([failed]))
        code, rows, _ = run_cli(capsys, "verify", "weil", "--q", "5")
        assert code == 1
        assert rows[0]["pass"] is False

    def test_informational_rows_do_not_fail(self, capsys):
        code, rows, _ = run_cli(capsys, "verify", "fish1d", "--q", "6", "--exhaustive", "--density", "0.5")
        assert code == 0
        assert rows and all(row["pass"] == "informational" for row in rows)

    def test_seeded_rows_reproducible(self, capsys):
        argv = ("verify", "covm", "--q", "11", "--samples", "4", "--seed", "3")
        _, first, _ = run_cli(capsys, *argv)
        _, second, _ = run_cli(capsys, *argv)
        assert first == second
        assert len({row["seed"] for row in first}) == 4

    def test_jobs_do_not_change_output(self, capsys):
        argv = ("verify", "vinh", "--q", "11", "--samples", "12", "--seed", "7")
        _, inline, _ = run_cli(capsys, *argv, "--jobs", "1")
        _, pooled, _ = run_cli(capsys, *argv, "--jobs", "2")
        assert inline == pooled

    def test_jobs_default_from_env(self, capsys, mocker, monkeypatch):
        monkeypatch.setenv("DIFFSET_JOBS", "2")
        spy = mocker.patch("app.main.SweepWorker", wraps=SweepWorker)
        code, _, _ = run_cli(capsys, "verify", "weil", "--q", "5,7")
        assert code == 0
        assert spy.call_args.kwargs["jobs"] == 2

    def test_csv(self, capsys, tmp_path):
        path = tmp_path / "weil.csv"
        code, rows, _ = run_cli(capsys, "verify", "weil", "--q", "5..7", "--csv", str(path))
        assert code == 0
        with path.open(encoding="utf-8") as handle:
            table = list(csv.DictReader(handle))
        assert [row["q"] for row in table] == ["5", "6", "7"]
        assert {"suite", "claim", "lhs", "rhs", "pass", "tau"} <= set(table[0])

    def test_timings(self, capsys):
        _, rows, _ = run_cli(capsys, "verify", "weil", "--q", "5", "--timings")
        assert rows[0]["runtime_ms"] >= 0


class TestSearch:
    def test_budget_zero(self, capsys):
        code, (row,), _ = run_cli(capsys, "search", "max_d", "--q", "12", "--beta", "0.5", "--budget", "0")
        assert code == 0
        assert row["verified"] is True
        assert row["improvements"] == 0
        assert row["instance"] == hill_climb("max_d", 12, 0.5, budget=0).instance

    def test_unverified_exits_1(self, capsys, mocker):
        result = hill_climb("max_d", 12, 0.5, budget=0).model_copy(update={"verified": False})
        mocker.patch("app.main.hill_climb", return_value=result)
        code, _, _ = run_cli(capsys, "search", "max_d", "--q", "12")
        assert code == 1

    def test_unknown_objective(self, capsys):
        code, _, _ = run_cli(capsys, "search", "min_d", "--q", "12")
        assert code == 2

    def test_missing_subcommand(self):
        with pytest.raises(SystemExit):
            main([])
