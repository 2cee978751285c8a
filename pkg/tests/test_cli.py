from fractions import Fraction

import pytest

from updyn import cli
from updyn.certification.returns import canonical_lower_bound
from updyn.symbolic.core import ONE_SIDED
from updyn.utils import slack
from updyn.utils.reports import ReportDocument

pytestmark = pytest.mark.usefixtures("no_slack_token")


def run(capsys, *argv):
    code = cli.main(list(argv))
    return code, capsys.readouterr().out


def run_json(capsys, *argv):
    code, out = run(capsys, *argv)
    return code, ReportDocument.from_json(out)


class TestGen:
    @pytest.mark.parametrize(
        "argv, expected",
        [
            (["one-sided", "0", "22"], "0100011011000001010011"),
            (["one-sided", "0", "10"], "0100011011"),
            (["one-sided", "10", "8"], "00000101"),
            (["bi-infinite", "-2", "5"], "01.000"),
            (["bi-infinite", "-8", "17"], "10011101.000100000"),
        ],
    )
    def test_listing(self, capsys, argv, expected):
        assert run(capsys, "gen", *argv) == (cli.EXIT_OK, expected + "\n")

    def test_blocks(self, capsys):
        _, out = run(capsys, "gen", "one-sided", "0", "10", "--blocks")
        assert out == "0 1 | 00 01 10 11\n"

    def test_bi_infinite_blocks(self, capsys):
        _, out = run(capsys, "gen", "bi-infinite", "-4", "9", "--blocks")
        assert out == "11 01.0 | 00 10\n"

    def test_json(self, capsys):
        code, doc = run_json(capsys, "gen", "bi-infinite", "-2", "5", "--format", "json")
        assert code == cli.EXIT_OK
        assert doc.command == "gen"
        assert doc.results["symbols"] == "01000"
        assert doc.results["window"] == {"offset": -2, "symbols": "01000", "dot_position": 2}

    @pytest.mark.parametrize("argv", [["one-sided", "-1", "3"], ["one-sided", "0", "0"]])
    def test_invalid_range(self, capsys, argv):
        assert run(capsys, "gen", *argv)[0] == cli.EXIT_USAGE


class TestCertify:
    def test_minimal(self, capsys):
        code, doc = run_json(capsys, "certify", "one-sided", "8", "minimal", "json")
        assert code == cli.EXIT_OK
        entries = doc.results["entries"]
        assert len(entries) == 8
        assert doc.results["verified"] is True
        assert doc.results["epsilon0"] == 1
        for e in entries:
            assert e["proximity_bound"] <= Fraction(1, 2 ** e["n"])
            assert e["tau"] >= e["n"] + 1

    def test_canonical(self, capsys):
        code, doc = run_json(capsys, "certify", "one-sided", "4", "canonical", "json")
        assert code == cli.EXIT_OK
        for e in doc.results["entries"]:
            assert e["t"] >= canonical_lower_bound(ONE_SIDED, e["n"])

    def test_flags(self, capsys):
        code, doc = run_json(capsys, "certify", "--space", "bi-infinite", "--n-max", "3")
        assert code == cli.EXIT_OK
        assert doc.parameters == {"space": "bi-infinite", "n_max": 3, "mode": "minimal"}
        assert doc.results["kind"] == "bi_infinite"

    def test_csv(self, capsys):
        code, out = run(capsys, "certify", "one-sided", "3", "minimal", "csv")
        lines = out.splitlines()
        assert code == cli.EXIT_OK
        assert lines[0] == "n,t_n,tau_n"
        assert lines[1].startswith("1,4,")
        assert len(lines) == 4

    @pytest.mark.parametrize("n_max", ["0", "17"])
    def test_guardrails(self, capsys, n_max):
        assert run(capsys, "certify", "one-sided", n_max)[0] == cli.EXIT_USAGE

    def test_missing_n_max(self, capsys):
        assert run(capsys, "certify", "one-sided")[0] == cli.EXIT_USAGE

    def test_horizon_too_short(self, capsys):
        assert run(capsys, "certify", "one-sided", "6", "--horizon", "20")[0] == cli.EXIT_VERIFICATION_FAILED

    def test_reports_are_deterministic(self, capsys):
        first = run(capsys, "certify", "one-sided", "5")
        second = run(capsys, "certify", "one-sided", "5")
        assert first == second

    def test_metadata_envelope(self, capsys):
        _, doc = run_json(capsys, "certify", "one-sided", "2", "--with-metadata")
        assert set(doc.metadata) == {"generated_at", "version"}

    def test_output_file(self, capsys, tmp_path):
        path = tmp_path / "report.json"
        code, out = run(capsys, "certify", "one-sided", "2", "--output", str(path))
        assert code == cli.EXIT_OK
        assert out == ""
        assert ReportDocument.from_json(path.read_text()).command == "certify"


class TestChecks:
    def test_density(self, capsys):
        code, doc = run_json(capsys, "density", "one-sided", "3")
        assert code == cli.EXIT_OK
        assert len(doc.results["hits"]) == 8
        assert doc.results["missing"] == []

    def test_density_canonical(self, capsys):
        code, doc = run_json(capsys, "density", "bi-infinite", "5", "--density-mode", "canonical")
        assert code == cli.EXIT_OK
        assert doc.results["radius"] == 2

    def test_poisson_negative(self, capsys):
        code, doc = run_json(capsys, "poisson", "bi-infinite", "negative", "4")
        assert code == cli.EXIT_OK
        times = [r["t"] for r in doc.results["returns"]]
        assert len(times) == 4
        assert times[0] == -7
        assert all(a > b for a, b in zip(times, times[1:]))

    def test_poisson_negative_needs_bi_infinite(self, capsys):
        assert run(capsys, "poisson", "one-sided", "negative", "2")[0] == cli.EXIT_USAGE

    def test_poisson_csv(self, capsys):
        _, out = run(capsys, "poisson", "one-sided", "positive", "2", "--format", "csv")
        assert out == "n,t_n\n1,4\n2,14\n"

    def test_sensitivity(self, capsys):
        code, doc = run_json(capsys, "sensitivity", "one-sided", "5", "10")
        assert code == cli.EXIT_OK
        assert doc.results["delta"] == Fraction(1, 32)
        witnesses = doc.results["witnesses"]
        assert [w["point"] for w in witnesses] == list(range(10))
        for w in witnesses:
            assert w["separation_lower_bound"] >= 1
            assert w["distance_upper"] < Fraction(1, 32)

    def test_chaos(self, capsys):
        code, doc = run_json(capsys, "chaos", "one-sided", "--samples", "2")
        assert code == cli.EXIT_OK
        assert doc.results["passed"] is True


class TestConjugacies:
    def test_logistic_point(self, capsys):
        code, doc = run_json(capsys, "logistic", "point", "9/2", "01")
        assert code == cli.EXIT_OK
        (side,) = doc.results["box"]
        assert 0 <= side["lo"] < side["hi"] <= Fraction(1, 3)
        assert doc.parameters["mu"] == Fraction(9, 2)

    def test_logistic_default_mu(self, capsys):
        _, doc = run_json(capsys, "logistic", "point", "1")
        assert doc.results["box"][0]["lo"] == Fraction(2, 3)

    def test_logistic_mu_must_exceed_four(self, capsys):
        assert run(capsys, "logistic", "point", "4", "01")[0] == cli.EXIT_USAGE

    def test_logistic_transport(self, capsys):
        code, doc = run_json(capsys, "logistic", "transport", "9/2", "12")
        assert code == cli.EXIT_OK
        assert doc.results["width"] < Fraction(1, 2 ** 8)

    def test_logistic_itinerary(self, capsys):
        _, doc = run_json(capsys, "logistic", "itinerary", "9/2", "0", "0", "3")
        assert doc.results["itinerary"] == "000"
        _, doc = run_json(capsys, "logistic", "itinerary", "9/2", "2/5", "3/5", "3")
        assert doc.results["undecided_at"] == 0

    def test_logistic_commute(self, capsys):
        code, doc = run_json(capsys, "logistic", "commute", "--samples", "20", "--seed", "3")
        assert code == cli.EXIT_OK
        assert doc.results["checked"] == 20

    def test_henon_region(self, capsys):
        code, doc = run_json(capsys, "henon", "10", "1", "0")
        assert code == cli.EXIT_OK
        assert doc.results["region_ok"] is True
        assert len(doc.results["orbit"]) == 1

    def test_henon_outside_region_still_iterates(self, capsys):
        code, doc = run_json(capsys, "henon", "9", "1", "2", "--x0", "1/2")
        assert code == cli.EXIT_OK
        assert doc.results["region_warning"] is True
        assert doc.results["orbit"][1][1] == {"lo": Fraction(1, 2), "hi": Fraction(1, 2), "width": 0}

    def test_henon_beta_zero(self, capsys):
        assert run(capsys, "henon", "10", "0", "1")[0] == cli.EXIT_USAGE

    def test_horseshoe_box(self, capsys):
        _, doc = run_json(capsys, "horseshoe", "box", ".0")
        assert doc.results["box"] == [
            {"lo": 0, "hi": Fraction(1, 3), "width": Fraction(1, 3)},
            {"lo": 0, "hi": 1, "width": 1},
        ]

    def test_horseshoe_transport(self, capsys):
        code, doc = run_json(capsys, "horseshoe", "transport", "4")
        assert code == cli.EXIT_OK
        assert doc.results["passed"] is True

    def test_horseshoe_itinerary(self, capsys):
        _, doc = run_json(capsys, "horseshoe", "itinerary", "0", "0", "3")
        assert doc.results["rendered"] == "00.000"

    def test_horseshoe_parameters_checked(self, capsys):
        assert run(capsys, "horseshoe", "--contraction", "1/2", "box", ".0")[0] == cli.EXIT_USAGE


class TestParser:
    def test_not_a_rational(self, capsys):
        with pytest.raises(SystemExit) as e:
            cli.main(["henon", "ten", "1", "0"])
        assert e.value.code == cli.EXIT_USAGE

    def test_unknown_command(self, capsys):
        with pytest.raises(SystemExit) as e:
            cli.main(["plot"])
        assert e.value.code == cli.EXIT_USAGE


def test_slack_summary(capsys, monkeypatch):
    posted = []

    class FakeWebClient:
        def __init__(self, token):
            pass

        def chat_postMessage(self, **kwargs):
            posted.append(kwargs["text"])

        def files_upload(self, **kwargs):
            posted.append(kwargs["content"])

    monkeypatch.setattr(slack, "WebClient", FakeWebClient)
    code, _ = run(capsys, "gen", "one-sided", "0", "4", "--slack-token", "token", "--slack-to", "#runs")
    assert code == cli.EXIT_OK
    assert "all checks passed" in posted[0]
    assert '"command": "gen"' in posted[1]
