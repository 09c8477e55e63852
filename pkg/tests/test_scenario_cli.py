"""Scenario files, JSON round trips, and the command-line surface."""

import json
from fractions import Fraction

import pytest

from zspersuasion.beliefs import belief
from zspersuasion.cli import main
from zspersuasion.exceptions import ScenarioError
from zspersuasion.experiments import StrategyProfile, uninformative
from zspersuasion.scenario import (
    belief_from_json,
    belief_to_json,
    experiment_from_json,
    experiment_to_json,
    frac_from_str,
    frac_to_str,
    load_scenario,
    profile_from_json,
    profile_to_json,
    scenario_from_json,
    utility_from_json,
    utility_to_json,
)
from zspersuasion.utilities import check_zero_sum

from conftest import FIXTURES, random_experiment, random_prior

import random


FIG1 = str(FIXTURES / "figure1.json")


class TestSerialization:
    def test_fraction_strings(self):
        assert frac_to_str(Fraction(-3, 5)) == "-3/5"
        assert frac_to_str(Fraction(2)) == "2"
        assert frac_from_str("-3/5") == Fraction(-3, 5)
        assert frac_from_str("7") == Fraction(7)

    def test_floats_rejected(self):
        with pytest.raises(ScenarioError):
            frac_from_str(0.5)
        with pytest.raises(ScenarioError):
            belief_from_json([0.5, 0.5])

    def test_belief_round_trip(self):
        b = belief(["1/6", "1/3", "1/2"])
        assert belief_from_json(belief_to_json(b)) == b

    def test_experiment_round_trip(self):
        rng = random.Random(5)
        prior = random_prior(3, rng)
        e = random_experiment(prior, rng, splits=3)
        assert experiment_from_json(experiment_to_json(e), prior) == e

    def test_profile_round_trip(self):
        rng = random.Random(6)
        prior = random_prior(2, rng)
        profile = StrategyProfile(
            (random_experiment(prior, rng, 2), uninformative(prior))
        )
        assert profile_from_json(profile_to_json(profile), prior) == profile

    def test_utility_round_trip(self):
        scenario = load_scenario(FIG1)
        u = scenario.payoffs.utilities[0]
        again = utility_from_json(utility_to_json(u), 2)
        assert again == u


class TestScenarioLoading:
    def test_figure1(self):
        s = load_scenario(FIG1)
        assert s.n_states == 2
        assert s.n_senders == 2
        assert s.prior == belief(["1/2", "1/2"])
        assert set(s.profiles) == {
            "both_uninformative",
            "both_fully_revealing",
            "pool_then_reveal",
        }
        # the second utility was synthesized as the exact negation
        assert check_zero_sum(s.payoffs).ok

    def test_structural_zero_sum_three_senders(self):
        data = json.loads(open(FIG1).read())
        data["senders"] = 3
        data["payoffs"] = data["payoffs"] * 2
        del data["profiles"]
        s = scenario_from_json(data)
        assert s.n_senders == 3
        assert check_zero_sum(s.payoffs).ok

    def test_requires_exactly_one_payoff_source(self):
        data = json.loads(open(FIG1).read())
        data["action_game"] = {
            "actions": ["a", "b"],
            "receiver": [["1", "0"], ["0", "1"]],
            "senders": [
                [["1", "-1"], ["-1", "1"]],
                [["-1", "1"], ["1", "-1"]],
            ],
        }
        with pytest.raises(ScenarioError):
            scenario_from_json(data)
        del data["payoffs"]
        del data["assert_zero_sum_structural"]
        s = scenario_from_json(data)
        assert s.action_game is not None

    def test_malformed_inputs(self):
        base = json.loads(open(FIG1).read())
        bad_prior = dict(base, prior=["1/2", "1/3"])
        with pytest.raises(ScenarioError):
            scenario_from_json(bad_prior)
        with pytest.raises(ScenarioError):
            scenario_from_json(dict(base, states=1))
        with pytest.raises(ScenarioError):
            scenario_from_json({"states": 2})
        with pytest.raises(ScenarioError):
            load_scenario(str(FIXTURES / "missing.json"))

    def test_unknown_profile(self):
        s = load_scenario(FIG1)
        with pytest.raises(ScenarioError):
            s.profile("nope")


class TestCli:
    def run(self, capsys, *argv):
        code = main(list(argv))
        captured = capsys.readouterr()
        return code, captured.out, captured.err

    def test_validate(self, capsys):
        code, out, _ = self.run(capsys, "validate", FIG1)
        assert code == 0
        assert json.loads(out)["ok"] is True

    def test_analyze_full_revelation(self, capsys):
        code, out, _ = self.run(capsys, "analyze", FIG1)
        assert code == 0
        report = json.loads(out)
        assert report["overall"] == "FullRevelation"
        assert report["condition1"]["overall"] is True

    def test_analyze_b51_edges(self, capsys):
        code, out, _ = self.run(
            capsys, "analyze", str(FIXTURES / "example_b51.json")
        )
        assert code == 0
        report = json.loads(out)
        assert report["overall"] == "FullRevelation"
        assert all(e["verdict"] == "NeverPooled" for e in report["edges"])
        assert len(report["edges"]) == 3

    def test_verify_quiet_profile(self, capsys):
        code, out, _ = self.run(
            capsys,
            "verify",
            FIG1,
            "--profile",
            "both_uninformative",
            "--grid",
            "5",
        )
        assert code == 0
        report = json.loads(out)
        assert report["verdict"] == "ProfitableDeviation"
        assert frac_from_str(report["gain"]) > 0

    def test_verify_accepts_revelation(self, capsys):
        code, out, _ = self.run(
            capsys, "verify", FIG1, "--profile", "both_fully_revealing"
        )
        assert code == 0
        assert json.loads(out)["verdict"] == "Accepted"

    def test_exploit_worked_values(self, capsys):
        code, out, _ = self.run(
            capsys,
            "exploit",
            FIG1,
            "--profile",
            "both_uninformative",
            "--set",
            "0,1",
        )
        assert code == 0
        cert = json.loads(out)
        assert cert["x_bar"] == ["2/5", "3/5"]
        assert cert["epsilon"] == "5/12"
        assert cert["payoff"] == "1/6"

    def test_construct_fully_revealing_round_trip(self, capsys):
        code, out, _ = self.run(capsys, "construct", FIG1, "--fully-revealing")
        assert code == 0
        s = load_scenario(FIG1)
        profile = profile_from_json(json.loads(out), s.prior)
        assert all(e.is_fully_revealing() for e in profile.experiments)

    def test_construct_pool_rejected(self, capsys):
        code, _, err = self.run(capsys, "construct", FIG1, "--pool", "0,1")
        assert code == 2
        assert json.loads(err)["error"] == "NotPoolable"

    def test_malformed_exit_code(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        code, _, err = self.run(capsys, "analyze", str(bad))
        assert code == 1
        assert json.loads(err)["error"] == "ScenarioError"

    def test_budget_exit_code(self, capsys):
        code, _, err = self.run(
            capsys,
            "oracle",
            "scan",
            FIG1,
            "--belief-res",
            "40",
            "--mass-res",
            "40",
            "--max-support",
            "6",
            "--cap",
            "50",
        )
        assert code == 3
        assert json.loads(err)["error"] == "EnumerationTooLarge"

    def test_oracle_scan(self, capsys):
        code, out, _ = self.run(
            capsys,
            "oracle",
            "scan",
            FIG1,
            "--belief-res",
            "4",
            "--mass-res",
            "4",
            "--max-support",
            "3",
        )
        assert code == 0
        assert json.loads(out)["verdict"] == "OnlyFullyRevealingFound"

    def test_induce(self, capsys):
        code, out, _ = self.run(
            capsys, "induce", str(FIXTURES / "matching_action_game.json")
        )
        assert code == 0
        report = json.loads(out)
        assert "0-1" in report["edges"]
        assert len(report["utilities"]) == 2

    def test_induce_requires_action_game(self, capsys):
        code, _, err = self.run(capsys, "induce", FIG1)
        assert code == 2
        assert json.loads(err)["error"] == "PreconditionFailed"

    def test_emit_plot_flags_decimals(self, capsys, tmp_path):
        out_path = tmp_path / "plot.csv"
        code, _, _ = self.run(
            capsys, "emit-plot", FIG1, "--points", "10", "--out", str(out_path)
        )
        assert code == 0
        lines = out_path.read_text().splitlines()
        assert "decimal approximations" in lines[0]
        assert lines[1].split(",") == ["t", "sender0", "sender1"]

    def test_deterministic_output(self, capsys):
        _, first, _ = self.run(capsys, "analyze", FIG1)
        _, second, _ = self.run(capsys, "analyze", FIG1)
        assert first == second
