import dataclasses
import json
from pathlib import Path

import numpy as np
import pytest

from leodcb import neural
from leodcb.agent import AgentConfig
from leodcb.baselines import BaselineKind, run_baseline_episode
from leodcb.emodrl import ArchiveMember, EmodrlConfig, ParetoArchive, dominates
from leodcb.errors import ConfigError, StateError
from leodcb.harness import (
    load_archive,
    replay_policy,
    run_experiment,
    select_policy,
    write_trace,
)
from leodcb.scenario import (
    default_scenario,
    desk_scenario,
    load_scenario,
    micro_scenario,
    save_scenario,
    scenario_to_dict,
)
from leodcb.seeding import stream

GOLDEN_TRACE = Path(__file__).parent / "data" / "golden_micro_argp_trace.csv"


def tiny_config():
    return EmodrlConfig(
        n_tasks=2, t_warm=2, t_task=1, t_evo=1,
        buffer_count=4, buffer_size=2, eval_episodes=1,
        agent=AgentConfig(
            replay_capacity=200, batch_size=8, target_sync_period=10,
            grad_steps_per_iteration=2, learning_rate=1e-3, hidden_sizes=(8, 8),
        ),
    )


class TestScenarioIO:
    def test_round_trip_identity(self, tmp_path):
        scenario = desk_scenario()
        path = tmp_path / "scenario.json"
        save_scenario(scenario, path)
        assert load_scenario(path) == scenario

    def test_round_trip_bytes_stable(self, tmp_path):
        scenario = micro_scenario()
        first, second = tmp_path / "a.json", tmp_path / "b.json"
        save_scenario(scenario, first)
        save_scenario(load_scenario(first), second)
        assert first.read_bytes() == second.read_bytes()

    def test_default_counts(self, tmp_path):
        path = tmp_path / "default.json"
        save_scenario(default_scenario(), path)
        loaded = load_scenario(path)
        assert loaded.n_satellites == 110
        assert loaded.n_terminals == 10
        altitudes = [sat.altitude for sat in loaded.constellation]
        assert altitudes.count(5e5) == 80
        assert altitudes.count(1e6) == 30
        assert loaded.rf.p_min == 1.0 and loaded.rf.p_max == 2.0
        assert loaded.rf.path_loss_exponent == 2.0

    def test_invalid_probability_rejected_with_named_constraint(self, tmp_path):
        doc = scenario_to_dict(micro_scenario())
        doc["unavailability_p"] = 1.5
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(doc))
        with pytest.raises(ConfigError, match="unavailability"):
            load_scenario(path)

    def test_unknown_keys_rejected(self, tmp_path):
        doc = scenario_to_dict(micro_scenario())
        doc["surprise"] = 1
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(doc))
        with pytest.raises(ConfigError, match="surprise"):
            load_scenario(path)

    def test_parse_error_reports_line(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{\n  broken\n}")
        with pytest.raises(ConfigError, match="line"):
            load_scenario(path)


class TestSeedPlumbing:
    def test_streams_reproducible(self):
        a = stream(7, "availability").random(5)
        b = stream(7, "availability").random(5)
        assert np.array_equal(a, b)

    def test_streams_independent_per_tag(self):
        a = stream(7, "availability").random(5)
        b = stream(7, "exploration").random(5)
        assert not np.array_equal(a, b)


class TestTraceGolden:
    def test_micro_argp_trace_matches_golden(self, tmp_path):
        ledger = run_baseline_episode(BaselineKind.ARGP, micro_scenario(), seed=0)
        path = tmp_path / "trace.csv"
        write_trace(path, ledger)
        assert path.read_bytes() == GOLDEN_TRACE.read_bytes()

    def test_column_schema(self):
        header = GOLDEN_TRACE.read_text().splitlines()[0]
        assert header == "slot,satellite,scheme,rate_bps,total_power_w,switched,n_available"


class TestSelectPolicy:
    def _archive(self, objective_rows):
        params = neural.init_params(2, (4,), 3, np.random.default_rng(0))
        archive = ParetoArchive()
        for row in objective_rows:
            archive.members.append(
                ArchiveMember(params=params, objectives=np.asarray(row, float),
                              weight=np.array([1 / 3, 1 / 3, 1 / 3]))
            )
        return archive

    def test_favor_rate_returns_max_f1(self):
        archive = self._archive([[1.0, -5.0, 0.0], [3.0, -9.0, -1.0], [2.0, -1.0, 0.0]])
        member = select_policy(archive, "favor-rate")
        assert member.objectives[0] == 3.0

    def test_singleton_archive_for_every_preference(self):
        archive = self._archive([[1.0, -2.0, -0.5]])
        for preference in ("favor-rate", "favor-energy", "favor-switching", "balanced"):
            assert select_policy(archive, preference) is archive.members[0]

    def test_balanced_invariant_to_positive_rescaling(self):
        rows = [[1.0, -5.0, 0.0], [3.0, -9.0, -1.0], [2.0, -1.0, 0.0]]
        base = select_policy(self._archive(rows), "balanced")
        scaled = select_policy(self._archive([[6 * v for v in r] for r in rows]), "balanced")
        assert np.array_equal(scaled.objectives, 6 * base.objectives)

    def test_empty_archive_rejected(self):
        with pytest.raises(StateError):
            select_policy(ParetoArchive(), "balanced")

    def test_unknown_preference_rejected(self):
        with pytest.raises(StateError, match="favor-rate"):
            select_policy(self._archive([[1, 1, 1]]), "favor-everything")


@pytest.fixture(scope="module")
def frozen_policy():
    scenario = desk_scenario()
    n_actions = scenario.n_schemes * scenario.n_satellites + 1
    return neural.init_params(2, (16,), n_actions, np.random.default_rng(4))


class TestReplayPolicy:

    def test_terminal_count_override_needs_no_reshaping(self, frozen_policy):
        scenario = desk_scenario()
        for n in (8, 12):
            f1, f2, f3 = replay_policy(
                frozen_policy, scenario, {"n_terminals": n}, seeds=[1, 2]
            )
            assert np.isfinite([f1, f2, f3]).all()

    def test_p_zero_is_deterministic_across_seeds(self, frozen_policy):
        scenario = desk_scenario()
        a = replay_policy(frozen_policy, scenario, {"unavailability": 0.0}, seeds=[1])
        b = replay_policy(frozen_policy, scenario, {"unavailability": 0.0}, seeds=[99])
        assert a == b

    def test_p_one_gives_zero_objectives(self, frozen_policy):
        scenario = desk_scenario()
        triple = replay_policy(frozen_policy, scenario, {"unavailability": 1.0}, seeds=[1])
        assert triple == (0.0, 0.0, 0.0)


@pytest.fixture(scope="module")
def report(tmp_path_factory):
    out = tmp_path_factory.mktemp("run")
    return run_experiment(micro_scenario(), tiny_config(), out)


class TestRunExperiment:

    def test_report_lists_exactly_emitted_files(self, report):
        for path in report.all_files():
            assert Path(path).exists(), path
        assert Path(report.out_dir, "report.json").exists()

    def test_archive_rows_pairwise_nondominated(self, report):
        archive = load_archive(report.archive_csv)
        for i, a in enumerate(archive.members):
            for j, b in enumerate(archive.members):
                if i != j:
                    assert not dominates(a.objectives, b.objectives)

    def test_generation_log_schema(self, report):
        header = Path(report.generations_csv).read_text().splitlines()[0]
        assert header == "generation,population_size,archive_size,hypervolume"

    def test_same_seed_byte_identical_csvs(self, tmp_path):
        scenario = micro_scenario()
        first = run_experiment(scenario, tiny_config(), tmp_path / "a")
        second = run_experiment(scenario, tiny_config(), tmp_path / "b")
        assert Path(first.archive_csv).read_text().replace(
            str(tmp_path / "a"), ""
        ) == Path(second.archive_csv).read_text().replace(str(tmp_path / "b"), "")
        assert Path(first.generations_csv).read_bytes() == Path(
            second.generations_csv
        ).read_bytes()
        for name in first.trace_csvs:
            assert Path(first.trace_csvs[name]).read_bytes() == Path(
                second.trace_csvs[name]
            ).read_bytes()

    def test_svgs_are_valid_documents(self, report):
        for path in report.svg_paths:
            text = Path(path).read_text()
            assert text.startswith("<svg")
            assert text.rstrip().endswith("</svg>")


class TestPartialManifest:
    def test_io_failure_leaves_partial_manifest(self, tmp_path, monkeypatch):
        from leodcb import harness

        def explode(*args, **kwargs):
            raise OSError("disk full")

        monkeypatch.setattr(harness.svgplot, "plot_rate_series", explode)
        with pytest.raises(OSError, match="disk full"):
            run_experiment(micro_scenario(), tiny_config(), tmp_path)
        manifest = json.loads((tmp_path / "partial_manifest.json").read_text())
        assert manifest["complete"] is False
        assert any(p.endswith("archive.csv") for p in manifest["emitted"])
        for path in manifest["emitted"]:
            assert Path(path).exists()


class TestCli:
    def test_baseline_and_select_commands(self, tmp_path, capsys):
        from leodcb.cli import main

        assert main(["baseline", "--kind", "argp", "--scenario", "micro",
                     "--seed", "0", "--out", str(tmp_path)]) == 0
        out = capsys.readouterr().out
        assert "argp" in out and "f1=" in out

        run_dir = tmp_path / "exp"
        scenario_path = tmp_path / "micro.json"
        save_scenario(micro_scenario(), scenario_path)
        assert main([
            "run", "--scenario", str(scenario_path), "--out", str(run_dir),
            "--tasks", "2", "--warm", "2", "--task-iters", "1",
            "--generations", "1", "--hidden", "8", "8", "--batch", "8",
        ]) == 0
        capsys.readouterr()
        assert main(["select", "--archive", str(run_dir / "archive.csv"),
                     "--preference", "favor-rate"]) == 0
        assert "policy" in capsys.readouterr().out

    def test_evaluate_command(self, tmp_path, capsys):
        from leodcb.cli import main
        from leodcb.neural import save_params

        scenario = micro_scenario()
        params = neural.init_params(
            2, (8,), scenario.n_schemes * scenario.n_satellites + 1,
            np.random.default_rng(0),
        )
        checkpoint = tmp_path / "policy.npz"
        save_params(checkpoint, params)
        assert main(["evaluate", "--checkpoint", str(checkpoint),
                     "--scenario", "micro", "--p", "0.5", "--terminals", "3",
                     "--seeds", "1", "2"]) == 0
        assert "f1=" in capsys.readouterr().out
