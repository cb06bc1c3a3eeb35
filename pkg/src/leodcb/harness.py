"""Experiment orchestration: seeded runs, CSV artifacts, SVG figures."""

from __future__ import annotations

import dataclasses
import json
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import emodrl, svgplot
from .agent import greedy_rollout
from .baselines import BaselineKind, run_baseline_episode
from .emodrl import ArchiveMember, EmodrlConfig, ParetoArchive, RunResult
from .env import DcbUplinkEnv, EpisodeLedger, episode_objectives
from .errors import StateError
from .neural import QNetworkParams, load_params, save_params
from .scenario import Scenario
from .seeding import stream

TRACE_COLUMNS = (
    "slot", "satellite", "scheme", "rate_bps", "total_power_w", "switched", "n_available"
)
ARCHIVE_COLUMNS = (
    "policy", "f1_bps", "f2_joules", "f3_switches_per_slot", "w1", "w2", "w3", "checkpoint"
)
GENERATION_COLUMNS = ("generation", "population_size", "archive_size", "hypervolume")

PREFERENCE_WEIGHTS = {
    "favor-rate": np.array([1.0, 0.0, 0.0]),
    "favor-energy": np.array([0.0, 1.0, 0.0]),
    "favor-switching": np.array([0.0, 0.0, 1.0]),
    "balanced": np.array([1.0, 1.0, 1.0]) / 3.0,
}


def _fmt(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    # repr round-trips doubles exactly and is platform-stable
    return repr(float(value))


def write_csv(path, columns, rows) -> None:
    lines = [",".join(columns)]
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    Path(path).write_text("\n".join(lines) + "\n")


def write_trace(path, ledger: EpisodeLedger) -> None:
    rows = [
        (r.slot, r.satellite, r.scheme, r.rate_bps, r.total_power_w, r.switched, r.n_available)
        for r in ledger.trace
    ]
    write_csv(path, TRACE_COLUMNS, rows)


def write_archive_csv(path, archive: ParetoArchive, checkpoint_paths) -> None:
    rows = []
    for i, member in enumerate(archive.members):
        f1, f2, f3 = raw_objectives(member)
        w = member.weight
        rows.append((i, f1, f2, f3, w[0], w[1], w[2], checkpoint_paths[i]))
    write_csv(path, ARCHIVE_COLUMNS, rows)


def write_generation_log(path, records) -> None:
    rows = [
        (r.generation, r.population_size, r.archive_size, r.hypervolume)
        for r in records
    ]
    write_csv(path, GENERATION_COLUMNS, rows)


def raw_objectives(member: ArchiveMember):
    """Back out (f1_bar bps, f2_bar J, f3_bar) from the maximized F vector."""
    f = member.objectives
    # + 0.0 normalizes the negative zero produced by flipping a zero
    return float(f[0]), float(-f[1] + 0.0), float(-f[2] + 0.0)


def select_policy(archive: ParetoArchive, preference) -> ArchiveMember:
    """Archive member maximizing w . F for a weight vector or named tendency.

    Ties break to the lowest archive index.
    """
    if len(archive) == 0:
        raise StateError("cannot select from an empty archive")
    if isinstance(preference, str):
        try:
            weight = PREFERENCE_WEIGHTS[preference]
        except KeyError:
            raise StateError(
                f"unknown preference {preference!r}; expected one of "
                f"{sorted(PREFERENCE_WEIGHTS)}"
            ) from None
    else:
        weight = np.asarray(preference, dtype=float)
    scores = archive.objective_matrix() @ weight
    return archive.members[int(np.argmax(scores))]


def replay_policy(params: QNetworkParams, scenario: Scenario, overrides: dict, seeds):
    """Evaluate a frozen policy under modified p / terminal count.

    The state and action encodings do not depend on the terminal count, so
    no re-shaping or retraining happens; returns mean (f1_bar, f2_bar, f3_bar).
    """
    modified = scenario.with_overrides(
        unavailability=overrides.get("unavailability"),
        n_terminals=overrides.get("n_terminals"),
        rate_threshold=overrides.get("rate_threshold"),
    )
    env = DcbUplinkEnv(modified)
    totals = np.zeros(3)
    for seed in seeds:
        ledger = greedy_rollout(params, env, seed)
        totals += episode_objectives(ledger, modified.n_slots, modified.slot_seconds)
    return tuple(totals / len(seeds))


@dataclass
class RunReport:
    out_dir: str
    master_seed: int
    wall_clock_seconds: float
    objectives: dict[str, tuple]        # per-policy (f1_bar, f2_bar, f3_bar)
    archive_csv: str
    generations_csv: str
    trace_csvs: dict[str, str]
    svg_paths: list[str]
    checkpoints: list[str] = field(default_factory=list)

    def all_files(self) -> list[str]:
        return [
            self.archive_csv,
            self.generations_csv,
            *self.trace_csvs.values(),
            *self.svg_paths,
            *self.checkpoints,
        ]

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(dataclasses.asdict(self), indent=2) + "\n")


def run_experiment(scenario: Scenario, config: EmodrlConfig, out_dir) -> RunReport:
    """Train, then emit archive/trace/generation CSVs and three SVG figures.

    Baselines and the favor-rate policy trace replay the same episode seed
    so their per-slot rates are comparable. If artifact emission fails
    midway, a partial manifest of the files written so far is left at
    ``<out_dir>/partial_manifest.json`` before the error propagates.
    """
    started = time.perf_counter()
    out = Path(out_dir)
    (out / "checkpoints").mkdir(parents=True, exist_ok=True)
    (out / "traces").mkdir(exist_ok=True)
    (out / "plots").mkdir(exist_ok=True)
    emitted: list[str] = []

    result: RunResult = emodrl.run(scenario, config, checkpoint_dir=out / "crash")
    archive = result.archive
    try:
        checkpoints = []
        for i, member in enumerate(archive.members):
            path = out / "checkpoints" / f"policy_{i:03d}.npz"
            save_params(path, member.params)
            checkpoints.append(str(path))
            emitted.append(str(path))
        archive_csv = out / "archive.csv"
        write_archive_csv(archive_csv, archive, checkpoints)
        emitted.append(str(archive_csv))
        generations_csv = out / "generations.csv"
        write_generation_log(generations_csv, result.generations)
        emitted.append(str(generations_csv))

        episode_seed = int(stream(scenario.master_seed, "trace-episode").integers(2**31))
        ledgers: dict[str, EpisodeLedger] = {
            "argp": run_baseline_episode(BaselineKind.ARGP, scenario, episode_seed),
            "non_dcb": run_baseline_episode(BaselineKind.NON_DCB, scenario, episode_seed),
            "random": run_baseline_episode(BaselineKind.RANDOM, scenario, episode_seed),
        }
        favored = select_policy(archive, "favor-rate")
        ledgers["ed3qn_favor_rate"] = greedy_rollout(
            favored.params, DcbUplinkEnv(scenario), episode_seed
        )

        objectives: dict[str, tuple] = {}
        trace_csvs: dict[str, str] = {}
        for name, ledger in ledgers.items():
            path = out / "traces" / f"{name}.csv"
            write_trace(path, ledger)
            trace_csvs[name] = str(path)
            emitted.append(str(path))
            objectives[name] = episode_objectives(
                ledger, scenario.n_slots, scenario.slot_seconds
            )

        rate_svg = out / "plots" / "rate_vs_threshold.svg"
        svgplot.plot_rate_series(
            rate_svg,
            {name: [row.rate_bps for row in ledger.trace] for name, ledger in ledgers.items()},
            scenario.rate_threshold,
            "Per-slot uplink achievable rate",
        )
        emitted.append(str(rate_svg))
        pareto_svg = out / "plots" / "pareto_front.svg"
        svgplot.plot_pareto_scatter(
            pareto_svg,
            {
                "archive": [raw_objectives(m) for m in archive.members],
                "argp": [objectives["argp"]],
                "random": [objectives["random"]],
            },
            "Pareto policy distribution (f1, f2, f3)",
        )
        emitted.append(str(pareto_svg))
        bars_svg = out / "plots" / "objective_bars.svg"
        tendencies = ["favor-rate", "favor-energy", "favor-switching", "balanced"]
        bar_labels = ["argp"] + tendencies
        bar_triples = [objectives["argp"]] + [
            raw_objectives(select_policy(archive, t)) for t in tendencies
        ]
        svgplot.plot_objective_bars(
            bars_svg, bar_labels, bar_triples, "Objective values by policy"
        )
        emitted.append(str(bars_svg))
    except Exception:
        (out / "partial_manifest.json").write_text(
            json.dumps({"emitted": emitted, "complete": False}, indent=2) + "\n"
        )
        raise

    report = RunReport(
        out_dir=str(out),
        master_seed=scenario.master_seed,
        wall_clock_seconds=time.perf_counter() - started,
        objectives={k: tuple(v) for k, v in objectives.items()},
        archive_csv=str(archive_csv),
        generations_csv=str(generations_csv),
        trace_csvs=trace_csvs,
        svg_paths=[str(rate_svg), str(pareto_svg), str(bars_svg)],
        checkpoints=checkpoints,
    )
    report.save(out / "report.json")
    return report


def load_archive(archive_csv) -> ParetoArchive:
    """Rebuild an archive from its CSV and the referenced checkpoints."""
    archive = ParetoArchive()
    lines = Path(archive_csv).read_text().strip().split("\n")
    for line in lines[1:]:
        fields = line.split(",")
        f1, f2, f3 = (float(v) for v in fields[1:4])
        weight = np.array([float(v) for v in fields[4:7]])
        archive.members.append(
            ArchiveMember(
                params=load_params(fields[7]),
                objectives=np.array([f1, -f2, -f3]),
                weight=weight,
            )
        )
    return archive
