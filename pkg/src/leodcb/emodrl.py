"""Evolutionary multi-objective training loop.

A warm-up stage trains one agent per simplex weight vector; the
evolutionary stage then repeatedly rebalances the task population through
performance buffers, reselects the best policy per weight, continues
training, and folds the offspring into a Pareto archive of nondominated
policy snapshots.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

import numpy as np

from .agent import AgentConfig, EnhancedD3qnAgent, evaluate_policy
from .env import DcbUplinkEnv
from .errors import ConfigError, DomainError
from .neural import QNetworkParams
from .scenario import Scenario
from .seeding import stream


def generate_weights(count: int, floor: float = 1e-3) -> list[np.ndarray]:
    """Evenly spread strictly-positive weight vectors on the 3-simplex.

    Takes the smallest simplex lattice with at least ``count`` points,
    subsamples it evenly in lexicographic order, then clamps components
    to ``floor`` and renormalizes.
    """
    if count < 1:
        raise DomainError("weight count must be >= 1")
    resolution = 1
    while (resolution + 1) * (resolution + 2) // 2 < count:
        resolution += 1
    lattice = [
        np.array([i, j, resolution - i - j]) / resolution
        for i in range(resolution + 1)
        for j in range(resolution - i + 1)
    ]
    picks = np.round(np.linspace(0, len(lattice) - 1, count)).astype(int)
    out = []
    for i in picks:
        w = np.maximum(lattice[i], floor)
        out.append(w / w.sum())
    return out


def dominates(fa: np.ndarray, fb: np.ndarray) -> bool:
    """Pareto dominance under maximization of every component."""
    fa = np.asarray(fa, dtype=float)
    fb = np.asarray(fb, dtype=float)
    if fa.shape != fb.shape:
        raise DomainError("objective vectors must have equal length")
    return bool(np.all(fa >= fb) and np.any(fa > fb))


@dataclass(eq=False)
class LearningTask:
    """A weight vector paired with the agent training under it."""

    weight: np.ndarray
    agent: EnhancedD3qnAgent
    objectives: np.ndarray | None = None  # F(pi) after the last evaluation

    def clone_with_weight(self, weight: np.ndarray) -> "LearningTask":
        return LearningTask(
            weight=np.array(weight, dtype=float),
            agent=self.agent.clone(),
            objectives=None if self.objectives is None else self.objectives.copy(),
        )


@dataclass(frozen=True, eq=False)
class ArchiveMember:
    params: QNetworkParams      # frozen snapshot, never trained further
    objectives: np.ndarray      # (f1_bar, -f2_bar, -f3_bar)
    weight: np.ndarray


class ParetoArchive:
    """Mutually nondominated policy snapshots."""

    def __init__(self):
        self.members: list[ArchiveMember] = []

    def __len__(self) -> int:
        return len(self.members)

    def update(self, tasks) -> int:
        """Insert each evaluated task unless dominated; evict the dominated.

        Returns the number of insertions.
        """
        added = 0
        for task in tasks:
            candidate = np.asarray(task.objectives, dtype=float)
            if any(dominates(m.objectives, candidate) for m in self.members):
                continue
            self.members = [
                m for m in self.members if not dominates(candidate, m.objectives)
            ]
            self.members.append(
                ArchiveMember(
                    params=task.agent.params.clone(),
                    objectives=candidate.copy(),
                    weight=np.array(task.weight, dtype=float),
                )
            )
            added += 1
        return added

    def objective_matrix(self) -> np.ndarray:
        return np.stack([m.objectives for m in self.members])


class PerformanceBufferBank:
    """Direction-indexed buffers that keep the task population diverse.

    The bank owns its own evenly spread direction vectors (the task weight
    set is usually smaller than the buffer count) and a running-nadir
    reference point updated from every objective vector seen so far.
    """

    def __init__(self, buffer_count: int, buffer_size: int):
        if buffer_count < 1 or buffer_size < 1:
            raise ConfigError("buffer count and size must be >= 1")
        self.buffer_count = buffer_count
        self.buffer_size = buffer_size
        self.directions = np.stack(generate_weights(buffer_count))
        self.z_ref: np.ndarray | None = None

    def observe(self, objective_vectors) -> None:
        """Fold new F values into the running nadir."""
        for f in objective_vectors:
            f = np.asarray(f, dtype=float)
            self.z_ref = f.copy() if self.z_ref is None else np.minimum(self.z_ref, f)


def tpu(
    population: list[LearningTask],
    offspring: list[LearningTask],
    bank: PerformanceBufferBank,
) -> list[LearningTask]:
    """Task population update: bucket by best-aligned direction, keep the
    farthest-from-nadir tasks in each overfull buffer."""
    if bank.z_ref is None:
        raise ConfigError("bank has no reference point; call observe() first")
    buffers: list[list[tuple[float, LearningTask]]] = [
        [] for _ in range(bank.buffer_count)
    ]
    for task in population + offspring:
        f_temp = np.asarray(task.objectives, dtype=float) - bank.z_ref
        scores = bank.directions @ f_temp
        slot = int(np.argmax(scores))
        buffers[slot].append((float(np.linalg.norm(f_temp)), task))
        if len(buffers[slot]) > bank.buffer_size:
            # Descending distance, stable on ties; retain the first B_size.
            buffers[slot].sort(key=lambda pair: -pair[0])
            del buffers[slot][bank.buffer_size :]
    return [task for bucket in buffers for _, task in bucket]


def task_selection(
    weights: list[np.ndarray], population: list[LearningTask]
) -> list[LearningTask]:
    """Pick the best scalarizing policy per weight; clone, reassign weight."""
    if not population:
        raise ConfigError("task population is empty")
    objective_rows = np.stack([t.objectives for t in population])
    selected = []
    for w in weights:
        best = int(np.argmax(objective_rows @ np.asarray(w, dtype=float)))
        selected.append(population[best].clone_with_weight(w))
    return selected


def hypervolume(points, reference) -> float:
    """Volume dominated by a 3-D point set relative to a reference.

    Sweeps unique z levels; each slab contributes its staircase area in
    the x-y plane. The reference must be dominated by every point.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    ref = np.asarray(reference, dtype=float)
    if pts.shape[1] != 3 or ref.shape != (3,):
        raise DomainError("hypervolume expects 3-D points and reference")
    for p in pts:
        if not dominates(p, ref):
            raise DomainError("reference point must be dominated by every member")
    z_edges = np.unique(np.concatenate([[ref[2]], pts[:, 2]]))
    total = 0.0
    for z_lo, z_hi in zip(z_edges[:-1], z_edges[1:]):
        active = pts[pts[:, 2] >= z_hi]
        if active.size == 0:
            continue
        order = np.argsort(-active[:, 0])
        xs, ys = active[order, 0], active[order, 1]
        area = 0.0
        best_y = ref[1]
        for k in range(xs.size):
            best_y = max(best_y, ys[k])
            x_lo = xs[k + 1] if k + 1 < xs.size else ref[0]
            area += (xs[k] - x_lo) * (best_y - ref[1])
        total += area * (z_hi - z_lo)
    return total


@dataclass
class EmodrlConfig:
    n_tasks: int = 10
    t_warm: int = 80
    t_task: int = 20
    t_evo: int = 300
    buffer_count: int = 50
    buffer_size: int = 2
    eval_episodes: int = 2
    agent: AgentConfig = field(default_factory=AgentConfig)

    def __post_init__(self):
        if self.n_tasks < 1:
            raise ConfigError("n_tasks must be >= 1")
        if min(self.t_warm, self.t_task) < 1 or self.t_evo < 0:
            raise ConfigError("iteration counts must be positive (t_evo may be 0)")
        if self.eval_episodes < 1:
            raise ConfigError("eval_episodes must be >= 1")


@dataclass
class GenerationRecord:
    generation: int
    population_size: int
    archive_size: int
    hypervolume: float


@dataclass
class RunResult:
    archive: ParetoArchive
    generations: list[GenerationRecord]
    hypervolume_reference: np.ndarray
    eval_seeds: list[int]


def hypervolume_reference(scenario: Scenario) -> np.ndarray:
    """Fixed reference strictly dominated by any reachable objective vector."""
    margin = 1e-9
    worst_energy = (
        scenario.n_terminals * scenario.rf.p_max * scenario.slot_seconds
    )
    return np.array([-margin, -worst_energy - margin, -1.0 - margin])


def _train_tasks(
    tasks: list[LearningTask],
    envs: list[DcbUplinkEnv],
    iterations: int,
    eval_env: DcbUplinkEnv,
    eval_seeds,
) -> None:
    for task, env in zip(tasks, envs):
        for _ in range(iterations):
            task.agent.train_iteration(env, task.weight)
        task.objectives = evaluate_policy(task.agent.params, eval_env, eval_seeds)


def run(
    scenario: Scenario,
    config: EmodrlConfig,
    progress=None,
    checkpoint_dir=None,
) -> RunResult:
    """Warm-up plus evolutionary stages; returns the final Pareto archive.

    Fully reproducible from (scenario, scenario.master_seed): agent init,
    exploration, episode seeds and evaluation seeds all come from tagged
    streams of the master seed. Tasks train sequentially in task order;
    they are mutually independent, so this matches any parallel schedule.

    If ``checkpoint_dir`` is given and any generation fails, per-task
    resumable checkpoints plus a crash manifest are written there before
    the error propagates.
    """
    master = scenario.master_seed
    weights = generate_weights(config.n_tasks)
    total_iterations = config.t_warm + config.t_evo * config.t_task
    agent_cfg = config.agent
    if agent_cfg.epsilon_decay_iters is None:
        # Linear decay over the first half of the planned training budget.
        agent_cfg = dataclasses.replace(
            agent_cfg, epsilon_decay_iters=max(1, total_iterations // 2)
        )

    tasks = []
    envs = []
    for n in range(config.n_tasks):
        agent = EnhancedD3qnAgent.create(
            agent_cfg,
            n_actions=scenario.n_schemes * scenario.n_satellites + 1,
            rng=stream(master, "task", n),
        )
        tasks.append(LearningTask(weight=weights[n], agent=agent))
        envs.append(DcbUplinkEnv(scenario))
    eval_env = DcbUplinkEnv(scenario)
    eval_rng = stream(master, "evaluation")
    eval_seeds = [int(eval_rng.integers(2**31)) for _ in range(config.eval_episodes)]

    archive = ParetoArchive()
    bank = PerformanceBufferBank(config.buffer_count, config.buffer_size)
    reference = hypervolume_reference(scenario)
    records: list[GenerationRecord] = []
    population: list[LearningTask] = []
    offspring = tasks
    generation = 0

    try:
        _train_tasks(tasks, envs, config.t_warm, eval_env, eval_seeds)
        bank.observe([t.objectives for t in tasks])
        archive.update(tasks)
        records.append(
            GenerationRecord(0, len(offspring), len(archive),
                             hypervolume(archive.objective_matrix(), reference))
        )
        if progress is not None:
            progress(records[-1])

        for generation in range(1, config.t_evo + 1):
            population = tpu(population, offspring, bank)
            selected = task_selection(weights, population)
            _train_tasks(selected, envs, config.t_task, eval_env, eval_seeds)
            bank.observe([t.objectives for t in selected])
            archive.update(selected)
            offspring = selected
            records.append(
                GenerationRecord(generation, len(population), len(archive),
                                 hypervolume(archive.objective_matrix(), reference))
            )
            if progress is not None:
                progress(records[-1])
    except Exception:
        if checkpoint_dir is not None:
            _dump_crash_checkpoint(checkpoint_dir, generation, offspring, archive)
        raise
    return RunResult(
        archive=archive,
        generations=records,
        hypervolume_reference=reference,
        eval_seeds=eval_seeds,
    )


def _dump_crash_checkpoint(checkpoint_dir, generation, tasks, archive) -> None:
    """Persist enough state to resume a failed run by hand."""
    from pathlib import Path

    from .agent import save_agent_state

    root = Path(checkpoint_dir)
    root.mkdir(parents=True, exist_ok=True)
    lines = [f"failed_generation,{generation}", f"archive_size,{len(archive)}"]
    for i, task in enumerate(tasks):
        path = root / f"task_{i:02d}.npz"
        save_agent_state(path, task.agent)
        lines.append(f"task_{i:02d},{path}")
    (root / "crash_manifest.csv").write_text("\n".join(lines) + "\n")
