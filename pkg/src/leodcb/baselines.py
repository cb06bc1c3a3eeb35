"""Reference policies: rate-greedy at max power, single-terminal, random."""

from __future__ import annotations

import enum

import numpy as np

from .env import IDLE, DcbUplinkEnv, EpisodeLedger, MomdpAction, MomdpState
from .errors import ConfigError
from .scenario import Scenario
from .seeding import stream


class BaselineKind(enum.Enum):
    ARGP = "argp"
    NON_DCB = "non_dcb"
    RANDOM = "random"


def argp_action(env: DcbUplinkEnv, state: MomdpState, mask: np.ndarray) -> MomdpAction:
    """Max transmit power on the satellite with the best achievable rate.

    Uses the scheme-0 corner (all terminals at p_max); ties break to the
    lowest satellite index; IDLE when nothing is available.
    """
    available = np.flatnonzero(mask) + 1
    if available.size == 0:
        return MomdpAction(scheme_index=1, satellite=IDLE)
    rates = [env.rate_at_max_power(state.slot, int(s)) for s in available]
    return MomdpAction(scheme_index=0, satellite=int(available[int(np.argmax(rates))]))


def random_policy_action(
    env: DcbUplinkEnv, state: MomdpState, mask: np.ndarray, rng: np.random.Generator
) -> MomdpAction:
    """Uniform draw over the legitimate action set."""
    actions = env.legitimate_actions()
    return actions[int(rng.integers(len(actions)))]


def run_baseline_episode(
    kind: BaselineKind,
    scenario: Scenario,
    seed: int,
    env: DcbUplinkEnv | None = None,
) -> EpisodeLedger:
    """One full episode of the named baseline; returns the finished ledger.

    The non-DCB strategy replaces the array with terminal 1 alone (at max
    power, greedy satellite choice) on an otherwise identical scenario.
    """
    if kind is BaselineKind.NON_DCB:
        scenario = scenario.subset_terminals([0])
        env = DcbUplinkEnv(scenario)
    elif env is None:
        env = DcbUplinkEnv(scenario)
    elif env.scenario != scenario:
        raise ConfigError("provided environment was built from a different scenario")

    rng = stream(seed, "random-policy")
    state = env.reset(seed)
    while not env.done:
        mask = env.current_mask
        if kind is BaselineKind.RANDOM:
            action = random_policy_action(env, state, mask, rng)
        else:
            action = argp_action(env, state, mask)
        state, _, _ = env.step(action)
    return env.ledger


def non_dcb_episode(scenario: Scenario, seed: int) -> EpisodeLedger:
    return run_baseline_episode(BaselineKind.NON_DCB, scenario, seed)
