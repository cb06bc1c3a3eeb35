"""Independent oracles shared by the module and acceptance tests.

Everything here checks implementation paths from the outside: exhaustive
grid search, finite differences, brute-force dominance. None of it calls
the solver/gradient code it is used to verify.
"""

import math

import numpy as np

from leodcb import channel
from leodcb.channel import RfConstants
from leodcb.emodrl import dominates
from leodcb.neural import forward, zeros_like_params


def make_rf(n_terminals=3, reference_distance=5e5, bandwidth=1e7):
    beta0 = channel.free_space_reference_gain(2.4e9)
    noise = 10.0 ** (-157.0 / 10.0) * 1e-3 * bandwidth
    rho0 = channel.default_rho0(
        beta0=beta0,
        path_loss_exponent=2.0,
        noise_power=noise,
        p_max=2.0,
        reference_distance=reference_distance,
        slot_seconds=60.0,
        n_terminals=n_terminals,
    )
    return RfConstants(
        beta0=beta0,
        path_loss_exponent=2.0,
        noise_power=noise,
        bandwidth=bandwidth,
        carrier_frequency=2.4e9,
        p_min=1.0,
        p_max=2.0,
        rho0=rho0,
    )


def grid_search_p2(distances, rf, scheme, slot_seconds, points=201):
    """Exhaustive 3-terminal minimum over a regular box grid."""
    assert len(distances) == 3
    grid = np.linspace(rf.p_min, rf.p_max, points)
    gains = np.sqrt(rf.beta0 * np.asarray(distances, float) ** -rf.path_loss_exponent)
    p2_mesh, p3_mesh = np.meshgrid(grid, grid, indexing="ij")
    best = math.inf
    for p1 in grid:
        amp = (
            gains[0] * math.sqrt(p1)
            + gains[1] * np.sqrt(p2_mesh)
            + gains[2] * np.sqrt(p3_mesh)
        )
        objective = (
            scheme.a * rf.rho0 * slot_seconds * (p1 + p2_mesh + p3_mesh)
            - scheme.b * amp**2 / rf.noise_power
        )
        best = min(best, float(objective.min()))
    return best


def batch_loss(params, x, actions, targets):
    """TD loss recomputed through the forward pass only."""
    _, _, q = forward(params, x)
    picked = q[np.arange(len(actions)), actions]
    residual = picked - targets
    return 0.5 * float(residual @ residual) / len(actions)


def numeric_gradients(params, x, actions, targets, eps=1e-5):
    """Central finite differences over every parameter entry."""
    grads = zeros_like_params(params)
    for tensor, slot in zip(params.tensors(), grads.tensors()):
        it = np.nditer(tensor, flags=["multi_index"])
        for _ in it:
            idx = it.multi_index
            original = tensor[idx]
            tensor[idx] = original + eps
            up = batch_loss(params, x, actions, targets)
            tensor[idx] = original - eps
            down = batch_loss(params, x, actions, targets)
            tensor[idx] = original
            slot[idx] = (up - down) / (2 * eps)
    return grads


def max_relative_error(analytic, numeric):
    worst = 0.0
    for a, n in zip(analytic.tensors(), numeric.tensors()):
        denom = np.maximum(np.maximum(np.abs(a), np.abs(n)), 1e-6)
        worst = max(worst, float(np.max(np.abs(a - n) / denom)))
    return worst


def brute_force_nondominated(points):
    points = [np.asarray(p) for p in points]
    keep = []
    for i, p in enumerate(points):
        if not any(dominates(q, p) for j, q in enumerate(points) if j != i):
            keep.append(tuple(p))
    return set(keep)


def assert_pairwise_nondominated(objective_rows):
    rows = [np.asarray(r) for r in objective_rows]
    for i, a in enumerate(rows):
        for j, b in enumerate(rows):
            if i != j and dominates(a, b):
                raise AssertionError(f"archive member {i} dominates member {j}")
