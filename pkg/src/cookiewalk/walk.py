"""Step-level walk simulation, hitting times, left-step profiles, MC speed."""

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .params import WalkConfig, WalkKind, config_to_dict

MIN_SPEED_STEPS = 10_000  # below this the replica SE is not meaningful


def law_arrays(config):
    """(per-visit probabilities, tail probability) as floats for the kernels."""
    probs = np.array([float(p) for p in config.cookies], dtype=np.float64)
    return probs, float(config.bias)


@dataclass
class WalkState:
    """Walker position plus per-site visit counts.

    visits[s] counts how many times the walker has occupied site s, including
    the current occupation; a fresh walk starts with visits == {0: 1}.
    """

    position: int = 0
    visits: dict = field(default_factory=lambda: {0: 1})
    time: int = 0


def step(state, config, rng):
    """Advance one step; returns a new WalkState.

    The step-right probability is the i-th cookie strength on the i-th visit
    to the current site (i <= M) and the bias afterwards.
    """
    i = state.visits.get(state.position, 0)
    p = float(config.step_right_probability(i))
    new_pos = state.position + (1 if rng.random() < p else -1)
    visits = dict(state.visits)
    visits[new_pos] = visits.get(new_pos, 0) + 1
    return WalkState(position=new_pos, visits=visits, time=state.time + 1)


@dataclass
class Trajectory:
    positions: np.ndarray  # X_0..X_T
    seed: object
    config: WalkConfig

    def __len__(self):
        return len(self.positions)

    def to_csv(self, path_or_buf):
        buf = path_or_buf
        close = False
        if isinstance(path_or_buf, (str, bytes)):
            buf = open(path_or_buf, "w")
            close = True
        try:
            buf.write("t,X_t\n")
            for t, x in enumerate(self.positions):
                buf.write(f"{t},{int(x)}\n")
        finally:
            if close:
                buf.close()


def simulate(config, steps, seed):
    """Deterministic trajectory of length steps + 1 for (config, steps, seed)."""
    if steps < 1:
        raise ValueError("steps must be >= 1")
    probs, tail = law_arrays(config)
    rng = kernels.make_rng(seed)
    positions = kernels.walk_positions(probs, tail, steps, rng)
    return Trajectory(positions=positions, seed=seed, config=config)


def hitting_time(traj, n):
    """First index t with X_t = n, or None if the trajectory never hits n."""
    if n < 0:
        raise ValueError("hitting_time is defined for sites n >= 0 here")
    hits = np.nonzero(traj.positions == n)[0]
    return int(hits[0]) if len(hits) else None


@dataclass
class LeftStepProfile:
    """Counts U_n^n, U_{n-1}^n, ..., U_0^n of left steps by the hitting time."""

    n: int
    counts: np.ndarray  # counts[i] = U_{n-i}^n

    def u(self, x):
        """U_x^n for 0 <= x <= n."""
        if not 0 <= x <= self.n:
            raise ValueError(f"x must lie in [0, {self.n}]")
        return int(self.counts[self.n - x])


def left_step_profile(traj, n):
    """Left-step counts from each site 0..n before the walk first hits n."""
    t_n = hitting_time(traj, n)
    if t_n is None:
        raise ValueError(f"trajectory never reaches site {n}")
    pos = traj.positions[:t_n + 1]
    by_site = np.zeros(n + 1, dtype=np.int64)
    left = np.nonzero(np.diff(pos) == -1)[0]
    for t in left:
        x = pos[t]
        if 0 <= x <= n:
            by_site[x] += 1
    return LeftStepProfile(n=n, counts=by_site[::-1].copy())


@dataclass
class McEstimate:
    mean: float
    std_error: float
    replicas: int
    steps_per_replica: int
    base_seed: object

    def to_dict(self):
        return {
            "mean": self.mean,
            "se": self.std_error,
            "replicas": self.replicas,
            "steps": self.steps_per_replica,
            "seed": self.base_seed,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


def estimate_speed(config, steps=1_000_000, replicas=20, base_seed=0, threads=1):
    """Monte Carlo estimate of the limiting speed via X_steps / steps.

    Each replica runs on its own stream derived from (base_seed, index); the
    full replica set is deterministic given base_seed regardless of thread
    count.
    """
    if steps < MIN_SPEED_STEPS:
        raise ValueError(f"steps must be >= {MIN_SPEED_STEPS} for a meaningful SE")
    if replicas < 2:
        raise ValueError("need at least 2 replicas for a standard error")
    probs, tail = law_arrays(config)

    def one(i):
        rng = kernels.derive_rng(base_seed, i)
        return kernels.walk_final_position(probs, tail, steps, rng) / steps

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            values = np.fromiter(pool.map(one, range(replicas)), dtype=np.float64)
    else:
        values = np.fromiter((one(i) for i in range(replicas)), dtype=np.float64)
    mean = float(values.mean())
    se = float(values.std(ddof=1) / math.sqrt(replicas))
    return McEstimate(mean=mean, std_error=se, replicas=replicas,
                      steps_per_replica=steps, base_seed=base_seed)


def left_step_counts_at_zero(config, barrier, paths, seed, step_cap=None):
    """Samples of U_0^barrier: left steps from 0 before first hitting `barrier`.

    With a transient-right config and a far barrier this approximates the
    total number of 0 -> -1 steps ever taken (the return probability from the
    barrier is geometrically small). Returns (samples, resampled_count).
    """
    probs, tail = law_arrays(config)
    if step_cap is None:
        step_cap = max(100 * barrier, 100_000)
    rng = kernels.make_rng(seed)
    profiles, failures = kernels.walk_left_profiles(
        probs, tail, barrier, step_cap, paths, rng)
    return profiles[:, 0].copy(), failures
