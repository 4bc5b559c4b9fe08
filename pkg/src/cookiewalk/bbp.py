"""The backwards branching-like process and its couplings.

The chain (Z_n) tracks, in distribution, the reversed left-step counts
(U_n^n, ..., U_0^n) of a transient-right walk: from state l it jumps to the
number of failures before l + 1 successes in a fresh cookie Bernoulli
sequence. Transitions are sampled by direct sequential Bernoulli simulation,
which is correct for every cookie-sequence law; the explicit one-cookie pmf is
kept for exact computation and testing.
"""

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import kernels
from .params import WalkKind, as_probability


@dataclass(frozen=True)
class CookieSequenceLaw:
    """Per-visit step-right probabilities: head p_1..p_M, then an optional
    mid-segment (probability mid up to visit mid_until), then tail forever."""

    head: tuple
    tail: float
    mid: float = None
    mid_until: int = None

    def __post_init__(self):
        head = tuple(float(p) for p in self.head)
        object.__setattr__(self, "head", head)
        for p in head + (float(self.tail),):
            if not 0 < p <= 1:
                raise ValueError(f"law probabilities must lie in (0, 1], got {p}")
        if (self.mid is None) != (self.mid_until is None):
            raise ValueError("mid and mid_until must be given together")
        if self.mid is not None:
            if not 0 < self.mid <= 1:
                raise ValueError("mid probability must lie in (0, 1]")
            if self.mid_until <= len(head):
                raise ValueError("mid segment must extend beyond the head")

    @property
    def M(self):
        return len(self.head)

    def to_arrays(self):
        probs = list(self.head)
        if self.mid is not None:
            probs += [float(self.mid)] * (self.mid_until - len(self.head))
        return np.array(probs, dtype=np.float64), float(self.tail)

    def drift(self):
        """Sum of (2p - 1) over all finitely-indexed cookies; +inf if the tail
        itself drifts right."""
        if self.tail > 0.5:
            return math.inf
        if self.tail < 0.5:
            return -math.inf
        probs, _ = self.to_arrays()
        return float(np.sum(2 * probs - 1))


def earw_law(strengths, p0):
    """xi law of an excited asymmetric walk: cookies then bias forever."""
    if not float(p0) > 0.5:
        raise ValueError("excited asymmetric law requires p0 > 1/2")
    return CookieSequenceLaw(head=tuple(float(p) for p in strengths), tail=float(p0))


def erw_law(strengths):
    """Standard excited walk law: cookies then 1/2 forever."""
    return CookieSequenceLaw(head=tuple(float(p) for p in strengths), tail=0.5)


def finite_law(strengths, p0, N):
    """zeta law: cookies, then p0 up to visit N, then 1/2 forever."""
    return CookieSequenceLaw(head=tuple(float(p) for p in strengths), tail=0.5,
                             mid=float(p0), mid_until=N)


def law_from_config(config):
    if config.kind is WalkKind.SIMPLE:
        return CookieSequenceLaw(head=(), tail=float(config.bias))
    if config.kind is WalkKind.EXCITED_SYMMETRIC:
        return erw_law(config.cookies)
    return earw_law(config.cookies, config.bias)


@dataclass(frozen=True)
class BbpChain:
    law: CookieSequenceLaw
    current: int = 0
    time: int = 0

    def __post_init__(self):
        if self.current < 0:
            raise ValueError("chain states are nonnegative")


def sample_A(law, k, rng):
    """Failures before the k-th success in a fresh sequence drawn from law."""
    if k < 0:
        raise ValueError("k must be >= 0")
    if k == 0:
        return 0
    probs, tail = law.to_arrays()
    return int(kernels.sample_failures(probs, tail, k, 1, rng)[0])


def sample_A_batch(law, k, n, rng):
    if k < 0:
        raise ValueError("k must be >= 0")
    if k == 0:
        return np.zeros(n, dtype=np.int64)
    probs, tail = law.to_arrays()
    return kernels.sample_failures(probs, tail, k, n, rng)


def step_chain(chain, rng):
    """One transition: the new state is A(current + 1) under the chain's law."""
    nxt = sample_A(chain.law, chain.current + 1, rng)
    return BbpChain(law=chain.law, current=nxt, time=chain.time + 1)


def bbp_transition_pmf(j, k, p0, p1):
    """P(Z_{n+1} = k | Z_n = j) for the one-cookie asymmetric law, exactly.

    Five-case closed form; exact (Fraction) when p0, p1 are exact.
    """
    if j < 0 or k < 0:
        raise ValueError("states are nonnegative")
    p0 = as_probability(p0)
    p1 = as_probability(p1)
    if j == 0:
        if k == 0:
            return p1
        return (1 - p1) * (1 - p0) ** (k - 1) * p0
    if j == 1:
        if k == 0:
            return p1 * p0
        return (p1 * (1 - p0) ** k * p0
                + k * (1 - p1) * (1 - p0) ** (k - 1) * p0 ** 2)
    first = math.comb(k + j - 1, j - 1) * p1 * (1 - p0) ** k * p0 ** j
    if k == 0:
        second = 0
    else:
        second = (math.comb(k + j - 1, j) * (1 - p1)
                  * (1 - p0) ** (k - 1) * p0 ** (j + 1))
    return first + second


def transition_pmf_row(j, p0, p1, tol=1e-12):
    """pmf values p(j, 0..K) truncated once the analytic tail is below tol.

    For k >= 1 both binomial components grow by at most a factor
    (1 - p0) (k + j) / k per step, which decreases in k and eventually drops
    below 1, so the tail is dominated by a geometric series.
    """
    p0f, p1f = float(p0), float(p1)
    values = []
    k = 0
    while True:
        values.append(float(bbp_transition_pmf(j, k, p0f, p1f)))
        if k >= 1:
            ratio = (1 - p0f) * (k + j) / k if j >= 1 else 1 - p0f
            if ratio < 1:
                tail = values[-1] * ratio / (1 - ratio)
                if tail < tol:
                    return np.array(values), tail
        k += 1
        if k > 100_000:
            raise RuntimeError("pmf row failed to converge")


@dataclass
class EmpiricalPmf:
    weights: dict
    total: int

    @classmethod
    def from_samples(cls, samples):
        vals, counts = np.unique(np.asarray(samples), return_counts=True)
        return cls(weights={int(v): int(c) for v, c in zip(vals, counts)},
                   total=int(len(samples)))

    @classmethod
    def from_counts(cls, counts):
        counts = np.asarray(counts)
        return cls(weights={int(k): int(c) for k, c in enumerate(counts) if c},
                   total=int(counts.sum()))

    def prob(self, k):
        return self.weights.get(k, 0) / self.total

    def mean(self):
        return sum(k * c for k, c in self.weights.items()) / self.total

    def tv_distance(self, other):
        keys = set(self.weights) | set(other.weights)
        return 0.5 * sum(abs(self.prob(k) - other.prob(k)) for k in keys)

    def tv_to_pmf(self, pmf_values):
        """TV against an explicit pmf given as a dense array starting at 0."""
        dense = np.zeros(max(len(pmf_values), 1 + max(self.weights, default=0)))
        dense[:len(pmf_values)] = pmf_values
        emp = np.zeros_like(dense)
        for k, c in self.weights.items():
            emp[k] = c / self.total
        # mass of the exact pmf beyond the truncation counts toward the distance
        return 0.5 * (np.abs(emp - dense).sum() + max(0.0, 1.0 - dense.sum()))

    def to_json(self):
        return json.dumps({"weights": {str(k): v for k, v in sorted(self.weights.items())},
                           "total": self.total}, sort_keys=True)


def empirical_tv(a, b):
    """TV distance between the empirical laws of two integer sample arrays."""
    return EmpiricalPmf.from_samples(a).tv_distance(EmpiricalPmf.from_samples(b))


@dataclass
class StationaryEstimate:
    pmf: EmpiricalPmf
    mean: float
    first_half_mean: float
    second_half_mean: float
    steps: int
    burnin: int
    seed: object

    @property
    def drift_diagnostic(self):
        """Second-half minus first-half occupation mean; near 0 when mixed."""
        return self.second_half_mean - self.first_half_mean


def estimate_stationary(law, steps, burnin=None, seed=0, max_state=65536):
    """Occupation-frequency estimate of the stationary law of the chain.

    Requires a law whose chain is positive recurrent: an asymmetric tail
    (tail > 1/2), or a symmetric tail with total drift > 1.
    """
    if law.tail < 0.5:
        raise ValueError("tail < 1/2: chain escapes to +inf, no stationary law")
    if law.tail == 0.5 and law.drift() <= 1:
        raise ValueError("symmetric-tail law with drift <= 1 has no stationary law")
    if burnin is None:
        burnin = steps // 10
    if not 0 <= burnin < steps:
        raise ValueError("need 0 <= burnin < steps")
    probs, tail = law.to_arrays()
    rng = kernels.make_rng(seed)
    counts, sum1, sum2 = kernels.chain_occupation(
        probs, tail, 0, steps, burnin, max_state, rng)
    kept = steps - burnin
    half = kept // 2
    pmf = EmpiricalPmf.from_counts(counts)
    return StationaryEstimate(
        pmf=pmf,
        mean=pmf.mean(),
        first_half_mean=sum1 / half,
        second_half_mean=sum2 / (kept - half),
        steps=steps,
        burnin=burnin,
        seed=seed,
    )


def speed_from_stationary(mean_Z):
    """Speed of the walk from the stationary chain mean: 1 / (1 + 2 E[Z])."""
    if mean_Z == math.inf:
        return 0.0
    if mean_Z < 0:
        raise ValueError("a stationary mean is nonnegative")
    if isinstance(mean_Z, Fraction):
        return Fraction(1) / (1 + 2 * mean_Z)
    return 1.0 / (1.0 + 2.0 * mean_Z)


@dataclass
class DecompositionReport:
    """Two-sample check of A_k =(dist) A_M + sum of geometric(tail) terms.

    The source statement's index bookkeeping is ambiguous (k - M versus
    k - M + 1 geometric summands), so both conventions are measured and the
    sampler picks the one the data supports.
    """

    k: int
    M: int
    samples: int
    tv_k_minus_M: float
    tv_k_minus_M_plus_1: float
    threshold: float

    @property
    def selected_convention(self):
        return ("k-M" if self.tv_k_minus_M <= self.tv_k_minus_M_plus_1
                else "k-M+1")

    @property
    def selected_tv(self):
        return min(self.tv_k_minus_M, self.tv_k_minus_M_plus_1)

    @property
    def passed(self):
        return self.selected_tv < self.threshold


def check_decomposition(law, k, samples, seed, threshold=0.01):
    """Compare A_k with A_M plus independent geometric(tail) variables."""
    if law.mid is not None:
        raise ValueError("decomposition check applies to head+tail laws")
    M = law.M
    if k < M:
        raise ValueError("k must be >= M")
    rng = kernels.make_rng(seed)
    direct = sample_A_batch(law, k, samples, rng)
    base = sample_A_batch(law, M, samples, rng) if M > 0 else np.zeros(samples, dtype=np.int64)
    n_geom = k - M
    geoms = (rng.geometric(law.tail, size=(samples, n_geom)).sum(axis=1) - n_geom
             if n_geom > 0 else np.zeros(samples, dtype=np.int64))
    extra = rng.geometric(law.tail, size=samples) - 1
    tv_a = empirical_tv(direct, base + geoms)
    tv_b = empirical_tv(direct, base + geoms + extra)
    return DecompositionReport(k=k, M=M, samples=samples, tv_k_minus_M=tv_a,
                               tv_k_minus_M_plus_1=tv_b, threshold=threshold)


@dataclass
class UZReport:
    """Marginal TV distances between (U_n^n..U_0^n) and (Z_0..Z_n)."""

    n: int
    samples: int
    marginal_tvs: list
    resampled: int
    step_cap: int
    threshold: float

    @property
    def max_tv(self):
        return max(self.marginal_tvs)

    @property
    def passed(self):
        return self.max_tv < self.threshold


def check_u_z_equality(config, n, samples, seed, step_cap=None, threshold=0.02):
    """Two-sample check that (Z_0..Z_n) matches (U_n^n..U_0^n) marginally.

    Marginal m compares U_{n-m}^n against Z_m; walks that miss the step cap
    are resampled and counted.
    """
    from . import walk as walk_mod

    law = law_from_config(config)
    if law.tail == 0.5 and law.drift() <= 1:
        raise ValueError("config must be transient to the right")
    if n > 8:
        raise ValueError("joint check supported for n <= 8")
    if n < 0:
        raise ValueError("n must be >= 0")
    if step_cap is None:
        step_cap = max(1000, 200 * (n + 1))
    probs, tail = law.to_arrays()
    if n == 0:
        return UZReport(n=0, samples=samples, marginal_tvs=[0.0], resampled=0,
                        step_cap=step_cap, threshold=threshold)
    rng_walk = kernels.make_rng(np.random.SeedSequence(seed, spawn_key=(0,)))
    rng_chain = kernels.make_rng(np.random.SeedSequence(seed, spawn_key=(1,)))
    w_probs, w_tail = walk_mod.law_arrays(config)
    profiles, resampled = kernels.walk_left_profiles(
        w_probs, w_tail, n, step_cap, samples, rng_walk)
    chains = kernels.chain_paths(probs, tail, 0, n, samples, rng_chain)
    tvs = []
    for m in range(n + 1):
        tvs.append(empirical_tv(profiles[:, n - m], chains[:, m]))
    return UZReport(n=n, samples=samples, marginal_tvs=tvs, resampled=resampled,
                    step_cap=step_cap, threshold=threshold)


@dataclass(frozen=True)
class CoupledPairConfig:
    """An asymmetric law (head, p0 forever) coupled with its finite truncation
    (head, p0 up to visit N, then 1/2); N must make the finite walk positive
    speed (drift > 2)."""

    head: tuple
    p0: float
    N: int

    def __post_init__(self):
        if not self.p0 > 0.5:
            raise ValueError("coupling requires p0 > 1/2")
        if self.N <= len(self.head):
            raise ValueError("N must exceed the number of head cookies")
        if self.finite_drift() <= 2:
            raise ValueError("choose N with drift(N, p') > 2 for positive speed")

    def finite_drift(self):
        d = sum(2 * float(p) - 1 for p in self.head)
        return d + (self.N - len(self.head)) * (2 * float(self.p0) - 1)


def minimal_coupling_N(head, p0):
    """Smallest N making the truncated law's drift exceed 2."""
    d = sum(2 * float(p) - 1 for p in head)
    step = 2 * float(p0) - 1
    N = len(head)
    while d <= 2:
        d += step
        N += 1
    return N


@dataclass
class CoupledRunResult:
    z_infinite: np.ndarray
    z_finite: np.ndarray
    violations: int
    first_return_infinite: object  # None if no return within the run
    first_return_finite: object
    steps: int
    seed: object

    @property
    def return_time_ordered(self):
        ti, tf = self.first_return_infinite, self.first_return_finite
        if tf is None:
            return True  # finite chain never returned within the horizon
        return ti is not None and ti <= tf

    def to_json(self):
        return json.dumps({"violations": self.violations, "steps": self.steps,
                           "seed": self.seed}, sort_keys=True)


def _first_return(path):
    hits = np.nonzero(path[1:] == 0)[0]
    return int(hits[0]) + 1 if len(hits) else None


def run_coupled(pair_config, steps, seed):
    """Drive both chains from one uniform stream; dominance must be violation-free."""
    head = np.array([float(p) for p in pair_config.head], dtype=np.float64)
    rng = kernels.make_rng(seed)
    z_inf, z_fin = kernels.coupled_chain_paths(
        head, float(pair_config.p0), pair_config.N, steps, rng)
    violations = int(np.sum(z_inf > z_fin))
    return CoupledRunResult(
        z_infinite=z_inf,
        z_finite=z_fin,
        violations=violations,
        first_return_infinite=_first_return(z_inf),
        first_return_finite=_first_return(z_fin),
        steps=steps,
        seed=seed,
    )


def run_coupled_batch(pair_config, paths, steps, base_seed):
    """Many coupled paths; returns totals of dominance and return-time violations."""
    dominance_violations = 0
    return_violations = 0
    for i in range(paths):
        rng_seed = np.random.SeedSequence(base_seed, spawn_key=(i,))
        res = run_coupled(pair_config, steps, rng_seed)
        dominance_violations += res.violations
        if not res.return_time_ordered:
            return_violations += 1
    return {"paths": paths, "steps": steps, "seed": base_seed,
            "violations": dominance_violations,
            "return_time_violations": return_violations}
