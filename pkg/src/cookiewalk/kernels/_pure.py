"""Pure-Python reference kernels.

Every function here consumes uniforms from the supplied numpy Generator one
draw at a time, in exactly the same order as the compiled kernels in
``_core``, so the two backends produce bit-identical output for equal seeds.
"""

import numpy as np

BACKEND = "pure"


def _threshold(probs, tail, visit):
    # visit is 1-based
    if visit <= len(probs):
        return probs[visit - 1]
    return tail


def walk_positions(probs, tail, steps, rng):
    """Simulate a walk for `steps` steps; returns positions X_0..X_steps."""
    probs = np.asarray(probs, dtype=np.float64)
    positions = np.empty(steps + 1, dtype=np.int64)
    positions[0] = 0
    visits = {0: 1}
    pos = 0
    for t in range(steps):
        p = _threshold(probs, tail, visits[pos])
        pos += 1 if rng.random() < p else -1
        visits[pos] = visits.get(pos, 0) + 1
        positions[t + 1] = pos
    return positions


def walk_final_position(probs, tail, steps, rng):
    """Final position only; identical draw stream to walk_positions."""
    probs = np.asarray(probs, dtype=np.float64)
    visits = {0: 1}
    pos = 0
    for _ in range(steps):
        p = _threshold(probs, tail, visits[pos])
        pos += 1 if rng.random() < p else -1
        visits[pos] = visits.get(pos, 0) + 1
    return pos


def walk_left_profiles(probs, tail, site, step_cap, n_paths, rng):
    """Left-step profiles (U_site^site .. U_0^site) over fresh walks.

    Walks that fail to hit `site` within `step_cap` steps are discarded and
    resampled; the number of discarded walks is returned alongside the
    profiles array of shape (n_paths, site + 1) indexed by x.
    """
    probs = np.asarray(probs, dtype=np.float64)
    profiles = np.zeros((n_paths, site + 1), dtype=np.int64)
    failures = 0
    max_failures = max(100, 10 * n_paths)
    collected = 0
    while collected < n_paths:
        visits = {0: 1}
        pos = 0
        row = np.zeros(site + 1, dtype=np.int64)
        hit = False
        for _ in range(step_cap):
            p = _threshold(probs, tail, visits[pos])
            nxt = pos + 1 if rng.random() < p else pos - 1
            if nxt < pos and 0 <= pos <= site:
                row[pos] += 1
            pos = nxt
            visits[pos] = visits.get(pos, 0) + 1
            if pos == site:
                hit = True
                break
        if hit:
            profiles[collected] = row
            collected += 1
        else:
            failures += 1
            if failures > max_failures:
                raise RuntimeError(
                    f"walk failed to hit site {site} within {step_cap} steps "
                    f"in {failures} attempts"
                )
    return profiles, failures


def _failures_before(probs, tail, k, rng):
    successes = 0
    failures = 0
    j = 1
    while successes < k:
        p = _threshold(probs, tail, j)
        if rng.random() < p:
            successes += 1
        else:
            failures += 1
        j += 1
    return failures


def sample_failures(probs, tail, k, n, rng):
    """n i.i.d. samples of the number of failures before k successes."""
    probs = np.asarray(probs, dtype=np.float64)
    out = np.empty(n, dtype=np.int64)
    for i in range(n):
        out[i] = _failures_before(probs, tail, k, rng)
    return out


def chain_paths(probs, tail, z0, n_steps, n_paths, rng):
    """Independent branching-chain paths, shape (n_paths, n_steps + 1)."""
    probs = np.asarray(probs, dtype=np.float64)
    out = np.empty((n_paths, n_steps + 1), dtype=np.int64)
    for i in range(n_paths):
        z = z0
        out[i, 0] = z
        for t in range(n_steps):
            z = _failures_before(probs, tail, z + 1, rng)
            out[i, t + 1] = z
    return out


def chain_occupation(probs, tail, z0, steps, burnin, max_state, rng):
    """Occupation counts of one long chain run, post burn-in.

    Returns (counts, first_half_sum, second_half_sum) where the sums split the
    post-burn-in samples in two for a drift diagnostic.
    """
    probs = np.asarray(probs, dtype=np.float64)
    counts = np.zeros(max_state + 1, dtype=np.int64)
    kept = steps - burnin
    half = kept // 2
    sum1 = 0
    sum2 = 0
    z = z0
    for t in range(steps):
        z = _failures_before(probs, tail, z + 1, rng)
        if t >= burnin:
            if z > max_state:
                raise RuntimeError(f"chain state {z} exceeded max_state={max_state}")
            counts[z] += 1
            if t - burnin < half:
                sum1 += z
            else:
                sum2 += z
    return counts, sum1, sum2


def coupled_chain_paths(head, p0, N, steps, rng):
    """One coupled pair of branching chains on a shared uniform stream.

    The infinite chain uses cookie law (head, then p0 forever); the finite
    chain uses (head, then p0 up to visit N, then 1/2). Each per-visit trial
    consumes a single uniform compared against both thresholds, which realizes
    the three-case joint law with xi >= zeta pointwise.
    """
    head = np.asarray(head, dtype=np.float64)
    M = len(head)
    z_inf = np.empty(steps + 1, dtype=np.int64)
    z_fin = np.empty(steps + 1, dtype=np.int64)
    z_inf[0] = 0
    z_fin[0] = 0
    zi = 0
    zf = 0
    for t in range(steps):
        kx = zi + 1
        kz = zf + 1
        sx = fx = sz = fz = 0
        j = 1
        while sx < kx or sz < kz:
            if j <= M:
                a = head[j - 1]
                b = a
            elif j <= N:
                a = p0
                b = p0
            else:
                a = p0
                b = 0.5
            u = rng.random()
            if sx < kx:
                if u < a:
                    sx += 1
                else:
                    fx += 1
            if sz < kz:
                if u < b:
                    sz += 1
                else:
                    fz += 1
            j += 1
        zi = fx
        zf = fz
        z_inf[t + 1] = zi
        z_fin[t + 1] = zf
    return z_inf, z_fin
