# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for the hot Monte Carlo loops.

Draw-for-draw compatible with ``_pure``: each kernel consumes uniforms from
the numpy bit generator in the same order, so both backends give identical
results for equal seeds.
"""

import numpy as np

cimport numpy as cnp
from cpython.pycapsule cimport PyCapsule_GetPointer
from numpy.random cimport bitgen_t

cnp.import_array()

BACKEND = "compiled"

cdef const char *CAPSULE_NAME = "BitGenerator"


cdef inline bitgen_t *_bitgen(object rng):
    capsule = rng.bit_generator.capsule
    return <bitgen_t *> PyCapsule_GetPointer(capsule, CAPSULE_NAME)


cdef inline double _u(bitgen_t *bg) noexcept nogil:
    return bg.next_double(bg.state)


def walk_positions(probs, double tail, Py_ssize_t steps, rng):
    """Simulate a walk for `steps` steps; returns positions X_0..X_steps."""
    cdef double[::1] p = np.ascontiguousarray(probs, dtype=np.float64)
    cdef Py_ssize_t L = p.shape[0]
    out_arr = np.empty(steps + 1, dtype=np.int64)
    cdef long long[::1] out = out_arr
    visits_arr = np.zeros(2 * steps + 2, dtype=np.int32)
    cdef int[::1] visits = visits_arr
    cdef Py_ssize_t offset = steps
    cdef Py_ssize_t pos = 0, t, v
    cdef double thr
    cdef bitgen_t *bg = _bitgen(rng)
    out[0] = 0
    visits[offset] = 1
    with rng.bit_generator.lock, nogil:
        for t in range(steps):
            v = visits[pos + offset]
            thr = p[v - 1] if v <= L else tail
            pos += 1 if _u(bg) < thr else -1
            visits[pos + offset] += 1
            out[t + 1] = pos
    return out_arr


def walk_final_position(probs, double tail, Py_ssize_t steps, rng):
    """Final position only; identical draw stream to walk_positions."""
    cdef double[::1] p = np.ascontiguousarray(probs, dtype=np.float64)
    cdef Py_ssize_t L = p.shape[0]
    visits_arr = np.zeros(2 * steps + 2, dtype=np.int32)
    cdef int[::1] visits = visits_arr
    cdef Py_ssize_t offset = steps
    cdef Py_ssize_t pos = 0, t, v
    cdef double thr
    cdef bitgen_t *bg = _bitgen(rng)
    visits[offset] = 1
    with rng.bit_generator.lock, nogil:
        for t in range(steps):
            v = visits[pos + offset]
            thr = p[v - 1] if v <= L else tail
            pos += 1 if _u(bg) < thr else -1
            visits[pos + offset] += 1
    return int(pos)


def walk_left_profiles(probs, double tail, Py_ssize_t site, Py_ssize_t step_cap,
                       Py_ssize_t n_paths, rng):
    """Left-step profiles (U_x^site for x = 0..site) over fresh walks."""
    cdef double[::1] p = np.ascontiguousarray(probs, dtype=np.float64)
    cdef Py_ssize_t L = p.shape[0]
    profiles_arr = np.zeros((n_paths, site + 1), dtype=np.int64)
    cdef long long[:, ::1] profiles = profiles_arr
    row_arr = np.zeros(site + 1, dtype=np.int64)
    cdef long long[::1] row = row_arr
    # positions live in [-step_cap, site]
    visits_arr = np.zeros(step_cap + site + 2, dtype=np.int32)
    cdef int[::1] visits = visits_arr
    touched_arr = np.empty(step_cap + 2, dtype=np.int64)
    cdef long long[::1] touched = touched_arr
    cdef Py_ssize_t offset = step_cap
    cdef Py_ssize_t failures = 0, collected = 0
    cdef Py_ssize_t max_failures = max(100, 10 * n_paths)
    cdef Py_ssize_t pos, nxt, t, v, n_touched, x
    cdef bint hit
    cdef double thr
    cdef bint overflow = False
    cdef bitgen_t *bg = _bitgen(rng)
    with rng.bit_generator.lock, nogil:
        while collected < n_paths:
            pos = 0
            visits[offset] = 1
            touched[0] = 0
            n_touched = 1
            for x in range(site + 1):
                row[x] = 0
            hit = False
            for t in range(step_cap):
                v = visits[pos + offset]
                thr = p[v - 1] if v <= L else tail
                nxt = pos + 1 if _u(bg) < thr else pos - 1
                if nxt < pos and 0 <= pos <= site:
                    row[pos] += 1
                pos = nxt
                if visits[pos + offset] == 0:
                    touched[n_touched] = pos
                    n_touched += 1
                visits[pos + offset] += 1
                if pos == site:
                    hit = True
                    break
            for t in range(n_touched):
                visits[touched[t] + offset] = 0
            if hit:
                for x in range(site + 1):
                    profiles[collected, x] = row[x]
                collected += 1
            else:
                failures += 1
                if failures > max_failures:
                    overflow = True
                    break
    if overflow:
        raise RuntimeError(
            f"walk failed to hit site {site} within {step_cap} steps "
            f"in {failures} attempts"
        )
    return profiles_arr, int(failures)


cdef inline long long _failures_before(double[::1] p, Py_ssize_t L, double tail,
                                       long long k, bitgen_t *bg) noexcept nogil:
    cdef long long successes = 0, failures = 0
    cdef Py_ssize_t j = 1
    cdef double thr
    while successes < k:
        thr = p[j - 1] if j <= L else tail
        if _u(bg) < thr:
            successes += 1
        else:
            failures += 1
        j += 1
    return failures


def sample_failures(probs, double tail, long long k, Py_ssize_t n, rng):
    """n i.i.d. samples of the number of failures before k successes."""
    cdef double[::1] p = np.ascontiguousarray(probs, dtype=np.float64)
    cdef Py_ssize_t L = p.shape[0]
    out_arr = np.empty(n, dtype=np.int64)
    cdef long long[::1] out = out_arr
    cdef Py_ssize_t i
    cdef bitgen_t *bg = _bitgen(rng)
    with rng.bit_generator.lock, nogil:
        for i in range(n):
            out[i] = _failures_before(p, L, tail, k, bg)
    return out_arr


def chain_paths(probs, double tail, long long z0, Py_ssize_t n_steps,
                Py_ssize_t n_paths, rng):
    """Independent branching-chain paths, shape (n_paths, n_steps + 1)."""
    cdef double[::1] p = np.ascontiguousarray(probs, dtype=np.float64)
    cdef Py_ssize_t L = p.shape[0]
    out_arr = np.empty((n_paths, n_steps + 1), dtype=np.int64)
    cdef long long[:, ::1] out = out_arr
    cdef Py_ssize_t i, t
    cdef long long z
    cdef bitgen_t *bg = _bitgen(rng)
    with rng.bit_generator.lock, nogil:
        for i in range(n_paths):
            z = z0
            out[i, 0] = z
            for t in range(n_steps):
                z = _failures_before(p, L, tail, z + 1, bg)
                out[i, t + 1] = z
    return out_arr


def chain_occupation(probs, double tail, long long z0, Py_ssize_t steps,
                     Py_ssize_t burnin, Py_ssize_t max_state, rng):
    """Occupation counts of one long chain run, post burn-in."""
    cdef double[::1] p = np.ascontiguousarray(probs, dtype=np.float64)
    cdef Py_ssize_t L = p.shape[0]
    counts_arr = np.zeros(max_state + 1, dtype=np.int64)
    cdef long long[::1] counts = counts_arr
    cdef Py_ssize_t kept = steps - burnin
    cdef Py_ssize_t half = kept // 2
    cdef long long sum1 = 0, sum2 = 0, z = z0, bad = -1
    cdef Py_ssize_t t
    cdef bitgen_t *bg = _bitgen(rng)
    with rng.bit_generator.lock, nogil:
        for t in range(steps):
            z = _failures_before(p, L, tail, z + 1, bg)
            if t >= burnin:
                if z > max_state:
                    bad = z
                    break
                counts[z] += 1
                if t - burnin < half:
                    sum1 += z
                else:
                    sum2 += z
    if bad >= 0:
        raise RuntimeError(f"chain state {bad} exceeded max_state={max_state}")
    return counts_arr, int(sum1), int(sum2)


def coupled_chain_paths(head, double p0, Py_ssize_t N, Py_ssize_t steps, rng):
    """One coupled pair of branching chains on a shared uniform stream."""
    cdef double[::1] h = np.ascontiguousarray(head, dtype=np.float64)
    cdef Py_ssize_t M = h.shape[0]
    z_inf_arr = np.empty(steps + 1, dtype=np.int64)
    z_fin_arr = np.empty(steps + 1, dtype=np.int64)
    cdef long long[::1] z_inf = z_inf_arr
    cdef long long[::1] z_fin = z_fin_arr
    cdef long long zi = 0, zf = 0, kx, kz, sx, fx, sz, fz
    cdef Py_ssize_t t, j
    cdef double a, b, u
    cdef bitgen_t *bg = _bitgen(rng)
    z_inf[0] = 0
    z_fin[0] = 0
    with rng.bit_generator.lock, nogil:
        for t in range(steps):
            kx = zi + 1
            kz = zf + 1
            sx = fx = sz = fz = 0
            j = 1
            while sx < kx or sz < kz:
                if j <= M:
                    a = h[j - 1]
                    b = a
                elif j <= N:
                    a = p0
                    b = p0
                else:
                    a = p0
                    b = 0.5
                u = _u(bg)
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
    return z_inf_arr, z_fin_arr
