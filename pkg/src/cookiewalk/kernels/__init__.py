"""Simulation kernels with a compiled core and a pure-Python fallback.

The compiled extension (``_core``, Cython) is preferred; set the environment
variable ``COOKIEWALK_KERNELS=pure`` to force the fallback. Both backends are
draw-for-draw identical given the same seed.
"""

import os

import numpy as np

if os.environ.get("COOKIEWALK_KERNELS", "").lower() == "pure":
    from . import _pure as _impl
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _pure as _impl

BACKEND = _impl.BACKEND

walk_positions = _impl.walk_positions
walk_final_position = _impl.walk_final_position
walk_left_profiles = _impl.walk_left_profiles
sample_failures = _impl.sample_failures
chain_paths = _impl.chain_paths
chain_occupation = _impl.chain_occupation
coupled_chain_paths = _impl.coupled_chain_paths


def make_rng(seed):
    """A seeded PCG64 generator; accepts ints or SeedSequences."""
    if not isinstance(seed, np.random.SeedSequence):
        seed = np.random.SeedSequence(seed)
    return np.random.Generator(np.random.PCG64(seed))


def derive_rng(base_seed, index):
    """Replica stream `index` derived from a base seed.

    Streams are independent and order-free: replica k's stream depends only on
    (base_seed, k), so replica sets can run in any order or in parallel.
    """
    ss = np.random.SeedSequence(base_seed, spawn_key=(index,))
    return np.random.Generator(np.random.PCG64(ss))
