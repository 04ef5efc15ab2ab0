"""Shared helpers for the test suite."""

import random

from bsl.combinatorics import CombinatoricsError, build_combinatorics


def sample_pairing(rng: random.Random, N: int, max_tries: int = 10000):
    """Random valid combinatorics with zeta the standard rotation.

    Rejection sampling over fixed-point-free involutions; the adjacency and
    even-cycle constraints discard a fair share, so we just retry.
    """
    n = 2 * N
    zeta = [j % n + 1 for j in range(1, n + 1)]
    for _ in range(max_tries):
        pool = list(range(1, n + 1))
        rng.shuffle(pool)
        iota = [0] * n
        for a, b in zip(pool[0::2], pool[1::2]):
            iota[a - 1] = b
            iota[b - 1] = a
        try:
            return build_combinatorics(N, zeta, iota)
        except CombinatoricsError:
            continue
    raise RuntimeError(f"no valid pairing found for N={N}")
