"""Permutation data underlying a map: the adjacency cycle zeta, the pairing
iota, and the derived permutations gamma = zeta^-1 iota, delta = zeta iota,
with their cycle structure.

Indices are 1-based throughout, matching the usual convention for interval
labels; JSON serialization uses 1-based arrays.
"""

from __future__ import annotations

import json
from typing import Dict, List, Sequence, Tuple


class CombinatoricsError(ValueError):
    pass


class NTooSmall(CombinatoricsError):
    pass


class NotInvolution(CombinatoricsError):
    pass


class HasFixedPoint(CombinatoricsError):
    pass


class AdjacentPairing(CombinatoricsError):
    pass


class OddOrShortCycle(CombinatoricsError):
    pass


def _check_permutation(perm: Sequence[int], n: int, name: str) -> Tuple[int, ...]:
    p = tuple(perm)
    if sorted(p) != list(range(1, n + 1)):
        raise CombinatoricsError(f"{name} is not a permutation of 1..{n}: {p}")
    return p


def _cycles(perm: Tuple[int, ...]) -> List[List[int]]:
    n = len(perm)
    seen, out = [False] * (n + 1), []
    for start in range(1, n + 1):
        if seen[start]:
            continue
        cyc, x = [], start
        while not seen[x]:
            seen[x] = True
            cyc.append(x)
            x = perm[x - 1]
        out.append(cyc)
    return out


class Combinatorics:
    """Validated (N, zeta, iota) with gamma, delta and cycle data.

    zeta is always normalized to the rotation (1 2 ... 2N); construction
    relabels the symbols if needed and records the relabeling.
    """

    def __init__(self, N: int, zeta: Sequence[int], iota: Sequence[int],
                 relabeling: Sequence[int] = None):
        self.N = N
        self.n = 2 * N
        self._zeta = tuple(zeta)
        if self._zeta != tuple(j % self.n + 1 for j in range(1, self.n + 1)):
            raise CombinatoricsError(
                "zeta must be normalized; use build_combinatorics")
        self._iota = tuple(iota)
        self.relabeling = tuple(relabeling) if relabeling else None
        self._gamma = tuple(self.zeta_inv(self._iota[j - 1])
                            for j in range(1, self.n + 1))
        self._delta = tuple(self.zeta(self._iota[j - 1])
                            for j in range(1, self.n + 1))
        self.delta_cycles = _cycles(self._delta)
        self.gamma_cycles = _cycles(self._gamma)
        self.num_delta_cycles = len(self.delta_cycles)
        self.cycle_len: Dict[int, int] = {}
        self.half_len: Dict[int, int] = {}
        for cyc in self.delta_cycles:
            for j in cyc:
                self.cycle_len[j] = len(cyc)
                self.half_len[j] = len(cyc) // 2

    # accessors keep formulas close to the usual notation
    def zeta(self, j: int) -> int:
        return self._zeta[j - 1]

    def zeta_inv(self, j: int) -> int:
        return (j - 2) % self.n + 1

    def iota(self, j: int) -> int:
        return self._iota[j - 1]

    def gamma(self, j: int) -> int:
        return self._gamma[j - 1]

    def delta(self, j: int) -> int:
        return self._delta[j - 1]

    def k(self, j: int) -> int:
        return self.half_len[j]

    def k_max(self) -> int:
        return max(self.half_len.values())

    def indices(self):
        return range(1, self.n + 1)

    # route words: itineraries of the two one-sided images of cutting point j
    def delta_route(self, j: int) -> Tuple[int, ...]:
        word, x = [j], j
        for _ in range(self.k(j) - 1):
            x = self.delta(x)
            word.append(x)
        return tuple(word)

    def gamma_route(self, j: int) -> Tuple[int, ...]:
        word, x = [self.zeta_inv(j)], self.zeta_inv(j)
        for _ in range(self.k(j) - 1):
            x = self.gamma(x)
            word.append(x)
        return tuple(word)

    def to_dict(self) -> dict:
        return {"N": self.N, "zeta": list(self._zeta),
                "iota": list(self._iota)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def __repr__(self):
        return (f"Combinatorics(N={self.N}, iota={self._iota}, "
                f"P_delta={self.num_delta_cycles})")

    def __eq__(self, other):
        return isinstance(other, Combinatorics) and \
            self.to_dict() == other.to_dict()


def build_combinatorics(N: int, zeta: Sequence[int],
                        iota: Sequence[int]) -> Combinatorics:
    """Validate and build; normalizes zeta to the standard rotation."""
    if N < 4:
        raise NTooSmall(f"need N >= 4, got {N}")
    n = 2 * N
    z = _check_permutation(zeta, n, "zeta")
    io = _check_permutation(iota, n, "iota")

    zc = _cycles(z)
    if len(zc) != 1:
        raise CombinatoricsError(
            f"zeta must be a single {n}-cycle, found {len(zc)} cycles")

    relabeling = None
    std = tuple(j % n + 1 for j in range(1, n + 1))
    if z != std:
        # relabel along the cycle so zeta becomes j -> j+1
        sigma = [0] * (n + 1)          # old label -> new label
        inv = [0] * (n + 1)
        x = 1
        for t in range(n):
            sigma[x] = t + 1
            inv[t + 1] = x
            x = z[x - 1]
        io = tuple(sigma[io[inv[j] - 1]] for j in range(1, n + 1))
        relabeling = tuple(sigma[1:])
        z = std

    for j in range(1, n + 1):
        if io[j - 1] == z[j - 1] or io[j - 1] == (j - 2) % n + 1:
            raise AdjacentPairing(
                f"iota({j}) = {io[j - 1]} is zeta-adjacent to {j}")
    for j in range(1, n + 1):
        if io[j - 1] == j:
            raise HasFixedPoint(f"iota({j}) = {j}")
        if io[io[j - 1] - 1] != j:
            raise NotInvolution(f"iota^2({j}) = {io[io[j - 1] - 1]} != {j}")

    comb = Combinatorics(N, z, io, relabeling)
    for cyc in comb.delta_cycles:
        if len(cyc) % 2 != 0 or len(cyc) < 4:
            raise OddOrShortCycle(
                f"delta-cycle {cyc} has length {len(cyc)}, need even >= 4")
    return comb


def canonical_rotation_combinatorics(N: int) -> Combinatorics:
    """zeta(j) = j+1, iota(j) = j+N mod 2N; valid when gcd(N+1, 2N) = 1."""
    if N < 4:
        raise NTooSmall(f"need N >= 4, got {N}")
    n = 2 * N
    zeta = [j % n + 1 for j in range(1, n + 1)]
    iota = [(j + N - 1) % n + 1 for j in range(1, n + 1)]
    return build_combinatorics(N, zeta, iota)


def from_dict(data: dict) -> Combinatorics:
    return build_combinatorics(int(data["N"]), data["zeta"], data["iota"])


def from_json(text: str) -> Combinatorics:
    return from_dict(json.loads(text))


def verify_permutation_identities(comb: Combinatorics) -> dict:
    """Exhaustive check of the structural permutation identities.

    Returns {identity: {"pass": bool, "counterexample": ... or None}}.
    """
    report = {}

    def record(name, failures):
        report[name] = {"pass": not failures,
                        "counterexample": failures[0] if failures else None}

    # conjugacy gamma = iota^-1 delta^-1 iota, hence equal cycle type
    fails = []
    for j in comb.indices():
        lhs = comb.gamma(j)
        rhs = comb.iota(_perm_inv_at(comb._delta, comb.iota(j)))
        if lhs != rhs:
            fails.append({"j": j, "gamma": lhs, "conjugate": rhs})
    mult_d = sorted(len(c) for c in comb.delta_cycles)
    mult_g = sorted(len(c) for c in comb.gamma_cycles)
    if mult_d != mult_g:
        fails.append({"delta_cycle_lengths": mult_d,
                      "gamma_cycle_lengths": mult_g})
    record("conjugacy", fails)

    # zeta^-1(j), iota(j) and every iota(delta^(m-1)(j)) share one gamma-cycle
    fails = []
    cycle_of = {}
    for idx, cyc in enumerate(comb.gamma_cycles):
        for j in cyc:
            cycle_of[j] = idx
    for j in comb.indices():
        home = cycle_of[comb.zeta_inv(j)]
        if cycle_of[comb.iota(j)] != home:
            fails.append({"j": j, "member": comb.iota(j)})
        x = j
        for m in range(1, comb.cycle_len[j] + 1):
            if cycle_of[comb.iota(x)] != home:
                fails.append({"j": j, "m": m, "member": comb.iota(x)})
                break
            x = comb.delta(x)
    record("same_gamma_cycle", fails)

    # zeta(gamma^m(j)) = iota(gamma^(m-1)(j))
    fails = []
    for j in comb.indices():
        prev, x = j, comb.gamma(j)
        for m in range(1, comb.n + 1):
            if comb.zeta(x) != comb.iota(prev):
                fails.append({"j": j, "m": m})
                break
            prev, x = x, comb.gamma(x)
    record("zeta_gamma_step", fails)

    # gamma(iota(delta^m(j))) = iota(delta^(m-1)(j)) and the mirror identity
    fails = []
    for j in comb.indices():
        prev, x = j, comb.delta(j)
        for m in range(1, comb.n + 1):
            if comb.gamma(comb.iota(x)) != comb.iota(prev):
                fails.append({"j": j, "m": m, "side": "delta"})
                break
            prev, x = x, comb.delta(x)
        prev, x = j, comb.gamma(j)
        for m in range(1, comb.n + 1):
            if comb.delta(comb.iota(x)) != comb.iota(prev):
                fails.append({"j": j, "m": m, "side": "gamma"})
                break
            prev, x = x, comb.gamma(x)
    record("route_reversal", fails)

    # the coincidence partner iota(c_j), c_j the last gamma-route letter,
    # lives on a cycle of the same half length
    fails = []
    for j in comb.indices():
        c_j = comb.gamma_route(j)[-1]
        if comb.k(comb.iota(c_j)) != comb.k(j):
            fails.append({"j": j, "partner": comb.iota(c_j),
                          "k_j": comb.k(j),
                          "k_partner": comb.k(comb.iota(c_j))})
    record("partner_half_length", fails)

    report["pass"] = all(v["pass"] for v in report.values()
                         if isinstance(v, dict))
    return report


def _perm_inv_at(perm: Tuple[int, ...], value: int) -> int:
    return perm.index(value) + 1
