#!/usr/bin/env python3
"""Cutting-point relators and the quotient 2-complex, pure combinatorics.

The two branch chains around cutting point m give the group relation
  g_{w[0]} g_{w[1]} ... g_{w[k-1]}  =  g_{u[0]} ... g_{u[k-1]}
with w the delta-route word and u the gamma-route word, i.e. the cyclic
relator  u^{-1} w  of length 2k in directed letters (inversion = iota).
This script derives the relators for the rotation models, dedupes them up to
cyclic rotation and inversion, and computes the closed-surface data of the
polygon identification by corner tracing: vertex classes, Euler
characteristic, orientability, genus.

Run: python3 tests/oracles/cp_complex.py
"""


def rotation_data(N):
    n = 2 * N
    norm = lambda j: (j - 1) % n + 1
    zeta = {j: norm(j + 1) for j in range(1, n + 1)}
    iota = {j: norm(j + N) for j in range(1, n + 1)}
    return n, zeta, iota


def derived(n, zeta, iota):
    zinv = {v: k for k, v in zeta.items()}
    gamma = {j: zinv[iota[j]] for j in range(1, n + 1)}
    delta = {j: zeta[iota[j]] for j in range(1, n + 1)}
    kk = {}
    for j in range(1, n + 1):
        c, x = 1, delta[j]
        while x != j:
            x, c = delta[x], c + 1
        assert c % 2 == 0 and c >= 4
        kk[j] = c // 2
    return zinv, gamma, delta, kk


def relator(m, zinv, gamma, delta, iota, k):
    w, x = [m], m
    for _ in range(k - 1):
        x = delta[x]
        w.append(x)
    u, x = [zinv[m]], zinv[m]
    for _ in range(k - 1):
        x = gamma[x]
        u.append(x)
    return tuple(iota[a] for a in reversed(u)) + tuple(w)


def canonical_cyclic(word, iota):
    """Least representative over rotations and formal inversion."""
    L = len(word)
    inv = tuple(iota[a] for a in reversed(word))
    reps = [word[i:] + word[:i] for i in range(L)]
    reps += [inv[i:] + inv[:i] for i in range(L)]
    return min(reps)


def surface_from_polygon(word, iota):
    """Corner-trace the edge identification of a single polygon whose
    boundary reads `word` (each undirected letter must appear twice)."""
    L = len(word)
    occ = {}
    for i, a in enumerate(word):
        occ.setdefault(frozenset({a, iota[a]}), []).append(i)
    assert all(len(v) == 2 for v in occ.values()), "not a closed surface"
    orientable = all(word[i] != word[j] for i, j in occ.values())

    parent = list(range(L))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x, y):
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[rx] = ry

    # edge occurrence i runs corner i -> corner i+1; gluing occurrence i to
    # occurrence j of the inverse letter matches i ~ j+1 and i+1 ~ j
    for i, j in occ.values():
        if word[i] != word[j]:
            union(i, (j + 1) % L)
            union((i + 1) % L, j)
        else:                       # same direction twice: a flip gluing
            union(i, j)
            union((i + 1) % L, (j + 1) % L)
    V = len({find(i) for i in range(L)})
    E = len(occ)
    chi = V - E + 1
    genus = (2 - chi) // 2 if orientable else None
    return V, E, chi, orientable, genus


def run(N):
    n, zeta, iota = rotation_data(N)
    zinv, gamma, delta, kk = derived(n, zeta, iota)
    rels = [relator(m, zinv, gamma, delta, iota, kk[m]) for m in range(1, n + 1)]
    classes = {canonical_cyclic(r, iota) for r in rels}
    print(f"N={N}: relator length {len(rels[0])}, "
          f"{len(rels)} relations, {len(classes)} up to rotation/inversion")
    for r in rels[:2]:
        print("   ", r)
    assert len(classes) == 1
    rep = next(iter(classes))
    assert sorted(rep) == list(range(1, n + 1)), "each directed letter once"
    V, E, chi, orientable, genus = surface_from_polygon(rep, iota)
    print(f"    corner trace: V={V} E={E} F=1 chi={chi} "
          f"orientable={orientable} genus={genus}")
    return chi, genus


def main():
    chi4, genus4 = run(4)
    assert (chi4, genus4) == (-2, 2)
    chi6, genus6 = run(6)
    assert (chi6, genus6) == (-4, 3)
    print("OVERALL: PASS")


if __name__ == "__main__":
    main()
