"""Derivation script for the even-model constants frozen in frozen.py.

Independent route: sympy symbolics + mpmath numerics.  The package itself
never imports this; tests compare library output against the values this
script prints.  Re-run with  python3 tests/oracles/derive_even_model.py

What it derives:
  * the orbit-merge polynomial for the rotation pairing on 2N = 8 and 12
    letters (even cutting points, uniform offset kernel beta),
  * its dominant root to 60 digits,
  * the feasibility window for beta (separation + one-sided landing
    conditions) and the midpoint probe value,
  * the two corner fixed points of the variation recursion at the probe,
  * grid evidence that the pairing (1 3)(2 4)(5 7)(6 8) admits no
    even-model solution.
"""

from fractions import Fraction

import mpmath
import sympy as sp

mpmath.mp.dps = 60


def rotation_family(N):
    """zeta = +1, iota = +N on {1..2N}; returns (zeta, iota, gamma, delta)."""
    n = 2 * N
    zeta = {j: j % n + 1 for j in range(1, n + 1)}
    iota = {j: (j - 1 + N) % n + 1 for j in range(1, n + 1)}
    return add_derived(n, zeta, iota)


def add_derived(n, zeta, iota):
    zinv = {v: k for k, v in zeta.items()}
    gamma = {j: zinv[iota[j]] for j in range(1, n + 1)}
    delta = {j: zeta[iota[j]] for j in range(1, n + 1)}
    return zeta, iota, gamma, delta


def cycle_len(perm, j):
    c, x = 1, perm[j]
    while x != j:
        x = perm[x]
        c += 1
    return c


def route_words(zeta, gamma, delta, j, k):
    """(right itinerary, left itinerary) for the two one-sided orbits of z_j."""
    zinv = {v: kk for kk, v in zeta.items()}
    right = [j]
    for _ in range(k - 1):
        right.append(delta[right[-1]])
    left = [zinv[j]]
    for _ in range(k - 1):
        left.append(gamma[left[-1]])
    return right, left


def symbolic_merge_difference(N, lam_num, beta_num):
    """Difference of the two k-th images of z_1, exact in (lam, beta).

    Integer lifts are pinned by evaluating at (lam_num, beta_num); the
    returned expression is exact once those lifts are fixed.
    """
    n = 2 * N
    zeta, iota, gamma, delta = rotation_family(N)
    k = cycle_len(gamma, 1) // 2
    right, left = route_words(zeta, gamma, delta, 1, k)

    lam, beta = sp.symbols("lam beta", positive=True)
    z = {j: sp.Rational(j - 1, n) for j in range(1, n + 1)}
    # separation pins the image gap right after I_{iota(j)}
    c = {j: z[j] + sp.Rational(N + 1, n) + beta for j in range(1, n + 1)}
    subs = {lam: lam_num, beta: beta_num}

    def advance(x, branch):
        y = lam * (x - z[branch]) + c[branch]
        shift = mpmath.floor(mpmath.mpf(str(sp.N(y.subs(subs), 50))))
        return sp.expand(y - sp.Integer(int(shift)))

    # right orbit starts at z_1 itself, left orbit at its lift 1
    xr = z[1]
    for b in right:
        xr = advance(xr, b)
    xl = z[1] + 1
    for b in left:
        xl = advance(xl, b)
    diff = sp.expand(xr - xl)
    # merge can differ by a unit; strip the numerically pinned integer part
    shift = mpmath.floor(mpmath.mpf(str(sp.N(diff.subs(subs), 50))) + mpmath.mpf("0.5"))
    return sp.expand(diff - sp.Integer(int(shift))), k, right, left


def dominant_root(poly_coeffs):
    roots = mpmath.polyroots([mpmath.mpf(a) for a in poly_coeffs], maxsteps=200)
    real = [r.real for r in roots if abs(r.imag) < mpmath.mpf("1e-40")]
    return max(real)


def even_model_feasible(n, zeta, iota, lam, beta):
    """Separation + strict-interior landing conditions for the uniform kernel."""
    _, _, gamma, delta = add_derived(n, zeta, iota)
    k = cycle_len(gamma, 1) // 2
    z = [mpmath.mpf(j) / n for j in range(n)]
    c = [z[zeta[iota[j]] - 1] + beta for j in range(1, n + 1)]

    def member(x, idx):
        lo = z[idx - 1]
        hi = lo + mpmath.mpf(1) / n
        x = x - mpmath.floor(x)
        return lo < x < hi

    def phi(x, b):
        y = lam * (x - z[b - 1]) + c[b - 1]
        return y - mpmath.floor(y)

    gap = 1 - lam / n
    if gap <= mpmath.mpf(1) / n:
        return False
    for j in range(1, n + 1):
        # complement of Phi(closed I_j) must strictly contain closure(I_{iota j})
        lo_img = c[j - 1] - mpmath.floor(c[j - 1])
        off = z[iota[j] - 1] - lo_img - lam / n
        off = off - mpmath.floor(off)
        if not (0 < off and off + mpmath.mpf(1) / n < gap):
            return False
        kj = k
        rr, ll = route_words(zeta, gamma, delta, j, kj)
        x = phi(z[j - 1], j)
        for m in range(kj - 1):
            if not member(x, rr[m + 1]):
                return False
            x = phi(x, rr[m + 1])
        step = z[j - 1] - z[ll[0] - 1]
        step = step - mpmath.floor(step)
        x = lam * step + c[ll[0] - 1]
        x = x - mpmath.floor(x)
        for m in range(kj - 1):
            if not member(x, ll[m + 1]):
                return False
            x = phi(x, ll[m + 1])
    return True


def merge_residual(n, zeta, iota, lam, beta):
    """Worst circle distance between the two k-th images over all branches."""
    _, _, gamma, delta = add_derived(n, zeta, iota)
    k = cycle_len(gamma, 1) // 2
    z = [mpmath.mpf(j) / n for j in range(n)]
    c = [z[zeta[iota[j]] - 1] + beta for j in range(1, n + 1)]

    def phi(x, b):
        y = lam * (x - z[b - 1]) + c[b - 1]
        return y - mpmath.floor(y)

    worst = mpmath.mpf(0)
    for j in range(1, n + 1):
        rr, ll = route_words(zeta, gamma, delta, j, k)
        xr = z[j - 1]
        for b in rr:
            xr = phi(xr, b)
        step = z[j - 1] - z[ll[0] - 1]
        step = step - mpmath.floor(step)
        xl = lam * step + c[ll[0] - 1]
        xl = xl - mpmath.floor(xl)
        for b in ll[1:]:
            xl = phi(xl, b)
        d = abs(xr - xl)
        d = min(d, 1 - d)
        worst = max(worst, d)
    return worst


def beta_window(N, lam, steps=4000):
    n = 2 * N
    zeta, iota, _, _ = rotation_family(N)
    slack = 1 - lam / n - mpmath.mpf(1) / n  # separation kernel width
    if slack <= 0:
        return None
    good = []
    for i in range(steps):
        b = slack * i / steps
        if even_model_feasible(n, zeta, iota, lam, b):
            good.append(b)
    if not good:
        return None
    return good[0], good[-1]


def corner_fixed_points(lam, beta):
    """Limits of the two one-sided enlargement recursions for branch 1, N=4."""
    n = 8
    z = [mpmath.mpf(j) / n for j in range(n)]
    c = [z[j] + mpmath.mpf(5) / 8 + beta for j in range(n)]

    def phi(x, b):
        y = lam * (x - z[b - 1]) + c[b - 1]
        return y - mpmath.floor(y)

    # third images of the two one-sided orbits of z_1 (right route 1,6,3 / left 8,3,6)
    r = phi(z[0], 1)
    for b in (6, 3):
        r = phi(r, b)
    w = lam * (1 - z[7]) + c[7]
    w -= mpmath.floor(w)
    for b in (3, 6):
        w = phi(w, b)
    lam3 = lam ** 3
    xl = (1 - (w + 1) / lam3) / (1 - 1 / lam3)
    xr = (1 - r / lam3) / (1 - 1 / lam3)  # lift; reduced value wraps past 0
    return xl, xr


def derive_rotation(N, lam_anchor, beta_anchor):
    """Iterate lift pinning until the merge polynomial stabilises."""
    lam = sp.Symbol("lam", positive=True)
    n = 2 * N
    coeffs_prev = None
    lam_num = lam_anchor
    for _ in range(6):
        diff, k, right, left = symbolic_merge_difference(N, lam_num, beta_anchor)
        poly = sp.expand(diff * n)
        p = sp.Poly(poly, lam)
        coeffs = [int(a) for a in p.all_coeffs()]
        lam_num = dominant_root(coeffs)
        if coeffs == coeffs_prev:
            break
        coeffs_prev = coeffs
    return coeffs_prev, lam_num, k, right, left, sp.Symbol("beta") not in poly.free_symbols


def main():
    print("== rotation family N=4 ==")
    coeffs, lam4, k, right, left, beta_free = derive_rotation(
        4, mpmath.mpf("6.98"), mpmath.mpf("0.00126"))
    print("k =", k, " right route:", right, " left route:", left)
    print("8*(right_k - left_k) coeffs:", coeffs, " beta-free:", beta_free)
    print("lam* =", mpmath.nstr(lam4, 60))
    y = lam4 + 1 / lam4
    print("lam* + 1/lam* - (3+sqrt(17)) =", mpmath.nstr(y - 3 - mpmath.sqrt(17), 8))
    win = beta_window(4, lam4)
    print("beta window ~", mpmath.nstr(win[0], 10), "..", mpmath.nstr(win[1], 10))
    bmid = (win[0] + win[1]) / 2
    print("beta midpoint ~", mpmath.nstr(bmid, 12))
    beta_probe = mpmath.mpf("0.001259375")
    print("residual at (lam*, 0.001259375):",
          mpmath.nstr(merge_residual(8, *rotation_family(4)[:2], lam4, beta_probe), 8))
    xl, xr = corner_fixed_points(lam4, beta_probe)
    print("corner fixed points at beta=0.001259375:")
    print("  xL*(1) =", mpmath.nstr(xl, 30))
    print("  xR*(1) =", mpmath.nstr(xr, 30), "(lift)")

    print("== rotation family N=6 ==")
    # numeric localisation first: bisect the signed closing defect, with the
    # kernel riding at half the separation slack (the window collapses as
    # lam -> 2N-1, so beta must scale with it)
    zeta6, iota6, gamma6, delta6 = rotation_family(6)

    def closing_defect(lam_t):
        beta_t = (1 - lam_t / 12 - mpmath.mpf(1) / 12) / 2
        z = [mpmath.mpf(j) / 12 for j in range(12)]
        c = [z[zeta6[iota6[j]] - 1] + beta_t for j in range(1, 13)]

        def phi(x, b):
            y = lam_t * (x - z[b - 1]) + c[b - 1]
            return y - mpmath.floor(y)

        rr, ll = route_words(zeta6, gamma6, delta6, 1, 6)
        xr = z[0]
        for b in rr:
            xr = phi(xr, b)
        xl = lam_t * (z[0] - z[11] + 1) + c[11]
        xl -= mpmath.floor(xl)
        for b in ll[1:]:
            xl = phi(xl, b)
        s = xr - xl + mpmath.mpf(1) / 2
        return s - mpmath.floor(s) - mpmath.mpf(1) / 2

    lo, hi = mpmath.mpf("10.9999"), mpmath.mpf("10.99995")
    flo = closing_defect(lo)
    for _ in range(250):
        mid = (lo + hi) / 2
        fm = closing_defect(mid)
        if fm == 0:
            lo = hi = mid
            break
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    anchor6 = (lo + hi) / 2
    beta_anchor6 = (1 - anchor6 / 12 - mpmath.mpf(1) / 12) / 2
    print("bisected lam anchor:", mpmath.nstr(anchor6, 25))
    coeffs6, lam6, k6, r6, l6, bf6 = derive_rotation(6, anchor6, beta_anchor6)
    print("k =", k6, " right route:", r6, " left route:", l6)
    print("12*(right_k - left_k) coeffs:", coeffs6, " beta-free:", bf6)
    print("lam* =", mpmath.nstr(lam6, 60))
    win6 = beta_window(6, lam6)
    print("beta window ~", mpmath.nstr(win6[0], 10), "..", mpmath.nstr(win6[1], 10))
    bmid6 = (win6[0] + win6[1]) / 2
    print("beta midpoint ~", mpmath.nstr(bmid6, 12))
    print("residual at (lam*, mid):",
          mpmath.nstr(merge_residual(12, zeta6, iota6, lam6, bmid6), 8))

    print("== pairing (1 3)(2 4)(5 7)(6 8) on 8 letters ==")
    n = 8
    iota_bad = {1: 3, 3: 1, 2: 4, 4: 2, 5: 7, 7: 5, 6: 8, 8: 6}
    zeta = {j: j % n + 1 for j in range(1, n + 1)}
    feas_count = 0
    best_res = mpmath.mpf(10)
    for li in range(1200):
        lam_t = 1 + mpmath.mpf(6) * (li + 1) / 1200
        for bi in range(40):
            beta_t = (1 - lam_t / n - mpmath.mpf(1) / n) * bi / 40
            if beta_t <= 0:
                continue
            if even_model_feasible(n, zeta, iota_bad, lam_t, beta_t):
                feas_count += 1
                best_res = min(best_res, merge_residual(n, zeta, iota_bad, lam_t, beta_t))
    print("feasible grid points:", feas_count)
    if feas_count:
        print("best residual on feasible set:", mpmath.nstr(best_res, 6))


if __name__ == "__main__":
    main()
