"""Piecewise-affine expanding circle maps.

Construction solves the cutting-point coincidence equations: for fixed
slope the 2N coincidence equalities are affine in the branch offsets (with
a one-dimensional gauge: shifting every offset by the same amount leaves
them invariant), so consistency pins the slope as a root of an integer
polynomial and the offsets form a one-parameter family.  The solver finds
the root numerically, reconstructs it exactly, and returns a map whose
coordinates live in Q(lambda), so the validators decide conditions exactly.

Maps loaded from JSON carry decimal-string coordinates instead and are
validated with interval arithmetic at a caller tolerance.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .certified import (DEFAULT_BITS, Cmp, CirclePoint, FieldElement,
                        NumberField, PolyRoot, Scalar, cmp_certified,
                        poly_add, poly_divmod, poly_gcd, poly_deriv,
                        poly_mul, poly_scale, poly_trim)
from .combinatorics import Combinatorics
from . import combinatorics as _cb


class MapError(RuntimeError):
    pass


class AmbiguousBranch(MapError):
    pass


class AmbiguousGeometry(MapError):
    pass


class NoSolutionFound(MapError):
    pass


class ValidationFailed(MapError):
    def __init__(self, condition, witness=None):
        super().__init__(f"condition {condition} failed: {witness}")
        self.condition = condition
        self.witness = witness


class NotMarkov(MapError):
    pass


Number = Union[FieldElement, Scalar]


# -- helpers over the two number representations ----------------------------

def _nfloor(x) -> int:
    if isinstance(x, FieldElement):
        return x.floor()
    if isinstance(x, Fraction):
        return x.numerator // x.denominator
    f = x.floor()
    if f is None:
        raise AmbiguousGeometry(
            "floor undecidable at current precision; raise precision_bits")
    return f


def _nfrac(x):
    return x - _nfloor(x)


def _ncmp(a, b, eps=None) -> Cmp:
    if isinstance(a, FieldElement) or isinstance(b, FieldElement):
        fe = a if isinstance(a, FieldElement) else b
        ea = a if isinstance(a, FieldElement) else fe.field.rational(a)
        eb = b if isinstance(b, FieldElement) else fe.field.rational(b)
        s = (ea - eb).sign()
        return Cmp.LESS if s < 0 else Cmp.GREATER if s > 0 else Cmp.EQUAL
    sa = a if isinstance(a, Scalar) else Scalar(a)
    sb = b if isinstance(b, Scalar) else Scalar(b)
    return cmp_certified(sa, sb, eps=eps)


def _decide(c: Cmp, what: str) -> Cmp:
    if c is Cmp.AMBIGUOUS:
        raise AmbiguousGeometry(
            f"{what} undecidable at current precision; raise precision_bits"
            " or pass a tolerance")
    return c


def _to_scalar(x, bits: int = DEFAULT_BITS) -> Scalar:
    if isinstance(x, FieldElement):
        return x.enclosure(bits)
    if isinstance(x, Scalar):
        return x
    return Scalar(x, bits=bits)


def _circle_eq(a, b, eps=None) -> bool:
    """Certified equality of reduced values as circle points."""
    d = _nfrac(a - b)
    c0 = _ncmp(d, 0, eps=eps)
    if c0 is Cmp.EQUAL:
        return True
    c1 = _ncmp(d, 1, eps=eps)
    return c1 is Cmp.EQUAL


class OrbitDatum:
    """Both one-sided cutting-point orbits of index j and their merge."""

    __slots__ = ("j", "left_orbit", "right_orbit", "merge_point",
                 "host_index")

    def __init__(self, j, left_orbit, right_orbit, merge_point, host_index):
        self.j = j
        self.left_orbit = left_orbit
        self.right_orbit = right_orbit
        self.merge_point = merge_point
        self.host_index = host_index

    def __repr__(self):
        return (f"OrbitDatum(j={self.j}, merge={float(self.merge_point):.6f},"
                f" host={self.host_index})")


class PiecewiseAffineCircleMap:
    """2N affine expanding branches on the half-open intervals between
    consecutive cutting points; branch j maps x to lam*(x - z_j) + c_j
    mod 1 on I_j = [z_j, z_{j+1}).

    Coordinates are either FieldElement (exact, from the solver) or Scalar
    (from JSON); both go through the same certified predicates.
    """

    def __init__(self, comb: Combinatorics, lam, z: Sequence, c: Sequence,
                 precision_bits: int = 256):
        self.comb = comb
        n = comb.n
        if len(z) != n or len(c) != n:
            raise ValueError(f"need {n} cutting points and offsets")
        if isinstance(lam, FieldElement):
            field = lam.field
            lift = lambda v: v if isinstance(v, FieldElement) \
                else field.rational(Fraction(v))
            z = [lift(v) for v in z]
            c = [lift(v) for v in c]
        else:
            lam = lam if isinstance(lam, Scalar) \
                else Scalar(lam, bits=precision_bits)
            z = [v if isinstance(v, Scalar) else Scalar(v, bits=precision_bits)
                 for v in z]
            c = [v if isinstance(v, Scalar) else Scalar(v, bits=precision_bits)
                 for v in c]
        self._lam = lam
        # cutting points are circle points; anchor the first in [0, 1) and
        # lift the rest ascending into (z_1, z_1 + 1) so the interval
        # labels survive a partition that straddles 0
        base = _nfrac(z[0])
        self._z = [base] + [base + _nfrac(v - base) for v in z[1:]]
        self._c = [_nfrac(v) for v in c]
        self.precision_bits = precision_bits
        self.is_exact = isinstance(lam, FieldElement)
        self.default_eps = None if self.is_exact else Fraction(1, 10 ** 30)
        if _decide(_ncmp(self._lam, 1, self.default_eps), "slope") \
                is not Cmp.GREATER:
            raise ValueError("slope must exceed 1")
        for i in range(n - 1):
            if _decide(_ncmp(self._z[i], self._z[i + 1], self.default_eps),
                       "cutting point order") is not Cmp.LESS:
                raise ValueError("cutting points must be strictly increasing")

    # raw 1-based accessors
    def zr(self, j: int):
        return self._z[j - 1]

    def cr(self, j: int):
        return self._c[j - 1]

    def length(self, j: int):
        n = self.comb.n
        if j < n:
            return self._z[j] - self._z[j - 1]
        return 1 + self._z[0] - self._z[n - 1]

    @property
    def slope(self) -> Scalar:
        return _to_scalar(self._lam, self.precision_bits)

    @property
    def cutting_points(self) -> List[CirclePoint]:
        return [CirclePoint(_to_scalar(v, self.precision_bits))
                for v in self._z]

    @property
    def branch_offsets(self) -> List[Scalar]:
        return [_to_scalar(v, self.precision_bits) for v in self._c]

    # -- evaluation ----------------------------------------------------

    def _position(self, x, j: int, eps=None):
        """Reduced offset of x from z_j: frac(x - z_j)."""
        return _nfrac(x - self.zr(j))

    def _member(self, x, j: int, eps=None) -> Tuple[bool, bool]:
        """(is x in I_j, hit left endpoint exactly) for reduced x."""
        u = self._position(x, j)
        c_len = _decide(_ncmp(u, self.length(j), eps=eps),
                        f"membership in interval {j}")
        if c_len is not Cmp.LESS:
            return False, False
        c0 = _ncmp(u, 0, eps=eps)
        return True, c0 is Cmp.EQUAL

    def locate(self, x, eps=None) -> int:
        """Branch index whose half-open interval holds the reduced point."""
        eps = self.default_eps if eps is None else eps
        x = _nfrac(x)
        for j in self.comb.indices():
            try:
                ok, _ = self._member(x, j, eps=eps)
            except AmbiguousGeometry:
                raise AmbiguousBranch(
                    f"point cannot be certifiably located near interval {j}")
            if ok:
                return j
        raise AmbiguousBranch("point not located in any interval")

    def branch_raw(self, j: int, x):
        """Value of branch j at reduced x, no membership check."""
        return _nfrac(self._lam * self._position(x, j) + self.cr(j))

    def _import(self, x):
        """Convert an outside point to this map's number type."""
        if isinstance(x, CirclePoint):
            x = x.value
        if self.is_exact:
            if isinstance(x, FieldElement):
                return x
            if isinstance(x, Scalar):
                if x.exact is None:
                    raise AmbiguousBranch(
                        "exact map cannot evaluate a non-exact scalar")
                x = x.exact
            return self._lam.field.rational(Fraction(x))
        if isinstance(x, Scalar):
            return x
        return Scalar(x, bits=self.precision_bits)

    def eval(self, x, eps=None) -> CirclePoint:
        x = self._import(x)
        j = self.locate(x, eps=eps)
        return CirclePoint(_to_scalar(self.branch_raw(j, x),
                                      self.precision_bits))

    def eval_branch(self, j: int, x, eps=None) -> CirclePoint:
        eps = self.default_eps if eps is None else eps
        x = _nfrac(self._import(x))
        u = self._position(x, j)
        # closure of I_j: offset may equal the length (right endpoint)
        if _decide(_ncmp(u, self.length(j), eps=eps),
                   "closure membership") is Cmp.GREATER:
            raise ValueError(f"point outside closure of interval {j}")
        return CirclePoint(_to_scalar(
            _nfrac(self._lam * u + self.cr(j)), self.precision_bits))

    def eval_left_limit(self, j: int) -> CirclePoint:
        """Left-continuous extension at cutting point z_j: the value of
        branch zeta^-1(j) at its right endpoint."""
        w = self.comb.zeta_inv(j)
        u = self.length(w)
        return CirclePoint(_to_scalar(
            _nfrac(self._lam * u + self.cr(w)), self.precision_bits))

    def branch_fixed_point(self, j: int, eps=None):
        """Raw expanding fixed point of branch j inside I_j.

        Solves (lam-1)*u = z_j - c_j + t over integers t for the offset
        u from z_j; the solutions are 1/(lam-1) apart, which exceeds the
        interval length, so at most one lands inside.
        """
        eps = self.default_eps if eps is None else eps
        den = self._lam - 1
        r = _nfrac(self.zr(j) - self.cr(j))
        for t in range(int(float(_to_scalar(self._lam))) + 2):
            u = (r + t) / den
            lo = _ncmp(u, 0, eps=eps)
            hi = _ncmp(u, self.length(j), eps=eps)
            if lo in (Cmp.GREATER, Cmp.EQUAL) and hi is Cmp.LESS:
                return _nfrac(self.zr(j) + u)
        raise AmbiguousGeometry(f"no certified fixed point in interval {j}")

    # -- one-sided orbits ------------------------------------------------

    def one_sided_orbits(self, j: int, eps=None):
        """Raw orbit data for cutting point j.

        Returns (left_values, right_values, memberships_ok, boundary_hits,
        left_chain, right_chain) where the chains are the composed affine
        lifts (a, b) with chain(x) = a*x + b reproducing the orbit values
        from the seed z_j before reduction.
        """
        eps = self.default_eps if eps is None else eps
        comb, lam = self.comb, self._lam
        k = comb.k(j)
        right_letters = comb.delta_route(j)
        left_letters = comb.gamma_route(j)
        z_j = self.zr(j)

        def run(letters, left_seed):
            vals, bad, boundary = [], None, []
            a, b = 1, 0
            x = z_j
            for i, w in enumerate(letters):
                u = self._position(x, w)
                if i == 0 and left_seed:
                    # seed sits at the right endpoint: closure membership
                    if _decide(_ncmp(u, self.length(w), eps=eps),
                               "left-limit seed") is not Cmp.EQUAL:
                        bad = bad or (i, w)
                else:
                    ok, on_edge = self._member(x, w, eps=eps)
                    if not ok and i > 0:
                        bad = bad or (i, w)
                    if ok and on_edge and i > 0:
                        boundary.append((i, w))
                    if not ok and i == 0 and not left_seed:
                        # right seed is z_j itself, always in I_j
                        bad = bad or (i, w)
                f1 = _nfloor(x - self.zr(w))
                t = lam * u + self.cr(w)
                f2 = _nfloor(t)
                a = lam * a
                b = lam * (b - self.zr(w) - f1) + self.cr(w) - f2
                x = t - f2
                vals.append(x)
            return vals, bad, boundary, (a, b)

        right_vals, right_bad, rb, right_chain = run(right_letters, False)
        left_vals, left_bad, lb, left_chain = run(left_letters, True)
        return {
            "left": left_vals, "right": right_vals,
            "left_bad": left_bad, "right_bad": right_bad,
            "boundary": lb + rb,
            "left_chain": left_chain, "right_chain": right_chain,
        }

    # -- serialization ---------------------------------------------------

    def to_dict(self) -> dict:
        digits = int(self.precision_bits * 0.302) + 8
        return {
            "comb": self.comb.to_dict(),
            "lambda": _to_scalar(self._lam, self.precision_bits)
            .decimal(digits),
            "z": [_to_scalar(v, self.precision_bits).decimal(digits)
                  for v in self._z],
            "c": [_to_scalar(v, self.precision_bits).decimal(digits)
                  for v in self._c],
            "precision_bits": self.precision_bits,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def map_from_dict(data: dict) -> PiecewiseAffineCircleMap:
    comb = _cb.from_dict(data["comb"])
    bits = int(data.get("precision_bits", 256))
    return PiecewiseAffineCircleMap(
        comb, Scalar(data["lambda"], bits=bits),
        [Scalar(s, bits=bits) for s in data["z"]],
        [Scalar(s, bits=bits) for s in data["c"]],
        precision_bits=bits)


def map_from_json(text: str) -> PiecewiseAffineCircleMap:
    return map_from_dict(json.loads(text))


# ---------------------------------------------------------------------------
# condition validation


def validate_conditions(m: PiecewiseAffineCircleMap, eps=None) -> dict:
    """Certified report on (SE), (E+), (E-), (EC) and expanding fixed
    points, with the per-index orbit data.

    Every verdict is certified; an undecidable comparison raises
    AmbiguousGeometry rather than guessing.
    """
    eps = m.default_eps if eps is None else eps
    comb, lam = m.comb, m._lam
    n = comb.n
    report = {"warnings": [], "orbit_data": {}}

    # (SE): the image arc of I_j misses exactly the interval iota(j)
    se_fail = None
    for j in comb.indices():
        img_len = lam * m.length(j)
        if _decide(_ncmp(img_len, 1, eps=eps), "image length") \
                is not Cmp.LESS:
            se_fail = se_fail or {"j": j, "reason": "image covers the circle"}
            continue
        comp_len = 1 - img_len
        img_end = m.cr(j) + img_len
        for t in comb.indices():
            u = _nfrac(m.zr(t) - img_end)
            c = _decide(_ncmp(u + m.length(t), comp_len, eps=eps),
                        f"SE separation ({j},{t})")
            missed = c in (Cmp.LESS, Cmp.EQUAL)
            if missed != (t == comb.iota(j)):
                se_fail = se_fail or {"j": j, "t": t, "missed": missed}
    report["SE"] = {"pass": se_fail is None, "witness": se_fail}

    # (E+)/(E-)/(EC) from the one-sided orbits
    ep_fail = em_fail = ec_fail = None
    for j in comb.indices():
        k = comb.k(j)
        orb = m.one_sided_orbits(j, eps=eps)
        if orb["right_bad"] is not None:
            i, w = orb["right_bad"]
            ep_fail = ep_fail or {"j": j, "step": i, "interval": w}
        if orb["left_bad"] is not None:
            i, w = orb["left_bad"]
            em_fail = em_fail or {"j": j, "step": i, "interval": w}
        for i, w in orb["boundary"]:
            report["warnings"].append(
                {"kind": "boundary_hit", "j": j, "step": i, "interval": w})
        left_end, right_end = orb["left"][-1], orb["right"][-1]
        if not _circle_eq(left_end, right_end, eps=eps):
            d = _to_scalar(_nfrac(left_end - right_end), m.precision_bits)
            ec_fail = ec_fail or {"j": j, "distance": d.decimal(40)}
            merge = None
        else:
            merge = right_end
            for i in range(k - 1):
                if _circle_eq(orb["left"][i], orb["right"][i], eps=eps):
                    ec_fail = ec_fail or {"j": j, "premature_merge_step": i}
                    break
        if merge is not None:
            host = m.locate(merge, eps=eps)
            bits = m.precision_bits
            report["orbit_data"][j] = OrbitDatum(
                j,
                [CirclePoint(_to_scalar(v, bits)) for v in orb["left"]],
                [CirclePoint(_to_scalar(v, bits)) for v in orb["right"]],
                CirclePoint(_to_scalar(merge, bits)),
                host)
    report["E+"] = {"pass": ep_fail is None, "witness": ep_fail}
    report["E-"] = {"pass": em_fail is None, "witness": em_fail}
    report["EC"] = {"pass": ec_fail is None, "witness": ec_fail}

    # expanding fixed point inside each interval interior
    fp_fail = None
    if _decide(_ncmp(lam, 1, eps=eps), "slope") is not Cmp.GREATER:
        fp_fail = {"reason": "slope not expanding"}
    else:
        for j in comb.indices():
            try:
                p = m.branch_fixed_point(j, eps=eps)
            except AmbiguousGeometry:
                fp_fail = fp_fail or {"j": j, "reason": "no fixed point"}
                continue
            u = m._position(p, j)
            strict_in = _ncmp(u, 0, eps=eps) is Cmp.GREATER and \
                _ncmp(u, m.length(j), eps=eps) is Cmp.LESS
            if not strict_in:
                fp_fail = fp_fail or {"j": j, "reason": "fixed point on edge"}
    report["expanding_fixed_points"] = {"pass": fp_fail is None,
                                        "witness": fp_fail}

    report["pass"] = all(report[k]["pass"]
                         for k in ("SE", "E+", "E-", "EC",
                                   "expanding_fixed_points"))
    return report


def itinerary(m: PiecewiseAffineCircleMap, x, n: int, eps=None):
    """First n interval labels along the forward orbit of x."""
    if n < 1:
        raise ValueError("need n >= 1")
    x = m._import(x)
    word = []
    for _ in range(n):
        j = m.locate(x, eps=eps)
        if word and j == m.comb.iota(word[-1]):
            raise AmbiguousGeometry(
                f"itinerary produced forbidden factor ({word[-1]}, {j})")
        word.append(j)
        x = m.branch_raw(j, x)
    return tuple(word)


# ---------------------------------------------------------------------------
# solver: coincidence equations for the even model


def _compose_symbolic(letters, lifts, z: List[Fraction], start: Fraction):
    """Affine composition along a branch word, symbolic in the slope.

    Returns (coeffs, const) where coeffs[w] and const are polynomials in
    the slope (descending Fraction tuples) and the end value equals
    sum_w coeffs[w]*c_w + const.
    """
    lam = (Fraction(1), Fraction(0))  # the indeterminate
    coeffs = {}
    const = (Fraction(start),) if start else ()
    for (w, (f1, f2)) in zip(letters, lifts):
        shift = Fraction(z[w - 1]) + f1
        coeffs = {u: poly_mul(lam, p) for u, p in coeffs.items()}
        const = poly_add(poly_mul(lam, poly_add(const, (-shift,))),
                         (Fraction(-f2),))
        coeffs[w] = poly_add(coeffs.get(w, ()), (Fraction(1),))
    return coeffs, const


def _poly_det(mat) -> tuple:
    """Bareiss fraction-free determinant of a matrix of polynomials."""
    m = [row[:] for row in mat]
    n = len(m)
    sign = 1
    prev = (Fraction(1),)
    for k in range(n - 1):
        if not poly_trim(m[k][k]):
            pivot = next((r for r in range(k + 1, n)
                          if poly_trim(m[r][k])), None)
            if pivot is None:
                return ()
            m[k], m[pivot] = m[pivot], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = poly_add(poly_mul(m[i][j], m[k][k]),
                               poly_scale(poly_mul(m[i][k], m[k][j]), -1))
                q, r = poly_divmod(num, prev) if poly_trim(prev) != (1,) \
                    else (num, ())
                if poly_trim(r):
                    raise ArithmeticError("inexact Bareiss division")
                m[i][j] = q
            m[i][k] = ()
        prev = m[k][k]
    return poly_scale(m[n - 1][n - 1], sign)


def _se_window_center(comb, zf, lam, j):
    """Center of the offset window keeping the image arc of I_j away from
    interval iota(j) (numeric)."""
    n = comb.n
    ln = zf[j % n] - zf[j - 1] if j < n else 1 + zf[0] - zf[j - 1]
    li = zf[comb.iota(j) % n] - zf[comb.iota(j) - 1] \
        if comb.iota(j) < n else 1 + zf[0] - zf[comb.iota(j) - 1]
    width = 1 - lam * ln - li
    return (zf[comb.iota(j) - 1] - lam * ln - width / 2) % 1.0, width


def _float_orbit_lifts(comb, z, c, lam, j):
    """Numeric orbit lifts and values for both sides at cutting point j."""

    def run(letters, seed):
        x = seed
        lifts, vals = [], []
        for w in letters:
            zw = float(z[w - 1])
            f1 = int(np.floor(x - zw + 1e-12))
            u = x - zw - f1
            t = lam * u + float(c[w - 1])
            f2 = int(np.floor(t))
            lifts.append((f1, f2))
            x = t - f2
            vals.append(x)
        return lifts, vals

    right = run(comb.delta_route(j), float(z[j - 1]))
    left = run(comb.gamma_route(j), float(z[j - 1]))
    return left, right


def _route_pullback(comb, zf, lam, c, m_val, j, letters):
    """Residual row of one backward route equation: the merge candidate
    is pulled back through the inverse branches of every letter but the
    first, then compared with the first letter's exact image of z_j.
    Returns the row value and its gradient in (c | m | lam).

    Backward steps contract by 1/lam and each frac has a unique smooth
    preimage, so there are no integer lifts to guess.  The first
    forward step stays in closed form: one of the two routes starts
    with branch j itself, whose image of z_j is c_j on the nose, and
    reducing that step with a frac would park the equation on a wrap
    boundary and turn every fit near the solution into a coin toss.
    """
    n = comb.n
    y = m_val
    grad = np.zeros(2 * n + 1)
    grad[n + j - 1] = 1.0
    for w in reversed(letters[1:]):
        u = (y - c[w - 1]) % 1.0
        grad[w - 1] -= 1.0
        y = zf[w - 1] + u / lam
        grad /= lam
        grad[2 * n] -= u / (lam * lam)
    w1 = letters[0]
    a = (zf[j - 1] - zf[w1 - 1]) % 1.0
    val = (y - c[w1 - 1] - lam * a + 0.5) % 1.0 - 0.5
    grad[w1 - 1] -= 1.0
    grad[2 * n] -= a
    return val, grad


def _backward_system(comb, zf, lam, c, m):
    """Residuals (and Jacobian) of all backward route equations: each
    pulled-back merge point must land on the first image of its
    cutting point."""
    n = comb.n
    G = np.zeros(2 * n)
    J = np.zeros((2 * n, 2 * n + 1))
    r = 0
    for j in comb.indices():
        for letters in (comb.delta_route(j), comb.gamma_route(j)):
            val, grad = _route_pullback(comb, zf, lam, c, m[j - 1], j,
                                        letters)
            G[r] = val
            J[r] = grad
            r += 1
    return G, J


def _backward_fit(comb, zf, lam, c=None, m=None, with_lam=False, iters=60):
    """Gauss-Newton fit of the backward system at (or near) a slope.

    With with_lam the slope is a variable too and the system is square,
    giving quadratic convergence right onto the consistent slope; the
    last offset stays fixed as the gauge anchor either way.
    Returns (residual, lam, c, m).
    """
    n = comb.n
    if c is None:
        c = [_se_window_center(comb, zf, lam, j)[0] for j in comb.indices()]
    c = list(c)
    if m is None:
        m = [_float_orbit_lifts(comb, zf, c, lam, j)[0][1][-1]
             for j in comb.indices()]
    m = list(m)
    cols = list(range(n - 1)) + list(range(n, 2 * n))
    if with_lam:
        cols.append(2 * n)
    resid = np.inf
    stall = 0
    for _ in range(iters):
        G, J = _backward_system(comb, zf, lam, c, m)
        prev, resid = resid, float(np.max(np.abs(G)))
        if resid < 3e-16:
            break
        if resid > 0.9 * prev:
            stall += 1
            if stall >= 8:  # parked in a wrong wrap region, give up
                break
        else:
            stall = 0
        try:
            sol, *_ = np.linalg.lstsq(J[:, cols], -G, rcond=None)
        except np.linalg.LinAlgError:
            break
        step = float(np.max(np.abs(sol)))
        if step > 0.05:  # damp early wild steps
            sol *= 0.05 / step
        elif step < 1e-14:
            break
        t = 0
        for i in range(n - 1):
            c[i] += sol[t]
            t += 1
        for i in range(n):
            m[i] = (m[i] + sol[t]) % 1.0
            t += 1
        if with_lam:
            lam += sol[t]
    G, _ = _backward_system(comb, zf, lam, c, m)
    return float(np.max(np.abs(G))), lam, c, m


def _gauge_window_float(comb, z, c, lam):
    """Width of the uniform-shift interval keeping all side conditions
    satisfied (numeric; negative means infeasible)."""
    n = comb.n
    zf = [float(v) for v in z]
    s_lo, s_hi = -np.inf, np.inf
    for j in comb.indices():
        # separation window for the offset itself, slope 1 in the shift
        center, width = _se_window_center(comb, zf, lam, j)
        if width <= 0:
            return -1.0
        off = (c[j - 1] - center + 0.5) % 1.0 - 0.5
        s_lo = max(s_lo, -width / 2 - off)
        s_hi = min(s_hi, width / 2 - off)
        # orbit memberships, slope = geometric sum of the step count
        (lL, vL), (lR, vR) = _float_orbit_lifts(comb, z, c, lam, j)
        for letters, vals in ((comb.gamma_route(j), vL),
                              (comb.delta_route(j), vR)):
            for i in range(len(letters) - 1):
                w = letters[i + 1]
                ln = zf[w % n] - zf[w - 1] if w < n else 1 + zf[0] - zf[w - 1]
                u = (vals[i] - zf[w - 1]) % 1.0
                g = (lam ** (i + 1) - 1) / (lam - 1)
                s_lo = max(s_lo, -u / g)
                s_hi = min(s_hi, (ln - u) / g)
    return s_hi - s_lo


def _eval_frac(p, x: Fraction) -> Fraction:
    acc = Fraction(0)
    for cc in p:
        acc = acc * x + cc
    return acc


def _eval_field(p, lam, field):
    acc = field.rational(0)
    for cc in p:
        acc = acc * lam + cc
    return acc


def _symbolic_system(comb, zq, data):
    """Coincidence rows over Q[slope] with the integer lifts frozen.

    Row j reads  sum_w A[j][w]*c_w = b[j]  and states that the two
    one-sided orbit ends at cutting point j agree as real numbers.
    """
    n = comb.n
    A = [[() for _ in range(n)] for _ in range(n)]
    b = []
    for j in comb.indices():
        coefR, constR = _compose_symbolic(comb.delta_route(j),
                                          data["lifts_R"][j], zq, zq[j - 1])
        coefL, constL = _compose_symbolic(comb.gamma_route(j),
                                          data["lifts_L"][j], zq, zq[j - 1])
        for w in comb.indices():
            A[j - 1][w - 1] = poly_add(coefR.get(w, ()),
                                       poly_scale(coefL.get(w, ()), -1))
        diff = poly_add(constR, poly_scale(constL, -1))
        b.append(poly_add((Fraction(data["merge"][j]),),
                          poly_scale(diff, -1)))
    return A, b


def _field_solve(A, b, field):
    """Exact Gaussian elimination over the number field.

    A has one more row than unknowns; the surplus row must reduce to
    0 = 0, which is precisely where the slope being a root of the
    consistency polynomial gets used.
    """
    n, m = len(A), len(A[0])
    rows = [list(r) + [bb] for r, bb in zip(A, b)]
    row = 0
    for col in range(m):
        pr = next((r for r in range(row, n)
                   if not rows[r][col].is_zero()), None)
        if pr is None:
            raise NoSolutionFound("offset system is rank deficient")
        rows[row], rows[pr] = rows[pr], rows[row]
        inv = rows[row][col].inverse()
        rows[row] = [e * inv for e in rows[row]]
        for r in range(row + 1, n):
            f = rows[r][col]
            if f.is_zero():
                continue
            rows[r] = [rows[r][t] - f * rows[row][t] for t in range(m + 1)]
        row += 1
    for r in range(row, n):
        if not rows[r][m].is_zero():
            raise NoSolutionFound(
                "coincidence equations inconsistent at the exact slope")
    xs: List = [None] * m
    for i in reversed(range(m)):
        acc = rows[i][m]
        for t in range(i + 1, m):
            acc = acc - rows[i][t] * xs[t]
        xs[i] = acc
    return xs


def _fmin(a, b):
    return a if (b - a).sign() > 0 else b


def _fmax(a, b):
    return a if (a - b).sign() > 0 else b


def _gauge_probe(comb, zq, lam, offs, field, data):
    """Feasible uniform shift of the offsets, as a short rational.

    The coincidence system pins the offsets only up to adding the same
    constant to all of them.  Each orbit membership and each separation
    window is affine in that constant, so the feasible set is a union of
    intervals with field-element endpoints; the probe is an interior
    rational of the widest piece.
    """
    n = comb.n
    zf = [field.rational(q) for q in zq]

    def flen(w):
        return zf[w % n] - zf[w - 1] if w < n else 1 + zf[0] - zf[w - 1]

    s_lo, s_hi = None, None
    for j in comb.indices():
        for letters, lifts, left_seed in (
                (comb.gamma_route(j), data["lifts_L"][j], True),
                (comb.delta_route(j), data["lifts_R"][j], False)):
            x = zf[j - 1]
            g = field.rational(0)
            for i, (w, (f1, f2)) in enumerate(zip(letters, lifts)):
                u0 = x - zf[w - 1] - f1
                if i == 0:
                    want = flen(w) if left_seed else field.rational(0)
                    if not (u0 - want).is_zero():
                        raise NoSolutionFound("seed lift mismatch")
                else:
                    lo = -u0 / g
                    hi = (flen(w) - u0) / g
                    s_lo = lo if s_lo is None else _fmax(s_lo, lo)
                    s_hi = hi if s_hi is None else _fmin(s_hi, hi)
                x = lam * u0 + offs[w - 1] - f2
                g = lam * g + 1
    if (s_hi - s_lo).sign() <= 0:
        raise NoSolutionFound("one-sided orbit conditions leave no room")

    pieces = [(s_lo, s_hi)]
    for j in comb.indices():
        u_cap = 1 - lam * flen(j) - flen(comb.iota(j))
        if u_cap.sign() <= 0:
            raise NoSolutionFound(f"image of interval {j} is too long")
        q = zf[comb.iota(j) - 1] - offs[j - 1] - lam * flen(j)
        new_pieces = []
        for a, b in pieces:
            for mm in range((q - b).floor() - 1, (q - a).floor() + 2):
                lo = _fmax(a, q - mm - u_cap)
                hi = _fmin(b, q - mm)
                if (hi - lo).sign() > 0:
                    new_pieces.append((lo, hi))
        pieces = new_pieces
        if not pieces:
            raise NoSolutionFound(
                "separation and orbit windows do not intersect")
    best = pieces[0]
    for piece in pieces[1:]:
        if ((piece[1] - piece[0]) - (best[1] - best[0])).sign() > 0:
            best = piece
    a, b = best
    mid = (a + b) / 2
    for digits in (9, 15, 21, 30, 45):
        probe = Fraction(mid.enclosure(192).decimal(digits))
        if (probe - a).sign() > 0 and (b - probe).sign() > 0:
            return probe
    return mid  # exact field midpoint; always feasible


def _exact_solve(comb, zq, lamhat, data, precision_bits):
    n = comb.n
    A, b = _symbolic_system(comb, zq, data)
    P, drop = (), None
    for dcol in range(n - 1, -1, -1):
        M = [[A[i][t] for t in range(n) if t != dcol] + [b[i]]
             for i in range(n)]
        P = poly_trim(_poly_det(M))
        if P:
            drop = dcol
            break
    if drop is None:
        raise NoSolutionFound("coincidence system is degenerate")

    g = poly_gcd(P, poly_deriv(P))
    if len(g) > 1:
        P, rem = poly_divmod(P, g)
        if poly_trim(rem):
            raise ArithmeticError("square-free reduction failed")
    P = poly_scale(P, 1 / P[0])

    lamr = Fraction(lamhat)
    w = Fraction(1, 10 ** 8)
    bracket = None
    while w <= Fraction(1, 100):
        lo, hi = lamr - w, lamr + w
        slo, shi = _eval_frac(P, lo), _eval_frac(P, hi)
        if slo == 0 or shi == 0 or (slo < 0) != (shi < 0):
            bracket = (lo, hi)
            break
        w *= 4
    if bracket is None:
        raise NoSolutionFound(
            "numeric slope does not bracket a consistency root")

    # The consistency determinant may carry factors with no root near the
    # numeric slope.  Those make the quotient ring composite; whenever an
    # inverse hits a zero divisor we learn a factor and keep the half the
    # root actually satisfies, shrinking the modulus until it behaves.
    for _ in range(len(P)):
        root = PolyRoot(P, *bracket)
        field = NumberField(root)
        lam = field.generator()
        try:
            Af = [[_eval_field(A[i][t], lam, field)
                   for t in range(n) if t != drop] for i in range(n)]
            bf = [_eval_field(b[i], lam, field) for i in range(n)]
            xs = _field_solve(Af, bf, field)
            offs = xs[:drop] + [field.rational(0)] + xs[drop:]
            shift = _gauge_probe(comb, zq, lam, offs, field, data)
            c = [offs[t] + shift for t in range(n)]
            m = PiecewiseAffineCircleMap(comb, lam, zq, c,
                                         precision_bits=precision_bits)
        except ZeroDivisionError as err:
            g = getattr(err, "factor", None)
            if g is None:
                raise
            quo, rem = poly_divmod(P, g)
            if poly_trim(rem):
                raise ArithmeticError("factor does not divide the modulus")
            lo, hi = root.bracket()
            slo, shi = _eval_frac(g, lo), _eval_frac(g, hi)
            if slo == 0 or shi == 0 or (slo < 0) != (shi < 0):
                P = g
            else:
                P = poly_scale(quo, Fraction(1) / quo[0])
            bracket = (lo, hi)
            continue
        report = validate_conditions(m)
        if not report["pass"]:
            failed = [key for key in ("SE", "E+", "E-", "EC",
                                      "expanding_fixed_points")
                      if not report[key]["pass"]]
            raise ValidationFailed(failed[0], report[failed[0]])
        return m
    raise NoSolutionFound("modulus refinement did not terminate")


def solve_even_model(comb: Combinatorics, z=None,
                     precision_bits: int = 256) -> PiecewiseAffineCircleMap:
    """Construct an expanding map for the given pairing data.

    Cutting points default to the uniform grid (j-1)/2N and may be
    overridden with rationals.  The slope is certified as the root of an
    integer polynomial and the offsets are exact number-field elements,
    so the returned map validates with no tolerance at all.

    Raises NoSolutionFound when no expanding slope makes the one-sided
    orbits coincide (the pairing admits no such map on these cutting
    points) and ValidationFailed when a candidate slipped through the
    numeric stage but fails certified validation.
    """
    n = comb.n
    if z is None:
        zq = [Fraction(j, n) for j in range(n)]
    else:
        zq = [Fraction(v) for v in z]
        if len(zq) != n:
            raise ValueError(f"expected {n} cutting points, got {len(zq)}")
        if any(not 0 <= v < 1 for v in zq):
            raise ValueError("cutting points must lie in [0, 1)")
        if any(zq[i] >= zq[i + 1] for i in range(n - 1)):
            raise ValueError("cutting points must be strictly increasing")

    def flen(w):
        return zq[w % n] - zq[w - 1] if w < n else 1 + zq[0] - zq[w - 1]

    hi = float(n - 1)
    for j in comb.indices():
        hi = min(hi, float((1 - flen(comb.iota(j))) / flen(j)))
    lo = 1.0 + 1e-3
    if hi <= lo:
        raise NoSolutionFound("no expanding slope separates the images")

    zf = [float(v) for v in zq]
    grid = 240
    xs = [lo + (hi - 1e-9 - lo) * i / (grid - 1) for i in range(grid)]
    resid = [_backward_fit(comb, zf, x)[0] for x in xs]
    cands = [i for i in range(grid)
             if resid[i] <= resid[max(i - 1, 0)]
             and resid[i] <= resid[min(i + 1, grid - 1)]
             and resid[i] < 0.05]
    cands.sort(key=lambda i: resid[i])
    cands = cands[:10]

    best_r, best_w, last_err = np.inf, -np.inf, None
    for i in cands:
        # the fixed-slope residual is a smooth V only along the tracked
        # solution branch: march outward from the candidate's own fit,
        # reseeding each step from its neighbour so the track stays on
        # that branch, then bisect toward the bottom of the V before
        # letting the square system polish the consistent slope.  The
        # polish alone is not enough: a candidate hugging the slope
        # bound tends to fall onto the degenerate exactly-tiling slope
        # at the bound itself rather than the root just below it.
        steps = 8
        r, _, c0, m0 = _backward_fit(comb, zf, xs[i])
        samples = [(xs[i], r, c0, m0)]
        span = xs[1] - xs[0]
        for sgn in (1.0, -1.0):
            cc, mm = list(c0), list(m0)
            for t in range(1, steps + 1):
                x = xs[i] + sgn * span * t / steps
                if not lo <= x <= hi - 1e-9:
                    break
                r, _, cc, mm = _backward_fit(comb, zf, x, cc, mm)
                samples.append((x, r, cc, mm))
        samples.sort(key=lambda s: s[0])
        # bisect around the best sample with cold fits until the bracket
        # is far tighter than the spacing of nearby consistent slopes.
        # Cold on purpose: a reseeded fit inherits the wrap region of
        # its neighbour, and tracking inward from a degenerate slope at
        # the bracket edge would hold the fit in that region right past
        # the root it is hunting for.
        for _ in range(60):
            k = min(range(len(samples)), key=lambda q: samples[q][1])
            if samples[k][1] < 1e-12:
                break
            fresh = []
            for ka, kb in ((k - 1, k), (k, k + 1)):
                if ka < 0 or kb >= len(samples):
                    continue
                xa, xb = samples[ka][0], samples[kb][0]
                if xb - xa < 1e-9:
                    continue
                xm = 0.5 * (xa + xb)
                r, _, cc, mm = _backward_fit(comb, zf, xm)
                fresh.append((xm, r, cc, mm))
            if not fresh:
                break
            samples.extend(fresh)
            samples.sort(key=lambda s: s[0])
        best = min(samples, key=lambda s: s[1])
        r, lamhat, cc, mm = _backward_fit(comb, zf, best[0], best[2],
                                          best[3], with_lam=True)
        best_r = min(best_r, r)
        if not lo < lamhat < hi or r > 1e-11:
            continue
        wd = _gauge_window_float(comb, zq, cc, lamhat)
        best_w = max(best_w, wd)
        if wd <= 1e-12:
            continue
        data = {"lifts_L": {}, "lifts_R": {}, "merge": {}}
        for j in comb.indices():
            (lL, vL), (lR, vR) = _float_orbit_lifts(comb, zq, cc, lamhat, j)
            data["lifts_L"][j], data["lifts_R"][j] = lL, lR
            data["merge"][j] = int(round(vR[-1] - vL[-1]))
        try:
            return _exact_solve(comb, zq, lamhat, data, precision_bits)
        except (NoSolutionFound, ValidationFailed) as err:
            last_err = err
            continue
    if last_err is not None:
        raise last_err
    raise NoSolutionFound(
        f"no slope with coincident one-sided orbits: best residual "
        f"{best_r:.3e}, best shift window {best_w:.3e}")


# ---------------------------------------------------------------------------
# Markov refinement


def markovize(m: PiecewiseAffineCircleMap) -> PiecewiseAffineCircleMap:
    """Slide each cutting point to the preimage of a branch fixed point.

    The branch functions themselves are unchanged on the overlap: only
    the partition moves, by less than one expanded cell width.  On the
    new map every one-sided orbit lands on the fixed point of the branch
    hosting its merge, which is what makes the partition generated by
    the orbits finite.  A map already in that position is returned as is.
    """
    comb, lam = m.comb, m._lam
    new_z, new_c = [], []
    moved = False
    for j in comb.indices():
        od = m.one_sided_orbits(j)
        if od["left_bad"] or od["right_bad"]:
            raise ValidationFailed("E+" if od["right_bad"] else "E-",
                                   {"j": j, "stage": "markovize"})
        merge = od["left"][-1]
        host = m.locate(merge)
        p = m.branch_fixed_point(host)
        gap = merge - p
        off = _nfloor(gap + Fraction(1, 2))  # nearest integer
        d = gap - off
        if _circle_eq(merge, p, eps=m.default_eps):
            new_z.append(m.zr(j))
            new_c.append(m.cr(j))
            continue
        a, _b = od["left_chain"]
        d = d / a
        zp = m.zr(j) - d
        cp = _nfrac(m.cr(j) - lam * d)
        new_z.append(zp)
        new_c.append(cp)
        moved = True
    if not moved:
        return m

    m2 = PiecewiseAffineCircleMap(comb, lam, new_z, new_c,
                                  precision_bits=m.precision_bits)
    report = validate_conditions(m2)
    if not report["pass"]:
        raise ValidationFailed("markov-refinement", report)
    for j in comb.indices():
        od = m2.one_sided_orbits(j)
        host = m2.locate(od["left"][-1])
        p = m2.branch_fixed_point(host)
        if not _circle_eq(od["left"][-1], p, eps=m2.default_eps):
            raise ValidationFailed("markov-refinement",
                                   {"j": j, "reason": "orbit missed the "
                                    "host fixed point"})
    return m2


# ---------------------------------------------------------------------------
# Markov partition and Perron data


class PerronData:
    """Markov partition of a refined map with its transition data."""

    __slots__ = ("points", "lengths", "matrix", "rho")

    def __init__(self, points, lengths, matrix, rho):
        self.points = points
        self.lengths = lengths
        self.matrix = matrix
        self.rho = rho

    @property
    def row_sums(self):
        return tuple(sum(row) for row in self.matrix)

    def __repr__(self):
        return f"PerronData(cells={len(self.points)}, " \
               f"rho~{float(self.rho):.12f})"


def _is_zero_val(x) -> bool:
    if isinstance(x, FieldElement):
        return x.is_zero()
    if isinstance(x, Scalar):
        if x.exact is not None:
            return x.exact == 0
        if not x.contains(0):
            return False
        raise AmbiguousGeometry("cannot certify exact equality")
    return x == 0


def _markov_partition(m: PiecewiseAffineCircleMap):
    """All cutting points, their one-sided orbits and the branch fixed
    points, deduplicated and sorted; NotMarkov when orbits escape."""
    pts = []
    for j in m.comb.indices():
        od = m.one_sided_orbits(j)
        if od["left_bad"] or od["right_bad"]:
            raise NotMarkov(f"one-sided orbit at cutting point {j} "
                            f"leaves its itinerary")
        pts.append(_nfrac(m.zr(j)))
        pts.extend(od["left"])
        pts.extend(od["right"])
        pts.append(m.branch_fixed_point(j))
    pts.sort(key=float)
    out = [pts[0]]
    for x in pts[1:]:
        if _is_zero_val(x - out[-1]):
            continue
        if _decide(_ncmp(out[-1], x, eps=None), "partition order") \
                is not Cmp.LESS:
            raise NotMarkov("partition points could not be separated")
        out.append(x)
    return out


def _index_of(pts, y):
    lo, hi = 0, len(pts)
    while lo < hi:
        mid = (lo + hi) // 2
        d = _ncmp(pts[mid], y, eps=None)
        if d is Cmp.EQUAL:
            return mid
        if d is Cmp.LESS:
            lo = mid + 1
        else:
            hi = mid
    for t in (lo - 1, lo):
        if 0 <= t < len(pts) and _is_zero_val(pts[t] - y):
            return t
    return None


def _perron_enclosure(matrix, rel=Fraction(1, 10 ** 12), max_iter=2000):
    """Certified spectral radius bounds by the min/max row-ratio
    squeeze, iterated with exact rational vectors."""
    n = len(matrix)
    supports = [tuple(t for t in range(n) if row[t]) for row in matrix]
    if any(not s for s in supports):
        raise NotMarkov("a partition cell has empty image")
    w = [Fraction(1)] * n
    lo_best, hi_best = Fraction(0), None
    for _ in range(max_iter):
        v = [sum(w[t] for t in supports[i]) for i in range(n)]
        lo = min(v[i] / w[i] for i in range(n))
        hi = max(v[i] / w[i] for i in range(n))
        lo_best = max(lo_best, lo)
        hi_best = hi if hi_best is None else min(hi_best, hi)
        if hi_best - lo_best <= rel * lo_best:
            break
        s = max(v)
        w = [max((v[i] / s).limit_denominator(1 << 96),
                 Fraction(1, 1 << 96)) for i in range(n)]
    return Scalar(lo_best, hi_best)


def perron_data(m: PiecewiseAffineCircleMap) -> PerronData:
    """Transition structure of the partition refined by the one-sided
    orbits; requires a markovized map, else NotMarkov."""
    pts = _markov_partition(m)
    npts = len(pts)
    lengths = [pts[i + 1] - pts[i] for i in range(npts - 1)]
    lengths.append(1 + pts[0] - pts[-1])
    lam = m._lam
    matrix = []
    for i in range(npts):
        j = m.locate(pts[i])
        y = m.branch_raw(j, pts[i])
        t0 = _index_of(pts, y)
        if t0 is None:
            raise NotMarkov(f"image of partition point {i} is not a "
                            f"partition point")
        row = [0] * npts
        target = lam * lengths[i]
        acc = None
        t = t0
        while True:
            cell = t % npts
            if row[cell]:
                raise NotMarkov("image of a cell wraps past itself")
            row[cell] = 1
            acc = lengths[cell] if acc is None else acc + lengths[cell]
            verdict = _decide(_ncmp(acc, target, eps=None), "cell cover")
            if verdict is Cmp.EQUAL:
                break
            if verdict is Cmp.GREATER:
                raise NotMarkov(f"image of cell {i} ends inside a cell")
            t += 1
        matrix.append(tuple(row))
    return PerronData(points=pts, lengths=lengths,
                      matrix=tuple(matrix),
                      rho=_perron_enclosure(matrix))
