"""Certified scalars and circle points.

Two layers:

* `Scalar` -- outward-rounded mpfr intervals.  Every arithmetic result
  encloses the exact real result; predicates answer Less/Equal/Greater or
  admit Ambiguous instead of guessing.
* `PolyRoot` / `NumberField` -- the exact layer.  The slope of a solved map
  is an algebraic integer, and all derived coordinates live in Q(lambda), so
  equality and sign questions have exact answers; intervals are only used to
  *separate*, with precision escalation until they do.

Precision escalation starts at 128 bits and doubles up to 2048 by default.
"""

from __future__ import annotations

import enum
from fractions import Fraction
from typing import Iterable, Sequence, Union

import gmpy2
from gmpy2 import mpfr

DEFAULT_BITS = 128
MAX_BITS = 2048

_DOWN = gmpy2.RoundDown
_UP = gmpy2.RoundUp

Rational = Union[int, Fraction]


def _cv(x, bits: int, rnd) -> mpfr:
    """Convert to mpfr with the given rounding direction."""
    with gmpy2.context(precision=bits, round=rnd):
        if isinstance(x, Fraction):
            return gmpy2.div(mpfr(x.numerator), mpfr(x.denominator))
        return mpfr(x)


class Scalar:
    """Closed interval [lo, hi] of mpfr numbers enclosing one real value.

    Values constructed from a single int/Fraction/decimal string carry the
    exact rational alongside the enclosure, and arithmetic propagates it
    when every operand has one; comparisons on such values are exact.
    """

    __slots__ = ("lo", "hi", "bits", "exact")

    def __init__(self, lo, hi=None, bits: int = DEFAULT_BITS, exact=None):
        if hi is None:
            if exact is None and isinstance(lo, (int, float, Fraction, str)):
                exact = Fraction(lo)
            hi = lo
        if isinstance(lo, mpfr) and isinstance(hi, mpfr):
            self.lo, self.hi = lo, hi
        else:
            self.lo = _cv(lo, bits, _DOWN)
            self.hi = _cv(hi, bits, _UP)
        self.bits = bits
        self.exact = exact
        if self.lo > self.hi:
            raise ValueError(f"inverted interval [{self.lo}, {self.hi}]")

    # -- arithmetic (outward rounded) ----------------------------------

    def _coerce(self, other) -> "Scalar":
        if isinstance(other, Scalar):
            return other
        return Scalar(other, bits=self.bits)

    def _ex(self, o, op):
        if self.exact is not None and o.exact is not None:
            return op(self.exact, o.exact)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        b = max(self.bits, o.bits)
        with gmpy2.context(precision=b, round=_DOWN):
            lo = self.lo + o.lo
        with gmpy2.context(precision=b, round=_UP):
            hi = self.hi + o.hi
        return Scalar(lo, hi, bits=b, exact=self._ex(o, lambda x, y: x + y))

    __radd__ = __add__

    def __neg__(self):
        ex = -self.exact if self.exact is not None else None
        # negation is exact only at full operand precision; the thread
        # default context would round to 53 bits
        with gmpy2.context(precision=self.bits):
            lo, hi = -self.hi, -self.lo
        return Scalar(lo, hi, bits=self.bits, exact=ex)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        b = max(self.bits, o.bits)
        pairs = [(self.lo, o.lo), (self.lo, o.hi), (self.hi, o.lo),
                 (self.hi, o.hi)]
        with gmpy2.context(precision=b, round=_DOWN):
            lo = min(x * y for x, y in pairs)
        with gmpy2.context(precision=b, round=_UP):
            hi = max(x * y for x, y in pairs)
        return Scalar(lo, hi, bits=b, exact=self._ex(o, lambda x, y: x * y))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o.lo <= 0 <= o.hi:
            raise ZeroDivisionError("divisor interval contains 0")
        b = max(self.bits, o.bits)
        pairs = [(self.lo, o.lo), (self.lo, o.hi), (self.hi, o.lo),
                 (self.hi, o.hi)]
        with gmpy2.context(precision=b, round=_DOWN):
            lo = min(x / y for x, y in pairs)
        with gmpy2.context(precision=b, round=_UP):
            hi = max(x / y for x, y in pairs)
        return Scalar(lo, hi, bits=b, exact=self._ex(o, lambda x, y: x / y))

    def __abs__(self):
        ex = abs(self.exact) if self.exact is not None else None
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        with gmpy2.context(precision=self.bits):
            hi = max(-self.lo, self.hi)
        return Scalar(mpfr(0), hi, bits=self.bits, exact=ex)

    def hull(self, other: "Scalar") -> "Scalar":
        o = self._coerce(other)
        return Scalar(min(self.lo, o.lo), max(self.hi, o.hi),
                      bits=max(self.bits, o.bits))

    # -- queries -------------------------------------------------------

    def mid(self) -> mpfr:
        with gmpy2.context(precision=max(self.bits, 64)):
            return (self.lo + self.hi) / 2

    def width(self) -> mpfr:
        with gmpy2.context(precision=max(self.bits, 64), round=_UP):
            return self.hi - self.lo

    def is_point(self) -> bool:
        return self.exact is not None or self.lo == self.hi

    def contains(self, x) -> bool:
        o = self._coerce(x)
        return self.lo <= o.lo and o.hi <= self.hi

    def floor(self):
        """Certified floor, or None when the enclosure straddles an integer."""
        if self.exact is not None:
            return self.exact.numerator // self.exact.denominator
        flo, fhi = gmpy2.floor(self.lo), gmpy2.floor(self.hi)
        if flo == fhi:
            return int(flo)
        return None

    def __float__(self):
        return float(self.mid())

    def __repr__(self):
        return f"Scalar[{self.lo!r}, {self.hi!r}]"

    def decimal(self, digits: int = 30) -> str:
        """Midpoint as a fixed decimal string (for reports)."""
        with gmpy2.context(precision=max(self.bits, 64)):
            return mpfr(self.mid()).__format__(f".{digits}f")


class Cmp(enum.Enum):
    LESS = "less"
    EQUAL = "equal"
    GREATER = "greater"
    AMBIGUOUS = "ambiguous"


class Location(enum.Enum):
    INSIDE = "inside"
    OUTSIDE = "outside"
    BOUNDARY = "boundary"
    AMBIGUOUS = "ambiguous"


class DegenerateInterval(ValueError):
    pass


def cmp_certified(a: Scalar, b: Scalar, eps=None) -> Cmp:
    """Certified three-way comparison.

    Equal is returned for exact coinciding values, or when `eps` is given
    and |a-b| <= eps is certified by the enclosure.
    """
    if a.exact is not None and b.exact is not None:
        if eps is not None and abs(a.exact - b.exact) <= Fraction(eps):
            return Cmp.EQUAL
        if a.exact < b.exact:
            return Cmp.LESS
        if a.exact > b.exact:
            return Cmp.GREATER
        return Cmp.EQUAL
    if eps is not None:
        d = abs(a - b)
        if d.hi <= _cv(eps, max(a.bits, b.bits), _UP):
            return Cmp.EQUAL
    if a.hi < b.lo:
        return Cmp.LESS
    if a.lo > b.hi:
        return Cmp.GREATER
    if a.is_point() and b.is_point() and a.lo == b.lo:
        return Cmp.EQUAL
    return Cmp.AMBIGUOUS


class CirclePoint:
    """A point of S^1 = [0, 1), stored as a Scalar reduced mod 1.

    After reduction the midpoint lies in [0, 1); `straddles` marks
    enclosures that cross the seam (lo < 0 or hi >= 1), which the circular
    predicates below handle by shifting.
    """

    __slots__ = ("value", "straddles")

    def __init__(self, value):
        if not isinstance(value, Scalar):
            value = Scalar(value)
        n = int(gmpy2.floor(value.mid()))
        if n != 0:
            value = value - n
        self.value = value
        self.straddles = bool(value.lo < 0 or value.hi >= 1)

    def __repr__(self):
        return f"CirclePoint({self.value!r})"

    def __float__(self):
        f = float(self.value)
        return f % 1.0


def _as_scalar(x) -> Scalar:
    if isinstance(x, CirclePoint):
        return x.value
    if isinstance(x, Scalar):
        return x
    return Scalar(x)


def circle_distance(a, b) -> Scalar:
    """Enclosure of the circular distance min(|a-b|, 1-|a-b|)."""
    d = _as_scalar(a) - _as_scalar(b)
    n = int(gmpy2.floor(d.mid() + mpfr("0.5")))
    if n != 0:
        d = d - n
    d = abs(d)
    one_minus = Scalar(1) - d
    ex = None
    if d.exact is not None:
        ex = min(d.exact, 1 - d.exact)
    lo = min(d.lo, one_minus.lo)
    hi = min(d.hi, one_minus.hi)
    if lo < 0:
        lo = mpfr(0)
    return Scalar(lo, hi, bits=d.bits, exact=ex)


def in_interval(x, a, b, eps=None) -> Location:
    """Locate x in the half-open circular interval [a, b).

    Left endpoint belongs to the interval; hits on either endpoint are
    reported as BOUNDARY so the caller can apply the half-open rule.
    With eps, points within eps of an endpoint also report BOUNDARY.
    """
    xa, aa, bb = _as_scalar(x), _as_scalar(a), _as_scalar(b)
    dd = circle_distance(aa, bb)
    if dd.hi == 0 or (dd.exact is not None and dd.exact == 0):
        raise DegenerateInterval(f"interval endpoints coincide at {aa!r}")
    # b is cyclically after a: unwrap by an integer chosen at midpoints, the
    # containment tests below stay certified for that fixed lift
    span = (bb - aa) + (0 if bb.mid() > aa.mid() else 1)
    results = set()
    for shift in (-1, 0, 1):
        t = (xa + shift) - aa
        c_lo = cmp_certified(t, Scalar(0), eps=eps)
        c_hi = cmp_certified(t, span, eps=eps)
        if c_lo == Cmp.EQUAL or c_hi == Cmp.EQUAL:
            results.add(Location.BOUNDARY)
        elif c_lo == Cmp.GREATER and c_hi == Cmp.LESS:
            results.add(Location.INSIDE)
        elif c_lo == Cmp.LESS or c_hi == Cmp.GREATER:
            pass  # certified outside at this shift
        else:
            results.add(Location.AMBIGUOUS)
    for hit in (Location.INSIDE, Location.BOUNDARY, Location.AMBIGUOUS):
        if hit in results:
            return hit
    return Location.OUTSIDE


# ---------------------------------------------------------------------------
# polynomial utilities over Q (descending coefficients, index 0 = leading)


def _poly_eval_frac(coeffs: Sequence[Rational], x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in coeffs:
        acc = acc * x + c
    return acc


def poly_trim(p):
    p = list(p)
    while p and p[0] == 0:
        p.pop(0)
    return tuple(p)


def poly_add(a, b):
    a, b = list(a), list(b)
    if len(a) < len(b):
        a, b = b, a
    off = len(a) - len(b)
    return poly_trim(tuple(a[i] + (b[i - off] if i >= off else 0)
                           for i in range(len(a))))


def poly_scale(a, s):
    return poly_trim(tuple(c * s for c in a))


def poly_mul(a, b):
    a, b = poly_trim(a), poly_trim(b)
    if not a or not b:
        return ()
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] += x * y
    return poly_trim(tuple(out))


def poly_divmod(a, b):
    a, b = [Fraction(c) for c in poly_trim(a)], \
        [Fraction(c) for c in poly_trim(b)]
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    while len(a) >= len(b) and a:
        k = a[0] / b[0]
        pos = len(a) - len(b)
        q[len(q) - 1 - pos] = k
        for i in range(len(b)):
            a[i] -= k * b[i]
        a.pop(0)
        while a and a[0] == 0 and len(a) >= len(b):
            a.pop(0)
    return poly_trim(tuple(q)), poly_trim(tuple(a))


def poly_gcd(a, b):
    """Monic gcd in Q[x]."""
    a, b = poly_trim(a), poly_trim(b)
    while b:
        a, b = b, poly_divmod(a, b)[1]
    if not a:
        return ()
    return poly_scale(a, Fraction(1) / Fraction(a[0]))


def poly_deriv(p):
    p = poly_trim(p)
    n = len(p) - 1
    return poly_trim(tuple(c * (n - i) for i, c in enumerate(p[:-1])))


class PolyRoot:
    """A real root of an integer polynomial, isolated in a rational bracket.

    Sign evaluation at rational points is exact, so bisection is exact; the
    object hands out Scalar enclosures of any requested width and caches the
    narrowest bracket seen.
    """

    def __init__(self, coeffs: Sequence[Rational], lo: Rational, hi: Rational):
        self.coeffs = tuple(Fraction(c) for c in coeffs)
        lo, hi = Fraction(lo), Fraction(hi)
        slo = _poly_eval_frac(self.coeffs, lo)
        shi = _poly_eval_frac(self.coeffs, hi)
        if slo == 0:
            hi = lo
        elif shi == 0:
            lo = hi
        elif (slo < 0) == (shi < 0):
            raise ValueError(f"no sign change on [{lo}, {hi}]")
        self._lo, self._hi = lo, hi
        self._sign_lo = -1 if slo < 0 else 1

    def refine_to(self, width: Fraction) -> None:
        while self._hi - self._lo > width:
            mid = (self._lo + self._hi) / 2
            s = _poly_eval_frac(self.coeffs, mid)
            if s == 0:
                self._lo = self._hi = mid
                return
            if (s < 0) == (self._sign_lo < 0):
                self._lo = mid
            else:
                self._hi = mid

    def enclosure(self, bits: int = DEFAULT_BITS) -> Scalar:
        self.refine_to(Fraction(1, 2 ** (bits + 8)))
        return Scalar(_cv(self._lo, bits, _DOWN), _cv(self._hi, bits, _UP),
                      bits=bits)

    def bracket(self):
        return self._lo, self._hi


class NumberField:
    """Q[x]/(p(x)) at a fixed real root of p, p monic with integer coeffs."""

    def __init__(self, root: PolyRoot):
        if root.coeffs[0] != 1:
            raise ValueError("modulus must be monic")
        g = poly_gcd(root.coeffs, poly_deriv(root.coeffs))
        if len(g) > 1:
            raise ValueError("modulus must be square-free")
        self.root = root
        self.degree = len(root.coeffs) - 1
        # x^degree = -(p - x^degree), used to reduce products
        self._red = tuple(-c for c in root.coeffs[1:])

    def element(self, coeffs: Iterable[Rational]) -> "FieldElement":
        cs = [Fraction(c) for c in coeffs]
        if len(cs) > self.degree:
            raise ValueError("coefficient vector too long")
        cs += [Fraction(0)] * (self.degree - len(cs))
        return FieldElement(self, tuple(cs))

    def rational(self, q: Rational) -> "FieldElement":
        return self.element([q])

    def generator(self) -> "FieldElement":
        return self.element([0, 1])

    def __eq__(self, other):
        return isinstance(other, NumberField) and \
            self.root.coeffs == other.root.coeffs

    def __hash__(self):
        return hash(self.root.coeffs)


class FieldElement:
    """Element of a NumberField: exact +,-,*; sign by escalation.

    Coefficient order is (1, x, x^2, ...).
    """

    __slots__ = ("field", "coeffs")

    def __init__(self, field: NumberField, coeffs):
        self.field = field
        self.coeffs = coeffs

    def _lift(self, other) -> "FieldElement":
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise ValueError("mixed number fields")
            return other
        return self.field.rational(other)

    def __add__(self, other):
        o = self._lift(other)
        return FieldElement(self.field, tuple(
            a + b for a, b in zip(self.coeffs, o.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.field, tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        o = self._lift(other)
        d = self.field.degree
        prod = [Fraction(0)] * (2 * d - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(o.coeffs):
                    if b:
                        prod[i + j] += a * b
        red = self.field._red
        for i in range(2 * d - 2, d - 1, -1):
            c = prod[i]
            if c:
                prod[i] = Fraction(0)
                # x^i = x^(i-d) * x^d = x^(i-d) * sum(red)
                for j, r in enumerate(reversed(red)):
                    prod[i - d + j] += c * r
        return FieldElement(self.field, tuple(prod[:d]))

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        """True iff the element vanishes at the field's root.

        With an irreducible modulus this is just the zero vector; a
        square-free composite modulus needs the gcd test.
        """
        if all(c == 0 for c in self.coeffs):
            return True
        if self.is_rational() is not None:
            return False
        g = poly_gcd(self._as_poly(), self.field.root.coeffs)
        if len(g) <= 1:
            return False
        # the bracket isolates exactly one root of the modulus, so a sign
        # change of the common factor there means we sit on it
        lo, hi = self.field.root.bracket()
        slo = _poly_eval_frac(g, lo)
        shi = _poly_eval_frac(g, hi)
        return slo == 0 or shi == 0 or (slo < 0) != (shi < 0)

    def is_rational(self):
        if all(c == 0 for c in self.coeffs[1:]):
            return self.coeffs[0]
        return None

    def _as_poly(self):
        return poly_trim(tuple(reversed(self.coeffs)))

    def inverse(self) -> "FieldElement":
        """Multiplicative inverse at the root, by the extended Euclid run.

        Raises ZeroDivisionError for the zero element (and for zero
        divisors of a composite modulus that do not vanish at the root,
        which have no inverse in the quotient ring).
        """
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero field element")
        q = self.is_rational()
        if q is not None:
            return self.field.rational(Fraction(1) / q)
        # u*e + v*p = g with g = gcd(e, p)
        r0, r1 = self._as_poly(), self.field.root.coeffs
        u0, u1 = (Fraction(1),), ()
        while r1:
            qq, rr = poly_divmod(r0, r1)
            r0, r1 = r1, rr
            u0, u1 = u1, poly_add(u0, poly_scale(poly_mul(qq, u1), -1))
        if len(r0) > 1:
            err = ZeroDivisionError(
                "zero divisor modulo a composite modulus")
            # monic common factor, so callers can split the modulus
            err.factor = poly_scale(r0, Fraction(1) / r0[0])
            raise err
        inv = poly_scale(u0, Fraction(1) / r0[0])
        _, rem = poly_divmod(inv, self.field.root.coeffs)
        cs = list(reversed(rem))
        return self.field.element(cs)

    def __truediv__(self, other):
        return self * self._lift(other).inverse()

    def __rtruediv__(self, other):
        return self._lift(other) * self.inverse()

    def enclosure(self, bits: int = DEFAULT_BITS) -> Scalar:
        x = self.field.root.enclosure(bits)
        acc = Scalar(0, bits=bits)
        for c in reversed(self.coeffs):
            acc = acc * x + Scalar(c, bits=bits)
        return acc

    def sign(self) -> int:
        """Exact sign: 0 for the zero element, else certified by escalation."""
        if all(c == 0 for c in self.coeffs):
            return 0
        q = self.is_rational()
        if q is not None:
            return -1 if q < 0 else 1
        bits = DEFAULT_BITS
        zero_checked = False
        while True:
            e = self.enclosure(bits)
            if e.lo > 0:
                return 1
            if e.hi < 0:
                return -1
            if bits >= MAX_BITS and not zero_checked:
                if self.is_zero():
                    return 0
                zero_checked = True
            if bits >= 16 * MAX_BITS:
                raise ArithmeticError(
                    f"sign of nonzero element not separated at {bits} bits")
            bits *= 2

    def __eq__(self, other):
        try:
            o = self._lift(other)
        except (ValueError, TypeError):
            return NotImplemented
        return self.coeffs == o.coeffs

    def __hash__(self):
        return hash((self.field, self.coeffs))

    def __lt__(self, other):
        return (self - self._lift(other)).sign() < 0

    def __le__(self, other):
        return (self - self._lift(other)).sign() <= 0

    def __gt__(self, other):
        return (self - self._lift(other)).sign() > 0

    def __ge__(self, other):
        return (self - self._lift(other)).sign() >= 0

    def floor(self) -> int:
        q = self.is_rational()
        if q is not None:
            return q.numerator // q.denominator
        bits = DEFAULT_BITS
        while True:
            e = self.enclosure(bits)
            f = e.floor()
            if f is not None:
                return f
            bits *= 2
            if bits > 16 * MAX_BITS:
                raise ArithmeticError("floor did not stabilize")

    def frac(self) -> "FieldElement":
        return self - self.floor()

    def __float__(self):
        return float(self.enclosure(64))

    def __repr__(self):
        return f"FieldElement{self.coeffs}"
