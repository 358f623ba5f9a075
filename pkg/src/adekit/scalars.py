"""Exact scalar arithmetic for the whole toolkit.

Three layers live here:

* :class:`GaussianRational` -- exact complex numbers a + b*i with rational
  a, b.
* :class:`Poly` -- sparse multivariate polynomials over Gaussian rationals.
  Variables are names: the distinguished series variable ``z`` plus any
  constant symbols adjoined at runtime (``pi``, ``exp(1)``, ...).
* :class:`Frac` -- the fraction field of :class:`Poly`, kept in a canonical
  form (reduced via polynomial gcd, monic denominator in graded-lex order)
  so that equality of values is equality of representations.

Adjoined constant symbols are treated as algebraically independent.  The
only algebraic simplification applied to them is the quarter-period rule
for ``exp``: an additive exponent term q*pi*i with 2q an integer is turned
into the exact unit 1, i, -1 or -i.  Every other irrational value of
exp/sin/cos at a constant is adjoined as a fresh symbol keyed by the
canonical printed form of its argument, so structurally equal arguments
produce the identical symbol.
"""

from __future__ import annotations

import cmath
import math
import threading
from fractions import Fraction
from typing import Callable, Iterable


class ScalarError(ValueError):
    pass


class AdjunctionDisabled(ScalarError):
    """Raised when an exact expansion would need a new constant symbol but
    adjunction was switched off by the caller."""


# ---------------------------------------------------------------------------
# Gaussian rationals


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"cannot build an exact rational from {x!r}")


_FR_ZERO = Fraction(0)


class GaussianRational:
    """a + b*i with exact rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = _as_fraction(re)
        self.im = _as_fraction(im)

    @classmethod
    def _raw(cls, re, im):
        # parts already Fractions; skip coercion in arithmetic hot paths
        out = object.__new__(cls)
        out.re = re
        out.im = im
        return out

    @staticmethod
    def coerce(x) -> "GaussianRational":
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, (int, Fraction)):
            return GaussianRational(x)
        raise TypeError(f"cannot coerce {x!r} to GaussianRational")

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = GaussianRational(other)
        if not isinstance(other, GaussianRational):
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __add__(self, other):
        other = GaussianRational.coerce(other)
        if not self.im and not other.im:
            return GaussianRational._raw(self.re + other.re, _FR_ZERO)
        return GaussianRational._raw(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = GaussianRational.coerce(other)
        if not self.im and not other.im:
            return GaussianRational._raw(self.re - other.re, _FR_ZERO)
        return GaussianRational._raw(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return GaussianRational.coerce(other) - self

    def __neg__(self):
        return GaussianRational._raw(-self.re, -self.im)

    def __mul__(self, other):
        other = GaussianRational.coerce(other)
        if not self.im and not other.im:
            return GaussianRational._raw(self.re * other.re, _FR_ZERO)
        return GaussianRational._raw(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def inverse(self) -> "GaussianRational":
        n = self.re * self.re + self.im * self.im
        if not n:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return GaussianRational(self.re / n, -self.im / n)

    def __truediv__(self, other):
        return self * GaussianRational.coerce(other).inverse()

    def __rtruediv__(self, other):
        return GaussianRational.coerce(other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = GR_ONE
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def is_rational(self) -> bool:
        return not self.im

    def to_complex(self) -> complex:
        return complex(self.re, self.im)

    def __str__(self):
        return gauss_str(self)

    def __repr__(self):
        return f"GaussianRational({self.re!r}, {self.im!r})"


GR_ZERO = GaussianRational(0)
GR_ONE = GaussianRational(1)
GR_I = GaussianRational(0, 1)


def gauss_str(c: GaussianRational) -> str:
    """Canonical compact text, re-readable by the expression grammar."""
    if not c:
        return "0"
    parts = []
    if c.re:
        parts.append(str(c.re))
    if c.im:
        if c.im == 1:
            imtxt = "i"
        elif c.im == -1:
            imtxt = "-i"
        else:
            imtxt = f"{c.im}*i"
        if parts and not imtxt.startswith("-"):
            parts.append("+" + imtxt)
        else:
            parts.append(imtxt)
    return "".join(parts)


def _gauss_is_simple(c: GaussianRational) -> bool:
    # single-token-ish text: pure real or pure imaginary
    return not (c.re and c.im)


# ---------------------------------------------------------------------------
# Monomials: sorted tuples of (variable name, positive exponent)

Mono = tuple  # tuple[tuple[str, int], ...]

_Z = "z"


def _rank(name: str):
    # z is the earliest variable; constants follow alphabetically.
    return (0, "") if name == _Z else (1, name)


def mono_mul(a: Mono, b: Mono) -> Mono:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for v, e in b:
        d[v] = d.get(v, 0) + e
    return tuple(sorted(d.items(), key=lambda t: _rank(t[0])))


def mono_degree(m: Mono) -> int:
    return sum(e for _, e in m)


def _mono_cmp(a: Mono, b: Mono) -> int:
    """Graded lexicographic: higher total degree wins, ties broken by the
    earliest variable with differing exponent (larger exponent wins)."""
    da, db = mono_degree(a), mono_degree(b)
    if da != db:
        return -1 if da < db else 1
    ia = dict(a)
    ib = dict(b)
    for v in sorted(set(ia) | set(ib), key=_rank):
        ea, eb = ia.get(v, 0), ib.get(v, 0)
        if ea != eb:
            return 1 if ea > eb else -1
    return 0


def mono_str(m: Mono) -> str:
    return "*".join(v if e == 1 else f"{v}^{e}" for v, e in m)


# ---------------------------------------------------------------------------
# Sparse polynomials


class Poly:
    """Sparse multivariate polynomial over Gaussian rationals."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict | None = None):
        self.terms = {m: c for m, c in (terms or {}).items() if c}

    @staticmethod
    def zero() -> "Poly":
        return Poly()

    @staticmethod
    def const(c) -> "Poly":
        c = GaussianRational.coerce(c)
        return Poly({(): c}) if c else Poly()

    @staticmethod
    def one() -> "Poly":
        return Poly.const(1)

    @staticmethod
    def var(name: str) -> "Poly":
        return Poly({((name, 1),): GR_ONE})

    def is_zero(self) -> bool:
        return not self.terms

    def is_const(self) -> bool:
        return all(m == () for m in self.terms)

    def is_one(self) -> bool:
        return self.terms == {(): GR_ONE}

    def const_value(self) -> GaussianRational:
        if not self.is_const():
            raise ScalarError("polynomial is not constant")
        return self.terms.get((), GR_ZERO)

    def variables(self) -> set:
        out = set()
        for m in self.terms:
            for v, _ in m:
                out.add(v)
        return out

    def total_degree(self) -> int:
        return max((mono_degree(m) for m in self.terms), default=0)

    def degree_in(self, var: str) -> int:
        d = 0
        for m in self.terms:
            for v, e in m:
                if v == var:
                    d = max(d, e)
        return d

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other):
        d = dict(self.terms)
        for m, c in other.terms.items():
            s = d.get(m, GR_ZERO) + c
            if s:
                d[m] = s
            else:
                d.pop(m, None)
        out = Poly()
        out.terms = d
        return out

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        out = Poly()
        out.terms = {m: -c for m, c in self.terms.items()}
        return out

    def __mul__(self, other):
        d: dict = {}
        for ma, ca in self.terms.items():
            for mb, cb in other.terms.items():
                m = mono_mul(ma, mb)
                c = ca * cb
                s = d.get(m)
                s = c if s is None else s + c
                if s:
                    d[m] = s
                else:
                    d.pop(m, None)
        out = Poly()
        out.terms = d
        return out

    def scale(self, c) -> "Poly":
        c = GaussianRational.coerce(c)
        if not c:
            return Poly()
        out = Poly()
        out.terms = {m: k * c for m, k in self.terms.items()}
        return out

    def __pow__(self, n: int):
        if n < 0:
            raise ScalarError("negative polynomial power")
        out = Poly.one()
        for _ in range(n):
            out = out * self
        return out

    def leading(self) -> tuple:
        """(monomial, coefficient) maximal in graded-lex order."""
        if self.is_zero():
            raise ScalarError("zero polynomial has no leading term")
        best = None
        for m in self.terms:
            if best is None or _mono_cmp(m, best) > 0:
                best = m
        return best, self.terms[best]

    def evaluate(self, value_of: Callable[[str], complex]) -> complex:
        total = 0j
        for m, c in self.terms.items():
            v = c.to_complex()
            for name, e in m:
                v *= value_of(name) ** e
            total += v
        return total

    def __str__(self):
        return poly_str(self)

    def __repr__(self):
        return f"Poly({poly_str(self)})"


def _sorted_terms(p: Poly):
    import functools

    return sorted(p.terms.items(), key=functools.cmp_to_key(lambda a, b: _mono_cmp(a[0], b[0])), reverse=True)


def poly_str(p: Poly) -> str:
    if p.is_zero():
        return "0"
    chunks = []
    for m, c in _sorted_terms(p):
        if m == ():
            body = gauss_str(c)
        elif c == GR_ONE:
            body = mono_str(m)
        elif c == -GR_ONE:
            body = "-" + mono_str(m)
        elif _gauss_is_simple(c):
            body = f"{gauss_str(c)}*{mono_str(m)}"
        else:
            body = f"({gauss_str(c)})*{mono_str(m)}"
        if not chunks:
            chunks.append(body)
        elif body.startswith("-"):
            chunks.append("-" + body[1:])
        else:
            chunks.append("+" + body)
    return "".join(chunks)


# ---------------------------------------------------------------------------
# Exact division, pseudo-division, gcd


def poly_exact_div(a: Poly, b: Poly) -> Poly:
    """Divide a by b, raising ScalarError when the division is not exact."""
    if b.is_zero():
        raise ZeroDivisionError("polynomial division by zero")
    if b.is_one():
        return a
    if b.is_const():
        return a.scale(b.const_value().inverse())
    q: dict = {}
    rem = a
    mb, cb = b.leading()
    cb_inv = cb.inverse()
    ib = dict(mb)
    while not rem.is_zero():
        mr, cr = rem.leading()
        ir = dict(mr)
        # leading-term divisibility
        qm = {}
        ok = True
        for v, e in ib.items():
            d = ir.get(v, 0) - e
            if d < 0:
                ok = False
                break
            if d:
                qm[v] = d
        if not ok:
            raise ScalarError("inexact polynomial division")
        for v, e in ir.items():
            if v not in ib:
                qm[v] = e
        qmono = tuple(sorted(qm.items(), key=lambda t: _rank(t[0])))
        qc = cr * cb_inv
        q[qmono] = q.get(qmono, GR_ZERO) + qc
        t = Poly({qmono: qc})
        rem = rem - t * b
    return Poly(q)


def _univ(p: Poly, var: str) -> dict:
    """View p as univariate in var: {exponent: Poly-without-var}."""
    out: dict = {}
    for m, c in p.terms.items():
        e = 0
        rest = []
        for v, k in m:
            if v == var:
                e = k
            else:
                rest.append((v, k))
        rest_m = tuple(rest)
        slot = out.setdefault(e, {})
        slot[rest_m] = slot.get(rest_m, GR_ZERO) + c
    return {e: Poly(d) for e, d in out.items() if Poly(d)}


def _from_univ(d: dict, var: str) -> Poly:
    total = Poly()
    xv = Poly.var(var)
    for e, coeff in d.items():
        total = total + coeff * xv**e
    return total


def _prem(a: Poly, b: Poly, var: str) -> Poly:
    """Pseudo-remainder of a by b with respect to var."""
    da, db = a.degree_in(var), b.degree_in(var)
    ub = _univ(b, var)
    lb = ub[db]
    r = a
    while not r.is_zero():
        dr = r.degree_in(var)
        if dr < db:
            break
        ur = _univ(r, var)
        lr = ur[dr]
        shift = Poly.var(var) ** (dr - db)
        r = r * lb - b * lr * shift
    return r


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd in graded-lex order; gcd(0, 0) = 0."""
    if a.is_zero() and b.is_zero():
        return Poly.zero()
    if a.is_zero():
        return _monic(b)
    if b.is_zero():
        return _monic(a)
    if a.is_const() or b.is_const():
        return Poly.one()
    heavier = sorted(a.variables() | b.variables(), key=_rank)
    var = heavier[0]
    ua, ub = _univ(a, var), _univ(b, var)
    ca = _content(list(ua.values()))
    cb = _content(list(ub.values()))
    cont = poly_gcd(ca, cb)
    pa = _from_univ({e: poly_exact_div(c, ca) for e, c in ua.items()}, var)
    pb = _from_univ({e: poly_exact_div(c, cb) for e, c in ub.items()}, var)
    if pa.degree_in(var) < pb.degree_in(var):
        pa, pb = pb, pa
    while not pb.is_zero():
        r = _prem(pa, pb, var)
        pa, pb = pb, _primitive_in(r, var)
    if pa.degree_in(var) == 0:
        pa = Poly.one()
    return _monic(cont * pa)


def _content(polys: list) -> Poly:
    g = Poly.zero()
    for p in polys:
        g = poly_gcd(g, p)
        if g.is_one():
            break
    return g if not g.is_zero() else Poly.one()


def _primitive_in(p: Poly, var: str) -> Poly:
    if p.is_zero():
        return p
    up = _univ(p, var)
    c = _content(list(up.values()))
    return _from_univ({e: poly_exact_div(q, c) for e, q in up.items()}, var)


def _monic(p: Poly) -> Poly:
    if p.is_zero():
        return p
    _, c = p.leading()
    return p.scale(c.inverse())


def poly_lcm(a: Poly, b: Poly) -> Poly:
    if a.is_zero() or b.is_zero():
        return Poly.zero()
    return _monic(poly_exact_div(a * b, poly_gcd(a, b)))


# ---------------------------------------------------------------------------
# Fraction field


class Frac:
    """Normalized fraction of polynomials.

    Invariant: gcd(num, den) = 1 and den is monic in graded-lex order, so
    equal values have identical (num, den) pairs.  Doubles as the exact
    scalar domain (no ``z``) and as rational coefficients in ``z``.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Poly | None = None, _normalized=False):
        if den is None:
            den = Poly.one()
        if _normalized:
            self.num, self.den = num, den
            return
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if num.is_zero():
            self.num, self.den = Poly.zero(), Poly.one()
            return
        if den.is_const():
            self.num = num.scale(den.const_value().inverse())
            self.den = Poly.one()
            return
        g = poly_gcd(num, den)
        if not g.is_one():
            num = poly_exact_div(num, g)
            den = poly_exact_div(den, g)
        if den.is_const():
            self.num = num.scale(den.const_value().inverse())
            self.den = Poly.one()
        else:
            _, lc = den.leading()
            inv = lc.inverse()
            self.num = num.scale(inv)
            self.den = den.scale(inv)

    @staticmethod
    def of(x) -> "Frac":
        if isinstance(x, Frac):
            return x
        if isinstance(x, Poly):
            return Frac(x)
        if isinstance(x, (int, Fraction, GaussianRational)):
            return Frac(Poly.const(GaussianRational.coerce(x)))
        raise TypeError(f"cannot coerce {x!r} to Frac")

    @staticmethod
    def var(name: str) -> "Frac":
        return Frac(Poly.var(name))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_one(self) -> bool:
        return self.num.is_one() and self.den.is_one()

    def is_constant(self) -> bool:
        return self.num.is_const() and self.den.is_one()

    def constant_value(self) -> GaussianRational:
        if not self.is_constant():
            raise ScalarError("fraction is not a constant")
        return self.num.const_value()

    def variables(self) -> set:
        return self.num.variables() | self.den.variables()

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, GaussianRational, Poly)):
            other = Frac.of(other)
        if not isinstance(other, Frac):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __add__(self, other):
        other = Frac.of(other)
        if self.den == other.den:
            return Frac(self.num + other.num, self.den)
        return Frac(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-Frac.of(other))

    def __rsub__(self, other):
        return Frac.of(other) - self

    def __neg__(self):
        return Frac(-self.num, self.den, _normalized=True)

    def __mul__(self, other):
        other = Frac.of(other)
        return Frac(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = Frac.of(other)
        if other.is_zero():
            raise ZeroDivisionError("division by zero fraction")
        return Frac(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        return Frac.of(other) / self

    def __pow__(self, n: int):
        if n < 0:
            return (Frac.of(1) / self) ** (-n)
        out = FRAC_ONE
        for _ in range(n):
            out = out * self
        return out

    def __str__(self):
        return frac_str(self)

    def __repr__(self):
        return f"Frac({frac_str(self)})"


FRAC_ZERO = Frac(Poly.zero())
FRAC_ONE = Frac(Poly.one())


def _has_toplevel(txt: str, ops: str, start: int = 0) -> bool:
    depth = 0
    for k, ch in enumerate(txt):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif depth == 0 and k >= start and ch in ops:
            return True
    return False


def frac_str(f: Frac) -> str:
    n = poly_str(f.num)
    if f.den.is_one():
        return n
    d = poly_str(f.den)
    # numerator: sums must bind before the division; single-term products
    # are safe under left association
    if _has_toplevel(n, "+-", start=1):
        n = f"({n})"
    # denominator: anything beyond a single power must be grouped
    if _has_toplevel(d, "+-*/", start=1) or d.startswith("-"):
        d = f"({d})"
    return f"{n}/{d}"


# ---------------------------------------------------------------------------
# Adjoined constants


class SymbolicConstant:
    """A constant symbol adjoined to the scalar domain.

    The definition key is the canonical printed form of the defining
    expression (for example ``exp(1)``); it doubles as the polynomial
    variable name, so two structurally equal adjunctions share a symbol.
    """

    __slots__ = ("name", "definition_key", "value")

    def __init__(self, name: str, definition_key: str, value: complex):
        self.name = name
        self.definition_key = definition_key
        self.value = value

    def __repr__(self):
        return f"SymbolicConstant({self.definition_key})"


_REGISTRY: dict = {}
_REGISTRY_LOCK = threading.Lock()


def adjoin_constant(key: str, value: complex) -> Frac:
    if key == _Z:
        raise ScalarError("'z' is reserved for the series variable")
    with _REGISTRY_LOCK:
        known = _REGISTRY.get(key)
        if known is None:
            _REGISTRY[key] = SymbolicConstant(key, key, complex(value))
    return Frac.var(key)


def constant_value(name: str) -> complex:
    with _REGISTRY_LOCK:
        sc = _REGISTRY.get(name)
    if sc is None:
        raise ScalarError(f"unknown constant symbol {name!r}")
    return sc.value


def registered_constants() -> list:
    with _REGISTRY_LOCK:
        return sorted(_REGISTRY)


adjoin_constant("pi", math.pi)

PI = Frac.var("pi")


def frac_value(f: Frac, z: complex | None = None) -> complex:
    """Numeric value of a fraction; z supplies the series variable."""

    def value_of(name: str) -> complex:
        if name == _Z:
            if z is None:
                raise ScalarError("value of 'z' required but not supplied")
            return z
        return constant_value(name)

    denom = f.den.evaluate(value_of)
    return f.num.evaluate(value_of) / denom


# ---------------------------------------------------------------------------
# exp / sin / cos of exact constants

_QUARTER_UNITS = {0: GR_ONE, 1: GR_I, 2: -GR_ONE, 3: -GR_I}

_PI_MONO = (("pi", 1),)


def _split_quarter_turns(u: Frac):
    """Extract an additive term q*pi*i with 2q integral; return (unit, rest)."""
    if not u.den.is_one():
        return GR_ONE, u
    c = u.num.terms.get(_PI_MONO)
    if c is None or c.re:
        return GR_ONE, u
    q = c.im  # the term is (q*i)*pi
    twice = 2 * q
    if twice.denominator != 1:
        return GR_ONE, u
    unit = _QUARTER_UNITS[int(twice) % 4]
    rest = Frac(u.num - Poly({_PI_MONO: c}), Poly.one())
    return unit, rest


def exp_of_scalar(u: Frac, allow_adjoin: bool = True) -> Frac:
    unit, rest = _split_quarter_turns(u)
    if rest.is_zero():
        return Frac.of(unit)
    if not allow_adjoin:
        raise AdjunctionDisabled(f"exp({frac_str(rest)}) has no exact value and adjunction is disabled")
    key = f"exp({frac_str(rest)})"
    sym = adjoin_constant(key, cmath.exp(frac_value(rest)))
    return sym * unit


def _trig_of_scalar(u: Frac, fn: str, allow_adjoin: bool) -> Frac:
    if u.is_zero():
        return FRAC_ZERO if fn == "sin" else FRAC_ONE
    if not allow_adjoin:
        raise AdjunctionDisabled(f"{fn}({frac_str(u)}) has no exact value and adjunction is disabled")
    key = f"{fn}({frac_str(u)})"
    value = cmath.sin(frac_value(u)) if fn == "sin" else cmath.cos(frac_value(u))
    return adjoin_constant(key, value)


def sin_of_scalar(u: Frac, allow_adjoin: bool = True) -> Frac:
    return _trig_of_scalar(u, "sin", allow_adjoin)


def cos_of_scalar(u: Frac, allow_adjoin: bool = True) -> Frac:
    return _trig_of_scalar(u, "cos", allow_adjoin)
