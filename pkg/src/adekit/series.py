"""Truncated power series with exact or double-precision coefficients.

A series stores coefficients 0..N for a fixed truncation order N.  Binary
operations truncate to the smaller operand order, so precision loss is
explicit and monotone.  Exact coefficients are :class:`~adekit.scalars.Frac`
values (z-free); numeric coefficients are Python complex.
"""

from __future__ import annotations

import cmath
from fractions import Fraction
from typing import Iterable, Sequence

from .scalars import (
    Frac,
    FRAC_ONE,
    FRAC_ZERO,
    GaussianRational,
    Poly,
    ScalarError,
    frac_value,
)

DEFAULT_REL_TOL = 1e-9
NUMERIC_DIV_EPS = 1e-12


class SeriesError(ValueError):
    pass


class ModeMismatch(SeriesError):
    pass


def _zero(mode):
    return FRAC_ZERO if mode == "exact" else 0j


def _one(mode):
    return FRAC_ONE if mode == "exact" else 1 + 0j


def _coerce_coeff(mode, x):
    if mode == "exact":
        if isinstance(x, Frac):
            return x
        if isinstance(x, (int, Fraction, GaussianRational, Poly)):
            return Frac.of(x)
        raise ModeMismatch(f"exact series cannot hold {type(x).__name__} coefficients")
    if isinstance(x, complex):
        return x
    if isinstance(x, (int, float)):
        return complex(x)
    if isinstance(x, Frac):
        raise ModeMismatch("numeric series cannot hold exact coefficients")
    raise ModeMismatch(f"numeric series cannot hold {type(x).__name__} coefficients")


class PowerSeries:
    """Coefficients c[0..order] of a truncated Taylor expansion."""

    __slots__ = ("mode", "coeffs")

    def __init__(self, mode: str, coeffs: Sequence):
        if mode not in ("exact", "numeric"):
            raise SeriesError(f"unknown series mode {mode!r}")
        if not coeffs:
            raise SeriesError("a series needs at least the order-0 coefficient")
        cs = tuple(_coerce_coeff(mode, c) for c in coeffs)
        if mode == "numeric":
            for c in cs:
                if not (cmath.isfinite(c)):
                    raise SeriesError("numeric series coefficient is not finite")
        self.mode = mode
        self.coeffs = cs

    # -- constructors -------------------------------------------------------

    @staticmethod
    def constant(value, order: int, mode: str = "exact") -> "PowerSeries":
        c = [_coerce_coeff(mode, value)] + [_zero(mode)] * order
        return PowerSeries(mode, c)

    @staticmethod
    def zero(order: int, mode: str = "exact") -> "PowerSeries":
        return PowerSeries.constant(0 if mode == "numeric" else FRAC_ZERO, order, mode)

    @staticmethod
    def identity(order: int, mode: str = "exact") -> "PowerSeries":
        """The series of z - center, i.e. coefficients [0, 1, 0, ...]."""
        if order < 1:
            raise SeriesError("identity needs order >= 1")
        c = [_zero(mode)] * (order + 1)
        c[1] = _one(mode)
        return PowerSeries(mode, c)

    # -- basics -------------------------------------------------------------

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, k: int):
        return self.coeffs[k]

    def __iter__(self):
        return iter(self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, PowerSeries):
            return NotImplemented
        return self.mode == other.mode and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.mode, self.coeffs))

    def __repr__(self):
        head = ", ".join(str(c) for c in self.coeffs[:6])
        tail = ", ..." if self.order > 5 else ""
        return f"PowerSeries({self.mode}, [{head}{tail}], order={self.order})"

    def is_zero(self) -> bool:
        if self.mode == "exact":
            return all(c.is_zero() for c in self.coeffs)
        return all(c == 0 for c in self.coeffs)

    def max_abs(self) -> float:
        if self.mode == "exact":
            raise SeriesError("max_abs is a numeric-mode helper")
        return max(abs(c) for c in self.coeffs)

    def truncate(self, order: int) -> "PowerSeries":
        if order >= self.order:
            return self
        return PowerSeries(self.mode, self.coeffs[: order + 1])

    def _check(self, other: "PowerSeries"):
        if not isinstance(other, PowerSeries):
            raise TypeError("expected a PowerSeries")
        if self.mode != other.mode:
            raise ModeMismatch("cannot mix exact and numeric series")

    # -- ring operations ----------------------------------------------------

    def __add__(self, other):
        self._check(other)
        n = min(self.order, other.order)
        return PowerSeries(self.mode, [self.coeffs[k] + other.coeffs[k] for k in range(n + 1)])

    def __sub__(self, other):
        self._check(other)
        n = min(self.order, other.order)
        return PowerSeries(self.mode, [self.coeffs[k] - other.coeffs[k] for k in range(n + 1)])

    def __neg__(self):
        return PowerSeries(self.mode, [-c for c in self.coeffs])

    def __mul__(self, other):
        self._check(other)
        n = min(self.order, other.order)
        a, b = self.coeffs, other.coeffs
        out = []
        for k in range(n + 1):
            s = _zero(self.mode)
            for j in range(k + 1):
                s = s + a[j] * b[k - j]
            out.append(s)
        return PowerSeries(self.mode, out)

    def scale(self, c) -> "PowerSeries":
        c = _coerce_coeff(self.mode, c)
        return PowerSeries(self.mode, [x * c for x in self.coeffs])

    def __truediv__(self, other):
        self._check(other)
        n = min(self.order, other.order)
        b0 = other.coeffs[0]
        if self.mode == "exact":
            if b0.is_zero():
                raise ZeroDivisionError("series division by a series with zero constant term")
            inv0 = FRAC_ONE / b0
        else:
            if abs(b0) <= NUMERIC_DIV_EPS:
                raise ZeroDivisionError("series division by a numerically singular constant term")
            inv0 = 1 / b0
        a, b = self.coeffs, other.coeffs
        q = []
        for k in range(n + 1):
            s = a[k]
            for j in range(k):
                s = s - q[j] * b[k - j]
            q.append(s * inv0)
        return PowerSeries(self.mode, q)

    def __pow__(self, n: int):
        if n < 0:
            raise SeriesError("negative series power; divide explicitly instead")
        out = PowerSeries.constant(_one(self.mode), self.order, self.mode)
        for _ in range(n):
            out = out * self
        return out

    # -- calculus -----------------------------------------------------------

    def derivative(self) -> "PowerSeries":
        if self.order == 0:
            raise SeriesError("cannot differentiate an order-0 series")
        out = []
        for k in range(1, self.order + 1):
            factor = Frac.of(k) if self.mode == "exact" else complex(k)
            out.append(self.coeffs[k] * factor)
        return PowerSeries(self.mode, out)

    def compose(self, inner: "PowerSeries") -> "PowerSeries":
        """Taylor coefficients of self(inner); inner must kill its constant term."""
        self._check(inner)
        c0 = inner.coeffs[0]
        ok = c0.is_zero() if self.mode == "exact" else c0 == 0
        if not ok:
            raise SeriesError("composition needs an inner series with zero constant term")
        n = min(self.order, inner.order)
        outer = self.truncate(n)
        inner = inner.truncate(n)
        acc = PowerSeries.constant(outer.coeffs[n], n, self.mode)
        for k in range(n - 1, -1, -1):
            acc = acc * inner + PowerSeries.constant(outer.coeffs[k], n, self.mode)
        return acc

    # -- conversions --------------------------------------------------------

    def to_numeric(self) -> "PowerSeries":
        if self.mode == "numeric":
            return self
        return PowerSeries("numeric", [frac_value(c) for c in self.coeffs])

    def close_to(self, other: "PowerSeries", rel_tol: float = DEFAULT_REL_TOL, floor: float = 1e-6) -> bool:
        """Numeric comparison: coefficients with magnitude >= floor must agree
        to rel_tol; smaller ones must agree within rel_tol absolutely."""
        a = self.to_numeric()
        b = other.to_numeric()
        n = min(a.order, b.order)
        for k in range(n + 1):
            x, y = a.coeffs[k], b.coeffs[k]
            scale = max(abs(x), abs(y))
            if scale >= floor:
                if abs(x - y) > rel_tol * scale:
                    return False
            else:
                if abs(x - y) > rel_tol:
                    return False
        return True


# ---------------------------------------------------------------------------
# Elementary series of a zero-constant-term argument


def series_exp(a: PowerSeries) -> PowerSeries:
    """exp of a series with zero constant term, via e' = a'e."""
    _require_zero_const(a, "exp")
    n = a.order
    mode = a.mode
    out = [_one(mode)]
    for k in range(1, n + 1):
        s = _zero(mode)
        for j in range(1, k + 1):
            s = s + a.coeffs[j] * j * out[k - j]
        factor = FRAC_ONE / Frac.of(k) if mode == "exact" else 1 / k
        out.append(s * factor)
    return PowerSeries(mode, out)


def series_sin_cos(a: PowerSeries) -> tuple:
    """(sin a, cos a) for zero-constant-term a, via the coupled recurrences
    s' = a'c and c' = -a's."""
    _require_zero_const(a, "sin/cos")
    n = a.order
    mode = a.mode
    s = [_zero(mode)]
    c = [_one(mode)]
    for k in range(1, n + 1):
        accs = _zero(mode)
        accc = _zero(mode)
        for j in range(1, k + 1):
            accs = accs + a.coeffs[j] * j * c[k - j]
            accc = accc + a.coeffs[j] * j * s[k - j]
        factor = FRAC_ONE / Frac.of(k) if mode == "exact" else 1 / k
        s.append(accs * factor)
        c.append(-accc * factor)
    return PowerSeries(mode, s), PowerSeries(mode, c)


def series_sin(a: PowerSeries) -> PowerSeries:
    return series_sin_cos(a)[0]


def series_cos(a: PowerSeries) -> PowerSeries:
    return series_sin_cos(a)[1]


def _require_zero_const(a: PowerSeries, what: str):
    c0 = a.coeffs[0]
    bad = (not c0.is_zero()) if a.mode == "exact" else c0 != 0
    if bad:
        raise SeriesError(f"{what} of a series needs a zero constant term; split the constant first")


# ---------------------------------------------------------------------------
# Series of polynomials and rational functions in z


def poly_to_series(p: Poly, center, order: int, mode: str = "exact") -> PowerSeries:
    """Expand a polynomial (in z and constants) around z = center."""
    out = [_zero(mode)] * (order + 1)
    if mode == "exact":
        center = Frac.of(center)
    else:
        center = complex(center)
    for mono, coeff in p.terms.items():
        zdeg = 0
        rest = []
        for v, e in mono:
            if v == "z":
                zdeg = e
            else:
                rest.append((v, e))
        base = Frac(Poly({tuple(rest): coeff}))
        if mode == "numeric":
            base = frac_value(base)
        # binomial shift: z^zdeg = (center + t)^zdeg
        binom = 1
        for j in range(0, min(zdeg, order) + 1):
            out[j] = out[j] + base * binom * center ** (zdeg - j)
            binom = binom * (zdeg - j) // (j + 1)
    return PowerSeries(mode, out)


def frac_to_series(f: Frac, center, order: int, mode: str = "exact") -> PowerSeries:
    """Expand a rational function of z around z = center; the denominator
    must not vanish there."""
    num = poly_to_series(f.num, center, order, mode)
    if f.den.is_one():
        return num
    den = poly_to_series(f.den, center, order, mode)
    c0 = den.coeffs[0]
    bad = c0.is_zero() if mode == "exact" else abs(c0) <= NUMERIC_DIV_EPS
    if bad:
        raise SeriesError("rational coefficient has a pole at the expansion center")
    return num / den
