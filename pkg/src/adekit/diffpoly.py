"""Differential polynomials in one unknown function.

A differential monomial y0^{m_0} y1^{m_1} ... yn^{m_n} stands for the
product f^{m_0} (f')^{m_1} ... (f^{(n)})^{m_n}.  A differential polynomial
is a finite sum of such monomials with coefficients rational in z.

Monomials are exponent tuples with trailing zeros trimmed, ranked by
(weight, total degree, exponents); the weight of a monomial is the sum of
derivative order times exponent, so it is stable under substituting one
function of z for another.
"""

from __future__ import annotations

from .scalars import (
    Frac,
    FRAC_ONE,
    GaussianRational,
    Poly,
    frac_str,
    poly_exact_div,
    poly_gcd,
    poly_lcm,
    _has_toplevel,
)
from .series import PowerSeries, frac_to_series
from .expr import ParseError, _lex


class DiffPolyError(ValueError):
    pass


DiffMono = tuple  # exponent tuple, trailing zeros trimmed


def mono_of(exponents) -> DiffMono:
    m = tuple(int(e) for e in exponents)
    if any(e < 0 for e in m):
        raise DiffPolyError("negative exponent in a differential monomial")
    while m and m[-1] == 0:
        m = m[:-1]
    return m


def mono_weight(m: DiffMono) -> int:
    return sum(k * e for k, e in enumerate(m))


def mono_total_degree(m: DiffMono) -> int:
    return sum(m)


def mono_order(m: DiffMono) -> int:
    return len(m) - 1 if m else 0


def mono_product(a: DiffMono, b: DiffMono) -> DiffMono:
    n = max(len(a), len(b))
    a = a + (0,) * (n - len(a))
    b = b + (0,) * (n - len(b))
    return mono_of(x + y for x, y in zip(a, b))


def mono_rank(m: DiffMono):
    """Sort key; higher compares later, display order is descending."""
    return (mono_weight(m), mono_total_degree(m), m)


def diff_mono_text(m: DiffMono) -> str:
    if not m:
        return "1"
    parts = []
    for k, e in enumerate(m):
        if e == 0:
            continue
        parts.append(f"y{k}" if e == 1 else f"y{k}^{e}")
    return "*".join(parts)


class DiffPoly:
    __slots__ = ("terms",)

    def __init__(self, terms: dict):
        clean = {}
        for m, c in terms.items():
            c = c if isinstance(c, Frac) else Frac.of(c)
            if not c.is_zero():
                clean[mono_of(m)] = c
        self.terms = clean

    @staticmethod
    def zero() -> "DiffPoly":
        return DiffPoly({})

    @staticmethod
    def constant(c) -> "DiffPoly":
        return DiffPoly({(): c})

    @staticmethod
    def variable(k: int) -> "DiffPoly":
        if k < 0:
            raise DiffPolyError("derivative index must be nonnegative")
        return DiffPoly({(0,) * k + (1,): FRAC_ONE})

    @staticmethod
    def monomial(m, coeff=FRAC_ONE) -> "DiffPoly":
        return DiffPoly({mono_of(m): coeff})

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def order(self) -> int:
        """Highest derivative index present."""
        return max((mono_order(m) for m in self.terms if m), default=0)

    @property
    def weight(self) -> int:
        return max((mono_weight(m) for m in self.terms), default=0)

    @property
    def total_degree(self) -> int:
        return max((mono_total_degree(m) for m in self.terms), default=0)

    @property
    def coeff_degree(self) -> int:
        """Largest z-degree over numerators and denominators of coefficients."""
        out = 0
        for c in self.terms.values():
            out = max(out, c.num.degree_in("z"), c.den.degree_in("z"))
        return out

    def sorted_terms(self):
        """(monomial, coefficient) pairs, heaviest monomial first."""
        return sorted(self.terms.items(), key=lambda t: mono_rank(t[0]), reverse=True)

    def leading_monomial(self) -> DiffMono:
        if not self.terms:
            raise DiffPolyError("zero differential polynomial has no leading monomial")
        return max(self.terms, key=mono_rank)

    def support(self):
        return set(self.terms)

    def __eq__(self, other):
        return isinstance(other, DiffPoly) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other):
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, Frac.of(0)) + c
        return DiffPoly(out)

    def __sub__(self, other):
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, Frac.of(0)) - c
        return DiffPoly(out)

    def __neg__(self):
        return DiffPoly({m: -c for m, c in self.terms.items()})

    def __mul__(self, other):
        out = {}
        for ma, ca in self.terms.items():
            for mb, cb in other.terms.items():
                m = mono_product(ma, mb)
                c = ca * cb
                out[m] = out[m] + c if m in out else c
        return DiffPoly(out)

    def scale(self, c) -> "DiffPoly":
        c = c if isinstance(c, Frac) else Frac.of(c)
        return DiffPoly({m: cc * c for m, cc in self.terms.items()})

    def __pow__(self, n: int):
        if n < 0:
            raise DiffPolyError("negative power of a differential polynomial")
        out = DiffPoly.constant(FRAC_ONE)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __str__(self):
        return ade_text(self)

    def __repr__(self):
        return f"DiffPoly({ade_text(self)!r})"


# ---------------------------------------------------------------------------
# Printing


def _frac_is_negative(c: Frac) -> bool:
    g = c.num.leading()[1]
    return g.re < 0 or (g.re == 0 and g.im < 0)


def _coeff_factor_text(c: Frac) -> str:
    txt = frac_str(c)
    if _has_toplevel(txt, "+-", start=1):
        return f"({txt})"
    return txt


def ade_text(p: DiffPoly) -> str:
    """Canonical text; reparses to the same differential polynomial."""
    if p.is_zero():
        return "0"
    pieces = []
    for m, c in p.sorted_terms():
        negative = _frac_is_negative(c)
        if not m:
            # bare constant chunk: the separator sign binds only the first
            # monomial on reparse, so keep the remaining signs as written
            txt = frac_str(c)
            if negative:
                body = txt[1:] if txt.startswith("-") else frac_str(-c)
            else:
                body = txt
        else:
            if negative:
                c = -c
            if c == FRAC_ONE:
                body = diff_mono_text(m)
            else:
                body = f"{_coeff_factor_text(c)}*{diff_mono_text(m)}"
        if not pieces:
            pieces.append(f"-{body}" if negative else body)
        else:
            pieces.append(f"- {body}" if negative else f"+ {body}")
    return " ".join(pieces)


# ---------------------------------------------------------------------------
# Parsing


def parse_ade(text: str) -> DiffPoly:
    toks = _lex(text)
    pos = 0

    def peek():
        return toks[pos]

    def take():
        nonlocal pos
        t = toks[pos]
        pos += 1
        return t

    def expect(kind):
        t = take()
        if t[0] != kind:
            raise ParseError(f"expected {kind!r}, found {t[1]!r}" if t[1] else f"expected {kind!r}", t[2])
        return t

    def parse_sum() -> DiffPoly:
        if peek()[0] == "-":
            take()
            total = -parse_product()
        else:
            total = parse_product()
        while peek()[0] in ("+", "-"):
            op = take()[0]
            rhs = parse_product()
            total = total + rhs if op == "+" else total - rhs
        return total

    def parse_product() -> DiffPoly:
        out = parse_factor()
        while peek()[0] in ("*", "/"):
            op, _, oppos = take()
            rhs = parse_factor()
            if op == "*":
                out = out * rhs
            else:
                if set(rhs.terms) - {()}:
                    raise ParseError("can only divide by a scalar coefficient", oppos)
                if rhs.is_zero():
                    raise ParseError("division by zero", oppos)
                out = out.scale(FRAC_ONE / rhs.terms[()])
        return out

    def parse_factor() -> DiffPoly:
        out = parse_base()
        if peek()[0] == "^":
            take()
            t = expect("int")
            out = out ** int(t[1])
        return out

    def parse_base() -> DiffPoly:
        kind, text_, p0 = take()
        if kind == "int":
            if peek()[0] == "/" and toks[pos + 1][0] == "int":
                take()
                den = int(expect("int")[1])
                if den == 0:
                    raise ParseError("zero denominator in rational literal", p0)
                return DiffPoly.constant(Frac.of(GaussianRational.coerce(int(text_))) / Frac.of(den))
            return DiffPoly.constant(Frac.of(int(text_)))
        if kind == "(":
            inner = parse_sum()
            expect(")")
            return inner
        if kind == "name":
            if text_ == "z":
                return DiffPoly.constant(Frac.var("z"))
            if text_ == "pi":
                return DiffPoly.constant(Frac.var("pi"))
            if text_ == "i":
                return DiffPoly.constant(Frac.of(GaussianRational(0, 1)))
            if len(text_) >= 2 and text_[0] == "y" and text_[1:].isdigit():
                return DiffPoly.variable(int(text_[1:]))
            raise ParseError(f"unknown name {text_!r} in a differential polynomial", p0)
        raise ParseError(
            f"expected a term, found {text_!r}" if text_ else "unexpected end of input", p0
        )

    out = parse_sum()
    t = peek()
    if t[0] != "end":
        raise ParseError(f"unexpected {t[1]!r}", t[2])
    return out


# ---------------------------------------------------------------------------
# Normal form


def normalize(p: DiffPoly) -> DiffPoly:
    """Canonical representative of the proportionality class: coefficients
    cleared to coprime polynomials and the leading monomial's leading scalar
    made +1."""
    if p.is_zero():
        return p
    lcm = Poly.one()
    for c in p.terms.values():
        lcm = poly_lcm(lcm, c.den)
    nums = {}
    for m, c in p.terms.items():
        cleared = c * Frac(lcm)
        if not cleared.den.is_one():
            raise DiffPolyError("denominator survived clearing")
        nums[m] = cleared.num
    content = None
    for q in nums.values():
        content = q if content is None else poly_gcd(content, q)
    if not content.is_one():
        nums = {m: poly_exact_div(q, content) for m, q in nums.items()}
    lead_scalar = nums[max(nums, key=mono_rank)].leading()[1]
    inv = Frac.of(lead_scalar.inverse())
    return DiffPoly({m: Frac(q) * inv for m, q in nums.items()})


# ---------------------------------------------------------------------------
# Application to a concrete function


def derivative_stack(subject_series: PowerSeries, depth: int):
    """Series of the 0th..depth-th derivatives, all truncated to a common
    order; the input must carry depth extra coefficients."""
    if subject_series.order < depth:
        raise DiffPolyError("subject series is too short for the requested derivatives")
    target = subject_series.order - depth
    out = [subject_series]
    for _ in range(depth):
        out.append(out[-1].derivative())
    return [s.truncate(target) for s in out]


def apply_to_series(p: DiffPoly, derivs, center, mode: str) -> PowerSeries:
    """Evaluate the differential polynomial on a stack of derivative series
    around the given center."""
    if not derivs:
        raise DiffPolyError("empty derivative stack")
    order = min(s.order for s in derivs)
    mode_ = derivs[0].mode
    if mode_ != mode:
        raise DiffPolyError("derivative stack mode does not match")
    total = PowerSeries.zero(order, mode)
    for m, c in p.terms.items():
        if mono_order(m) >= len(derivs) and m:
            raise DiffPolyError("derivative stack is too shallow for this polynomial")
        term = frac_to_series(c, center, order, mode)
        for k, e in enumerate(m):
            if e:
                term = term * derivs[k] ** e
        total = total + term
    return total


def residual_series(p: DiffPoly, subject, env, center, order: int, mode: str = "exact") -> PowerSeries:
    """P[subject] expanded around center to the given order."""
    from .expr import expand_series

    n = p.order
    base = expand_series(subject, center, order + n, mode=mode, env=env)
    derivs = derivative_stack(base, n)
    if mode == "exact":
        center = center if isinstance(center, Frac) else Frac.of(center)
    else:
        center = complex(center)
    return apply_to_series(p, derivs, center, mode)


def holds_on(p: DiffPoly, subject, env, center, order: int, mode: str = "exact", tol: float = 1e-9) -> bool:
    """Whether P[subject] vanishes identically through the given order."""
    res = residual_series(p, subject, env, center, order, mode)
    if mode == "exact":
        return res.is_zero()
    scale = max(1.0, _term_scale(p, subject, env, center, order))
    return res.max_abs() <= tol * scale


def _term_scale(p: DiffPoly, subject, env, center, order: int) -> float:
    from .expr import expand_series

    n = p.order
    base = expand_series(subject, center, order + n, mode="numeric", env=env)
    derivs = derivative_stack(base, n)
    biggest = 0.0
    for m, c in p.terms.items():
        term = frac_to_series(c, complex(center), min(s.order for s in derivs), "numeric")
        for k, e in enumerate(m):
            if e:
                term = term * derivs[k] ** e
        biggest = max(biggest, term.max_abs())
    return biggest
