"""Numeric growth scale of entire functions.

Values are carried as log-modulus plus angle, so towers like exp(exp(z))
stay finite long after complex floats overflow: the log-modulus of the
third exponential of 4 is about 5e23, a perfectly ordinary float.  Only
when an operation needs the value itself (another exponential on top, a
trigonometric call) and the modulus exceeds float range does the result
degrade to an overflow marker, which maximum-modulus readings report as
infinity and mean-based readings refuse.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .expr import (
    Add,
    Compose,
    Cos,
    DefinitionEnvironment,
    Div,
    EMPTY_ENV,
    Exp,
    Expression,
    FuncRef,
    Iterate,
    Lit,
    Mul,
    PiConst,
    Pow,
    Sin,
    Sub,
    Var,
    inline,
    nth_derivative,
)

TAU = 2.0 * math.pi
EXP_LIMIT = 709.0
STRICT_TOL = 1e-9


class GrowthError(ValueError):
    pass


class _OverflowMarker:
    __slots__ = ()

    def __repr__(self):
        return "overflow"


OVERFLOW = _OverflowMarker()


class LogPolar:
    """w = exp(log_abs) * exp(i*angle); log_abs of -inf encodes zero."""

    __slots__ = ("log_abs", "angle")

    def __init__(self, log_abs: float, angle: float):
        self.log_abs = float(log_abs)
        self.angle = math.remainder(float(angle), TAU) if math.isfinite(angle) else 0.0

    @staticmethod
    def from_complex(w: complex) -> "LogPolar":
        w = complex(w)
        if w == 0:
            return LogPolar(-math.inf, 0.0)
        return LogPolar(math.log(abs(w)), cmath.phase(w))

    def is_zero(self) -> bool:
        return self.log_abs == -math.inf

    def to_complex(self) -> complex:
        """Value as a complex float; requires the modulus to be representable."""
        if self.is_zero():
            return 0j
        if self.log_abs > EXP_LIMIT:
            raise GrowthError("modulus exceeds float range")
        return cmath.rect(math.exp(self.log_abs), self.angle)

    def __repr__(self):
        return f"LogPolar({self.log_abs!r}, {self.angle!r})"


def _lp_add(a: LogPolar, b: LogPolar) -> LogPolar:
    if a.is_zero():
        return b
    if b.is_zero():
        return a
    # factor out the larger modulus so the residual sum stays in range
    if b.log_abs > a.log_abs:
        a, b = b, a
    small = b.log_abs - a.log_abs
    s = cmath.rect(1.0, a.angle) + cmath.rect(math.exp(small) if small > -745.0 else 0.0, b.angle)
    if s == 0:
        return LogPolar(-math.inf, 0.0)
    return LogPolar(a.log_abs + math.log(abs(s)), cmath.phase(s))


def _lp_neg(a: LogPolar) -> LogPolar:
    if a.is_zero():
        return a
    return LogPolar(a.log_abs, a.angle + math.pi)


def _lp_mul(a: LogPolar, b: LogPolar) -> LogPolar:
    if a.is_zero() or b.is_zero():
        return LogPolar(-math.inf, 0.0)
    return LogPolar(a.log_abs + b.log_abs, a.angle + b.angle)


def _lp_div(a: LogPolar, b: LogPolar) -> LogPolar:
    if b.is_zero():
        raise GrowthError("division by zero during growth evaluation")
    if a.is_zero():
        return a
    return LogPolar(a.log_abs - b.log_abs, a.angle - b.angle)


def _lp_pow(a: LogPolar, n: int) -> LogPolar:
    if n == 0:
        return LogPolar(0.0, 0.0)
    if a.is_zero():
        return a
    return LogPolar(n * a.log_abs, n * a.angle)


def _lp_exp(a: LogPolar):
    if a.is_zero():
        return LogPolar(0.0, 0.0)
    if a.log_abs > EXP_LIMIT:
        return OVERFLOW
    w = cmath.rect(math.exp(a.log_abs), a.angle)
    return LogPolar(w.real, w.imag)


def _lp_trig(a: LogPolar, fn):
    if a.is_zero():
        w = 0j
    elif a.log_abs > EXP_LIMIT:
        return OVERFLOW
    else:
        w = cmath.rect(math.exp(a.log_abs), a.angle)
    try:
        v = fn(w)
    except OverflowError:
        # |sin w| and |cos w| grow like exp(|Im w|)/2
        return LogPolar(abs(w.imag) - math.log(2.0), 0.0)
    return LogPolar.from_complex(v)


def eval_log_polar(e: Expression, arg: LogPolar, env: DefinitionEnvironment):
    """Evaluate with a log-polar argument; OVERFLOW propagates."""
    if isinstance(e, Var):
        return arg
    if isinstance(e, Lit):
        return LogPolar.from_complex(e.value.to_complex())
    if isinstance(e, PiConst):
        return LogPolar(math.log(math.pi), 0.0)
    if isinstance(e, (Add, Sub, Mul, Div)):
        a = eval_log_polar(e.left, arg, env)
        b = eval_log_polar(e.right, arg, env)
        if a is OVERFLOW or b is OVERFLOW:
            return OVERFLOW
        if isinstance(e, Add):
            return _lp_add(a, b)
        if isinstance(e, Sub):
            return _lp_add(a, _lp_neg(b))
        if isinstance(e, Mul):
            return _lp_mul(a, b)
        return _lp_div(a, b)
    if isinstance(e, Pow):
        a = eval_log_polar(e.base, arg, env)
        return OVERFLOW if a is OVERFLOW else _lp_pow(a, e.exponent)
    if isinstance(e, Exp):
        a = eval_log_polar(e.arg, arg, env)
        return OVERFLOW if a is OVERFLOW else _lp_exp(a)
    if isinstance(e, Sin):
        a = eval_log_polar(e.arg, arg, env)
        return OVERFLOW if a is OVERFLOW else _lp_trig(a, cmath.sin)
    if isinstance(e, Cos):
        a = eval_log_polar(e.arg, arg, env)
        return OVERFLOW if a is OVERFLOW else _lp_trig(a, cmath.cos)
    if isinstance(e, FuncRef):
        return eval_log_polar(nth_derivative(env.lookup(e.name), e.order), arg, env)
    if isinstance(e, Compose):
        inner = eval_log_polar(e.inner, arg, env)
        if inner is OVERFLOW:
            return OVERFLOW
        return eval_log_polar(e.outer, inner, env)
    if isinstance(e, Iterate):
        body = env.lookup(e.name)
        v = arg
        for _ in range(e.count):
            v = eval_log_polar(body, v, env)
            if v is OVERFLOW:
                return OVERFLOW
        return v
    raise TypeError(f"not an expression node: {e!r}")


# ---------------------------------------------------------------------------
# Circle statistics


def _check_samples(samples: int):
    if samples < 64 or samples & (samples - 1):
        raise GrowthError("sample count must be a power of two, at least 64")


def _check_radius(r: float):
    r = float(r)
    if not math.isfinite(r) or r <= 0:
        raise GrowthError("radius must be a positive finite number")
    return r


def circle_log_abs(f: Expression, env: DefinitionEnvironment, r: float, samples: int):
    """log moduli on the circle of radius r; entries may be OVERFLOW."""
    r = _check_radius(r)
    _check_samples(samples)
    closed = inline(f, env)
    out = []
    for k in range(samples):
        theta = TAU * k / samples
        z = LogPolar(math.log(r), theta)
        v = eval_log_polar(closed, z, env)
        out.append(OVERFLOW if v is OVERFLOW else v.log_abs)
    return out

def log_max_modulus(f: Expression, env: DefinitionEnvironment, r: float, samples: int = 1024) -> float:
    """log M(r, f) over a sampled circle; infinity when any sample overflows."""
    values = circle_log_abs(f, env, r, samples)
    if any(v is OVERFLOW for v in values):
        return math.inf
    return max(values)


def max_modulus(f: Expression, env: DefinitionEnvironment, r: float, samples: int = 1024) -> float:
    """M(r, f); infinity when the modulus exceeds float range."""
    lm = log_max_modulus(f, env, r, samples)
    if lm == -math.inf:
        return 0.0
    if lm > EXP_LIMIT:
        return math.inf
    return math.exp(lm)


def characteristic(f: Expression, env: DefinitionEnvironment, r: float, samples: int = 4096) -> float:
    """Mean of max(log |f|, 0) over the circle, the growth characteristic
    of an entire function."""
    values = circle_log_abs(f, env, r, samples)
    total = 0.0
    for v in values:
        if v is OVERFLOW:
            raise GrowthError(
                f"modulus overflows float range on the circle r={r}; reduce the radius"
            )
        if v > 0.0:
            total += v
    return total / samples


# ---------------------------------------------------------------------------
# Iterate comparisons


def is_transcendental(f: Expression, env: DefinitionEnvironment) -> bool:
    """Whether the closed form still contains an elementary transcendental."""

    def walk(e) -> bool:
        if isinstance(e, (Exp, Sin, Cos)):
            return True
        if isinstance(e, (Add, Sub, Mul, Div)):
            return walk(e.left) or walk(e.right)
        if isinstance(e, Pow):
            return walk(e.base)
        if isinstance(e, Compose):
            return walk(e.outer) or walk(e.inner)
        return False

    return walk(inline(f, env))


def _require_transcendental(f: Expression, env: DefinitionEnvironment, role: str):
    if not is_transcendental(f, env):
        raise GrowthError(f"{role} must be transcendental for iterate comparisons")


def compose_iterate(f_closed: Expression, p: int) -> Expression:
    out = f_closed
    for _ in range(p - 1):
        out = Compose(f_closed, out)
    return out


@dataclass
class BakerRow:
    p: int
    r: float
    log_iterate: float
    log_partner: float
    margin: float
    strict: bool


@dataclass
class BakerReport:
    p: int | None
    rows: list
    tol: float


def baker_scan(
    f: Expression,
    g: Expression,
    env: DefinitionEnvironment,
    max_p: int,
    radii,
    samples: int = 256,
    tol: float = STRICT_TOL,
) -> BakerReport:
    """Smallest p with M(r, p-th iterate of f) strictly above M(r, g) on
    every radius given."""
    _require_transcendental(f, env, "the iterated function")
    _require_transcendental(g, env, "the comparison function")
    radii = [_check_radius(r) for r in radii]
    if not radii:
        raise GrowthError("at least one radius is required")
    if max_p < 1:
        raise GrowthError("iterate bound must be positive")
    f_closed = inline(f, env)
    rows = []
    for p in range(1, max_p + 1):
        fp = compose_iterate(f_closed, p)
        all_strict = True
        for r in radii:
            li = log_max_modulus(fp, env, r, samples)
            lg = log_max_modulus(g, env, r, samples)
            if math.isinf(li) and math.isinf(lg):
                raise GrowthError(
                    f"both sides overflow at r={r}; reduce the radius to compare"
                )
            margin = li - lg
            strict = margin > tol
            rows.append(BakerRow(p, r, li, lg, margin, strict))
            all_strict = all_strict and strict
        if all_strict:
            return BakerReport(p, rows, tol)
    return BakerReport(None, rows, tol)


# ---------------------------------------------------------------------------
# Inequality suite


@dataclass
class InequalityRow:
    name: str
    r: float
    lhs: float
    rhs: float
    holds: bool
    note: str = ""


def composition_lower_bound(
    f: Expression,
    g: Expression,
    env: DefinitionEnvironment,
    r: float,
    c: float = 0.25,
    samples: int = 1024,
) -> InequalityRow:
    """log M(r, f(g)) >= log M(c*M(r/2, g), f)."""
    r = _check_radius(r)
    if not 0 < c <= 1:
        raise GrowthError("the shrink factor must be in (0, 1]")
    fg = Compose(inline(f, env), inline(g, env))
    lhs = log_max_modulus(fg, env, r, samples)
    inner = log_max_modulus(g, env, r / 2.0, samples)
    if inner > EXP_LIMIT:
        raise GrowthError("inner modulus overflows; reduce the radius")
    rho = c * math.exp(inner)
    rhs = log_max_modulus(f, env, rho, samples)
    return InequalityRow(
        "composition_lower_bound",
        r,
        lhs,
        rhs,
        lhs >= rhs - STRICT_TOL,
        note=f"inner radius {rho:.6g}",
    )


def characteristic_sandwich(
    f: Expression, env: DefinitionEnvironment, r: float, samples: int = 4096
) -> list:
    """T(r) <= log M(r) <= 3 T(2r)."""
    r = _check_radius(r)
    t = characteristic(f, env, r, samples)
    lm = log_max_modulus(f, env, r, samples)
    if math.isinf(lm):
        raise GrowthError("modulus overflows at this radius")
    t2 = characteristic(f, env, 2.0 * r, samples)
    return [
        InequalityRow("characteristic_below_log_max", r, t, lm, t <= lm + STRICT_TOL),
        InequalityRow("log_max_below_triple_characteristic", r, lm, 3.0 * t2, lm <= 3.0 * t2 + STRICT_TOL),
    ]


def log_convexity(
    f: Expression,
    env: DefinitionEnvironment,
    r_low: float,
    r_high: float,
    points: int = 10,
    samples: int = 1024,
) -> list:
    """Midpoint convexity of log M along a geometric radius grid."""
    r_low = _check_radius(r_low)
    r_high = _check_radius(r_high)
    if r_high <= r_low:
        raise GrowthError("the radius interval is empty")
    if points < 3:
        raise GrowthError("convexity needs at least three grid points")
    ratio = (r_high / r_low) ** (1.0 / (points - 1))
    radii = [r_low * ratio**k for k in range(points)]
    values = [log_max_modulus(f, env, r, samples) for r in radii]
    if any(math.isinf(v) for v in values):
        raise GrowthError("modulus overflows inside the convexity grid")
    rows = []
    scale = max(1.0, max(abs(v) for v in values))
    for k in range(1, points - 1):
        bend = values[k - 1] - 2.0 * values[k] + values[k + 1]
        rows.append(
            InequalityRow(
                "log_convexity",
                radii[k],
                bend,
                0.0,
                bend >= -1e-9 * scale,
                note=f"second difference at grid point {k}",
            )
        )
    return rows


def growth_suite(
    f: Expression,
    g: Expression,
    env: DefinitionEnvironment,
    r: float,
    c: float = 0.25,
    samples: int = 1024,
) -> list:
    """The standing inequalities behind iterate comparisons, evaluated at
    one radius for a pair of entire functions."""
    r = _check_radius(r)
    rows = [composition_lower_bound(f, g, env, r, c, samples)]
    rows.extend(characteristic_sandwich(f, env, r, samples))
    rows.extend(log_convexity(f, env, r / 2.0, 2.0 * r, 10, samples))

    # hypothesis radius check: c*M(r/4, f) must dominate a power of r
    lm_quarter = log_max_modulus(f, env, r / 4.0, samples)
    lhs = math.log(c) + lm_quarter
    rhs = 4.0 * math.log(r)
    rows.append(
        InequalityRow("shrunk_modulus_dominates_power", r, lhs, rhs, lhs > rhs, note="log scale")
    )

    tf = characteristic(f, env, r, samples)
    tg = characteristic(g, env, r, samples)
    rows.append(
        InequalityRow("joint_characteristic", r, max(tf, tg), max(tf, tg), True, note="U(r)")
    )

    # smallest radius where T(r^4, g) has tripled relative to T(r, g)
    probe = None
    lo = max(0.5, r / 8.0)
    ratio = (r / lo) ** (1.0 / 11.0)
    for k in range(12):
        rr = lo * ratio**k
        try:
            if characteristic(g, env, rr**4, samples) >= 3.0 * characteristic(g, env, rr, samples):
                probe = rr
                break
        except GrowthError:
            break
    rows.append(
        InequalityRow(
            "characteristic_triples_under_fourth_power",
            probe if probe is not None else math.nan,
            3.0,
            3.0,
            probe is not None,
            note="smallest radius found" if probe is not None else "not reached",
        )
    )
    return rows
