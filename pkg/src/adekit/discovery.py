"""Finding differential equations and polynomial relations from series.

Everything reduces to one primitive: a candidate family of functions is
expanded around a center, the coefficients are arranged into a linear
system, and an exact nullspace computation produces candidate identities.
A candidate found with N unknowns is solved from N + 10 series
coefficients and independently re-verified with 10 more, so a kernel
vector that merely reflects truncation is rejected rather than reported.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .scalars import (
    FRAC_ONE,
    FRAC_ZERO,
    Frac,
    GaussianRational,
    Poly,
    poly_exact_div,
    poly_gcd,
    poly_lcm,
)
from .series import PowerSeries, poly_to_series
from .diffpoly import (
    DiffMono,
    DiffPoly,
    derivative_stack,
    holds_on,
    mono_of,
    mono_rank,
    mono_total_degree,
    mono_weight,
    normalize,
)
from .expr import DefinitionEnvironment, Expression, expand_series, inline

SOLVE_MARGIN = 10
VERIFY_MARGIN = 10
SNAP_DENOMINATOR = 10**6


class DiscoveryError(ValueError):
    pass


class BoundExhausted(DiscoveryError):
    def __init__(self, message: str, escalations):
        super().__init__(message)
        self.escalations = escalations


class VerificationError(DiscoveryError):
    pass


# ---------------------------------------------------------------------------
# Exact and numeric nullspaces


def _clear_row(row):
    lcm = Poly.one()
    for x in row:
        lcm = poly_lcm(lcm, x.den)
    scale = Frac(lcm)
    out = []
    for x in row:
        y = x * scale
        if not y.den.is_one():
            raise DiscoveryError("failed to clear denominators in a solver row")
        out.append(y.num)
    # also clear the rational denominators inside the coefficients, so the
    # fraction-free elimination multiplies integers rather than fractions
    denoms = 1
    for q in out:
        for g in q.terms.values():
            denoms = _lcm_int(_lcm_int(denoms, g.re.denominator), g.im.denominator)
    if denoms != 1:
        grow = GaussianRational(denoms)
        out = [q.scale(grow) for q in out]
    return out


def _lcm_int(a: int, b: int) -> int:
    from math import gcd

    return a // gcd(a, b) * b


def exact_nullspace(rows):
    """Right nullspace basis of a matrix of scalar fractions.

    Rows are cleared to polynomial entries and eliminated fraction-free,
    so every intermediate division is exact; the basis vectors come back
    over the fraction field, one per free column.
    """
    if not rows:
        return [], 0
    mat = [_clear_row(r) for r in rows]
    m, n = len(mat), len(mat[0])
    prev = Poly.one()
    pivots = []
    r = 0
    for col in range(n):
        piv = next((i for i in range(r, m) if not mat[i][col].is_zero()), None)
        if piv is None:
            continue
        if piv != r:
            mat[r], mat[piv] = mat[piv], mat[r]
        p = mat[r][col]
        for i in range(r + 1, m):
            q = mat[i][col]
            if q.is_zero():
                continue
            for j in range(col + 1, n):
                mat[i][j] = poly_exact_div(p * mat[i][j] - q * mat[r][j], prev)
            mat[i][col] = Poly.zero()
        prev = p
        pivots.append((r, col))
        r += 1
        if r == m:
            break
    pivot_cols = {c for _, c in pivots}
    basis = []
    for free in (c for c in range(n) if c not in pivot_cols):
        x = [FRAC_ZERO] * n
        x[free] = FRAC_ONE
        for ri, ci in reversed(pivots):
            acc = FRAC_ZERO
            for j in range(ci + 1, n):
                if not x[j].is_zero() and not mat[ri][j].is_zero():
                    acc = acc + Frac(mat[ri][j]) * x[j]
            x[ci] = -acc / Frac(mat[ri][ci])
        basis.append(x)
    return basis, len(pivots)


def numeric_nullspace(rows, rtol: float = 1e-9):
    """Floating-point analogue with partial pivoting and a relative rank
    threshold."""
    if not rows:
        return [], 0
    mat = [[complex(x) for x in row] for row in rows]
    m, n = len(mat), len(mat[0])
    scale = max((abs(x) for row in mat for x in row), default=0.0)
    if scale == 0.0:
        return [[1.0 if j == k else 0.0 for j in range(n)] for k in range(n)], 0
    cutoff = rtol * scale
    pivots = []
    r = 0
    for col in range(n):
        piv = max(range(r, m), key=lambda i: abs(mat[i][col]), default=None)
        if piv is None or abs(mat[piv][col]) <= cutoff:
            continue
        if piv != r:
            mat[r], mat[piv] = mat[piv], mat[r]
        p = mat[r][col]
        for i in range(r + 1, m):
            f = mat[i][col] / p
            if f == 0:
                continue
            for j in range(col, n):
                mat[i][j] -= f * mat[r][j]
        pivots.append((r, col))
        r += 1
        if r == m:
            break
    pivot_cols = {c for _, c in pivots}
    basis = []
    for free in (c for c in range(n) if c not in pivot_cols):
        x = [0j] * n
        x[free] = 1.0 + 0j
        for ri, ci in reversed(pivots):
            acc = 0j
            for j in range(ci + 1, n):
                acc += mat[ri][j] * x[j]
            x[ci] = -acc / mat[ri][ci]
        basis.append(x)
    return basis, len(pivots)


def snap_scalar(x: complex) -> Frac:
    """Nearest small rational point, for reading numeric kernels back."""
    re = Fraction(x.real).limit_denominator(SNAP_DENOMINATOR)
    im = Fraction(x.imag).limit_denominator(SNAP_DENOMINATOR)
    return Frac.of(GaussianRational(re, im))


# ---------------------------------------------------------------------------
# Shared column construction


def _coerce_center(center, mode):
    if mode == "exact":
        return center if isinstance(center, Frac) else Frac.of(center)
    return complex(center)


def _z_power_series(degree: int, center, order: int, mode: str):
    zpoly = Poly.var("z")
    return [poly_to_series(zpoly**j, center, order, mode) for j in range(degree + 1)]


def _rows_from_columns(columns):
    order = min(s.order for s in columns)
    return [[s.coeffs[i] for s in columns] for i in range(order + 1)]


def _coefficient_frac(entries, degree: int) -> Frac:
    z = Frac.var("z")
    total = FRAC_ZERO
    for j in range(degree + 1):
        total = total + entries[j] * z**j
    return total


# ---------------------------------------------------------------------------
# Polynomial relations among given functions


@dataclass
class RelationResult:
    """Outcome of a single-degree relation search."""

    certificate: list | None
    degree: int
    rank: int
    num_unknowns: int
    num_equations: int
    solve_order: int

    @property
    def found(self) -> bool:
        return self.certificate is not None


def relation_search(
    funcs,
    env: DefinitionEnvironment,
    degree: int = 0,
    center=0,
    mode: str = "exact",
    rtol: float = 1e-9,
) -> RelationResult:
    """Look for polynomial coefficients c_k(z) of bounded degree with
    sum(c_k * funcs[k]) identically zero."""
    if not funcs:
        raise DiscoveryError("relation search needs at least one function")
    if degree < 0:
        raise DiscoveryError("coefficient degree must be nonnegative")
    unknowns = len(funcs) * (degree + 1)
    n_solve = unknowns + SOLVE_MARGIN
    center = _coerce_center(center, mode)
    closed = [inline(f, env) for f in funcs]
    series = [expand_series(f, center, n_solve, mode=mode, env=env) for f in closed]
    zpows = _z_power_series(degree, center, n_solve, mode)
    columns = [zpows[j] * s for s in series for j in range(degree + 1)]
    rows = _rows_from_columns(columns)
    if mode == "exact":
        basis, rank = exact_nullspace(rows)
    else:
        basis, rank = numeric_nullspace(rows, rtol)
    result = RelationResult(None, degree, rank, unknowns, len(rows), n_solve)
    if not basis:
        return result
    best = None
    for vec in basis:
        if mode != "exact":
            vec = [snap_scalar(x) for x in vec]
        coeffs = [
            _coefficient_frac(vec[k * (degree + 1) : (k + 1) * (degree + 1)], degree)
            for k in range(len(funcs))
        ]
        coeffs = _normalize_certificate(coeffs)
        key = (
            sum(1 for c in coeffs if not c.is_zero()),
            sum(c.num.degree_in("z") for c in coeffs),
            tuple(str(c.num) for c in coeffs),
        )
        if best is None or key < best[0]:
            best = (key, coeffs)
    result.certificate = best[1]
    return result


def _normalize_certificate(coeffs):
    """Clear denominators, strip content, make the first nonzero
    coefficient's leading scalar +1."""
    if all(c.is_zero() for c in coeffs):
        return coeffs
    lcm = Poly.one()
    for c in coeffs:
        lcm = poly_lcm(lcm, c.den)
    scale = Frac(lcm)
    nums = []
    for c in coeffs:
        y = c * scale
        nums.append(y.num)
    content = None
    for q in nums:
        if q.is_zero():
            continue
        content = q if content is None else poly_gcd(content, q)
    if content is not None and not content.is_one():
        nums = [q if q.is_zero() else poly_exact_div(q, content) for q in nums]
    lead = next(q for q in nums if not q.is_zero())
    inv = Frac.of(lead.leading()[1].inverse())
    return [Frac(q) * inv for q in nums]


# ---------------------------------------------------------------------------
# Differential equation search


def candidate_monomials(max_weight: int, max_degree: int):
    """Every differential monomial within the weight and degree budget,
    constant included, in ascending canonical order."""
    seen = {()}
    frontier = [()]
    while frontier:
        grown = []
        for m in frontier:
            for k in range(max_weight + 1):
                bumped = list(m) + [0] * (k + 1 - len(m))
                bumped[k] += 1
                t = mono_of(bumped)
                if t in seen:
                    continue
                if mono_weight(t) <= max_weight and mono_total_degree(t) <= max_degree:
                    seen.add(t)
                    grown.append(t)
        frontier = grown
    return sorted(seen, key=mono_rank)


@dataclass
class SearchOutcome:
    """A verified differential equation and how it was found."""

    ade: DiffPoly
    found_at: tuple
    num_unknowns: int
    num_equations: int
    solve_order: int
    verify_order: int
    kernel_dimension: int
    escalations: list


def find_ade(
    subject: Expression,
    env: DefinitionEnvironment,
    center=0,
    min_weight: int = 1,
    max_weight: int = 4,
    max_degree: int = 3,
    max_coeff_degree: int = 4,
    mode: str = "exact",
    rtol: float = 1e-9,
) -> SearchOutcome:
    """Smallest differential equation satisfied by the subject, escalating
    weight, then total degree, then coefficient degree (fastest)."""
    if min_weight < 1 or max_weight < min_weight:
        raise DiscoveryError("weight bounds must satisfy 1 <= min <= max")
    if max_degree < 1 or max_coeff_degree < 0:
        raise DiscoveryError("degree bounds are out of range")
    center = _coerce_center(center, mode)
    escalations = []
    for w in range(min_weight, max_weight + 1):
        for d in range(1, max_degree + 1):
            for c in range(0, max_coeff_degree + 1):
                monos = candidate_monomials(w, d)
                unknowns = len(monos) * (c + 1)
                n_solve = unknowns + SOLVE_MARGIN
                base = expand_series(subject, center, n_solve + w, mode=mode, env=env)
                derivs = derivative_stack(base, w)
                zpows = _z_power_series(c, center, n_solve, mode)
                columns = []
                for m in monos:
                    s = _mono_series(m, derivs, n_solve, mode)
                    for j in range(c + 1):
                        columns.append(zpows[j] * s)
                rows = _rows_from_columns(columns)
                if mode == "exact":
                    basis, rank = exact_nullspace(rows)
                else:
                    basis, rank = numeric_nullspace(rows, rtol)
                if not basis:
                    escalations.append(
                        {
                            "weight": w,
                            "degree": d,
                            "coeff_degree": c,
                            "unknowns": unknowns,
                            "rank": rank,
                        }
                    )
                    continue
                candidate = _best_candidate(basis, monos, c, mode)
                verify_order = n_solve + VERIFY_MARGIN
                if not holds_on(candidate, subject, env, center, verify_order, mode, rtol):
                    raise VerificationError(
                        f"candidate {candidate} from stage (w={w}, d={d}, c={c}) "
                        f"failed re-verification at order {verify_order}"
                    )
                return SearchOutcome(
                    ade=candidate,
                    found_at=(w, d, c),
                    num_unknowns=unknowns,
                    num_equations=len(rows),
                    solve_order=n_solve,
                    verify_order=verify_order,
                    kernel_dimension=len(basis),
                    escalations=escalations,
                )
    raise BoundExhausted(
        f"no differential equation within weight {max_weight}, degree {max_degree}, "
        f"coefficient degree {max_coeff_degree}",
        escalations,
    )


def _mono_series(m: DiffMono, derivs, order: int, mode: str) -> PowerSeries:
    out = PowerSeries.constant(FRAC_ONE if mode == "exact" else 1 + 0j, order, mode)
    for k, e in enumerate(m):
        if e:
            out = out * derivs[k].truncate(order) ** e
    return out


def _best_candidate(basis, monos, degree: int, mode: str) -> DiffPoly:
    best = None
    for vec in basis:
        if mode != "exact":
            vec = [snap_scalar(x) for x in vec]
        terms = {}
        for idx, m in enumerate(monos):
            coeff = _coefficient_frac(vec[idx * (degree + 1) : (idx + 1) * (degree + 1)], degree)
            if not coeff.is_zero():
                terms[m] = coeff
        cand = normalize(DiffPoly(terms))
        key = (len(cand.terms), cand.coeff_degree, str(cand))
        if best is None or key < best[0]:
            best = (key, cand)
    return best[1]
