"""End-to-end flows over the symbolic core.

check_permutable compares both composition orders as exact or floating
series.  compose_ade and iterate_ade bound the search for an equation of
a composite by the weights, degrees and coefficient degrees of the input
equations.  transfer_ade carries an equation across a permutable pair:
rewrite along the partner, search the support for a polynomial relation,
and escalate to a higher iterate of the source when the support admits
none.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .diffpoly import DiffMono, DiffPoly, diff_mono_text, holds_on, normalize
from .discovery import (
    BoundExhausted,
    DiscoveryError,
    SearchOutcome,
    VerificationError,
    find_ade,
    relation_search,
)
from .chain_rewrite import support_monomials, transfer_support
from .expr import (
    Compose,
    DefinitionEnvironment,
    Expression,
    FuncRef,
    ONE,
    expand_series,
    inline,
    mul,
    nth_derivative,
    pow_,
)


@dataclass
class PermutabilityReport:
    equal: bool
    order: int
    first_mismatch: int | None
    mode: str


def check_permutable(
    f: Expression,
    g: Expression,
    env: DefinitionEnvironment,
    order: int = 16,
    center=0,
    mode: str = "exact",
    rtol: float = 1e-9,
) -> PermutabilityReport:
    """Compare f(g) and g(f) as series around the center."""
    cf = inline(f, env)
    cg = inline(g, env)
    fog = expand_series(Compose(cf, cg), center, order, mode=mode, env=env)
    gof = expand_series(Compose(cg, cf), center, order, mode=mode, env=env)
    mismatch = None
    if mode == "exact":
        for k in range(order + 1):
            if fog.coeffs[k] != gof.coeffs[k]:
                mismatch = k
                break
    else:
        scale = max(1.0, fog.max_abs(), gof.max_abs())
        for k in range(order + 1):
            if abs(fog.coeffs[k] - gof.coeffs[k]) > rtol * scale:
                mismatch = k
                break
    return PermutabilityReport(mismatch is None, order, mismatch, mode)


def compose_ade(
    p: DiffPoly,
    q: DiffPoly,
    f: Expression,
    g: Expression,
    env: DefinitionEnvironment,
    center=0,
    mode: str = "exact",
    rtol: float = 1e-9,
) -> SearchOutcome:
    """Equation for f(g) searched at the combined weight of the inputs,
    with degree and coefficient-degree budgets added."""
    if p.is_zero() or q.is_zero():
        raise DiscoveryError("composition needs two nonzero equations")
    subject = Compose(inline(f, env), inline(g, env))
    w = p.weight + q.weight
    return find_ade(
        subject,
        env,
        center=center,
        min_weight=w,
        max_weight=w,
        max_degree=p.total_degree + q.total_degree,
        max_coeff_degree=p.coeff_degree + q.coeff_degree + 2,
        mode=mode,
        rtol=rtol,
    )


def iterate_ade(
    f: Expression,
    p: DiffPoly,
    count: int,
    env: DefinitionEnvironment,
    center=0,
    mode: str = "exact",
    rtol: float = 1e-9,
) -> SearchOutcome:
    """Equation for the count-fold composition of f with itself, built up
    one composition at a time."""
    if count < 1:
        raise DiscoveryError("iterate count must be positive")
    if count == 1:
        return SearchOutcome(
            ade=normalize(p),
            found_at=(p.weight, p.total_degree, p.coeff_degree),
            num_unknowns=0,
            num_equations=0,
            solve_order=0,
            verify_order=0,
            kernel_dimension=0,
            escalations=[],
        )
    closed = inline(f, env)
    acc_expr = closed
    acc_ade = p
    outcome = None
    for _ in range(count - 1):
        outcome = _compose_with_subject(p, acc_ade, Compose(closed, acc_expr), env, center, mode, rtol)
        acc_expr = Compose(closed, acc_expr)
        acc_ade = outcome.ade
    return outcome


def _compose_with_subject(p, q, subject, env, center, mode, rtol) -> SearchOutcome:
    w = p.weight + q.weight
    return find_ade(
        subject,
        env,
        center=center,
        min_weight=w,
        max_weight=w,
        max_degree=p.total_degree + q.total_degree,
        max_coeff_degree=p.coeff_degree + q.coeff_degree + 2,
        mode=mode,
        rtol=rtol,
    )


@dataclass
class TransferReport:
    status: str
    q: int
    intermediate_ade: DiffPoly | None
    support: list
    output_ade: DiffPoly | None
    verified_order: int
    escalations: list = field(default_factory=list)
    wall_time_ms: int = 0

    @property
    def found(self) -> bool:
        return self.status == "ok"

    def support_text(self):
        return [diff_mono_text(m) for m in self.support]


def transfer_ade(
    f: Expression,
    p: DiffPoly,
    g: Expression,
    env: DefinitionEnvironment,
    q: int = 1,
    max_q: int = 3,
    center=0,
    verified_order: int = 30,
    max_relation_degree: int | None = None,
    mode: str = "exact",
    rtol: float = 1e-9,
) -> TransferReport:
    """Carry an equation for f over to its permutable partner g.

    For each iterate count starting at q, the equation of the iterate is
    rewritten along g and its support searched for a polynomial relation
    of escalating coefficient degree; the first verified relation is the
    answer.  A support that admits none sends the search to the next
    iterate, which enlarges the comparison function and tames the
    coefficients.
    """
    if q < 1 or max_q < q:
        raise DiscoveryError("iterate bounds must satisfy 1 <= q <= max_q")
    if p.is_zero():
        raise DiscoveryError("cannot transfer the zero equation")
    if not holds_on(p, f, env, center, 12 + p.order, mode, rtol):
        raise DiscoveryError("the input equation does not hold for the source function")

    escalations = []
    last_intermediate = None
    last_support: list = []
    for qq in range(q, max_q + 1):
        intermediate = p if qq == 1 else iterate_ade(f, p, qq, env, center, mode, rtol).ade
        support_map = transfer_support(intermediate)
        support = support_monomials(support_map)
        last_intermediate, last_support = intermediate, support
        funcs = [_mono_function(m, g, env) for m in support]
        cap = (
            max_relation_degree
            if max_relation_degree is not None
            else intermediate.coeff_degree + 2
        )
        certificate = None
        for deg in range(cap + 1):
            rel = relation_search(funcs, env, deg, center, mode, rtol)
            if rel.found:
                certificate = rel.certificate
                break
            escalations.append(
                {
                    "q": qq,
                    "relation_degree": deg,
                    "rank": rel.rank,
                    "unknowns": rel.num_unknowns,
                }
            )
        if certificate is None:
            continue
        candidate = normalize(
            DiffPoly({m: c for m, c in zip(support, certificate) if not c.is_zero()})
        )
        if not holds_on(candidate, g, env, center, verified_order, mode, rtol):
            raise VerificationError(
                f"transferred candidate {candidate} failed verification at order {verified_order}"
            )
        return TransferReport(
            status="ok",
            q=qq,
            intermediate_ade=intermediate,
            support=support,
            output_ade=candidate,
            verified_order=verified_order,
            escalations=escalations,
        )
    return TransferReport(
        status="exhausted",
        q=max_q,
        intermediate_ade=last_intermediate,
        support=last_support,
        output_ade=None,
        verified_order=0,
        escalations=escalations,
    )


def _mono_function(m: DiffMono, g: Expression, env: DefinitionEnvironment) -> Expression:
    closed = inline(g, env)
    out = ONE
    for j, e in enumerate(m):
        if e:
            out = mul(out, pow_(nth_derivative(closed, j), e))
    return out
