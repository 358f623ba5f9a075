"""End-to-end flows: commutation checks, composition, transfer."""

import pytest

from adekit.scalars import Frac
from adekit.expr import DefinitionEnvironment, EMPTY_ENV, parse
from adekit.diffpoly import ade_text, holds_on, parse_ade
from adekit.discovery import DiscoveryError
from adekit.pipeline import (
    check_permutable,
    compose_ade,
    iterate_ade,
    transfer_ade,
)

ITERATE_SQUARE_ADE = (
    "y1*y3 - y2^2 - y0*y3 + (z+1)*y3 + 4*y1^2 - 12*y2 - 3*y0*y1 + (3*z+14)*y1"
    " - 9*y0 + 9*z-18"
)


def _pair_env():
    env = DefinitionEnvironment()
    env.define_text("f", "z+exp(z)")
    env.define_text("g", "z+2*pi*i+exp(z)")
    return env


PAIR_ENV = _pair_env()


# ---------------------------------------------------------------------------
# commutation


def test_check_permutable_translation_pair():
    rep = check_permutable(parse("f", PAIR_ENV), parse("g", PAIR_ENV), PAIR_ENV)
    assert rep.equal and rep.first_mismatch is None
    assert rep.order == 16


def test_check_permutable_power_pair():
    env = DefinitionEnvironment()
    env.define_text("f", "z^2")
    env.define_text("g", "z^4")
    assert check_permutable(parse("f", env), parse("g", env), env).equal


def test_check_permutable_self_iterate():
    env = DefinitionEnvironment()
    env.define_text("f", "z+exp(z)")
    rep = check_permutable(parse("f", env), parse("f(f(z))", env), env)
    assert rep.equal


def test_check_permutable_negative():
    rep = check_permutable(parse("exp(z)"), parse("sin(z)"), EMPTY_ENV)
    assert not rep.equal
    assert rep.first_mismatch == 0


def test_check_permutable_numeric_mode():
    env = DefinitionEnvironment()
    env.define_text("f", "z^2")
    env.define_text("g", "z^4")
    rep = check_permutable(parse("f", env), parse("g", env), env, mode="numeric")
    assert rep.equal and rep.mode == "numeric"


# ---------------------------------------------------------------------------
# composition


def test_compose_ade_exponential_tower():
    p = parse_ade("y1 - y0")
    out = compose_ade(p, p, parse("exp(z)"), parse("exp(z)"), EMPTY_ENV)
    assert ade_text(out.ade) == "y0*y2 - y1^2 - y0*y1"
    assert holds_on(out.ade, parse("exp(exp(z))"), EMPTY_ENV, 0, 30)


def test_compose_ade_gaussian():
    out = compose_ade(
        parse_ade("y1 - y0"),
        parse_ade("y1 - 2*z"),
        parse("exp(z)"),
        parse("z^2"),
        EMPTY_ENV,
    )
    assert ade_text(out.ade) == "y1 - 2*z*y0"
    assert holds_on(out.ade, parse("exp(z^2)"), EMPTY_ENV, 0, 30)


def test_compose_ade_weight_is_pinned():
    p = parse_ade("y1 - y0")
    out = compose_ade(p, p, parse("exp(z)"), parse("exp(z)"), EMPTY_ENV)
    assert out.found_at[0] == 2
    assert out.escalations == [] or all(e["weight"] == 2 for e in out.escalations)


# ---------------------------------------------------------------------------
# iteration


def test_iterate_ade_count_one_is_normalized_input():
    p = parse_ade("2*y1 - 2*y0")
    out = iterate_ade(parse("exp(z)"), p, 1, EMPTY_ENV)
    assert ade_text(out.ade) == "y1 - y0"


def test_iterate_ade_rejects_nonpositive_count():
    with pytest.raises(DiscoveryError):
        iterate_ade(parse("exp(z)"), parse_ade("y1 - y0"), 0, EMPTY_ENV)


@pytest.mark.slow
def test_iterate_ade_square_of_translated_exponential():
    # frozen regression: the equation of f(f) for f = z + e^z
    env = DefinitionEnvironment()
    f = parse("z+exp(z)")
    out = iterate_ade(f, parse_ade("y2 - y1 + 1"), 2, env)
    assert ade_text(out.ade) == ITERATE_SQUARE_ADE
    assert out.found_at == (4, 2, 1)
    assert out.num_unknowns == 30
    assert out.kernel_dimension == 2
    assert len(out.escalations) == 4
    env2 = DefinitionEnvironment()
    env2.define_text("f", "z+exp(z)")
    assert holds_on(out.ade, parse("f(f(z))", env2), env2, 0, 40)


# ---------------------------------------------------------------------------
# transfer


def test_transfer_translation_pair_both_directions():
    p = parse_ade("y2 - y1 + 1")
    f = parse("f", PAIR_ENV)
    g = parse("g", PAIR_ENV)
    rep = transfer_ade(f, p, g, PAIR_ENV)
    assert rep.found and rep.q == 1
    assert ade_text(rep.output_ade) == "y2 - y1 + 1"
    assert rep.support_text() == ["1", "y1", "y2"]
    assert rep.verified_order == 30
    assert rep.escalations == []
    back = transfer_ade(g, p, f, PAIR_ENV)
    assert back.found and ade_text(back.output_ade) == "y2 - y1 + 1"


def test_transfer_requires_equation_to_hold():
    with pytest.raises(DiscoveryError):
        transfer_ade(parse("exp(z)"), parse_ade("y1 + y0"), parse("exp(z)"), EMPTY_ENV)


def test_transfer_escalates_to_second_iterate():
    rep = transfer_ade(
        parse("exp(z)"), parse_ade("y1 - y0"), parse("exp(exp(z))"), EMPTY_ENV
    )
    assert rep.found and rep.q == 2
    assert ade_text(rep.intermediate_ade) == "y0*y2 - y1^2 - y0*y1"
    assert ade_text(rep.output_ade) == "y0*y2 - y1^2 - y0*y1"
    assert rep.support_text() == ["y0*y1", "y1^2", "y0*y2"]
    assert [e["q"] for e in rep.escalations] == [1, 1, 1]
    assert holds_on(rep.output_ade, parse("exp(exp(z))"), EMPTY_ENV, 0, 30)


def test_transfer_exhausted_reports_attempts():
    rep = transfer_ade(
        parse("exp(z)"), parse_ade("y1 - y0"), parse("exp(exp(z))"), EMPTY_ENV, max_q=1
    )
    assert not rep.found
    assert rep.status == "exhausted"
    assert rep.output_ade is None
    assert len(rep.escalations) == 3


def test_transfer_wall_time_field_is_stable():
    p = parse_ade("y2 - y1 + 1")
    rep = transfer_ade(parse("f", PAIR_ENV), p, parse("g", PAIR_ENV), PAIR_ENV)
    assert rep.wall_time_ms == 0
