"""Derivation calculus: rewrites, Laplace rules and the certified re-derivation of the catalog."""

import json
import math
from dataclasses import replace

import numpy as np
import pytest

from pcflaplace import derive, laplace, pairs
from pcflaplace.errors import CertificateError, DomainError, LimitError, RewriteError
from pcflaplace.pairs import PairParameters, PcfFactor, Term, eval_expression, get_pair

S = np.array([0.4, 1.1, 3.0, 0.8 + 2.5j, 2.0 - 4.0j])
PARAMS = [PairParameters(0.7, 0.3, 0.4, 0.5), PairParameters(1.3, 0.0, 0.6, -0.6),
          PairParameters(2.0, 0.7, 1.2, -0.5)]


def ev(expr, s=S):
    return eval_expression(expr, s)


def rel_max(a, b):
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b)) / np.abs(np.asarray(b))))


def P(p, s=S):
    return (s + p.c) / p.beta


# ---------------------------------------------------------------------------
# recurrence rewrites
# ---------------------------------------------------------------------------

def test_lowering_row3_gives_row4_and_row8():
    for p in PARAMS:
        first, second = derive.pcf_recurrence_rewrite(get_pair("3").image(p), 1, "lower")
        assert rel_max(ev(first), p.y * ev(get_pair("4").image(p))) <= 1e-12
        assert derive.structural_residual(second, get_pair("8").image(p)) <= 1e-12


def test_lowering_row2_reproduces_row3_row4_decomposition():
    for p in PARAMS:
        off = PairParameters(p.beta, p.c, p.x, p.y + 0.1)  # keep the impulse inactive
        first, second = derive.pcf_recurrence_rewrite(get_pair("2").image(off), 1, "lower")
        assert rel_max(ev(first), off.y * ev(get_pair("3").image(off))) <= 1e-12
        assert rel_max(ev(second), P(off) * ev(get_pair("4").image(off))) <= 1e-12


def test_raising_rewrite_decomposes_row9_into_rows_6_and_4():
    for p in PARAMS:
        first, second = derive.pcf_recurrence_rewrite(get_pair("9").image(p), 1, "raise")
        assert rel_max(ev(first), -p.y * ev(get_pair("6").image(p))) <= 1e-12
        assert derive.structural_residual(second, get_pair("4").image(p)) <= 1e-12


def test_raise_requires_divisible_polynomial():
    with pytest.raises(RewriteError):
        derive.pcf_recurrence_rewrite(get_pair("4").image(PARAMS[0]), 1, "raise")


def test_rewrite_rejects_wrong_slope_and_bad_index():
    p = PARAMS[0]
    expr = get_pair("3").image(p)
    bad = replace(expr, terms=(Term((1.0,), (PcfFactor(0.0, p.x, slope=-2.0), PcfFactor(0.0, p.y))),))
    with pytest.raises(RewriteError):
        derive.pcf_recurrence_rewrite(bad, 0, "lower")
    with pytest.raises(RewriteError):
        derive.pcf_recurrence_rewrite(expr, 5, "lower")
    with pytest.raises(RewriteError):
        derive.pcf_recurrence_rewrite(expr, 0, "sideways")


def test_rewrite_pieces_sum_to_original_expression():
    for pid in ("1", "3", "5", "7", "9"):
        for p in PARAMS:
            expr = get_pair(pid).image(p)
            for idx in (0, 1):
                parts = derive.pcf_recurrence_rewrite(expr, idx, "lower")
                assert rel_max(sum(ev(e) for e in parts), ev(expr)) <= 1e-11


def test_structural_residual_detects_difference():
    p = PARAMS[0]
    a = get_pair("8").image(p)
    assert derive.structural_residual(a, a) == 0.0
    assert derive.structural_residual(a, a.scaled(1.001)) > 1e-4
    assert derive.structural_residual(a, get_pair("6").image(p)) > 1e-4


# ---------------------------------------------------------------------------
# Laplace rules
# ---------------------------------------------------------------------------

def test_shift_by_beta_of_row3_is_row10():
    shifted = derive.shift_by_beta(get_pair("3"))
    for p in PARAMS:
        assert derive.structural_residual(shifted.image(p), get_pair("10").image(p)) <= 1e-12
        t = np.array([0.1, 0.5, 2.0])
        assert rel_max(shifted.original(t, p), get_pair("10").original(t, p)) <= 1e-14


def test_shift_in_s_numeric_delta():
    p = PARAMS[0]
    shifted = derive.shift_in_s(get_pair("3"), 0.45)
    assert rel_max(ev(shifted.image(p)), ev(get_pair("3").image(p), S + 0.45)) <= 1e-12


def test_shift_zero_is_identity_and_negative_rejected():
    row = get_pair("4")
    assert derive.shift_in_s(row, 0.0) is row
    with pytest.raises(DomainError):
        derive.shift_in_s(row, -0.1)


def test_multiply_by_s_row4_gives_row5_with_boundary_correction():
    derived = derive.multiply_by_s(get_pair("4"))
    for p in PARAMS:
        assert rel_max(ev(derived.image(p)), ev(get_pair("5").image(p))) <= 1e-12
        assert derived.image(p).impulse_active == p.on_boundary
    t = np.array([0.2, 0.7, 1.5])
    p = PARAMS[0]
    assert rel_max(derived.original(t, p), get_pair("5").original(t, p)) <= 1e-8


def test_right_limit_of_row4():
    assert derive.right_limit(get_pair("4"), PairParameters(1.0, 0.0, 0.3, 0.4)) == 0.0
    on = derive.right_limit(get_pair("4"), PairParameters(1.5, 0.0, 0.4, -0.4))
    assert on == pytest.approx(1.5 * math.sqrt(math.pi / 2), rel=1e-15)


def test_right_limit_extrapolation_and_failure():
    smooth = replace(get_pair("4"), f0_limit=None)
    p = PairParameters(1.0, 0.2, 0.3, 0.4)
    assert abs(derive.right_limit(smooth, p)) <= 1e-8
    with pytest.raises(LimitError):
        derive.right_limit(get_pair("3"), PairParameters(1.0, 0.0, 0.5, -0.5))
    wild = replace(get_pair("4"), f0_limit=None, original=lambda t, p: math.sin(1.0 / t))
    with pytest.raises(LimitError):
        derive.right_limit(wild, p)


def test_multiply_by_s_rejects_active_impulse():
    derived = derive.multiply_by_s(get_pair("2"))
    with pytest.raises(DomainError):
        derived.image(PairParameters(1.0, 0.0, 0.5, -0.5))


def test_multiply_by_s_on_exponential_pair():
    a = 1.7
    p = PairParameters(1.0, a, 0.0, 0.0)
    base = derive.exponential_pair()
    derived = derive.multiply_by_s(base)
    s = np.array([0.5, 1.0, 3.0])
    assert rel_max(ev(derived.image(p), s), s / (s + a) - 1.0) <= 1e-14
    t = np.array([0.1, 0.6, 2.0])
    assert rel_max(derived.original(t, p), -a * np.exp(-a * t)) <= 1e-9
    for sk in (0.5, 1.0, 3.0):
        forward = laplace.forward_transform(lambda u: float(derived.original(u, p)), sk)
        image = ev(derived.image(p), np.array([sk]))[0]
        assert abs(forward - image) <= 1e-8 * abs(image)


def test_linear_combine_with_parameter_coefficients():
    comb = derive.linear_combine([(1.0, get_pair("3")), (lambda p: -p.y, get_pair("4"))])
    for p in PARAMS:
        assert rel_max(ev(comb.image(p)), ev(get_pair("8").image(p))) <= 1e-12
        t = np.array([0.3, 1.0])
        assert rel_max(comb.original(t, p), get_pair("8").original(t, p)) <= 1e-12


# ---------------------------------------------------------------------------
# re-derivation
# ---------------------------------------------------------------------------

@pytest.fixture(scope="module")
def steps():
    return derive.rederive_catalog()


def test_rederivation_targets(steps):
    matched = [s.target for s in steps if s.rule == "catalog_match"]
    assert matched == derive.derivation_targets() == ["1", "2", "5", "6", "7", "8", "9", "10"]


def test_every_step_certified(steps):
    assert all(s.rule in derive.RULES for s in steps)
    for s in steps:
        assert s.passed, s
        assert s.certificate <= 1e-10


def test_catalog_match_structural_and_numerical(steps):
    for s in steps:
        if s.rule == "catalog_match":
            assert s.detail["structural_residual"] <= 1e-12
            assert s.detail["numerical_residual"] <= 1e-10
            assert s.detail["original_residual"] <= 1e-10


def test_single_target_and_unknown_target():
    steps = derive.rederive_catalog(["8"])
    assert {s.target for s in steps} == {"8"}
    with pytest.raises(KeyError):
        derive.rederive_catalog(["3"])


def test_row8_confluence():
    assert derive.row8_confluence() <= 1e-12


def tampered(pid, factor=1.001):
    row = get_pair(pid)
    return replace(row, image=lambda p: row.image(p).scaled(factor))


@pytest.mark.parametrize("pid", ["3", "4"])
def test_tampered_base_fails(pid):
    with pytest.raises(CertificateError):
        derive.rederive_catalog(base_override={pid: tampered(pid)})
    steps = derive.rederive_catalog(base_override={pid: tampered(pid)}, strict=False)
    assert any(not s.passed for s in steps if s.rule == "catalog_match")


def test_trace_json(steps):
    doc = json.loads(derive.trace_json(steps))
    assert "schema_version" in doc
    assert len(doc["steps"]) == len(steps)
    assert all(step["passed"] for step in doc["steps"])
