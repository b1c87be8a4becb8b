"""Acceptance suite: the eight end-to-end criteria at their stated tolerances.

Each test wraps its checks in ``criterion(n, title)`` so the terminal summary
reports one PASS/FAIL line per criterion.  Run just this file with
``pytest tests/test_acceptance.py -v``.
"""

import math
import time

import numpy as np
import pytest
from scipy import integrate

import identity_checks
from anchor_maps import density_from_row3, distribution_from_row4
from pcflaplace import cli, derive, laplace, pairs, specfun
from pcflaplace.ouprocess import (
    OUParameters,
    StateQuery,
    conditional_mean,
    conditional_variance,
    empirical_cdf_check,
    histogram_check,
    laplace_density,
    laplace_distribution,
    transition_density,
    transition_distribution,
)

CANCELLATION_ROWS = {"5", "6", "8", "9"}


@pytest.fixture(scope="module")
def sweep():
    """Forward, inverse and cross reports for all 14 entries on their default grids."""
    start = time.perf_counter()
    reports = {pid: pairs.verify_pair(pairs.get_pair(pid)) for pid in pairs.pair_ids()}
    return reports, time.perf_counter() - start


def _describe(report, kind):
    bad = [p for p in report.failures() if p.kind == kind][:3]
    return f"pair {report.pair_id}: " + "; ".join(f"{p.coords} residual={p.residual:.3g} {p.error or ''}"
                                                  for p in bad)


@pytest.mark.slow
def test_criterion_1_catalog_forward(criterion, sweep):
    with criterion(1, "catalog forward verification"):
        reports, elapsed = sweep
        assert len(reports) == 14
        for pid, report in reports.items():
            fwd = [p for p in report.points if p.kind == "forward"]
            assert len(fwd) >= 60, (pid, len(fwd))
            expected_tol = 1e-5 if pid in CANCELLATION_ROWS else 1e-6
            assert all(p.tolerance == expected_tol for p in fwd)
            assert all(p.passed for p in fwd), _describe(report, "forward")
        assert elapsed < 600


@pytest.mark.slow
def test_criterion_2_catalog_inverse(criterion, sweep):
    with criterion(2, "catalog inverse verification and Talbot/Euler agreement"):
        reports, _ = sweep
        for pid, report in reports.items():
            inv = [p for p in report.points if p.kind == "inverse"]
            cross = [p for p in report.points if p.kind == "cross"]
            assert {p.coords["t"] for p in inv} == {0.1, 0.5, 1.0, 2.0}
            assert len(cross) == len(inv)
            assert all(p.tolerance == 1e-4 for p in inv) and all(p.tolerance == 1e-6 for p in cross)
            assert all(p.passed for p in inv), _describe(report, "inverse")
            assert all(p.passed for p in cross), _describe(report, "cross")


def test_criterion_3_identity_suite(criterion):
    with criterion(3, "special-function identities over 200 draws"):
        v, z = identity_checks.draw_points(200)
        assert len(v) == 200
        for check in (identity_checks.recurrence_residual, identity_checks.wronskian_residual,
                      identity_checks.product_identity_residual, identity_checks.derivative_residual,
                      identity_checks.antiderivative_residual):
            res = check(v, z)
            assert np.max(res) <= 1e-8, (check.__name__, float(np.max(res)))
        # order zero is the Gaussian
        zz = np.linspace(-12, 12, 97)
        d0 = specfun.pcf_d(0.0, zz)
        assert np.max(np.abs(d0 - np.exp(-zz * zz / 4)) / np.exp(-zz * zz / 4)) <= 1e-12
        # value at the origin from the gamma function
        for order in v:
            ref = 2 ** (order / 2) * math.sqrt(math.pi) * specfun.rgamma((1 - order) / 2)
            assert abs(specfun.pcf_d(order, 0.0) - ref) <= 1e-12 * abs(ref)


def _ou_cases(n, seed):
    rng = np.random.default_rng(seed)
    for _ in range(n):
        p = OUParameters(alpha=rng.uniform(-1, 1), beta=rng.uniform(0.3, 2.5), sigma=rng.uniform(0.5, 2.0))
        yield p, rng.uniform(-1, 1), rng.uniform(0.05, 3.0)


def test_criterion_4_ou_consistency(criterion):
    with criterion(4, "OU law consistency"):
        for p, w0, t in _ou_cases(10, 41):
            m, sd = conditional_mean(w0, t, p), math.sqrt(conditional_variance(t, p))
            f = lambda w: transition_density(StateQuery(w, w0, t), p)
            total, _ = integrate.quad(f, m - 12 * sd, m + 12 * sd, epsabs=0, epsrel=1e-13, points=[m])
            assert abs(total - 1.0) <= 1e-10
            for w in (m - 2 * sd, m + 0.5 * sd, m + 3 * sd):
                run, _ = integrate.quad(f, m - 12 * sd, w, epsabs=1e-14, epsrel=1e-13)
                assert abs(transition_distribution(StateQuery(w, w0, t), p) - run) <= 1e-9
        sqrt_quad = laplace.QuadratureConfig(endpoint_substitution="sqrt")
        for p, w0, _ in _ou_cases(4, 42):
            for s in (0.5, 1.0, 2.0 + 1.5j):
                for w in (w0 - 0.7, w0, w0 + 1.1):
                    cfg = sqrt_quad if w == w0 else laplace.QuadratureConfig()
                    ref = laplace.forward_transform(lambda t: transition_density(StateQuery(w, w0, t), p), s, cfg)
                    assert abs(laplace_density(w, s, w0, p) - ref) <= 1e-6 * abs(ref)
                for w1 in (w0, w0 + 0.4, w0 + 1.5):
                    ref = laplace.forward_transform(
                        lambda t: transition_distribution(StateQuery(w1, w0, t), p), s)
                    assert abs(laplace_distribution(w1, s, w0, p) - ref) <= 1e-6 * abs(ref)
                # twenty stationary standard deviations above the long-run mean and the source
                sd_inf = p.sigma / math.sqrt(2 * p.beta)
                w_far = max(w0, p.alpha / p.beta) + 20 * sd_inf
                assert abs(laplace_distribution(w_far, s, w0, p) - 1 / s) <= 1e-8


def test_criterion_5_monte_carlo(criterion):
    with criterion(5, "Monte Carlo KS and histogram oracle"):
        p = OUParameters(0.0, 1.0, math.sqrt(2.0))
        q = StateQuery(0.0, 0.5, 1.0)
        start = time.perf_counter()
        ks = empirical_cdf_check(10 ** 6, q, p, seed=20261016)
        hist = histogram_check(10 ** 6, q, p, seed=20261016, bins=60)
        elapsed = time.perf_counter() - start
        assert ks.passed, ks.points
        assert hist.passed and len(hist.points) == 60, hist.failures()[:3]
        assert elapsed < 60.0


def test_criterion_6_rederivation(criterion):
    with criterion(6, "rows 1, 2, 5-10 re-derived from rows 3 and 4"):
        steps = derive.rederive_catalog()
        matched = [s for s in steps if s.rule == "catalog_match"]
        assert [s.target for s in matched] == ["1", "2", "5", "6", "7", "8", "9", "10"]
        assert all(s.certificate <= 1e-10 for s in steps)
        for s in matched:
            assert s.detail["structural_residual"] <= 1e-10
            assert s.detail["numerical_residual"] <= 1e-10


ANCHOR_CASES = [(OUParameters(0.0, 1.0, math.sqrt(2)), -0.3, 0.4),
                (OUParameters(0.4, 0.7, 1.1), 0.2, 1.5),
                (OUParameters(-0.5, 1.8, 0.6), -0.1, -0.05),
                (OUParameters(1.2, 2.4, 0.8), 0.9, 0.1)]
ANCHOR_T = np.array([0.05, 0.1, 0.3, 0.7, 1.0, 1.5, 2.5, 4.0])


def test_criterion_7_probabilistic_anchors(criterion):
    with criterion(7, "rows 3 and 4 reproduce the OU law"):
        for p, a, b in ANCHOR_CASES:
            for w, w0 in ((a, b), (b, a)):
                got = density_from_row3(w, w0, ANCHOR_T, p)
                ref = np.array([transition_density(StateQuery(w, w0, t), p) for t in ANCHOR_T])
                assert np.max(np.abs(got - ref) / ref) <= 1e-12
            lo, hi = min(a, b), max(a, b)
            got = distribution_from_row4(hi, lo, ANCHOR_T, p)
            ref = np.array([transition_distribution(StateQuery(hi, lo, t), p) for t in ANCHOR_T])
            assert np.max(np.abs(got - ref)) <= 1e-10


@pytest.mark.slow
def test_criterion_8_verify_all(criterion, tmp_path, capsys):
    with criterion(8, "verify --all exits 0"):
        code = cli.main(["verify", "--all", "--out", str(tmp_path)])
        out = capsys.readouterr().out
        assert code == 0, out
        assert sorted(f.name for f in tmp_path.iterdir()) == sorted(
            f"report-{pid}.json" for pid in pairs.pair_ids())
        assert out.count(" PASS ") == 14
