from __future__ import absolute_import
from __future__ import division
import logging
import time
from fractions import Fraction
import numpy as np
from phstair import counting, exact_dist, martingale, stats, transform
from phstair.model import ModelParams, format_scalar
from phstair.report import EXACT_SECTION, MONTE_CARLO_SECTION, QUADRATURE_SECTION, VerificationReport
from phstair.series import TruncatedSeries, series_exp
from phstair.simulate import GENERATOR_NAME, simulate_ensemble


PMF_SWEEP = (Fraction(1, 10), Fraction(1, 3), Fraction(1, 2), Fraction(2, 3), Fraction(9, 10), Fraction(1))
PMF_HORIZON = 24
ZERO_COUNT_HORIZON = 64
RANDOM_Z_COUNT = 5
MOMENT_ORDERS = (1, 2, 3)

LAPLACE_P = (0.3, 0.7, 1.0)
LAPLACE_T = (0.1, 1.0, 5.0)
LAPLACE_HORIZON = 12
ROUTE_TOL = 1e-7
UNIT_TOL = 1e-12
GF_Z = (0.3, 0.5, 0.8)
GF_N = (5, 10, 20)
GF_T = 1.0

MARTINGALE_P = (0.3, 0.7)
MARTINGALE_HORIZON = 10
X_GRID = tuple(k / 10.0 for k in range(1, 10))
RESIDUAL_TOL = 1e-8
FAMILY_MATCH_TOL = 1e-9
DERIVATIVE_TOL = 1e-6
DERIVATIVE_HORIZONS = (1, 2, 5)

MC_LAWS = ((Fraction(1, 2), 5), (Fraction(9, 10), 8), (Fraction(1), 4))
MC_HORIZON = 5
JOINT_TRIPLES = 20
LAPLACE_MC = ((1.0, 2), (1.0, 5))
CONTROL_PATHS = 20000

logger = logging.getLogger(__name__)


def _label(p):
    if isinstance(p, float):
        return "%g" % p
    if Fraction(p).denominator == 1:
        return "%d" % Fraction(p).numerator
    return format_scalar(p)


def _first_mismatch(pairs):
    # pairs yields (key, observed, expected); returns the first unequal key.
    for key, observed, expected in pairs:
        if observed != expected:
            return key, observed, expected
    return None


def _add_equality(report, name, pairs):
    mismatch = _first_mismatch(pairs)
    if mismatch is None:
        report.add_check(EXACT_SECTION, name, True, "equal", "equal")
    else:
        key, observed, expected = mismatch
        report.add_check(EXACT_SECTION, name, False, "%s: %s" % (key, observed), expected)


def _max_error(report, section, name, errors, tolerance):
    worst = max(errors) if errors else 0.0
    report.add_check(section, name, worst <= tolerance, worst, 0.0, tolerance)


def exact_checks(report, config):
    # Zero-tolerance identities in rational arithmetic.
    sweep = list(PMF_SWEEP)
    if config.params.exact and config.params.p not in sweep:
        sweep.append(config.params.p)
    rng = np.random.default_rng(config.seed)
    zs = [Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 10))) for _ in range(RANDOM_Z_COUNT)]

    for p in sweep:
        tag = "p=%s" % _label(p)
        oracle = list(counting.pgf_oracle_sequence(p, PMF_HORIZON))
        tables = [counting.pmf(p, n) for n in range(PMF_HORIZON + 1)]
        horizon = range(PMF_HORIZON + 1)
        _add_equality(report, "pmf_equals_oracle[%s,n<=%d]" % (tag, PMF_HORIZON),
                      ((n, tables[n], counting.oracle_table(g, n)) for n, g in enumerate(oracle)))
        _add_equality(report, "closed_form_bivariate_equals_oracle[%s,n<=%d]" % (tag, PMF_HORIZON),
                      ((n, counting.closed_form_bivariate(p, n), g) for n, g in enumerate(oracle)))
        _add_equality(report, "closed_form_Gn_equals_oracle[%s,n<=%d,%d random z]" % (tag, PMF_HORIZON, len(zs)),
                      (((n, format_scalar(z)), counting.closed_form_Gn(p, n, z), g.at_z(z))
                       for n, g in enumerate(oracle) for z in zs))
        _add_equality(report, "pmf_normalised[%s,n<=%d]" % (tag, PMF_HORIZON),
                      ((n, tables[n].violations(), []) for n in horizon))
        _add_equality(report, "zero_count_probability[%s,n<=%d]" % (tag, ZERO_COUNT_HORIZON),
                      ((n, counting.pmf(p, n)[0], (1 - p) ** n) for n in range(ZERO_COUNT_HORIZON + 1)))
        _add_equality(report, "mean_count_telescoped_equals_pmf_mean[%s,n<=%d]" % (tag, PMF_HORIZON),
                      ((n, counting.mean_count(p, n), tables[n].mean()) for n in horizon))
        _add_equality(report, "mean_count_signed_binomial_equals_pmf_mean[%s,n<=%d]" % (tag, PMF_HORIZON),
                      ((n, counting.mean_count_signed_binomial(p, n), tables[n].mean()) for n in horizon))
        _add_equality(report, "mean_count_from_moments_equals_pmf_mean[%s,n<=%d]" % (tag, PMF_HORIZON),
                      ((n, counting.mean_count_from_moments(p, n), tables[n].mean()) for n in horizon))
        _add_equality(report, "mean_closed_form[%s,n<=%d]" % (tag, PMF_HORIZON),
                      ((n, exact_dist.moment(p, n, 1), exact_dist.mean_closed_form(p, n)) for n in horizon))
        _add_equality(report, "moment_recursion[%s,n<=%d]" % (tag, PMF_HORIZON),
                      (((n, m), exact_dist.moment(p, n, m), exact_dist.moment_by_recursion(p, n, m))
                       for n in horizon for m in MOMENT_ORDERS))
        xs = [Fraction(k, 7) for k in range(1, 7)]
        _add_equality(report, "marginal_cdf_recurrence[%s,n<=%d]" % (tag, PMF_HORIZON),
                      (((n, format_scalar(x)), exact_dist.marginal_cdf_by_recurrence(p, n, x), exact_dist.marginal_cdf(p, n, x))
                       for n in horizon for x in xs))
        _add_equality(report, "joint_survival_single_threshold[%s]" % tag,
                      ((format_scalar(x), exact_dist.joint_survival(p, [x]), 1 - exact_dist.marginal_cdf(p, 1, x)) for x in xs))

    a = TruncatedSeries([0] + [Fraction(1, k + 1) for k in range(1, 9)])
    b = TruncatedSeries([0] + [Fraction((-1) ** k, k) for k in range(1, 9)])
    _add_equality(report, "series_exp_of_sum_is_product",
                  [("order 8", series_exp(a + b), series_exp(a) * series_exp(b))])


def quadrature_checks(report, config):
    rel_tol = config.tolerances.quad_rel_tol

    for p in LAPLACE_P:
        errors = []
        for k in range(1, LAPLACE_HORIZON + 1):
            closed = transform.ck_closed_form_t0(p, 1.0, k)
            errors.append(abs(transform.ck_quadrature(p, 0.0, 1.0, k, rel_tol) - closed) / abs(closed))
        _max_error(report, QUADRATURE_SECTION, "ck_quadrature_matches_t0_closed_form[p=%g]" % p, errors, rel_tol)

        unit = transform.laplace_partial_sums(p, 0.0, LAPLACE_HORIZON)
        _max_error(report, QUADRATURE_SECTION, "laplace_at_t0_is_one[p=%g]" % p, [abs(w - 1.0) for w in unit], UNIT_TOL)

        for t in LAPLACE_T:
            grid = transform.laplace_oracle_grid(p, t, LAPLACE_HORIZON)
            series = transform.laplace_partial_sums(p, t, LAPLACE_HORIZON, 1.0, rel_tol)
            _max_error(report, QUADRATURE_SECTION, "laplace_routes_agree[p=%g,t=%g,n<=%d]" % (p, t, LAPLACE_HORIZON),
                       [abs(series[n] - grid.at_one(n)) for n in range(LAPLACE_HORIZON + 1)], ROUTE_TOL)

        for z in GF_Z:
            for N in GF_N:
                gap, bound = transform.gf_tail_gap(p, GF_T, 1.0, z, N, rel_tol)
                report.add_check(QUADRATURE_SECTION, "gf_tail_bound[p=%g,t=%g,z=%g,N=%02d]" % (p, GF_T, z, N),
                                 gap <= bound, gap, "z^(N+1)/(1-z)", bound)

    for p in MARTINGALE_P:
        closed = martingale.closed_form_family(p)
        numeric = martingale.build_family(martingale.SeedFunction.log_seed(p), p, MARTINGALE_HORIZON, rel_tol=rel_tol)
        control = martingale.coordinate_family(p)
        residuals = []
        matches = []
        control_gaps = []
        for n in range(1, MARTINGALE_HORIZON + 1):
            for x in X_GRID:
                residuals.append(abs(martingale.martingale_residual(closed, n, x, rel_tol)) / (1.0 + abs(closed(n - 1, x))))
                matches.append(abs(numeric(n, x) - closed(n, x)) / (1.0 + abs(closed(n, x))))
                control_gaps.append(abs(martingale.martingale_residual(control, n, x, rel_tol) + p * x * x / 2.0))
        _max_error(report, QUADRATURE_SECTION, "martingale_residual_closed_form[p=%g,n<=%d]" % (p, MARTINGALE_HORIZON),
                   residuals, RESIDUAL_TOL)
        _max_error(report, QUADRATURE_SECTION, "martingale_quadrature_matches_closed_form[p=%g,n<=%d]" % (p, MARTINGALE_HORIZON),
                   matches, FAMILY_MATCH_TOL)
        _max_error(report, QUADRATURE_SECTION, "martingale_negative_control_residual[p=%g,n<=%d]" % (p, MARTINGALE_HORIZON),
                   control_gaps, RESIDUAL_TOL)
        _max_error(report, QUADRATURE_SECTION, "martingale_value_at_zero[p=%g,n<=%d]" % (p, MARTINGALE_HORIZON),
                   [abs(numeric(n, 0.0) - numeric.seed.value_at_zero) for n in range(MARTINGALE_HORIZON + 1)], UNIT_TOL)
        _max_error(report, QUADRATURE_SECTION, "martingale_derivative_relation[p=%g]" % p,
                   [martingale.derivative_relation_gap(numeric, n, x) for n in DERIVATIVE_HORIZONS for x in X_GRID],
                   DERIVATIVE_TOL)


def _law_gates(report, params, n, ensemble, alpha):
    tag = "p=%s,n=%d" % (_label(params.p), n)
    law = exact_dist.MarginalLaw(params.p, n)
    report.add_gate(MONTE_CARLO_SECTION, stats.dkw_cdf_gate(ensemble.final_states(), law, alpha,
                                                            name="dkw_marginal_cdf[%s]" % tag))
    counts = np.bincount(ensemble.counts(), minlength=n + 1)
    report.add_gate(MONTE_CARLO_SECTION, stats.chi_square_gate(counts, counting.pmf(params.p, n), alpha,
                                                               name="chi_square_counts[%s]" % tag))


def monte_carlo_checks(report, config):
    alpha = config.tolerances.mc_alpha
    m = config.paths
    seed = config.seed
    params = config.params
    rel_tol = config.tolerances.quad_rel_tol

    laws = [(ModelParams(p), n) for p, n in MC_LAWS]
    if all(law.p != params.p for law, _ in laws):
        laws.append((params, MC_HORIZON))
    base = None
    for law_params, n in laws:
        ensemble = simulate_ensemble(law_params, n, m, seed)
        _law_gates(report, law_params, n, ensemble, alpha)
        if law_params.p == params.p:
            base = ensemble
    # The moment and joint gates below read steps up to base_horizon.
    base_horizon = max([MC_HORIZON, 3] + [n for _, n in LAPLACE_MC])
    if base.n < base_horizon:
        base = simulate_ensemble(params, base_horizon, m, seed)

    p = params.p
    tag = "p=%s" % _label(p)
    rng = np.random.default_rng(seed)
    states = base.states[:, 1:4]
    for i in range(JOINT_TRIPLES):
        thresholds = [float(x) for x in np.floor(rng.random(3) * 1000) / 1000]
        exact = exact_dist.joint_survival(params.p_float, thresholds)
        hits = int(np.count_nonzero(np.all(states > np.array(thresholds), axis=1)))
        report.add_gate(MONTE_CARLO_SECTION, stats.binomial_frequency_gate(
            hits, m, exact, "prod (1 - p max(x_i..x_n)); thresholds %s" % thresholds,
            name="joint_survival[%s,n=3,#%02d]" % (tag, i)))

    report.add_gate(MONTE_CARLO_SECTION, stats.moment_gate(
        base.states_at(1), exact_dist.moment(params.p_float, 1, 1), "E[X_1] = 1 - p/2", name="mean_X[%s,n=1]" % tag))
    report.add_gate(MONTE_CARLO_SECTION, stats.moment_gate(
        base.final_states(), exact_dist.moment(params.p_float, base.n, 1), "E[X_n] = (1 - (1-p)^(n+1)) / (p (n+1))",
        name="mean_X[%s,n=%d]" % (tag, base.n)))
    report.add_gate(MONTE_CARLO_SECTION, stats.moment_gate(
        base.counts(), counting.mean_count(params.p_float, base.n), "E[N_n] = sum_i (1 - (1-p)^i) / i",
        name="mean_N[%s,n=%d]" % (tag, base.n)))
    for t, n in LAPLACE_MC:
        exact = transform.laplace_partial_sum(params.p_float, transform.LaplaceQuery(t, n), rel_tol)
        report.add_gate(MONTE_CARLO_SECTION, stats.moment_gate(
            np.exp(-t * base.partial_sums(n)), exact, "W_n(1) = sum_i ((1-p)e^-t)^(n-i) V_i",
            name="laplace_mean[%s,t=%g,n=%d]" % (tag, t, n)))

    # The example family is singular at x = 1 when p = 1.
    mp = params.p_float if params.p_float < 1 else 0.5
    family = martingale.closed_form_family(mp)
    for gate in martingale.mc_martingale_check(family, ModelParams(mp), 1, config.martingale_paths, seed, rel_tol=rel_tol):
        report.add_gate(MONTE_CARLO_SECTION, gate._replace(name="%s[p=%g]" % (gate.name, mp)))
    control = martingale.mc_martingale_check(martingale.coordinate_family(mp), ModelParams(mp), 1,
                                             max(CONTROL_PATHS, stats.MIN_GATE_SAMPLE), seed, state_checks=0)[0]
    report.add_check(MONTE_CARLO_SECTION, "martingale_negative_control_rejected[p=%g]" % mp, not control.passed,
                     control.detail["mean"], "E[X_1] = %s differs from f_0(1) = 1" % (1 - mp / 2), control.threshold)


SECTION_RUNNERS = (
    (EXACT_SECTION, exact_checks),
    (QUADRATURE_SECTION, quadrature_checks),
    (MONTE_CARLO_SECTION, monte_carlo_checks),
)


def run_verification(config):
    """Run every section in order and collect the results. A failing check
    does not stop the run.
    """
    report = VerificationReport(config, GENERATOR_NAME)
    for section, runner in SECTION_RUNNERS:
        started = time.perf_counter()
        runner(report, config)
        report.timings[section] = time.perf_counter() - started
        logger.info("Section %s finished in %.1fs", section, report.timings[section])
    total, failed = report.counts()
    logger.info("%d checks, %d failed", total, failed)
    return report
