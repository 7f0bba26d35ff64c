from __future__ import absolute_import
from __future__ import division
import numpy as np
from phstair import stats
from phstair.errors import DomainError, PreconditionError, SingularDomain
from phstair.model import DEFAULT_QUAD_REL_TOL
from phstair.quadrature import cumulative_gauss_legendre, integrate
from phstair.simulate import simulate_ensemble


# With p = 1 the integrand (1 - p t)^(-n) blows up at t = 1, so evaluations
# stop short of it.
SINGULAR_CAP = 1.0 - 1e-6
DERIVATIVE_STEP = 1e-5
# Fixed cuts for array evaluation: a uniform grid plus cuts graded toward 1.
BREAKPOINTS = np.union1d(np.linspace(0.0, 1.0, 65)[1:-1], 1.0 - 2.0 ** -np.arange(1.0, 21.0))

NUMERIC = "numeric-from-seed"
CLOSED_FORM = "closed-form-example"
CUSTOM = "custom"


def default_domain_cap(p):
    return SINGULAR_CAP if p == 1 else 1.0


def _breakpoints_below(top):
    return BREAKPOINTS[BREAKPOINTS < top]


class SeedFunction(object):
    # f_0 with its derivative and its limit at 0. value and derivative accept
    # scalars or arrays.
    def __init__(self, value, derivative, value_at_zero, name="seed"):
        self.value = value
        self.derivative = derivative
        self.value_at_zero = value_at_zero
        self.name = name

    @classmethod
    def constant(cls, c):
        c = float(c)
        return cls(lambda x: np.full(np.shape(x), c) if np.ndim(x) else c,
                   lambda x: np.zeros(np.shape(x)) if np.ndim(x) else 0.0,
                   c, name="constant %g" % c)

    @classmethod
    def log_seed(cls, p):
        # f_0(x) = -(1/p) ln(1 - p x), whose family has a closed form.
        p = float(p)
        return cls(lambda x: -np.log1p(-p * np.asarray(x, dtype=float)) / p,
                   lambda x: 1.0 / (1.0 - p * np.asarray(x, dtype=float)),
                   0.0, name="-(1/p) ln(1 - p x)")


class MartingaleFamily(object):
    # A rule n, x -> f_n(x) on 0 <= x <= domain_cap, tagged with where it came
    # from.
    def __init__(self, p, rule, provenance, seed=None, domain_cap=None, n_max=None):
        self.p = float(p)
        self.rule = rule
        self.provenance = provenance
        self.seed = seed
        self.domain_cap = default_domain_cap(self.p) if domain_cap is None else domain_cap
        self.n_max = n_max

    def check_domain(self, n, x):
        if n < 0 or (self.n_max is not None and n > self.n_max):
            raise DomainError("Index n=%d is outside the family's range." % n)
        if np.size(x) == 0:
            return
        top = np.max(x) if np.ndim(x) else x
        bottom = np.min(x) if np.ndim(x) else x
        if bottom < 0 or top > self.domain_cap:
            raise DomainError("x must lie in [0, %.9g] for this family, got %r." % (self.domain_cap, top))

    def __call__(self, n, x):
        self.check_domain(n, x)
        return self.rule(n, x)

    def __repr__(self):
        return "MartingaleFamily(p=%g, provenance=%s)" % (self.p, self.provenance)


def build_family(seed, p, n_max, x_domain_cap=None, rel_tol=DEFAULT_QUAD_REL_TOL):
    """The family f_n(x) = f_0(0) + int_0^x f_0'(t) / (1 - p t)^n dt, each
    value by adaptive quadrature. f_0 itself is evaluated directly.
    """
    p = float(p)
    if x_domain_cap is None:
        x_domain_cap = default_domain_cap(p)
    if p == 1 and x_domain_cap >= 1:
        raise SingularDomain("With p = 1 the representation is singular at x = 1; use a cap below 1.")
    if not 0 < x_domain_cap <= 1:
        raise DomainError("Domain cap must lie in (0, 1], got %r." % (x_domain_cap,))

    def value(n, x):
        if n == 0:
            return seed.value(x)
        return seed.value_at_zero + integrate(lambda t: seed.derivative(t) / (1.0 - p * t) ** n, 0.0, x, rel_tol)

    def values(n, x):
        # One running integral over the sorted distinct points.
        xs = np.asarray(x, dtype=float)
        if xs.size == 0:
            return np.empty(xs.shape)
        points, inverse = np.unique(xs.ravel(), return_inverse=True)
        edges = np.union1d(np.concatenate([[0.0], points]), _breakpoints_below(points[-1]))
        running = cumulative_gauss_legendre(lambda t: seed.derivative(t) / (1.0 - p * t) ** n, edges, rel_tol)
        result = seed.value_at_zero + running[np.searchsorted(edges, points)]
        return result[inverse].reshape(xs.shape)

    def rule(n, x):
        if n == 0:
            return seed.value(x)
        if np.ndim(x) == 0:
            return value(n, float(x))
        return values(n, x)

    return MartingaleFamily(p, rule, NUMERIC, seed=seed, domain_cap=x_domain_cap, n_max=n_max)


def example_family(p, n, x):
    # f_0(x) = -(1/p) ln(1 - p x) and f_n(x) = ((1 - p x)^(-n) - 1) / (p n).
    p = float(p)
    if n < 0:
        raise PreconditionError("Index n must be nonnegative, got %d." % n)
    xs = np.asarray(x, dtype=float)
    if np.any(xs < 0) or np.any(xs > 1):
        raise DomainError("x must lie in [0, 1], got %r." % (x,))
    if p == 1 and np.any(xs == 1):
        raise SingularDomain("The example family is singular at p = 1, x = 1.")
    if n == 0:
        result = -np.log1p(-p * xs) / p
    else:
        result = ((1.0 - p * xs) ** (-n) - 1.0) / (p * n)
    if np.ndim(x) == 0:
        return float(result)
    return result


def closed_form_family(p):
    return MartingaleFamily(p, lambda n, x: example_family(p, n, x), CLOSED_FORM, seed=SeedFunction.log_seed(p))


def coordinate_family(p):
    # f_n(x) = x for every n. X_n is a supermartingale, not a martingale, so
    # this family must fail every check.
    return MartingaleFamily(p, lambda n, x: x, CUSTOM, domain_cap=1.0)


def conditional_expectation(family, n, x, rel_tol=DEFAULT_QUAD_REL_TOL):
    # E[f_n(X_n) | X_{n-1} = x] = (1 - p x) f_n(x) + p int_0^x f_n(y) dy.
    family.check_domain(n, x)
    p = family.p
    return (1.0 - p * x) * family(n, x) + p * integrate(lambda y: family(n, y), 0.0, x, rel_tol)


def martingale_residual(family, n, x, rel_tol=DEFAULT_QUAD_REL_TOL):
    if n < 1:
        raise PreconditionError("The residual needs n >= 1, got %d." % n)
    return conditional_expectation(family, n, x, rel_tol) - family(n - 1, x)


def residual_tolerance(family, n, x, rel_tol=DEFAULT_QUAD_REL_TOL):
    return 10.0 * rel_tol * (1.0 + abs(family(n - 1, x)))


def derivative_relation_gap(family, n, x, h=DERIVATIVE_STEP):
    # |(1 - p x)^n f_n'(x) - f_0'(x)| with f_n' from a central difference.
    if family.seed is None:
        raise PreconditionError("The derivative relation needs a family with a known seed.")
    slope = (family(n, x + h) - family(n, x - h)) / (2.0 * h)
    return abs((1.0 - family.p * x) ** n * slope - float(family.seed.derivative(x)))


def initial_value(family):
    # f_0(1) is read past the domain cap, which only bounds f_n for n >= 1.
    if family.seed is not None:
        with np.errstate(divide="ignore"):
            value = float(family.seed.value(1.0))
    else:
        value = float(family.rule(0, 1.0))
    if not np.isfinite(value):
        raise SingularDomain("f_0(1) is not finite for this family, so E[f_n(X_n)] has no target.")
    return value


def mc_martingale_check(family, params, n, m, master_seed, state_checks=5, rel_tol=DEFAULT_QUAD_REL_TOL):
    # Check E[f_n(X_n)] = f_0(1) on m simulated paths, then the one-step
    # conditional means at a few sampled states X_{n-1}. Paths that leave the
    # family's domain are dropped and counted.
    if n < 1:
        raise PreconditionError("The Monte Carlo check needs n >= 1, got %d." % n)
    target = initial_value(family)
    ensemble = simulate_ensemble(params, n, m, master_seed)
    finals = ensemble.final_states()
    inside = finals <= family.domain_cap
    values = family(n, finals[inside])
    mean_gate = stats.moment_gate(values, target, reference="E[f_n(X_n)] = f_0(X_0) = f_0(1)",
                                  name="martingale_mean_n%d" % n)
    mean_gate.detail["dropped_paths"] = int(np.count_nonzero(~inside))
    reports = [mean_gate]

    previous = ensemble.states_at(n - 1)
    candidates = np.unique(previous[(previous > 0) & (previous <= family.domain_cap)])
    chosen = candidates[::max(1, len(candidates) // state_checks)][:state_checks] if state_checks > 0 else []
    for i, x in enumerate(chosen):
        x = float(x)
        residual = martingale_residual(family, n, x, rel_tol)
        reports.append(stats.GateReport("martingale_one_step_n%d_state%d" % (n, i), abs(residual),
                                        residual_tolerance(family, n, x, rel_tol), 1,
                                        "(1 - p x) f_n(x) + p int_0^x f_n = f_{n-1}(x)",
                                        {"x": x, "residual": residual}))
    return reports
