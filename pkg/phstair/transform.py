from __future__ import absolute_import
from __future__ import division
import collections
import math
import numpy as np
from phstair.errors import DomainError, PreconditionError
from phstair.model import DEFAULT_QUAD_REL_TOL
from phstair.quadrature import cumulative_integral, integrate
from phstair.series import TruncatedSeries, series_exp


MIN_GRID_NODES = 256
DEFAULT_GRID_NODES = 1024


class LaplaceQuery(collections.namedtuple("LaplaceQuery", ["t", "n", "x", "K"])):
    # Asks for W_n(x) = E[exp(-t S_n) | X_0 = x] with the series cut off at
    # order K. K defaults to n, the last order that enters W_n.
    __slots__ = ()

    def __new__(cls, t, n, x=1.0, K=None):
        if K is None:
            K = n
        if t < 0:
            raise DomainError("Laplace argument t must be nonnegative, got %r." % (t,))
        if n < 0:
            raise PreconditionError("Horizon n must be nonnegative, got %d." % n)
        if not 0 < x <= 1:
            raise DomainError("Initial state must lie in (0, 1], got %r." % (x,))
        if K < n:
            raise PreconditionError("Truncation order K=%d is below the horizon n=%d." % (K, n))
        return super(LaplaceQuery, cls).__new__(cls, float(t), int(n), float(x), int(K))


def _check_ck_args(t, x, k):
    if k < 1:
        raise PreconditionError("Index k must be at least 1, got %d." % k)
    if t < 0:
        raise DomainError("Laplace argument t must be nonnegative, got %r." % (t,))
    if not 0 <= x <= 1:
        raise DomainError("Upper limit x must lie in [0, 1], got %r." % (x,))


def ck_closed_form_t0(p, x, k):
    # c_k(x) at t = 0: (1 - (1 - p x)^k) / k.
    return (1.0 - (1.0 - p * x) ** k) / k


def ck_quadrature(p, t, x, k, rel_tol=DEFAULT_QUAD_REL_TOL):
    # c_k(x) = p int_0^x exp(-t k s) (1 - p s)^(k-1) ds by quadrature only.
    _check_ck_args(t, x, k)
    p = float(p)
    return integrate(lambda s: p * np.exp(-t * k * s) * (1.0 - p * s) ** (k - 1), 0.0, float(x), rel_tol)


def ck(p, t, x, k, rel_tol=DEFAULT_QUAD_REL_TOL):
    _check_ck_args(t, x, k)
    if x == 0:
        return 0.0
    if t == 0:
        return ck_closed_form_t0(float(p), float(x), k)
    return ck_quadrature(p, t, x, k, rel_tol)


def _expansion(p, query, rel_tol):
    # c_1..c_K, their exponential series V_0..V_K, and the per-step factor
    # (1 - p x) exp(-t x) of staying put.
    p = float(p)
    c = [0.0] + [ck(p, query.t, query.x, k, rel_tol) for k in range(1, query.K + 1)]
    v = series_exp(TruncatedSeries(c), query.K)
    stay = (1.0 - p * query.x) * math.exp(-query.t * query.x)
    return stay, v


def laplace_partial_sums(p, t, n, x=1.0, rel_tol=DEFAULT_QUAD_REL_TOL):
    # W_0(x)..W_n(x) from one expansion, W_m = sum_{i<=m} stay^(m-i) V_i.
    stay, v = _expansion(p, LaplaceQuery(t, n, x), rel_tol)
    return [math.fsum(stay ** (m - i) * v[i] for i in range(m + 1)) for m in range(n + 1)]


def laplace_partial_sum(p, query, rel_tol=DEFAULT_QUAD_REL_TOL):
    stay, v = _expansion(p, query, rel_tol)
    n = query.n
    return math.fsum(stay ** (n - i) * v[i] for i in range(n + 1))


class LaplaceGrid(object):
    # W_0..W_n sampled on a uniform grid over [0, 1].
    def __init__(self, xs, values):
        self.xs = xs
        self.values = values

    @property
    def n(self):
        return self.values.shape[0] - 1

    def at_one(self, n):
        return float(self.values[n, -1])

    def at(self, n, x):
        return float(np.interp(x, self.xs, self.values[n]))


def laplace_oracle_grid(p, t, n, nodes=DEFAULT_GRID_NODES):
    # Iterate W_k(x) = (1 - p x) exp(-t x) W_{k-1}(x) + p int_0^x exp(-t y)
    # W_{k-1}(y) dy from W_0 = 1 on a fixed grid, with cumulative Simpson
    # integrals.
    if nodes < MIN_GRID_NODES:
        raise PreconditionError("Grid needs at least %d nodes, got %d." % (MIN_GRID_NODES, nodes))
    if t < 0:
        raise DomainError("Laplace argument t must be nonnegative, got %r." % (t,))
    if n < 0:
        raise PreconditionError("Horizon n must be nonnegative, got %d." % n)
    p = float(p)
    xs = np.linspace(0.0, 1.0, nodes)
    decay = np.exp(-t * xs)
    values = np.empty((n + 1, nodes))
    values[0] = 1.0
    for k in range(1, n + 1):
        previous = values[k - 1]
        values[k] = (1.0 - p * xs) * decay * previous + p * cumulative_integral(decay * previous, xs)
    return LaplaceGrid(xs, values)


def gf_closed_form(p, t, x, z, rel_tol=DEFAULT_QUAD_REL_TOL):
    # H(x, z) = sum_n W_n(x) z^n in closed form, for |z| < 1.
    if not abs(z) < 1:
        raise DomainError("Generating function is evaluated only for |z| < 1, got %r." % (z,))
    if t < 0:
        raise DomainError("Laplace argument t must be nonnegative, got %r." % (t,))
    if not 0 <= x <= 1:
        raise DomainError("x must lie in [0, 1], got %r." % (x,))
    if z == 0:
        return 1.0
    p, x, z = float(p), float(x), float(z)

    def integrand(s):
        decay = np.exp(-t * s)
        return p * z * decay / (1.0 - z * (1.0 - p * s) * decay)

    exponent = integrate(integrand, 0.0, x, rel_tol)
    return math.exp(exponent) / (1.0 - z * (1.0 - p * x) * math.exp(-t * x))


def gf_tail_gap(p, t, x, z, N, rel_tol=DEFAULT_QUAD_REL_TOL):
    # Return |sum_{n<=N} W_n(x) z^n - H(x, z)| and the bound |z|^(N+1)/(1-|z|)
    # it must respect, since 0 < W_n <= 1.
    w = laplace_partial_sums(p, t, N, x, rel_tol)
    partial = math.fsum(w_n * z ** n for n, w_n in enumerate(w))
    gap = abs(partial - gf_closed_form(p, t, x, z, rel_tol))
    bound = abs(z) ** (N + 1) / (1.0 - abs(z))
    return gap, bound
