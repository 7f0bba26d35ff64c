from __future__ import absolute_import
from __future__ import division
import math
import numpy as np
from phstair.errors import DomainError, PreconditionError
from phstair.model import is_exact, one_like, zero_like


def _check_horizon(n):
    if n < 0:
        raise PreconditionError("Time index n must be nonnegative, got %d." % n)


def _check_threshold(x):
    if not 0 < x <= 1:
        raise DomainError("Threshold must lie in (0, 1], got %r." % (x,))


def continuous_cdf(p, n, x):
    # The continuous part 1 - (1 - p*x)^n of the law of X_n. Its value at x = 1
    # is the left limit of the CDF there.
    _check_horizon(n)
    _check_threshold(x)
    return 1 - (1 - p * x) ** n


def atom_at_one(p, n):
    _check_horizon(n)
    return (1 - p) ** n


def marginal_cdf(p, n, x):
    # P(X_n <= x), right-continuous. The law has a continuous part on (0, 1)
    # and an atom of mass (1 - p)^n at 1.
    _check_horizon(n)
    _check_threshold(x)
    if x == 1:
        return one_like(p)
    return 1 - (1 - p * x) ** n


def marginal_parts(p, n, x):
    # Return (continuous part, atom) at x. The atom contributes only at x = 1.
    atom = atom_at_one(p, n) if x == 1 else zero_like(p)
    return continuous_cdf(p, n, x), atom


def marginal_cdf_by_recurrence(p, n, x):
    # P(X_n <= x) for 0 < x < 1 from the one-step recurrence a_k = p*x + (1 -
    # p*x)*a_{k-1}, a_0 = 0.
    _check_horizon(n)
    _check_threshold(x)
    if x == 1:
        return one_like(p)
    a = zero_like(p)
    for _ in range(n):
        a = p * x + (1 - p * x) * a
    return a


def conditional_cdf(p, x, previous):
    # P(X_n <= x | X_{n-1} = previous).
    if not 0 < previous <= 1:
        raise DomainError("Previous state must lie in (0, 1], got %r." % (previous,))
    if x <= 0:
        return zero_like(p)
    if x >= previous:
        return one_like(p)
    return p * x


def joint_survival(p, thresholds):
    # P(X_1 > x_1, ..., X_n > x_n) as the product of (1 - p*M_i) over the
    # suffix maxima M_i = max(x_i, ..., x_n).
    if len(thresholds) < 1:
        raise PreconditionError("At least one threshold is required.")
    for x in thresholds:
        if not 0 <= x < 1:
            raise DomainError("Joint survival thresholds must lie in [0, 1), got %r." % (x,))
    result = one_like(p)
    suffix_max = None
    for x in reversed(thresholds):
        if suffix_max is None or x > suffix_max:
            suffix_max = x
        result *= 1 - p * suffix_max
    return result


def moment(p, n, m):
    # E[X_n^m] = m * sum_j C(n, j) (-p)^j / (m + j). Exact for rational p;
    # float p uses compensated summation over the alternating terms.
    _check_horizon(n)
    if m < 1:
        raise PreconditionError("Moment order must be at least 1, got %d." % m)
    if is_exact(p):
        return m * sum(math.comb(n, j) * (-p) ** j / (m + j) for j in range(n + 1))
    return m * math.fsum(math.comb(n, j) * (-p) ** j / (m + j) for j in range(n + 1))


def mean_closed_form(p, n):
    # E[X_n] = (1 - (1 - p)^(n+1)) / (p (n + 1)), from integrating the survival
    # function.
    _check_horizon(n)
    return (1 - (1 - p) ** (n + 1)) / (p * (n + 1))


def moment_by_recursion(p, n, m):
    # E[X_n^m] from E[X_k^j] = E[X_{k-1}^j] - (p j / (j + 1)) E[X_{k-1}^(j+1)],
    # starting from E[X_0^j] = 1 for orders m..m+n.
    _check_horizon(n)
    if m < 1:
        raise PreconditionError("Moment order must be at least 1, got %d." % m)
    one = one_like(p)
    moments = [one] * (n + 1)
    for k in range(n):
        moments = [moments[i] - p * (m + i) / (m + i + 1) * moments[i + 1] for i in range(n - k)]
    return moments[0]


class MarginalLaw(object):
    # The law of X_n for a fixed p and n.
    def __init__(self, p, n):
        _check_horizon(n)
        self.p = p
        self.n = n

    @property
    def atom(self):
        return atom_at_one(self.p, self.n)

    def cdf(self, x):
        return marginal_cdf(self.p, self.n, x)

    def continuous_cdf(self, x):
        return continuous_cdf(self.p, self.n, x)

    def survival(self, x):
        return 1 - self.cdf(x)

    def mean(self):
        return moment(self.p, self.n, 1)

    def moment(self, m):
        return moment(self.p, self.n, m)

    def cdf_array(self, xs):
        # Right-continuous CDF evaluated on an array.
        xs = np.asarray(xs, dtype=float)
        p = float(self.p)
        inside = 1.0 - (1.0 - p * np.clip(xs, 0.0, 1.0)) ** self.n
        return np.where(xs >= 1.0, 1.0, np.where(xs <= 0.0, 0.0, inside))

    def left_cdf_array(self, xs):
        # Left limits F(x-) on an array. Differs from cdf_array only at x = 1.
        xs = np.asarray(xs, dtype=float)
        p = float(self.p)
        inside = 1.0 - (1.0 - p * np.clip(xs, 0.0, 1.0)) ** self.n
        return np.where(xs > 1.0, 1.0, np.where(xs <= 0.0, 0.0, inside))

    def sample(self, rng, size):
        # Draw X_n directly from its law by inverting the CDF.
        if self.n == 0:
            return np.ones(size)
        p = float(self.p)
        u = rng.random(size)
        below_one = 1.0 - (1.0 - p) ** self.n
        continuous = (1.0 - (1.0 - u) ** (1.0 / self.n)) / p
        return np.where(u < below_one, np.minimum(continuous, 1.0), 1.0)
