from __future__ import absolute_import
from __future__ import division
import logging
import math
from fractions import Fraction
from phstair import exact_dist
from phstair.errors import ModeError, PreconditionError
from phstair.model import format_scalar, is_exact
from phstair.series import BivarPoly, RationalPoly, binomial_shifted, falling_binomial_coeffs


# Past this horizon the fast float PMF is flagged: the alternating c_{j,k}
# terms cancel against large binomials.
CANCELLATION_RISK_HORIZON = 40

logger = logging.getLogger(__name__)


def _check_horizon(n):
    if n < 0:
        raise PreconditionError("Horizon n must be nonnegative, got %d." % n)


class PmfTable(object):
    # P(N_n = k) for k = 0..n.
    def __init__(self, n, entries, cancellation_risk=False):
        self.n = n
        self.entries = tuple(entries)
        self.cancellation_risk = cancellation_risk

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, k):
        return self.entries[k]

    def __iter__(self):
        return iter(self.entries)

    def __eq__(self, other):
        if not isinstance(other, PmfTable):
            return NotImplemented
        return self.n == other.n and self.entries == other.entries

    def __ne__(self, other):
        return not self == other

    __hash__ = None

    def __repr__(self):
        return "PmfTable(n=%d, [%s])" % (self.n, ", ".join(format_scalar(e) for e in self.entries))

    @property
    def exact(self):
        return all(is_exact(e) for e in self.entries)

    def total(self):
        if self.exact:
            return sum(self.entries, Fraction(0))
        return math.fsum(self.entries)

    def mean(self):
        return sum(k * e for k, e in enumerate(self.entries))

    def variance(self):
        mean = self.mean()
        return sum(k * k * e for k, e in enumerate(self.entries)) - mean * mean

    def as_float(self):
        return PmfTable(self.n, [float(e) for e in self.entries], self.cancellation_risk)

    def violations(self):
        problems = []
        if len(self.entries) != self.n + 1:
            problems.append("expected %d entries, found %d" % (self.n + 1, len(self.entries)))
        for k, e in enumerate(self.entries):
            if e < 0:
                problems.append("P(N=%d) is negative: %s" % (k, format_scalar(e)))
        if self.exact and self.total() != 1:
            problems.append("entries sum to %s" % format_scalar(self.total()))
        return problems

    def to_records(self):
        records = []
        for k, e in enumerate(self.entries):
            record = {"k": k, "prob": "%.17g" % float(e)}
            if is_exact(e):
                record["prob_exact"] = format_scalar(e)
            records.append(record)
        return records


def pgf_eval(p, n, z):
    # E[z^N_n] = sum_j C(n, j) binom(z-1, j) p^j. Defined as a polynomial for
    # any real z; it is a probability generating function on [-1, 1].
    _check_horizon(n)
    return sum(math.comb(n, j) * binomial_shifted(z, j) * p ** j for j in range(n + 1))


def _pmf_entries(p, n):
    weights = [math.comb(n, j) * p ** j for j in range(n + 1)]
    entries = []
    for k in range(n + 1):
        entries.append(sum(weights[j] * falling_binomial_coeffs(j)[k] for j in range(k, n + 1)))
    return entries


def pmf(p, n, fast=False):
    """P(N_n = k) = sum_{j>=k} C(n, j) p^j c_{j,k}.

    Rational p gives an exact table. Float p is computed exactly from its
    binary value and converted back, unless fast is set; the fast float
    path is flagged when n is large enough for cancellation to matter.
    """
    _check_horizon(n)
    if is_exact(p):
        return PmfTable(n, _pmf_entries(Fraction(p), n))
    if not fast:
        return PmfTable(n, _pmf_entries(Fraction(p), n)).as_float()
    risk = n > CANCELLATION_RISK_HORIZON
    if risk:
        logger.warning("Float PMF for n=%d may lose precision to cancellation; use exact mode.", n)
    entries = []
    weights = [math.comb(n, j) * p ** j for j in range(n + 1)]
    for k in range(n + 1):
        entries.append(math.fsum(weights[j] * float(falling_binomial_coeffs(j)[k]) for j in range(k, n + 1)))
    return PmfTable(n, entries, cancellation_risk=risk)


def pgf_oracle_sequence(p, n_max):
    # Yield G_0..G_{n_max} from the recursion G_n = p z int_0^x G_{n-1}(u) du +
    # (1 - p x) G_{n-1}(x), G_0 = 1, carried out exactly on bivariate
    # polynomials.
    if not is_exact(p):
        raise ModeError("The generating function oracle needs exact mode (rational p).")
    _check_horizon(n_max)
    p = Fraction(p)
    pz = RationalPoly([0, p])
    g = BivarPoly.one()
    yield g
    for _ in range(n_max):
        g = g.integral_x().scale(pz) + g + g.shift_x().scale(-p)
        yield g


def pgf_oracle(p, n):
    result = None
    for result in pgf_oracle_sequence(p, n):
        pass
    return result


def oracle_table(g, n):
    # The z-coefficients of G_n(1; z), which are P(N_n = k).
    at_one = g.at_x(1)
    return PmfTable(n, [Fraction(at_one[k]) for k in range(n + 1)])


def oracle_pmf(p, n):
    return oracle_table(pgf_oracle(p, n), n)


def closed_form_Gn(p, n, z):
    # G_n(x) = sum_k C(n, k) binom(z-1, k) p^k x^k as a polynomial in x.
    _check_horizon(n)
    return RationalPoly([math.comb(n, k) * binomial_shifted(z, k) * p ** k for k in range(n + 1)])


def closed_form_bivariate(p, n):
    _check_horizon(n)
    return BivarPoly([falling_binomial_coeffs(k) * (math.comb(n, k) * p ** k) for k in range(n + 1)])


def mean_count(p, n):
    # E[N_n] = sum_{i=1}^n (1 - (1 - p)^i) / i.
    _check_horizon(n)
    return sum(((1 - (1 - p) ** i) / i for i in range(1, n + 1)), 0 * p)


def mean_count_signed_binomial(p, n):
    # E[N_n] as the derivative of the generating function at z = 1: sum_{j=1}^n
    # C(n, j) p^j (-1)^(j-1) / j.
    _check_horizon(n)
    return sum((math.comb(n, j) * p ** j * (-1) ** (j - 1) / j for j in range(1, n + 1)), 0 * p)


def mean_count_from_moments(p, n):
    # E[N_n] = sum_{i<n} p E[X_i], each jump happening with probability p X_i.
    _check_horizon(n)
    return sum((p * exact_dist.moment(p, i, 1) for i in range(n)), 0 * p)
