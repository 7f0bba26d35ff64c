from __future__ import absolute_import
from __future__ import division
import collections
import math
import numpy as np
from scipy import stats as scipy_stats
from phstair.errors import InsufficientSample, PreconditionError


MIN_GATE_SAMPLE = 1000
MIN_EXPECTED_COUNT = 5.0
MOMENT_GATE_SIGMAS = 5.0


class GateReport(collections.namedtuple("GateReport", ["name", "statistic", "threshold", "sample_size", "passed", "reference", "detail"])):
    """Outcome of one statistical gate. passed holds exactly when
    statistic <= threshold; reference names the exact law it was checked
    against.
    """

    __slots__ = ()

    def __new__(cls, name, statistic, threshold, sample_size, reference, detail=None):
        statistic = float(statistic)
        threshold = float(threshold)
        return super(GateReport, cls).__new__(cls, name, statistic, threshold, int(sample_size),
                                              bool(statistic <= threshold), reference, detail or {})

    def to_dict(self):
        return {"name": self.name,
                "statistic": self.statistic,
                "threshold": self.threshold,
                "sample_size": self.sample_size,
                "passed": self.passed,
                "reference": self.reference,
                "detail": self.detail}


def _check_sample_size(m):
    if m < MIN_GATE_SAMPLE:
        raise PreconditionError("Gate needs at least %d samples, got %d." % (MIN_GATE_SAMPLE, m))


def dkw_threshold(m, alpha):
    return math.sqrt(math.log(2.0 / alpha) / (2.0 * m))


def dkw_cdf_gate(sample, law, alpha, name="dkw_marginal_cdf"):
    # Compare the empirical CDF of X_n samples with the exact mixed law. The
    # sup distance is taken over both sides of every sample point and the left
    # limit at 1, so the atom at 1 is accounted for. The gate passes when the
    # distance is within the distribution-free DKW band.
    sample = np.asarray(sample, dtype=float)
    m = sample.size
    _check_sample_size(m)
    points, counts = np.unique(sample, return_counts=True)
    upper = np.cumsum(counts) / m
    lower = upper - counts / m
    statistic = max(np.max(np.abs(upper - law.cdf_array(points))),
                    np.max(np.abs(lower - law.left_cdf_array(points))))
    # Everything below 1 has been seen once we approach 1 from the left.
    below_one = float(np.count_nonzero(sample < 1.0)) / m
    statistic = max(statistic, abs(below_one - float(law.left_cdf_array(1.0))))
    return GateReport(name, statistic, dkw_threshold(m, alpha), m,
                      "P(X_n <= x) = 1 - (1 - p x)^n, atom (1 - p)^n at 1; p=%s n=%d" % (law.p, law.n),
                      {"alpha": alpha})


def pool_bins(expected, min_expected=MIN_EXPECTED_COUNT):
    # Group consecutive bins until each group expects at least min_expected
    # counts. Zero-probability bins are left out, and a short trailing group is
    # folded into the last full one. Returns a list of bin index lists.
    groups = []
    current = []
    current_total = 0.0
    for k, e in enumerate(expected):
        if e <= 0:
            continue
        current.append(k)
        current_total += e
        if current_total >= min_expected:
            groups.append(current)
            current = []
            current_total = 0.0
    if current:
        if groups:
            groups[-1].extend(current)
        else:
            groups.append(current)
    return groups


def chi_square_gate(counts, table, alpha, name="chi_square_counts"):
    # Pearson goodness of fit of a histogram of N_n against a PmfTable.
    counts = np.asarray(counts, dtype=float)
    probs = np.array([float(e) for e in table.entries])
    beyond = float(counts[probs.size:].sum())
    counts = counts[:probs.size]
    if counts.size < probs.size:
        counts = np.concatenate([counts, np.zeros(probs.size - counts.size)])
    m = counts.sum() + beyond
    expected = m * probs
    reference = "P(N_n = k) = sum_j C(n,j) p^j c_{j,k}; n=%d" % table.n
    impossible = counts[probs <= 0].sum() + beyond
    groups = pool_bins(expected)
    if len(groups) < 2:
        raise InsufficientSample("Pooling left %d bin(s); a chi-square test needs at least 2." % len(groups))
    dof = len(groups) - 1
    threshold = scipy_stats.chi2.ppf(1.0 - alpha, dof)
    detail = {"alpha": alpha, "bins": groups, "dof": dof}
    if impossible > 0:
        detail["impossible_counts"] = int(impossible)
        return GateReport(name, float("inf"), threshold, m, reference, detail)
    observed = np.array([counts[group].sum() for group in groups])
    grouped_expected = np.array([expected[group].sum() for group in groups])
    statistic = float(np.sum((observed - grouped_expected) ** 2 / grouped_expected))
    detail["expected"] = grouped_expected.tolist()
    detail["observed"] = observed.tolist()
    return GateReport(name, statistic, threshold, m, reference, detail)


def sample_mean(sample):
    if np.all(sample == sample[0]):
        return float(sample[0])
    return float(np.mean(sample))


def moment_gate(sample, exact_value, reference="exact mean", name="moment", sigmas=MOMENT_GATE_SIGMAS):
    # Pass when the sample mean lies within sigmas standard errors of the exact
    # value.
    sample = np.asarray(sample, dtype=float)
    m = sample.size
    _check_sample_size(m)
    mean = sample_mean(sample)
    sd = float(np.std(sample, ddof=1))
    threshold = sigmas * sd / math.sqrt(m)
    return GateReport(name, abs(mean - float(exact_value)), threshold, m, reference,
                      {"mean": mean, "exact": float(exact_value), "sd": sd, "sigmas": sigmas})


def binomial_frequency_gate(hits, m, probability, reference, name="frequency", sigmas=MOMENT_GATE_SIGMAS):
    # Pass when an observed frequency lies within sigmas binomial standard
    # errors of the exact probability.
    _check_sample_size(m)
    probability = float(probability)
    frequency = hits / m
    se = math.sqrt(probability * (1.0 - probability) / m)
    return GateReport(name, abs(frequency - probability), sigmas * se, m, reference,
                      {"frequency": frequency, "exact": probability, "sigmas": sigmas})
