from __future__ import absolute_import
from __future__ import division
import functools
import math
from fractions import Fraction
from phstair.errors import PreconditionError


def _trim(coeffs):
    # Strip unnecessary zero coefficients from the end.
    n = len(coeffs)
    while n and not coeffs[n - 1]:
        n -= 1
    return tuple(coeffs[:n])


class RationalPoly(object):
    """A polynomial in one variable as a dense coefficient list, index equal
    to power. Coefficients are Fractions or floats, or RationalPoly values
    themselves when the polynomial is nested. Trailing zeros are trimmed, so
    the zero polynomial has no coefficients.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        self.coeffs = _trim(list(coeffs))

    @classmethod
    def constant(cls, value):
        return cls([value])

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def __len__(self):
        return len(self.coeffs)

    def __bool__(self):
        return len(self.coeffs) > 0

    __nonzero__ = __bool__

    def __getitem__(self, k):
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return 0

    def __iter__(self):
        return iter(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, RationalPoly):
            return self.coeffs == other.coeffs
        if not self.coeffs:
            return other == 0
        return len(self.coeffs) == 1 and self.coeffs[0] == other

    def __ne__(self, other):
        return not self == other

    __hash__ = None

    def __repr__(self):
        return "RationalPoly([%s])" % ", ".join(str(c) for c in self.coeffs)

    def __call__(self, x):
        # Evaluate with Horner's rule.
        result = 0
        for c in reversed(self.coeffs):
            result = result * x + c
        return result

    def __neg__(self):
        return RationalPoly([-c for c in self.coeffs])

    def __add__(self, other):
        if not isinstance(other, RationalPoly):
            other = RationalPoly.constant(other)
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        result = list(a)
        for i, c in enumerate(b):
            result[i] = result[i] + c
        return RationalPoly(result)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, RationalPoly):
            return RationalPoly([c * other for c in self.coeffs])
        if not self.coeffs or not other.coeffs:
            return RationalPoly()
        result = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            for j, b in enumerate(other.coeffs):
                result[i + j] = result[i + j] + a * b
        return RationalPoly(result)

    def __rmul__(self, other):
        return RationalPoly([other * c for c in self.coeffs])

    def shift(self, k=1):
        # Multiply by the variable to the k-th power.
        if not self.coeffs:
            return self
        return RationalPoly([0] * k + list(self.coeffs))

    def integral(self):
        return poly_definite_integral_0_to_x(self)

    def derivative(self):
        return RationalPoly([c * k for k, c in enumerate(self.coeffs) if k > 0])

    def map(self, func):
        return RationalPoly([func(c) for c in self.coeffs])


def poly_definite_integral_0_to_x(poly):
    # The antiderivative vanishing at 0: a_k x^k becomes a_k/(k+1) x^(k+1).
    coeffs = [0]
    for k, c in enumerate(poly.coeffs):
        if isinstance(c, float):
            coeffs.append(c / (k + 1))
        else:
            coeffs.append(c * Fraction(1, k + 1))
    return RationalPoly(coeffs)


@functools.lru_cache(maxsize=None)
def falling_binomial_coeffs(j):
    # Coefficients c_{j,0}..c_{j,j} of binom(z-1, j) = (z-1)(z-2)...(z-j)/j! as
    # a polynomial in z.
    if j < 0:
        raise PreconditionError("Order j must be nonnegative, got %d." % j)
    poly = RationalPoly([Fraction(1)])
    for i in range(1, j + 1):
        poly = poly * RationalPoly([-i, 1])
    return poly * Fraction(1, math.factorial(j))


def binomial_shifted(z, j):
    # binom(z-1, j) for any scalar z, by the product (z-i)/i.
    result = 1
    for i in range(1, j + 1):
        if isinstance(z, float):
            result = result * (z - i) / i
        else:
            result = result * (z - i) * Fraction(1, i)
    return result


class BivarPoly(object):
    # A polynomial in x whose coefficients are RationalPoly values in z. G_n(x;
    # z) is stored this way because its recursion integrates in x.
    __slots__ = ("coeffs_x",)

    def __init__(self, coeffs_x=()):
        self.coeffs_x = _trim([c if isinstance(c, RationalPoly) else RationalPoly.constant(c) for c in coeffs_x])

    @classmethod
    def one(cls):
        return cls([RationalPoly([Fraction(1)])])

    @property
    def degree_x(self):
        return len(self.coeffs_x) - 1

    @property
    def degree_z(self):
        return max([c.degree for c in self.coeffs_x] or [-1])

    def __getitem__(self, k):
        if 0 <= k < len(self.coeffs_x):
            return self.coeffs_x[k]
        return RationalPoly()

    def __eq__(self, other):
        if not isinstance(other, BivarPoly):
            return NotImplemented
        return self.coeffs_x == other.coeffs_x

    def __ne__(self, other):
        return not self == other

    __hash__ = None

    def __repr__(self):
        return "BivarPoly(%r)" % (list(self.coeffs_x),)

    def __add__(self, other):
        a, b = self.coeffs_x, other.coeffs_x
        if len(a) < len(b):
            a, b = b, a
        result = list(a)
        for i, c in enumerate(b):
            result[i] = result[i] + c
        return BivarPoly(result)

    def scale(self, factor):
        # Multiply every x-coefficient by a scalar or a polynomial in z.
        return BivarPoly([c * factor for c in self.coeffs_x])

    def shift_x(self, k=1):
        if not self.coeffs_x:
            return self
        return BivarPoly([RationalPoly()] * k + list(self.coeffs_x))

    def integral_x(self):
        # Integrate in x from 0; the z-polynomials ride along as coefficients.
        coeffs = [RationalPoly()]
        for k, c in enumerate(self.coeffs_x):
            coeffs.append(c * Fraction(1, k + 1))
        return BivarPoly(coeffs)

    def at_x(self, x):
        result = RationalPoly()
        for c in reversed(self.coeffs_x):
            result = result * x + c
        return result

    def at_z(self, z):
        # Evaluate at a fixed z, leaving a polynomial in x.
        return RationalPoly([c(z) for c in self.coeffs_x])

    def violations(self):
        problems = []
        for k, c in enumerate(self.coeffs_x):
            if c.degree > k:
                problems.append("coefficient of x^%d has z-degree %d" % (k, c.degree))
        return problems


class TruncatedSeries(object):
    # Coefficients c_0..c_K of a power series cut off at order K. Results of
    # operations on order-K series are again order K; terms past K are dropped,
    # never invented.
    __slots__ = ("coeffs",)

    def __init__(self, coeffs, order=None):
        coeffs = list(coeffs)
        if order is None:
            order = len(coeffs) - 1
        if order < 0:
            raise PreconditionError("Truncation order must be nonnegative.")
        zero = coeffs[0] * 0 if coeffs else 0
        coeffs = coeffs[:order + 1]
        coeffs.extend([zero] * (order + 1 - len(coeffs)))
        self.coeffs = tuple(coeffs)

    @classmethod
    def identity(cls, order, one=1):
        return cls([one], order)

    @property
    def order(self):
        return len(self.coeffs) - 1

    def __len__(self):
        return len(self.coeffs)

    def __getitem__(self, k):
        return self.coeffs[k]

    def __iter__(self):
        return iter(self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __ne__(self, other):
        return not self == other

    __hash__ = None

    def __repr__(self):
        return "TruncatedSeries([%s])" % ", ".join(str(c) for c in self.coeffs)

    def __add__(self, other):
        order = min(self.order, other.order)
        return TruncatedSeries([a + b for a, b in zip(self.coeffs, other.coeffs)], order)

    def __mul__(self, other):
        if isinstance(other, TruncatedSeries):
            return cauchy_product(self, other, min(self.order, other.order))
        return TruncatedSeries([c * other for c in self.coeffs], self.order)

    __rmul__ = __mul__

    def exp(self):
        return series_exp(self, self.order)


def cauchy_product(a, b, order):
    # Coefficient n of the result is sum_{i<=n} a_i b_{n-i}, for n <= order.
    coeffs = []
    for n in range(order + 1):
        total = 0
        for i in range(n + 1):
            if i < len(a) and n - i < len(b):
                total = total + a[i] * b[n - i]
        coeffs.append(total)
    return TruncatedSeries(coeffs, order)


def series_exp(c, order=None):
    # exp of a series with zero constant term, returned as V_0..V_K. Uses the
    # recurrence i V_i = sum_{k=1}^{i} k c_k V_{i-k}, V_0 = 1.
    if order is None:
        order = c.order
    if len(c) and c[0] != 0:
        raise PreconditionError("series_exp needs c_0 = 0, got %r." % (c[0],))
    exact = all(not isinstance(ck, float) for ck in c)
    one = Fraction(1) if exact else 1.0
    values = [one]
    for i in range(1, order + 1):
        total = 0
        for k in range(1, i + 1):
            if k < len(c):
                total = total + k * c[k] * values[i - k]
        values.append(total * Fraction(1, i) if exact else total / i)
    return TruncatedSeries(values, order)
