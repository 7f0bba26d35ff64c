from __future__ import absolute_import
from __future__ import division
import collections
import numbers
from fractions import Fraction
from phstair.errors import NonRational, OutOfRange, PreconditionError


EXACT = "exact"
FLOAT = "float"
MODES = (EXACT, FLOAT)

DEFAULT_QUAD_REL_TOL = 1e-10
DEFAULT_MATCH_ABS_TOL = 1e-9
DEFAULT_MC_ALPHA = 0.01


class NumericMode(object):
    # The two scalar backends. Exact mode computes with Fraction values backed
    # by arbitrary precision integers. Float mode computes with 64-bit floats.
    EXACT = EXACT
    FLOAT = FLOAT

    @staticmethod
    def check(mode):
        if mode not in MODES:
            raise PreconditionError("Unknown numeric mode %r, expected one of %s." % (mode, ", ".join(MODES)))
        return mode

    @staticmethod
    def of(value):
        return EXACT if is_exact(value) else FLOAT


def is_exact(value):
    if isinstance(value, bool):
        return False
    return isinstance(value, (Fraction, numbers.Integral))


def to_exact(value):
    # Convert a value to a Fraction without losing precision. Strings may be
    # "a/b" ratios or decimal literals. Floats are read as the decimal literal
    # they print as, so 0.2 becomes 1/5 rather than its binary expansion.
    if isinstance(value, bool):
        raise NonRational("Boolean %r is not a rational number." % (value,))
    if isinstance(value, (Fraction, numbers.Integral)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except ValueError:
            raise NonRational("Could not read %r as a rational number." % (value,))
    if isinstance(value, float):
        return Fraction(repr(value))
    raise NonRational("Could not read %r as a rational number." % (value,))


def coerce(value, mode):
    if NumericMode.check(mode) == EXACT:
        return to_exact(value)
    if isinstance(value, str):
        return float(to_exact(value))
    return float(value)


def one_like(value):
    return Fraction(1) if is_exact(value) else 1.0


def zero_like(value):
    return Fraction(0) if is_exact(value) else 0.0


def format_scalar(value):
    # Format a scalar for JSON and CSV output: exact values as "num/den",
    # floats with 17 significant digits.
    if is_exact(value):
        value = Fraction(value)
        return "%d/%d" % (value.numerator, value.denominator)
    return "%.17g" % value


def parse_scalar(text):
    if "/" in text:
        return to_exact(text)
    return float(text)


class ModelParams(collections.namedtuple("ModelParams", ["p", "mode"])):
    # The single model parameter p together with the numeric mode that all
    # analytic evaluations for it should use. 0 < p <= 1 always holds for a
    # constructed instance.
    __slots__ = ()

    def __new__(cls, p, mode=None):
        if mode is None:
            mode = NumericMode.of(p)
        NumericMode.check(mode)
        if mode == EXACT:
            if not is_exact(p):
                raise NonRational("Exact mode requires p as a ratio of integers, got %r." % (p,))
            p = Fraction(p)
        else:
            p = float(p)
        if not 0 < p <= 1:
            raise OutOfRange("p must satisfy 0 < p <= 1, got %s." % format_scalar(p))
        return super(ModelParams, cls).__new__(cls, p, mode)

    @property
    def exact(self):
        return self.mode == EXACT

    @property
    def p_float(self):
        return float(self.p)

    def scalar(self, value):
        return coerce(value, self.mode)

    def to_dict(self):
        return {"p": format_scalar(self.p), "mode": self.mode}

    @classmethod
    def from_dict(cls, data):
        return parse_p(data["p"], data.get("mode"))


def validate_params(p_num=None, p_den=None, p_float=None, mode=None):
    if p_float is not None:
        if p_num is not None or p_den is not None:
            raise PreconditionError("Give p either as a ratio or as a float, not both.")
        if mode == EXACT:
            raise NonRational("Exact mode requires p as a ratio of integers, got float %r." % (p_float,))
        return ModelParams(float(p_float), FLOAT)

    if p_den is None:
        p_den = 1
    for part in (p_num, p_den):
        if isinstance(part, bool) or not isinstance(part, numbers.Integral):
            raise NonRational("Ratio parts must be integers, got %r." % (part,))
    if p_den == 0:
        raise PreconditionError("Denominator of p must be nonzero.")
    p = Fraction(p_num, p_den)
    if mode == FLOAT:
        return ModelParams(float(p), FLOAT)
    return ModelParams(p, EXACT)


def parse_p(value, mode=None):
    # Read p from a command line or config value. "a/b" and integer strings
    # keep exactness; anything else is a float.
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return validate_params(value[0], value[1], mode=mode)
    if isinstance(value, Fraction):
        return validate_params(value.numerator, value.denominator, mode=mode)
    if isinstance(value, numbers.Integral) and not isinstance(value, bool):
        return validate_params(value, 1, mode=mode)
    if isinstance(value, float):
        return validate_params(p_float=value, mode=mode)
    text = str(value).strip()
    if "/" in text:
        num, _, den = text.partition("/")
        try:
            num, den = int(num), int(den)
        except ValueError:
            raise NonRational("Could not read %r as a ratio of integers." % (text,))
        return validate_params(num, den, mode=mode)
    try:
        return validate_params(int(text), 1, mode=mode)
    except ValueError:
        pass
    try:
        p_float = float(text)
    except ValueError:
        raise NonRational("Could not read %r as a value for p." % (text,))
    if mode == EXACT:
        # A decimal literal is still an exact ratio.
        exact = to_exact(text)
        return validate_params(exact.numerator, exact.denominator, mode=EXACT)
    return validate_params(p_float=p_float, mode=mode)


class Tolerances(collections.namedtuple("Tolerances", ["quad_rel_tol", "match_abs_tol", "mc_alpha"])):
    __slots__ = ()

    def __new__(cls, quad_rel_tol=DEFAULT_QUAD_REL_TOL, match_abs_tol=DEFAULT_MATCH_ABS_TOL, mc_alpha=DEFAULT_MC_ALPHA):
        quad_rel_tol = float(quad_rel_tol)
        match_abs_tol = float(match_abs_tol)
        mc_alpha = float(mc_alpha)
        if quad_rel_tol <= 0 or match_abs_tol <= 0:
            raise OutOfRange("Tolerances must be strictly positive.")
        if not 0 < mc_alpha < 0.5:
            raise OutOfRange("mc_alpha must lie in (0, 0.5), got %g." % mc_alpha)
        return super(Tolerances, cls).__new__(cls, quad_rel_tol, match_abs_tol, mc_alpha)

    def to_dict(self):
        return dict(self._asdict())


DEFAULT_TOLERANCES = Tolerances()
