from __future__ import absolute_import
import collections
import csv
import json
import math
from fractions import Fraction
import numpy as np
from phstair.model import format_scalar


EXACT_SECTION = "1_exact"
QUADRATURE_SECTION = "2_quadrature"
MONTE_CARLO_SECTION = "3_monte_carlo"
SECTIONS = (EXACT_SECTION, QUADRATURE_SECTION, MONTE_CARLO_SECTION)


def to_json_value(value):
    """Make a value JSON friendly: Fractions as "num/den" strings, non-finite
    floats as strings, numpy scalars as plain Python ones.
    """
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, (bool, int, str)) or value is None:
        return value
    if isinstance(value, Fraction):
        return format_scalar(value)
    if isinstance(value, float) and not math.isfinite(value):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return [to_json_value(v) for v in value]
    if isinstance(value, dict):
        return dict((k, to_json_value(v)) for k, v in value.items())
    try:
        return float(value)
    except (TypeError, ValueError):
        return str(value)


class CheckResult(collections.namedtuple("CheckResult", ["name", "passed", "observed", "reference", "tolerance"])):

    __slots__ = ()

    def to_dict(self):
        return {"name": self.name,
                "passed": bool(self.passed),
                "observed": to_json_value(self.observed),
                "reference": to_json_value(self.reference),
                "tolerance": to_json_value(self.tolerance)}


class VerificationReport(object):
    """Every check and gate of one verification run. passed holds exactly
    when every constituent passed. Output is ordered by section, then name,
    whatever order the checks ran in.
    """

    def __init__(self, config, generator):
        self.config = config
        self.generator = generator
        self.checks = dict((section, []) for section in SECTIONS)
        self.gates = dict((section, []) for section in SECTIONS)
        self.timings = {}

    def add_check(self, section, name, passed, observed, reference, tolerance=0):
        result = CheckResult(name, bool(passed), observed, reference, tolerance)
        self.checks[section].append(result)
        return result

    def add_gate(self, section, gate):
        self.gates[section].append(gate)
        return gate

    @property
    def passed(self):
        return all(c.passed for section in SECTIONS for c in self.checks[section]) and \
               all(g.passed for section in SECTIONS for g in self.gates[section])

    def failures(self):
        failed = []
        for section in SECTIONS:
            failed.extend("%s/%s" % (section, c.name) for c in self.checks[section] if not c.passed)
            failed.extend("%s/%s" % (section, g.name) for g in self.gates[section] if not g.passed)
        return sorted(failed)

    def counts(self):
        total = sum(len(self.checks[s]) + len(self.gates[s]) for s in SECTIONS)
        return total, len(self.failures())

    def to_dict(self, include_timing=True):
        sections = collections.OrderedDict()
        for section in SECTIONS:
            sections[section] = {
                "checks": [c.to_dict() for c in sorted(self.checks[section], key=lambda c: c.name)],
                "gates": [to_json_value(g.to_dict()) for g in sorted(self.gates[section], key=lambda g: g.name)],
            }
        data = collections.OrderedDict()
        data["config"] = self.config.to_dict()
        data["generator"] = self.generator
        data["passed"] = self.passed
        data["sections"] = sections
        if include_timing:
            data["runtime_seconds"] = dict((k, round(v, 3)) for k, v in sorted(self.timings.items()))
        return data

    def rows(self):
        for section in SECTIONS:
            for c in sorted(self.checks[section], key=lambda c: c.name):
                yield [section, c.name, "check", c.passed, to_json_value(c.observed), to_json_value(c.reference), to_json_value(c.tolerance)]
            for g in sorted(self.gates[section], key=lambda g: g.name):
                yield [section, g.name, "gate", g.passed, to_json_value(g.statistic), g.reference, to_json_value(g.threshold)]


REPORT_CSV_COLUMNS = ["section", "name", "kind", "passed", "observed", "reference", "tolerance"]


def write_json(data, fd):
    json.dump(data, fd, indent=2)
    fd.write("\n")


def write_csv(columns, rows, fd):
    writer = csv.writer(fd, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow(row)
