from __future__ import absolute_import
from __future__ import division
import collections
import logging
import numpy as np
from scipy.integrate import cumulative_simpson
from phstair.errors import QuadratureFailure
from phstair.model import DEFAULT_QUAD_REL_TOL


PANEL_POINTS = 8
DEFAULT_MAX_PANELS = 2 ** 14
DEFAULT_MAX_SPLITS = 2 ** 6
# Estimates this close in absolute terms count as converged even when the
# integral itself is zero.
ABSOLUTE_FLOOR = 1e-15

_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(PANEL_POINTS)

logger = logging.getLogger(__name__)


class QuadratureGrid(collections.namedtuple("QuadratureGrid", ["value", "nodes", "weights", "panels", "error"])):
    # Result of an adaptive Gauss-Legendre run: the integral, the nodes and
    # weights of the final panel layout, and the difference between the last
    # two estimates as the achieved error.
    __slots__ = ()


def edge_rule(edges, splits=1):
    # Nodes and weights of the 8-point Gauss-Legendre rule on every gap of the
    # increasing edges, each gap cut into splits equal panels. Both arrays have
    # shape (gaps, splits, 8).
    edges = np.asarray(edges, dtype=float)
    cuts = np.linspace(0.0, 1.0, splits + 1)
    width = (edges[1:] - edges[:-1])[:, None]
    left = edges[:-1, None] + width * cuts[None, :-1]
    right = edges[:-1, None] + width * cuts[None, 1:]
    half = (right - left) / 2.0
    middle = (right + left) / 2.0
    return middle[..., None] + half[..., None] * _NODES, half[..., None] * _WEIGHTS


def panel_rule(a, b, panels):
    # Nodes and weights of the composite 8-point Gauss-Legendre rule with equal
    # panels on [a, b].
    nodes, weights = edge_rule([a, b], panels)
    return nodes.ravel(), weights.ravel()


def _evaluate(f, nodes):
    values = np.asarray(f(nodes), dtype=float)
    if values.shape != nodes.shape:
        # Constant integrands may return a scalar.
        values = np.broadcast_to(values, nodes.shape)
    if not np.all(np.isfinite(values)):
        raise QuadratureFailure("Integrand is not finite on the integration interval.")
    return values


def adaptive_gauss_legendre(f, a, b, rel_tol=DEFAULT_QUAD_REL_TOL, max_panels=DEFAULT_MAX_PANELS):
    # Integrate a vectorized f over [a, b], doubling the number of panels until
    # two successive estimates agree to rel_tol.
    if a == b:
        empty = np.empty(0)
        return QuadratureGrid(0.0, empty, empty, 0, 0.0)
    panels = 1
    nodes, weights = panel_rule(a, b, panels)
    estimate = float(np.dot(weights, _evaluate(f, nodes)))
    while True:
        panels *= 2
        if panels > max_panels:
            raise QuadratureFailure("No convergence on [%g, %g] within %d panels." % (a, b, max_panels))
        nodes, weights = panel_rule(a, b, panels)
        refined = float(np.dot(weights, _evaluate(f, nodes)))
        error = abs(refined - estimate)
        if error <= rel_tol * abs(refined) + ABSOLUTE_FLOOR:
            logger.debug("Converged on [%g, %g] with %d panels, error %.3g", a, b, panels, error)
            return QuadratureGrid(refined, nodes, weights, panels, error)
        estimate = refined


def integrate(f, a, b, rel_tol=DEFAULT_QUAD_REL_TOL, max_panels=DEFAULT_MAX_PANELS):
    return adaptive_gauss_legendre(f, a, b, rel_tol, max_panels).value


def cumulative_integral(values, xs):
    # Running integrals int_{xs[0]}^{xs[i]} of sampled values, by composite
    # Simpson on the grid.
    return cumulative_simpson(values, x=xs, initial=0.0)


def cumulative_gauss_legendre(f, edges, rel_tol=DEFAULT_QUAD_REL_TOL, max_splits=DEFAULT_MAX_SPLITS):
    # Running integrals of a vectorized f from edges[0] to every edge. Each gap
    # is cut into twice as many panels until two successive sets of running
    # integrals agree to rel_tol.
    edges = np.asarray(edges, dtype=float)
    if edges.size < 2:
        return np.zeros(edges.size)

    def running(splits):
        nodes, weights = edge_rule(edges, splits)
        pieces = np.sum(weights * _evaluate(f, nodes), axis=(1, 2))
        return np.concatenate([[0.0], np.cumsum(pieces)])

    splits = 1
    estimate = running(splits)
    while True:
        splits *= 2
        if splits > max_splits:
            raise QuadratureFailure("No convergence over %d gaps within %d panels each." % (edges.size - 1, max_splits))
        refined = running(splits)
        error = np.abs(refined - estimate)
        if np.all(error <= rel_tol * np.abs(refined) + ABSOLUTE_FLOOR):
            logger.debug("Converged over %d gaps with %d panels each, error %.3g", edges.size - 1, splits, np.max(error))
            return refined
        estimate = refined
