"""Dual volumes, dual curvature measures and the functional maximized by the solver.

For a polytope ``P`` with facet normals ``v_i`` the q-th dual curvature
measure is ``sum_i c_i delta_{v_i}`` with

    c_i = (1/n) * integral of rho_P(u)**q over the radial cell of facet i,

and the q-th dual volume is the total ``sum_i c_i``.
"""
import json
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import NonConvexData, NonFiniteIntegrand
from .geometry import DiscreteMeasure, Polytope, support_value, unit_ball_volume
from .quadrature import default_rule


def _rho(P, rule):
    rho, cell = kernels.radial_cells(rule.nodes, P.normals, P.supports)
    if np.any(cell < 0) or not np.all(np.isfinite(rho)):
        raise NonFiniteIntegrand("radial function is not finite at some node")
    return rho


def _rule(P, rule):
    return default_rule(P) if rule is None else rule


def dual_volume(P, q, rule=None):
    """``(1/n) * integral of rho_P**q`` over the sphere."""
    rule = _rule(P, rule)
    return float(rule.weights @ _rho(P, rule) ** q) / P.dim


def normalized_dual_volume(P, q, rule=None):
    """Power mean ``(Vq / omega_n)**(1/q)``, or the geometric mean of ``rho`` at ``q = 0``."""
    rule = _rule(P, rule)
    n = P.dim
    area = n * unit_ball_volume(n)
    rho = _rho(P, rule)
    if q == 0:
        return math.exp(float(rule.weights @ np.log(rho)) / area)
    return (float(rule.weights @ rho ** q) / area) ** (1.0 / q)


@dataclass(frozen=True)
class DualCurvature:
    """Facet masses of the q-th dual curvature measure of ``body``.

    ``rule_error`` is the mass carried by nodes whose cell assignment is
    uncertain (nonzero only for adaptive mesh rules).
    """

    body: Polytope
    q: float
    masses: np.ndarray
    total: float
    rule_error: float = 0.0

    def to_measure(self, tol=0.0):
        """The measure on the active normals; facets with mass ``<= tol`` are dropped."""
        keep = self.masses > tol
        return DiscreteMeasure(self.body.normals[keep], self.masses[keep])

    def to_dict(self):
        return {"q": self.q, "masses": self.masses.tolist(), "total": self.total,
                "rule_error": self.rule_error}

    def dumps(self):
        return json.dumps(self.to_dict())


def dual_curvature(P, q, rule=None):
    """Masses ``c_i = (1/n) sum_{k : a_k = i} w_k rho(u_k)**q``."""
    rule = _rule(P, rule)
    f = rule.weights * _rho(P, rule) ** q / P.dim
    masses = np.bincount(rule.cells, weights=f, minlength=len(P))
    masses[~P.active] = 0.0
    err = float(f[rule.mixed].sum())
    return DualCurvature(P, float(q), masses, float(masses.sum()), err)


def smooth_density(h, theta, q, dh=None, d2h=None, step=1e-4):
    """Density of the dual curvature measure of a smooth planar body.

    ``h`` is the support function as a function of the normal angle.  The
    density with respect to arc length at ``theta`` is

        (1/2) h (h'^2 + h^2)^((q - 2)/2) (h'' + h).

    Derivatives default to central differences with the given step.
    """
    theta = np.asarray(theta, dtype=np.float64)
    h0 = h(theta)
    h1 = dh(theta) if dh is not None else (h(theta + step) - h(theta - step)) / (2 * step)
    h2 = d2h(theta) if d2h is not None else (h(theta + step) - 2 * h0 + h(theta - step)) / step ** 2
    curv = h2 + h0
    if np.any(h0 <= 0) or np.any(curv <= 0):
        raise NonConvexData("support data must satisfy h > 0 and h'' + h > 0")
    out = 0.5 * h0 * (h1 ** 2 + h0 ** 2) ** ((q - 2) / 2) * curv
    return float(out) if out.ndim == 0 else out


def ellipse_support(a, b):
    """Support function of the ellipse ``x^2/a^2 + y^2/b^2 <= 1`` and its first two derivatives."""

    def h(t):
        return np.sqrt(a * a * np.cos(t) ** 2 + b * b * np.sin(t) ** 2)

    def dh(t):
        return (b * b - a * a) * np.sin(t) * np.cos(t) / h(t)

    def d2h(t):
        s = (b * b - a * a)
        return (s * np.cos(2 * t) - dh(t) ** 2) / h(t)

    return h, dh, d2h


def phi_functional(mu, P, q, rule=None):
    """``-(1/|mu|) sum_i w_i log h_P(v_i) + log Vbar_q(P)``; invariant under dilation."""
    if mu.dim != P.dim:
        raise ValueError("measure and body dimensions differ")
    hv = support_value(P, mu.directions)
    return float(-(mu.weights @ np.log(hv)) / mu.total
                 + math.log(normalized_dual_volume(P, q, rule)))


def log_wulff_family(P, g, t):
    """Wulff shape with supports ``h_i * exp(t * g_i)`` on P's normals."""
    return Polytope(P.normals, P.supports * np.exp(t * np.asarray(g, dtype=np.float64)), check=False)


def family_is_regular(P, g, t, reach=10):
    """True when no facet of ``log_wulff_family(P, g, s)`` appears or vanishes for ``|s| <= reach*t``.

    Checked at ``s = +-j t``, ``j = 1..reach``.  Near such a change ``log
    Vbar_q`` is only piecewise smooth and a difference quotient with step
    ``t`` does not measure the derivative at zero.
    """
    ref = P.active
    return all(np.array_equal(log_wulff_family(P, g, sgn * j * t).active, ref)
               for j in range(1, reach + 1) for sgn in (1, -1))


def variational_check(P, q, g, t=1e-4, level=None):
    """Compare a finite difference of ``log Vbar_q`` with the curvature-measure derivative.

    ``lhs`` is the five-point central difference with step ``t`` of
    ``s -> log Vbar_q`` along the logarithmic Wulff family ``h_i exp(s g_i)``;
    its truncation error is O(t^4), which matters for bodies with very short
    edges.  ``rhs = (1/Vq) sum_i g_i c_i``.

    Returns
    -------
    lhs, rhs, gap : float
    """
    g = np.asarray(g, dtype=np.float64)

    def logvbar(s):
        Q = log_wulff_family(P, g, s)
        return math.log(normalized_dual_volume(Q, q, default_rule(Q, level)))

    lhs = (8 * (logvbar(t) - logvbar(-t)) - (logvbar(2 * t) - logvbar(-2 * t))) / (12 * t)
    dc = dual_curvature(P, q, default_rule(P, level))
    rhs = float(g @ dc.masses) / dc.total
    return lhs, rhs, abs(lhs - rhs)
