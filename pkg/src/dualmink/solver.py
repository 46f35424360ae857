"""Solver for the dual Minkowski problem with negative index.

Given a discrete measure ``mu`` on S^{n-1} and ``q < 0``, find the polytope
``P`` with facet normals at the atoms of ``mu`` whose q-th dual curvature
measure equals ``mu``.  The unknowns are ``x = log h``; we maximize

    Phi(x) = -(1/|mu|) sum_i w_i x_i + log Vbar_q([exp(x)])

with limited-memory BFGS (scipy's L-BFGS-B).  The gradient is
``-w_i/|mu| + c_i(x)/Vq(x)``, so a stationary point is exactly a body whose
normalized curvature masses match the weights.  ``Phi`` is invariant under
dilation; the body is rescaled once at the end so that ``Vq(P) = |mu|``.
"""
import logging
import math
from dataclasses import asdict, dataclass, field
from enum import Enum
from itertools import combinations

import numpy as np
from scipy.optimize import minimize

from .errors import InvalidMeasure, ShapeMismatch
from .geometry import Polytope, hausdorff_distance, hemisphere_witness, polar, unit_ball_volume
from .measures import dual_curvature
from .quadrature import default_rule

logger = logging.getLogger(__name__)


class Status(str, Enum):
    CONVERGED = "Converged"
    MAX_ITER = "MaxIter"
    INVALID_MEASURE = "InvalidMeasure"


@dataclass
class SolverConfig:
    q: float = -1.0
    tol: float = 1e-6
    max_iter: int = 5000
    quad_level: int = None
    starts: int = 1
    seed: int = 0
    memory: int = 20
    h_floor: float = 1e-10

    def __post_init__(self):
        if not self.q < 0:
            raise ValueError(f"the solver needs q < 0, got {self.q}")
        if self.tol <= 0 or self.max_iter <= 0 or self.starts <= 0 or self.memory <= 0:
            raise ValueError("tol, max_iter, starts and memory must be positive")
        if self.h_floor <= 0:
            raise ValueError("h_floor must be positive")


@dataclass
class SolverReport:
    status: Status
    iterations: int
    phi_trace: list = field(default_factory=list)
    residual: float = math.inf
    bound_M: float = math.nan
    bound_satisfied: bool = False
    message: str = ""

    def to_dict(self):
        d = asdict(self)
        d["status"] = self.status.value
        return d


@dataclass
class _State:
    x: np.ndarray
    body: Polytope
    masses: np.ndarray
    vq: float
    phi: float
    grad: np.ndarray

    @property
    def residual(self):
        return float(np.abs(self.grad).max())


class _Problem:
    def __init__(self, mu, q, level):
        self.V = np.array(mu.directions)
        self.V.setflags(write=False)
        self.w = np.asarray(mu.weights)
        self.total = mu.total
        self.q = q
        self.level = level
        self.log_omega = math.log(unit_ball_volume(mu.dim))

    def evaluate(self, x):
        P = Polytope(self.V, np.exp(x), check=False)
        dc = dual_curvature(P, self.q, default_rule(P, self.level))
        vq = dc.total
        phi = -(self.w @ x) / self.total + (math.log(vq) - self.log_omega) / self.q
        grad = -self.w / self.total + dc.masses / vq
        return _State(x, P, dc.masses, vq, phi, grad)


def initial_point(m, start, seed):
    """``log h = 0`` for start 0; uniform perturbations in [-1, 1] for later starts."""
    if start == 0:
        return np.zeros(m)
    return np.random.default_rng([seed, start]).uniform(-1.0, 1.0, m)


def _validate(mu):
    concentrated, witness = hemisphere_witness(mu.directions)
    if concentrated:
        raise InvalidMeasure(
            "measure is concentrated on the closed hemisphere {u : u . v >= 0} with v = "
            + np.array2string(witness, precision=6, separator=", "),
            witness=witness,
        )


def solve(mu, cfg, start=0, x0=None):
    """Recover the polytope whose q-th dual curvature measure is ``mu``.

    Parameters
    ----------
    mu : DiscreteMeasure
        Target measure, not concentrated on any closed hemisphere.
    cfg : SolverConfig
    start : int
        Multi-start index selecting the initial point (see
        :func:`initial_point`).
    x0 : array_like, optional
        Explicit initial log-supports, overriding ``start``.

    Returns
    -------
    body : Polytope
        Normals are the atom directions of ``mu`` in the same order,
        scaled so that ``Vq(body) = |mu|``.
    report : SolverReport

    Raises
    ------
    InvalidMeasure
        If ``mu`` lies in a closed hemisphere.
    """
    _validate(mu)
    prob = _Problem(mu, cfg.q, cfg.quad_level)
    x = initial_point(len(mu), start, cfg.seed) if x0 is None else np.asarray(x0, dtype=float)
    phis = {}

    def negphi(x):
        st = prob.evaluate(x)
        phis[x.tobytes()] = st.phi
        return -st.phi, -st.grad

    def step_done(xk):
        phi = phis.get(xk.tobytes())
        trace.append(prob.evaluate(xk).phi if phi is None else phi)
        phis.clear()

    trace = [prob.evaluate(x).phi]
    res = minimize(negphi, x, jac=True, method="L-BFGS-B", callback=step_done,
                   bounds=[(math.log(cfg.h_floor), None)] * len(x),
                   options={"gtol": cfg.tol, "ftol": 0.0, "maxiter": cfg.max_iter,
                            "maxfun": 20 * cfg.max_iter, "maxcor": cfg.memory})
    cur = prob.evaluate(res.x)
    it = int(res.nit)
    if cur.residual <= cfg.tol:
        status, msg = Status.CONVERGED, "residual below tolerance"
    elif it < cfg.max_iter and cur.residual <= 10 * cfg.tol:
        status, msg = Status.CONVERGED, "line search stalled with residual within 10*tol"
    else:
        status = Status.MAX_ITER
        msg = "iteration limit reached" if it >= cfg.max_iter else f"stopped early: {res.message}"
    logger.debug("solve: %s after %d iterations, residual %.3e", status.value, it, cur.residual)

    lam = (mu.total / cur.vq) ** (1.0 / cfg.q)
    body = cur.body.scaled(lam)
    rule = default_rule(body, cfg.quad_level)
    res = residual(mu, body, cfg.q, rule)
    M, ok = bound_check(body, mu.total, cfg.q)
    report = SolverReport(status, it, trace, res, M, ok, msg)
    return body, report


def residual(mu, P, q, rule=None):
    """``max_i |c_i - w_i| / |mu|`` for a body whose normals are the atoms of ``mu``."""
    if len(mu) != len(P) or mu.dim != P.dim:
        raise ShapeMismatch(f"measure has {len(mu)} atoms in R^{mu.dim}, "
                            f"body has {len(P)} normals in R^{P.dim}")
    if not np.allclose(mu.directions, P.normals, rtol=0, atol=1e-9):
        raise ShapeMismatch("body normals differ from the measure atoms")
    dc = dual_curvature(P, q, default_rule(P) if rule is None else rule)
    return float(np.abs(dc.masses - mu.weights).max() / mu.total)


def hemisphere_moment(n, p):
    """``m0 = integral over S^{n-1} of (u . e1)_+ ** p``, by adaptive quadrature.

    Uses ``du = |S^{n-2}| sin^{n-2}(t) dt`` with ``t`` the angle to ``e1``.
    """
    from scipy.integrate import quad

    ring = (n - 1) * unit_ball_volume(n - 1)
    val, _ = quad(lambda t: np.cos(t) ** p * np.sin(t) ** (n - 2), 0.0, np.pi / 2,
                  epsabs=1e-14, epsrel=1e-13, limit=200)
    return 2 * val if n == 2 else ring * val


def bound_check(P, c, q):
    """Radius bound ``M = (n c / m0)**(-1/q)`` on the polar body and whether P meets it."""
    n = P.dim
    m0 = hemisphere_moment(n, -q)
    M = (n * c / m0) ** (-1.0 / q)
    reach = float(np.linalg.norm(polar(P).vertices, axis=1).max())
    return M, bool(reach <= M * (1 + 1e-9))


def uniqueness_probe(mu, cfg, starts=None):
    """Largest pairwise Hausdorff distance among solutions from ``starts`` initial points."""
    k = cfg.starts if starts is None else starts
    bodies = [solve(mu, cfg, start=j)[0] for j in range(k)]
    return max((hausdorff_distance(a, b) for a, b in combinations(bodies, 2)), default=0.0)


def round_trip(P, q, cfg):
    """Solve for the curvature measure of ``P`` and return the Hausdorff distance to ``P``.

    Zero-mass (inactive) facets are dropped from the measure.  Since
    ``|mu| = Vq(P)``, the normalized target is ``P`` itself.
    """
    dc = dual_curvature(P, q, default_rule(P, cfg.quad_level))
    mu = dc.to_measure()
    body, report = solve(mu, cfg)
    return hausdorff_distance(P, body)


def measure_from_body(P, q, level=None):
    """Convenience: the q-th dual curvature measure of ``P`` as a :class:`DiscreteMeasure`."""
    return dual_curvature(P, q, default_rule(P, level)).to_measure()


__all__ = ["SolverConfig", "SolverReport", "Status", "solve", "residual", "bound_check",
           "hemisphere_moment", "uniqueness_probe", "round_trip", "measure_from_body",
           "initial_point"]
