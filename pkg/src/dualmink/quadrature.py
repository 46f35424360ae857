"""Quadrature on the unit sphere adapted to the cells of a polytope.

Every rule carries, besides nodes and weights, the facet index whose
radial cell contains each node.  Three constructions are provided:

* ``arc``   (n = 2)  exact arc decomposition of the circle, Gauss-Legendre
  panels on each arc;
* ``mesh``  (n = 3)  icosahedral geodesic mesh, triangles whose corners
  disagree on the cell are split recursively up to a fixed depth; settled
  triangles carry a small Gauss rule, triangles still mixed at the cap a
  single centroid node weighted by the spherical area;
* ``facet`` (n = 3)  the radial cell of each facet (a geodesic polygon with
  corners at the vertex directions) is fanned into geodesic triangles,
  refined on the sphere, and each triangle carries a collapsed Gauss rule
  pulled back by central projection.  Cells are exact.
"""
import json
import warnings
from functools import lru_cache
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import DepthCapExceeded, NonFiniteIntegrand

GAUSS_ORDER_2D = 16
TRIANGLE_ORDER = 6
MESH_ORDER = 3
DEPTH_CAP = 12
DEFAULT_LEVEL = {2: 0, 3: 2}


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes, positive weights and cell assignment on S^{n-1}.

    ``mixed`` marks nodes of mesh triangles still straddling a cell
    boundary when refinement stopped; their cell assignment is uncertain.
    """

    dim: int
    nodes: np.ndarray
    weights: np.ndarray
    cells: np.ndarray
    kind: str
    mixed: np.ndarray = field(default=None)
    depth_capped: bool = False

    def __post_init__(self):
        if self.mixed is None:
            object.__setattr__(self, "mixed", np.zeros(len(self.weights), dtype=bool))
        for a in (self.nodes, self.weights, self.cells, self.mixed):
            a.setflags(write=False)

    def __len__(self):
        return len(self.weights)

    @property
    def mixed_area(self):
        return float(self.weights[self.mixed].sum())

    def cell_areas(self, m):
        """Total weight assigned to each of ``m`` facets."""
        return np.bincount(self.cells, weights=self.weights, minlength=m)

    def to_dict(self):
        return {"nodes": self.nodes.tolist(), "weights": self.weights.tolist(),
                "cells": self.cells.tolist()}

    def dumps(self):
        return json.dumps(self.to_dict())


@dataclass(frozen=True)
class ArcDecomposition:
    """Cells of a polygon on the unit circle.

    ``arcs`` lists ``(facet, start, end)`` with ``0 <= start < 2 pi`` and
    ``end > start``; an arc may run past ``2 pi``.  Inactive facets own no
    arc.
    """

    arcs: tuple

    def lengths(self, m):
        out = np.zeros(m)
        for i, a, b in self.arcs:
            out[i] += b - a
        return out

    def facet_at(self, theta):
        t = np.mod(theta, 2 * np.pi)
        for i, a, b in self.arcs:
            if a <= t < b or a <= t + 2 * np.pi < b:
                return i
        raise ValueError(f"angle {theta} not covered")


def arc_decomposition(P):
    """Split the circle at P's vertex directions into per-facet arcs."""
    if P.dim != 2:
        raise ValueError("arc decomposition is planar only")
    X, ring = P.vertices, P._ring
    k = len(ring)
    ang = np.mod(np.arctan2(X[:, 1], X[:, 0]), 2 * np.pi)
    arcs = []
    for j in range(k):
        # vertex j-1 joins ring[j-1], ring[j]; vertex j joins ring[j], ring[j+1]
        start = ang[j - 1]
        length = np.mod(ang[j] - start, 2 * np.pi)
        arcs.append((int(ring[j]), float(start), float(start + length)))
    arcs.sort(key=lambda a: a[1])
    return ArcDecomposition(tuple(arcs))


@lru_cache(maxsize=None)
def _gauss01(order):
    x, w = np.polynomial.legendre.leggauss(order)
    s, w = 0.5 * (x + 1.0), 0.5 * w
    s.setflags(write=False)
    w.setflags(write=False)
    return s, w


def _arc_rule(P, level):
    X, ring = P.vertices, P._ring
    ang = np.arctan2(X[:, 1], X[:, 0])
    start = np.roll(ang, 1)
    length = np.mod(ang - start, 2 * np.pi)
    s, w = _gauss01(GAUSS_ORDER_2D)
    panels = 2 ** level
    frac = ((np.arange(panels)[:, None] + s[None, :]) / panels).ravel()
    theta = (start[:, None] + length[:, None] * frac[None, :]).ravel()
    weight = (length[:, None] * np.tile(w, panels)[None, :] / panels).ravel()
    cells = np.repeat(ring, len(frac))
    nodes = np.column_stack([np.cos(theta), np.sin(theta)])
    return QuadratureRule(2, nodes, weight, cells, "arc")


def icosahedron():
    """Vertices (12, 3) on the unit sphere and faces (20, 3), outward oriented."""
    p = (1 + 5 ** 0.5) / 2
    v = np.array([[-1, p, 0], [1, p, 0], [-1, -p, 0], [1, -p, 0],
                  [0, -1, p], [0, 1, p], [0, -1, -p], [0, 1, -p],
                  [p, 0, -1], [p, 0, 1], [-p, 0, -1], [-p, 0, 1]], dtype=float)
    v /= np.linalg.norm(v, axis=1)[:, None]
    f = np.array([[0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
                  [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
                  [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
                  [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1]])
    return v, f


def _split_spherical(T):
    a, b, c = T[:, 0], T[:, 1], T[:, 2]

    def mid(x, y):
        m = x + y
        return m / np.linalg.norm(m, axis=1)[:, None]

    ab, bc, ca = mid(a, b), mid(b, c), mid(c, a)
    return np.concatenate([np.stack(t, axis=1) for t in
                           ((a, ab, ca), (ab, b, bc), (ca, bc, c), (ab, bc, ca))])


def spherical_triangle_area(T):
    """Area of spherical triangles with unit corners ``T[:, 0..2]``."""
    a, b, c = T[:, 0], T[:, 1], T[:, 2]
    num = np.abs(np.einsum("ij,ij->i", a, np.cross(b, c)))
    den = 1 + np.einsum("ij,ij->i", a, b) + np.einsum("ij,ij->i", b, c) + np.einsum("ij,ij->i", c, a)
    return 2 * np.arctan2(num, den)


def _mesh_rule(P, level, depth_cap):
    # a triangle whose corners share a cell lies inside it (cells are geodesically
    # convex), so it gets a Gauss rule and the corner cell; triangles still mixed
    # at the cap get one centroid node, assigned by argmin
    v, f = icosahedron()
    T = v[f]
    for _ in range(level):
        T = _split_spherical(T)
    xi, eta, wref = _triangle_rule(MESH_ORDER)
    depth = level
    nodes, weights, cells, mixed_flags = [], [], [], []
    capped = False
    while len(T):
        _, cc = kernels.radial_cells(T.reshape(-1, 3), P.normals, P.supports)
        cc = cc.reshape(-1, 3)
        agree = (cc[:, 0] == cc[:, 1]) & (cc[:, 1] == cc[:, 2])
        if agree.any():
            x, w = _gnomonic_nodes(T[agree], xi, eta, wref)
            nodes.append(x)
            weights.append(w)
            cells.append(np.repeat(cc[agree, 0], len(wref)))
            mixed_flags.append(np.zeros(len(w), dtype=bool))
        T = T[~agree]
        if depth >= depth_cap:
            if len(T):
                capped = True
                cen = T.sum(axis=1)
                cen /= np.linalg.norm(cen, axis=1)[:, None]
                nodes.append(cen)
                weights.append(spherical_triangle_area(T))
                cells.append(kernels.radial_cells(cen, P.normals, P.supports)[1])
                mixed_flags.append(np.ones(len(T), dtype=bool))
            break
        T = _split_spherical(T)
        depth += 1
    rule = QuadratureRule(3, np.concatenate(nodes), np.concatenate(weights),
                          np.concatenate(cells).astype(np.int64), "mesh",
                          np.concatenate(mixed_flags), capped)
    if capped and rule.mixed_area > 1e-3 * 4 * np.pi:
        warnings.warn(f"{rule.mixed_area:.3g} sr of mixed triangles left at depth {depth_cap}",
                      DepthCapExceeded, stacklevel=3)
    return rule


@lru_cache(maxsize=None)
def _triangle_rule(order):
    """Collapsed Gauss rule on the reference triangle, weights summing to 1."""
    s, ws = _gauss01(order)
    S, Tt = np.meshgrid(s, s, indexing="ij")
    W = np.outer(ws, ws) * (1 - S)
    xi, eta = S.ravel(), (Tt * (1 - S)).ravel()
    W = W.ravel()
    return xi, eta, W / W.sum()


def _gnomonic_nodes(T, xi, eta, wref):
    """Collapsed Gauss rule on geodesic triangles ``T`` via central projection.

    A point ``y`` of the flat triangle through the three unit corners maps
    to ``y/|y|`` with area element ``d / |y|^3``, ``d`` the distance of the
    flat triangle's plane from the origin.
    """
    a, e1, e2 = T[:, 0], T[:, 1] - T[:, 0], T[:, 2] - T[:, 0]
    nrm = np.cross(e1, e2)
    twice_area = np.linalg.norm(nrm, axis=1)
    d = np.abs(np.einsum("ij,ij->i", a, nrm)) / twice_area
    y = a[:, None] + xi[None, :, None] * e1[:, None] + eta[None, :, None] * e2[:, None]
    r = np.linalg.norm(y, axis=2)
    w = 0.5 * twice_area[:, None] * wref[None, :] * d[:, None] / r ** 3
    return (y / r[..., None]).reshape(-1, 3), w.ravel()


def _facet_rule(P, level):
    X = P.vertices
    U = X / np.linalg.norm(X, axis=1)[:, None]
    xi, eta, wref = _triangle_rule(TRIANGLE_ORDER)
    tris, owner = [], []
    for i, poly in enumerate(P.facet_polygons()):
        if poly.size < 3:
            continue
        corners = U[poly]
        c = corners.sum(axis=0)
        c /= np.linalg.norm(c)
        T = np.stack([np.broadcast_to(c, corners.shape), corners,
                      np.roll(corners, -1, axis=0)], axis=1)
        tris.append(T)
        owner.append(np.full(len(T), i, dtype=np.int64))
    T = np.concatenate(tris)
    owner = np.concatenate(owner)
    for _ in range(level):
        T = _split_spherical(T)
        owner = np.tile(owner, 4)
    nodes, weights = _gnomonic_nodes(T, xi, eta, wref)
    cells = np.repeat(owner, len(wref))
    return QuadratureRule(3, nodes, weights, cells, "facet")


def build_rule(dim, level, P, method=None, depth_cap=DEPTH_CAP):
    """Quadrature rule on S^{dim-1} whose cells follow the polytope ``P``.

    Parameters
    ----------
    dim : int
        2 or 3; must match ``P.dim``.
    level : int
        Refinement level.  In the plane, each arc is cut into ``2**level``
        Gauss-Legendre panels of 16 nodes.  For ``method="mesh"`` the
        icosahedron is subdivided ``level`` times before adaptive splitting;
        for ``method="facet"`` each geodesic fan triangle is split ``level``
        times.
    method : {"arc", "mesh", "facet"}, optional
        Defaults to ``"arc"`` in 2D and ``"mesh"`` in 3D.
    depth_cap : int
        Maximum icosahedral subdivision depth for mixed mesh triangles,
        counted from the icosahedron itself.
    """
    if dim != P.dim:
        raise ValueError(f"rule dimension {dim} does not match body dimension {P.dim}")
    if level < 0:
        raise ValueError("level must be nonnegative")
    if dim == 2:
        if method not in (None, "arc"):
            raise ValueError(f"unknown planar method {method!r}")
        return _arc_rule(P, level)
    if dim == 3:
        method = method or "mesh"
        if method == "mesh":
            return _mesh_rule(P, level, depth_cap)
        if method == "facet":
            return _facet_rule(P, level)
        raise ValueError(f"unknown method {method!r}")
    raise NotImplementedError("deterministic quadrature exists for n in {2, 3}; use the oracle module")


def default_rule(P, level=None):
    """Rule used by measure evaluation and the solver: exact cells in 2D and 3D."""
    if level is None:
        level = DEFAULT_LEVEL.get(P.dim, 0)
    if P.dim == 3:
        return build_rule(3, level, P, method="facet")
    return build_rule(P.dim, level, P)


def integrate(rule, f):
    """``sum_k w_k f(u_k)``; ``f`` maps an (N, n) array of nodes to N values."""
    vals = np.asarray(f(rule.nodes), dtype=np.float64)
    if vals.shape != rule.weights.shape:
        vals = np.broadcast_to(vals, rule.weights.shape)
    if not np.all(np.isfinite(vals)):
        raise NonFiniteIntegrand("integrand is not finite at some quadrature node")
    return float(rule.weights @ vals)
