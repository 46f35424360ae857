"""Convex polytopes given by outward unit normals and support numbers.

A :class:`Polytope` is the Wulff shape ``{x : x . v_i <= h_i}`` with every
``h_i > 0``, so the origin is interior.  Vertices are enumerated exactly in
two and three dimensions (angular scan in the plane, convex hull of the dual
points ``v_i / h_i`` in space).  Facets whose halfspace does not touch the
body in a face of full dimension are kept but flagged inactive.

Measures on the sphere are :class:`DiscreteMeasure` objects: distinct unit
directions carrying positive weights.
"""
import math

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull, QhullError, cKDTree

from . import kernels
from .errors import InvalidBody, InvalidMeasure, UnboundedWulff

UNIT_TOL = 1e-9
DEDUP_ANGLE = 1e-8
HEMISPHERE_TOL = 1e-10
VERTEX_TOL = 1e-9
TIE_RTOL = 1e-12
RENORM_TOL = 1e-14


def unit_ball_volume(n):
    """Volume of the n-dimensional unit ball."""
    return math.pi ** (n / 2) / math.gamma(n / 2 + 1)


def sphere_area(n):
    """Surface area ``n * omega_n`` of the unit sphere in R^n."""
    return n * unit_ball_volume(n)


def as_directions(arr, exc=ValueError, what="direction"):
    """Validate an (m, n) array of unit vectors, renormalizing rows off by more than rounding."""
    a = np.array(arr, dtype=np.float64, ndmin=2)
    if a.ndim != 2 or a.shape[1] < 2:
        raise exc(f"{what}s must form an (m, n) array with n >= 2")
    if not np.all(np.isfinite(a)):
        raise exc(f"non-finite {what}")
    norms = np.linalg.norm(a, axis=1)
    bad = np.flatnonzero(np.abs(norms - 1.0) > UNIT_TOL)
    if bad.size:
        raise exc(f"{what} {bad[0]} has norm {float(norms[bad[0]]):.17g}, expected 1")
    # leave rows that are unit up to rounding untouched so file round trips are exact
    fix = np.abs(norms - 1.0) > RENORM_TOL
    a[fix] /= norms[fix, None]
    return a


def _check_distinct(dirs, exc, what):
    pairs = cKDTree(dirs).query_pairs(r=DEDUP_ANGLE)
    if pairs:
        i, j = sorted(min(pairs))
        raise exc(f"{what}s {i} and {j} coincide within {DEDUP_ANGLE:g} rad")


def _frozen(a):
    a = np.array(a, dtype=np.float64)
    a.setflags(write=False)
    return a


def normalize(v):
    v = np.asarray(v, dtype=np.float64)
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


# ---------------------------------------------------------------------------
# hemisphere test


def hemisphere_witness(directions):
    """Search for a closed hemisphere containing every direction.

    Solves ``max t  s.t.  v . u_i >= t,  |v|_inf <= 1`` once for each face
    ``v_j = +-1`` of the cube; fixing a face rules out the trivial ``v = 0``.
    The directions lie in a closed hemisphere iff the best ``t`` is
    nonnegative.

    Returns
    -------
    concentrated : bool
    witness : ndarray or None
        Unit normal of a containing hemisphere when ``concentrated``.
    """
    U = np.asarray(directions, dtype=np.float64)
    m, n = U.shape
    c = np.zeros(n + 1)
    c[-1] = -1.0
    A = np.hstack([-U, np.ones((m, 1))])
    b = np.zeros(m)
    best_t, best_v = -np.inf, None
    for j in range(n):
        for s in (1.0, -1.0):
            bounds = [(-1.0, 1.0)] * n + [(None, None)]
            bounds[j] = (s, s)
            res = linprog(c, A_ub=A, b_ub=b, bounds=bounds, method="highs")
            if res.status == 0 and res.x[-1] > best_t:
                best_t, best_v = res.x[-1], res.x[:n]
    if best_t >= -HEMISPHERE_TOL:
        return True, normalize(best_v)
    return False, None


def hemisphere_check(mu):
    """True iff the measure is NOT concentrated on any closed hemisphere."""
    directions = mu.directions if isinstance(mu, DiscreteMeasure) else mu
    concentrated, _ = hemisphere_witness(directions)
    return not concentrated


# ---------------------------------------------------------------------------
# measures


class DiscreteMeasure:
    """Finite sum of weighted point masses on the unit sphere.

    Parameters
    ----------
    directions : array_like, shape (m, n)
        Distinct unit vectors (norms within 1e-9 of one).
    weights : array_like, shape (m,)
        Strictly positive masses.
    """

    def __init__(self, directions, weights):
        U = as_directions(directions, InvalidMeasure, "atom direction")
        w = np.asarray(weights, dtype=np.float64).reshape(-1)
        if w.shape[0] != U.shape[0]:
            raise InvalidMeasure(f"{U.shape[0]} directions but {w.shape[0]} weights")
        if U.shape[0] == 0:
            raise InvalidMeasure("measure has no atoms")
        if not np.all(np.isfinite(w)) or np.any(w <= 0):
            raise InvalidMeasure("atom weights must be finite and strictly positive")
        _check_distinct(U, InvalidMeasure, "atom direction")
        self.directions = _frozen(U)
        self.weights = _frozen(w)

    @classmethod
    def from_atoms(cls, atoms):
        """Build from an iterable of ``(direction, weight)`` pairs."""
        atoms = list(atoms)
        return cls([a[0] for a in atoms], [a[1] for a in atoms])

    @property
    def dim(self):
        return self.directions.shape[1]

    @property
    def total(self):
        return float(self.weights.sum())

    def __len__(self):
        return self.directions.shape[0]

    def __repr__(self):
        return f"DiscreteMeasure(dim={self.dim}, atoms={len(self)}, total={self.total:.6g})"


# ---------------------------------------------------------------------------
# polytopes


def _angles(V):
    return np.arctan2(V[:, 1], V[:, 0])


def _vertices_2d(V, h):
    """Vertices in counter-clockwise order plus the active facet ring.

    Vertex ``k`` is the intersection of facet lines ``ring[k]`` and
    ``ring[k + 1]``.
    """
    ang = _angles(V)
    order = np.argsort(ang, kind="stable")
    gaps = np.diff(np.append(ang[order], ang[order[0]] + 2 * np.pi))
    if len(h) < 3 or gaps.max() >= np.pi - 1e-12:
        raise UnboundedWulff("normals lie in a closed half-plane")
    dual = V / h[:, None]
    ring = order
    while True:
        a, b, c = dual[np.roll(ring, 1)], dual[ring], dual[np.roll(ring, -1)]
        e1, e2 = b - a, c - b
        cross = e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]
        # removing every non-convex point at once is safe: each lies in the
        # triangle spanned by the origin and its current neighbours
        keep = cross > TIE_RTOL * np.linalg.norm(e1, axis=1) * np.linalg.norm(e2, axis=1)
        if keep.all():
            break
        ring = ring[keep]
    v1, v2 = V[ring], V[np.roll(ring, -1)]
    h1, h2 = h[ring], h[np.roll(ring, -1)]
    det = v1[:, 0] * v2[:, 1] - v1[:, 1] * v2[:, 0]
    verts = np.column_stack([(h1 * v2[:, 1] - h2 * v1[:, 1]) / det,
                             (v1[:, 0] * h2 - v2[:, 0] * h1) / det])
    return verts, ring.astype(np.int64)


def _vertices_3d(V, h):
    dual = V / h[:, None]
    try:
        hull = ConvexHull(dual)
    except (QhullError, ValueError) as exc:
        raise UnboundedWulff(f"normals do not surround the origin ({exc})") from None
    eq = hull.equations
    scale = np.abs(dual).max()
    if np.any(eq[:, 3] > -1e-12 * scale):
        raise UnboundedWulff("normals lie in a closed hemisphere")
    raw = eq[:, :3] / -eq[:, 3:4]
    # coplanar hull simplices share a vertex of the primal polytope
    tol = 1e-10 * np.abs(raw).max()
    tree = cKDTree(raw)
    groups = tree.query_ball_point(raw, r=tol)
    seen = np.full(len(raw), -1)
    verts = []
    for i, g in enumerate(groups):
        if seen[i] >= 0:
            continue
        seen[g] = len(verts)
        verts.append(raw[g].mean(axis=0))
    return np.array(verts), np.sort(hull.vertices).astype(np.int64)


class Polytope:
    """Convex polytope ``{x : x . v_i <= h_i}`` containing the origin.

    Parameters
    ----------
    normals : array_like, shape (m, n)
        Distinct outward unit normals, not contained in a closed hemisphere.
    supports : array_like, shape (m,)
        Positive support numbers ``h_i``.
    check : bool
        Validate unit length and distinctness of the normals.  Internal
        callers that reuse already-validated normals pass False.

    Attributes
    ----------
    vertices : ndarray, shape (k, n)
        Vertices (n <= 3 only).  In the plane they are in counter-clockwise
        order.
    active : ndarray of bool, shape (m,)
        False for facets that do not meet the body in an (n-1)-face.
    """

    def __init__(self, normals, supports, check=True):
        if check:
            V = as_directions(normals, InvalidBody, "normal")
        else:
            V = np.asarray(normals, dtype=np.float64)
        h = np.asarray(supports, dtype=np.float64).reshape(-1)
        if h.shape[0] != V.shape[0]:
            raise InvalidBody(f"{V.shape[0]} normals but {h.shape[0]} supports")
        if not np.all(np.isfinite(h)) or np.any(h <= 0):
            raise InvalidBody("support numbers must be finite and strictly positive")
        if check:
            _check_distinct(V, InvalidBody, "normal")
        self.normals = _frozen(V) if V.flags.writeable else V
        self.supports = _frozen(h)
        n = V.shape[1]
        self._ring = None
        if n == 2:
            verts, ring = _vertices_2d(V, h)
            self._ring = ring
            active = np.zeros(len(h), dtype=bool)
            active[ring] = True
        elif n == 3:
            verts, act = _vertices_3d(V, h)
            active = np.zeros(len(h), dtype=bool)
            active[act] = True
        else:
            concentrated, _ = hemisphere_witness(V)
            if concentrated:
                raise UnboundedWulff("normals lie in a closed hemisphere")
            verts, active = None, np.ones(len(h), dtype=bool)
        self._vertices = None if verts is None else _frozen(verts)
        active.setflags(write=False)
        self.active = active

    @property
    def dim(self):
        return self.normals.shape[1]

    @property
    def vertices(self):
        if self._vertices is None:
            raise NotImplementedError("vertex enumeration is available for n <= 3 only")
        return self._vertices

    def __len__(self):
        return self.normals.shape[0]

    def __repr__(self):
        return (f"Polytope(dim={self.dim}, facets={len(self)}, "
                f"active={int(self.active.sum())})")

    def scaled(self, lam):
        """The dilate ``lam * P``; normals, facet flags and vertex order are reused."""
        lam = float(lam)
        if not lam > 0:
            raise ValueError("scale factor must be positive")
        Q = object.__new__(Polytope)
        Q.normals = self.normals
        Q.supports = _frozen(lam * self.supports)
        Q._ring = self._ring
        Q._vertices = None if self._vertices is None else _frozen(lam * self._vertices)
        Q.active = self.active
        return Q

    def support_value(self, v):
        return support_value(self, v)

    def radial_value(self, u):
        return radial_value(self, u)

    def facet_polygons(self):
        """For each facet, indices into :attr:`vertices` lying on its plane.

        Inactive facets map to an empty array.  In three dimensions each
        polygon is returned in counter-clockwise order seen from outside.
        """
        X = self.vertices
        out = []
        scale = max(1.0, float(np.abs(X).max()))
        for i, (v, hi) in enumerate(zip(self.normals, self.supports)):
            if not self.active[i]:
                out.append(np.empty(0, dtype=np.int64))
                continue
            on = np.flatnonzero(np.abs(X @ v - hi) <= VERTEX_TOL * scale)
            if self.dim == 3 and on.size >= 3:
                c = X[on].mean(axis=0)
                e1 = X[on[0]] - c
                e1 /= np.linalg.norm(e1)
                e2 = np.cross(v, e1)
                d = X[on] - c
                on = on[np.argsort(np.arctan2(d @ e2, d @ e1))]
            out.append(on)
        return out


def _rows(x, n):
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    x = x.reshape(-1, n)
    return x, single


def support_value(P, v):
    """``h_P(v) = max_x x . v`` over the vertices; accepts one or many directions."""
    v, single = _rows(v, P.dim)
    out = (v @ P.vertices.T).max(axis=1)
    return float(out[0]) if single else out


def radial_value(P, u):
    """``rho_P(u) = min {h_i / (u . v_i) : u . v_i > 0}``; one or many directions."""
    u, single = _rows(u, P.dim)
    rho, cell = kernels.radial_cells(u, P.normals, P.supports)
    if np.any(cell < 0):
        raise InvalidBody("a ray from the origin never leaves the body")
    return float(rho[0]) if single else rho


def reverse_gauss_cell(P, u):
    """Facets whose halfspace attains ``rho_P(u)``; ties are reported in full."""
    u = np.asarray(u, dtype=np.float64).reshape(P.dim)
    d = P.normals @ u
    pos = d > 0
    if not pos.any():
        raise InvalidBody("a ray from the origin never leaves the body")
    ratio = np.full(len(P), np.inf)
    ratio[pos] = P.supports[pos] / d[pos]
    best = ratio.min()
    return set(np.flatnonzero(ratio <= best * (1.0 + TIE_RTOL)).tolist())


def vertices(P):
    return P.vertices


def wulff_shape(normals, f):
    """The polytope ``{x : x . v_i <= f_i}``."""
    return Polytope(normals, f)


def polar(P):
    """Polar body: one facet per vertex ``x`` with normal ``x/|x|`` and support ``1/|x|``."""
    X = P.vertices
    r = np.linalg.norm(X, axis=1)
    return Polytope(X / r[:, None], 1.0 / r)


def scale_body(P, lam):
    if lam <= 0:
        raise ValueError("scale factor must be positive")
    return P.scaled(lam)


def sample_directions(n, count):
    """Deterministic near-uniform directions: equiangular in 2D, Fibonacci in 3D."""
    if n == 2:
        t = 2 * np.pi * (np.arange(count) + 0.5) / count
        return np.column_stack([np.cos(t), np.sin(t)])
    if n == 3:
        k = np.arange(count) + 0.5
        z = 1 - 2 * k / count
        phi = np.pi * (3 - np.sqrt(5)) * k
        r = np.sqrt(1 - z * z)
        return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])
    raise NotImplementedError("deterministic direction samples exist for n in {2, 3}")


def _comparison_directions(P, Q, count):
    dense = sample_directions(P.dim, count)
    parts = [P.normals, Q.normals, normalize(P.vertices), normalize(Q.vertices), dense]
    return np.vstack(parts)


def hausdorff_distance(P, Q, samples=None, return_resolution=False):
    """Approximate ``sup |h_P - h_Q|`` over the sphere.

    Evaluated on both normal sets, both sets of vertex directions and a dense
    deterministic sample (default 4096 directions in 2D, 20000 in 3D).  With
    ``return_resolution`` the angular spacing of the dense sample is
    returned as well.
    """
    if P.dim != Q.dim:
        raise ValueError("bodies live in different dimensions")
    count = samples or (4096 if P.dim == 2 else 20000)
    U = _comparison_directions(P, Q, count)
    dist = float(np.abs(support_value(P, U) - support_value(Q, U)).max())
    if return_resolution:
        res = 2 * np.pi / count if P.dim == 2 else math.sqrt(4 * np.pi / count)
        return dist, res
    return dist


def radial_distance(P, Q, samples=None):
    """Approximate ``sup |rho_P - rho_Q|`` on the same kind of sample."""
    if P.dim != Q.dim:
        raise ValueError("bodies live in different dimensions")
    count = samples or (4096 if P.dim == 2 else 20000)
    U = _comparison_directions(P, Q, count)
    return float(np.abs(radial_value(P, U) - radial_value(Q, U)).max())


# ---------------------------------------------------------------------------
# stock bodies and random instances


def square(side=1.0):
    """``[-side, side]^2``."""
    V = np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]])
    return Polytope(V, np.full(4, side))


def cube(side=1.0):
    V = np.vstack([np.eye(3), -np.eye(3)])
    return Polytope(V, np.full(6, side))


def regular_polygon(m, h=1.0, phase=0.0):
    """Regular m-gon with normals at angles ``phase + 2 pi k / m`` and support ``h``."""
    t = phase + 2 * np.pi * np.arange(m) / m
    return Polytope(np.column_stack([np.cos(t), np.sin(t)]), np.full(m, float(h)))


def random_directions(n, m, rng):
    """``m`` uniform directions on S^{n-1} from normalized Gaussian vectors."""
    return normalize(rng.standard_normal((m, n)))


def random_polytope(n, m, rng, spread=0.3, max_tries=1000):
    """Random polytope with ``m`` normals, all facets active.

    Normals are uniform on the sphere, resampled until they surround the
    origin.  Supports are those of a random ellipsoid ``c + A B`` with
    semi-axes ``exp(spread * N(0,1))`` and the origin inside.  A polytope
    circumscribed about a strictly convex body has no redundant facets, so
    resampling is only needed for numerically degenerate draws.
    """
    for _ in range(max_tries):
        V = random_directions(n, m, rng)
        if hemisphere_witness(V)[0]:
            continue
        if n == 2 and np.min(np.diff(np.sort(_angles(V)))) < 1e-3:
            continue
        R, _ = np.linalg.qr(rng.standard_normal((n, n)))
        A = (R * np.exp(spread * rng.standard_normal(n))) @ R.T
        z = rng.standard_normal(n)
        z *= 0.5 * rng.uniform() ** (1.0 / n) / np.linalg.norm(z)
        AV = V @ A
        h = np.linalg.norm(AV, axis=1) + AV @ z
        P = Polytope(V, h)
        if P.active.all():
            return P
    raise InvalidBody(f"no valid random polytope after {max_tries} tries")
