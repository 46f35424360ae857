"""Brute-force Monte-Carlo references, independent of the quadrature rules.

Directions are normalized standard-normal vectors.  A run of ``N`` samples
is cut into chunks of ``CHUNK`` rows; chunk ``j`` draws from
``numpy.random.default_rng(SeedSequence(seed).spawn(nchunks)[j])`` and the
chunk sums are merged in chunk order, so results do not depend on the
number of worker threads (``DUALMINK_THREADS``).
"""
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import NotApplicable
from .geometry import _comparison_directions, normalize, support_value, unit_ball_volume

CHUNK = 1 << 16


@dataclass(frozen=True)
class McEstimate:
    mean: float
    std_error: float
    samples: int
    seed: int

    def agrees(self, value, k=4.0):
        """True when ``value`` lies within ``k`` standard errors of the mean."""
        return abs(value - self.mean) <= k * self.std_error


def worker_count():
    try:
        n = int(os.environ.get("DUALMINK_THREADS", "0"))
    except ValueError:
        n = 0
    return n if n > 0 else min(8, os.cpu_count() or 1)


def sample_sphere(n, N, seed):
    """``N`` uniform directions on S^{n-1} using the chunked seed schedule."""
    sizes = _chunk_sizes(N)
    seqs = np.random.SeedSequence(seed).spawn(len(sizes))
    return np.vstack([normalize(np.random.default_rng(s).standard_normal((k, n)))
                      for s, k in zip(seqs, sizes)])


def _chunk_sizes(N):
    full, rest = divmod(int(N), CHUNK)
    return [CHUNK] * full + ([rest] if rest else [])


def _cell_moments(P, q, N, seed):
    sizes = _chunk_sizes(N)
    seqs = np.random.SeedSequence(seed).spawn(len(sizes))
    n = P.dim

    def run(args):
        seq, k = args
        U = normalize(np.random.default_rng(seq).standard_normal((k, n)))
        return kernels.cell_moments(U, P.normals, P.supports, q)

    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        parts = list(pool.map(run, zip(seqs, sizes)))
    s1 = np.zeros(len(P))
    s2 = np.zeros(len(P))
    for a, b in parts:
        s1 += a
        s2 += b
    return s1, s2


def _estimate(s1, s2, N, scale, seed):
    mean = s1 / N
    var = np.maximum(s2 / N - mean ** 2, 0.0) * N / (N - 1)
    return McEstimate(float(scale * mean), float(scale * np.sqrt(var / N)), int(N), int(seed))


def mc_dual_volume(P, q, N=10 ** 6, seed=0):
    """Monte-Carlo estimate of ``omega_n * E[rho_P(U)**q]``, the q-th dual volume."""
    s1, s2 = _cell_moments(P, q, N, seed)
    return _estimate(s1.sum(), s2.sum(), N, unit_ball_volume(P.dim), seed)


def mc_dual_curvature(P, q, N=10 ** 6, seed=0):
    """Per-facet estimates on the same sample as :func:`mc_dual_volume`."""
    s1, s2 = _cell_moments(P, q, N, seed)
    w = unit_ball_volume(P.dim)
    return [_estimate(a, b, N, w, seed) for a, b in zip(s1, s2)]


@dataclass(frozen=True)
class ComparisonReport:
    """Outcome of sampling the radial comparison between two bodies.

    ``violations_*`` count sampled directions contradicting the respective
    statement; ``frac_*`` are empirical area fractions of the two cell
    unions that must have positive measure.
    """

    samples: int
    tested_a: int
    tested_b: int
    violations_a: int
    violations_b: int
    violations_c: int
    frac_d_q2_eta1: float
    frac_d_q1_eta2: float

    @property
    def ok(self):
        return (self.violations_a == 0 and self.violations_b == 0 and self.violations_c == 0
                and self.frac_d_q2_eta1 > 0 and self.frac_d_q1_eta2 > 0)


def _classify(Q1, Q2, V, tol):
    d = support_value(Q1, V) - support_value(Q2, V)
    return np.where(d > tol, 1, np.where(d < -tol, 2, 0))


def comparison_check(Q1, Q2, N=10 ** 5, seed=0, rtol=1e-10):
    """Sample the radial comparison statements for the pair ``(Q1, Q2)``.

    Normals ``v`` are split into ``eta1 = {h1 > h2}``, ``eta2 = {h1 < h2}``
    and ``eta0 = {h1 = h2}`` (equality up to ``rtol`` relative).  For a
    sampled ``u`` whose Q1-cell normal is in ``eta1`` we need
    ``rho1(u) > rho2(u)``; if its Q2-cell normal is in ``eta2`` or ``eta0``
    we need ``rho2(u) >= rho1(u)`` (with the same relative slack).  Raises
    :class:`NotApplicable` unless all three sets are nonempty.
    """
    if Q1.dim != Q2.dim:
        raise ValueError("bodies live in different dimensions")
    tol = rtol * max(Q1.supports.max(), Q2.supports.max())
    U = sample_sphere(Q1.dim, N, seed)
    probe = np.vstack([_comparison_directions(Q1, Q2, 4096 if Q1.dim == 2 else 20000), U])
    cls = _classify(Q1, Q2, probe, tol)
    has1, has2 = bool((cls == 1).any()), bool((cls == 2).any())
    # the sphere is connected, so eta1 and eta2 nonempty force eta0 nonempty
    has0 = bool((cls == 0).any()) or (has1 and has2)
    if not (has1 and has2 and has0):
        empty = [name for name, ok in (("eta1", has1), ("eta2", has2), ("eta0", has0)) if not ok]
        raise NotApplicable(f"empty comparison sets: {', '.join(empty)}")

    rho1, cell1 = kernels.radial_cells(U, Q1.normals, Q1.supports)
    rho2, cell2 = kernels.radial_cells(U, Q2.normals, Q2.supports)
    c1 = _classify(Q1, Q2, Q1.normals[cell1], tol)
    c2 = _classify(Q1, Q2, Q2.normals[cell2], tol)
    in_a = c1 == 1
    in_b = c2 != 1
    viol_a = int(np.count_nonzero(rho1[in_a] <= rho2[in_a]))
    viol_b = int(np.count_nonzero(rho1[in_b] > rho2[in_b] * (1 + rtol)))
    viol_c = int(np.count_nonzero(in_a & (c2 != 1)))
    return ComparisonReport(
        samples=int(N), tested_a=int(in_a.sum()), tested_b=int(in_b.sum()),
        violations_a=viol_a, violations_b=viol_b, violations_c=viol_c,
        frac_d_q2_eta1=float(np.mean(c2 == 1)), frac_d_q1_eta2=float(np.mean(c1 == 2)),
    )


def crossing_pair(Q1, Q2):
    """Rescale ``Q2`` so that ``h_Q1 - h_Q2`` changes sign on the sphere."""
    probe = _comparison_directions(Q1, Q2, 4096 if Q1.dim == 2 else 20000)
    r = support_value(Q1, probe) / support_value(Q2, probe)
    return Q1, Q2.scaled(float(np.sqrt(r.min() * r.max())))

