"""Stationary Klein-Gordon problem.

The separable state ``phi(x, t) = exp(-i E1 t / hbar) phi2(x)`` solves the
flat Klein-Gordon equation when ``phi2`` is a Dirichlet eigenfunction,
``-Lap phi2 = lam phi2``, and ``E1`` is a root of

    gamma / (2 c^2 hbar^2) E1^2 + E1 - m c^2 - gamma lam / 2 = 0,

i.e. ``E2(E1) = -gamma lam / 2`` with ``E2 = -gamma E1^2/(2 c^2 hbar^2) + m c^2 - E1``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import ArgumentError
from .grid import Grid, ScalarField
from .lanczos import lanczos_smallest

DENSE_LIMIT = 2000
CLUSTER_RTOL = 1e-8


@dataclass(frozen=True, eq=False)
class EigenPair:
    """Dirichlet Laplacian eigenvalue ``lam`` and its L2-normalised eigenfunction.

    ``residual`` is ``||-Lap_h phi2 - lam phi2|| / ||phi2||`` for the discrete operator.
    """

    lam: float
    phi2: ScalarField
    residual: float


@dataclass(frozen=True)
class DispersionRoots:
    E1_plus: float
    E1_minus: float
    discriminant: float

    @property
    def principal(self):
        # the root that stays bounded as gamma / (c hbar)^2 -> 0 and as lam -> 0
        return self.E1_plus

    def to_dict(self):
        return {
            "E1_plus": self.E1_plus,
            "E1_minus": self.E1_minus,
            "E1_principal": self.principal,
            "discriminant": self.discriminant,
        }


def _spatial(grid):
    if grid.time_axis:
        raise ArgumentError("the eigenproblem lives on a spatial grid")
    return grid


def laplacian_matrix(grid):
    """Sparse ``-Lap_h`` on the interior points (Dirichlet), row-major ordering."""
    _spatial(grid)
    mats = []
    for n, h in zip(grid.points, grid.spacing):
        m = n - 2
        mats.append(sp.diags([-np.ones(m - 1), 2 * np.ones(m), -np.ones(m - 1)], [-1, 0, 1]) / h**2)
    sizes = [n - 2 for n in grid.points]
    A = sp.csr_matrix((int(np.prod(sizes)), int(np.prod(sizes))))
    for ax, T in enumerate(mats):
        left = sp.identity(int(np.prod(sizes[:ax])), format="csr")
        right = sp.identity(int(np.prod(sizes[ax + 1 :])), format="csr")
        A = A + sp.kron(sp.kron(left, T), right, format="csr")
    return A.tocsr()


def _sign_normalize(u):
    # first component that is not numerically zero becomes positive
    thresh = 1e-8 * np.max(np.abs(u))
    first = np.argmax(np.abs(u) > thresh)
    return -u if u[first] < 0 else u


def _order(values, vectors):
    """Ascending order; lexicographic order of components inside degenerate clusters."""
    vectors = np.column_stack([_sign_normalize(vectors[:, i]) for i in range(vectors.shape[1])])
    idx = list(np.argsort(values, kind="stable"))
    out = []
    i = 0
    while i < len(idx):
        j = i + 1
        while j < len(idx) and abs(values[idx[j]] - values[idx[i]]) <= CLUSTER_RTOL * max(abs(values[idx[i]]), 1e-300):
            j += 1
        cluster = idx[i:j]
        cluster.sort(key=lambda c: tuple(np.round(vectors[:, c], 12)), reverse=True)
        out.extend(cluster)
        i = j
    return values[out], vectors[:, out]


def laplacian_eigs(grid, k, seed=0, dense_limit=DENSE_LIMIT, tol=1e-9):
    """The ``k`` smallest eigenpairs of the Dirichlet finite-difference Laplacian.

    Uses a dense symmetric solver when the interior has at most
    ``dense_limit`` points and block Lanczos otherwise.  Eigenfunctions are
    zero on the boundary and satisfy ``int phi_i phi_j dx = delta_ij`` under
    the trapezoid rule.
    """
    _spatial(grid)
    k = int(k)
    A = laplacian_matrix(grid)
    n = A.shape[0]
    if k < 1 or k > n:
        raise ArgumentError(f"k={k} must lie in [1, {n}] for this grid")
    if n <= dense_limit:
        vals, vecs = np.linalg.eigh(A.toarray())
        vals, vecs = vals[:k], vecs[:, :k]
    else:
        vals, vecs, _ = lanczos_smallest(lambda X: A @ X, n, k, block=k, tol=tol, seed=seed)
    vals, vecs = _order(vals, vecs)

    cell = float(np.prod(grid.spacing))
    inner = tuple(slice(1, -1) for _ in grid.points)
    pairs = []
    for lam, u in zip(vals, vecs.T):
        u = u / np.linalg.norm(u)
        res = float(np.linalg.norm(A @ u - lam * u))
        full = np.zeros(grid.shape)
        full[inner] = u.reshape([p - 2 for p in grid.points]) / np.sqrt(cell)
        pairs.append(EigenPair(float(lam), ScalarField(grid, full), res))
    return pairs


def analytic_box_spectrum(lengths, count):
    """Smallest ``count`` continuum Dirichlet eigenvalues of a box, with multiplicity."""
    lengths = np.asarray(lengths, dtype=float)
    nmax = int(np.ceil(count ** (1 / len(lengths)))) + 2
    vals = sorted(
        float(np.pi**2 * np.sum((np.asarray(ns) / lengths) ** 2))
        for ns in itertools.product(range(1, nmax + 1), repeat=len(lengths))
    )
    return vals[:count]


def clusters(values, rtol=CLUSTER_RTOL):
    """Group ascending eigenvalues into (value, size) clusters."""
    out = []
    for v in values:
        if out and abs(v - out[-1][0]) <= rtol * max(abs(out[-1][0]), 1e-300):
            out[-1][1] += 1
        else:
            out.append([v, 1])
    return [(float(v), n) for v, n in out]


def dispersion_E2(E1, consts):
    """``E2 = -gamma E1^2 / (2 c^2 hbar^2) + m c^2 - E1``."""
    return -consts.gamma * E1**2 / (2.0 * consts.c**2 * consts.hbar**2) + consts.rest_energy - E1


def solve_E1(lam, consts):
    """Both real roots ``E1`` of ``dispersion_E2(E1) = -gamma lam / 2``."""
    if lam < 0:
        raise ArgumentError(f"eigenvalue must be nonnegative, got {lam}")
    a = consts.gamma / (2.0 * consts.c**2 * consts.hbar**2)
    K = consts.rest_energy + 0.5 * consts.gamma * lam
    disc = 1.0 + 4.0 * a * K
    s = np.sqrt(disc)
    # cancellation-free pair of the quadratic formula
    plus = 2.0 * K / (1.0 + s)
    minus = -(1.0 + s) / (2.0 * a)
    return DispersionRoots(float(plus), float(minus), float(disc))


def stationary_state(pair, E1, t_final, nt, consts, t_start=0.0):
    """Sample ``exp(-i E1 t / hbar) phi2(x)`` on a space-time grid (axis 0 = c t)."""
    space = pair.phi2.grid
    grid = Grid.spacetime(t_final, nt, space, c=consts.c, t_start=t_start)
    t = grid.coords(0) / consts.c
    phase = np.exp(-1j * E1 * t / consts.hbar)
    values = phase.reshape((-1,) + (1,) * space.dim) * pair.phi2.values[None]
    return ScalarField(grid, values)


def eigenpair_summary(pair, consts):
    roots = solve_E1(pair.lam, consts)
    return {
        "lambda": pair.lam,
        "residual": pair.residual,
        "E2": -0.5 * consts.gamma * pair.lam,
        **roots.to_dict(),
    }
