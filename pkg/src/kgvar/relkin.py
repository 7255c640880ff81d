"""Lorentz boosts with parallel axes, the Minkowski product, and the
orbital/spin split of the angular momentum of a sampled wave function."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError, ChainRuleError, SuperluminalError
from .grid import ScalarField, diff

SMALL_BETA = 1e-6
COND_LIMIT = 1e12

# (i, j): rotation about the third axis moves x_i by -x_j and x_j by +x_i
ROTATION_PLANES = {"x": (1, 2), "y": (2, 0), "z": (0, 1)}


@dataclass(frozen=True)
class Event:
    t: float
    x: tuple

    def __post_init__(self):
        x = tuple(float(v) for v in self.x)
        if len(x) != 3 or not np.all(np.isfinite(x)) or not np.isfinite(self.t):
            raise ArgumentError("an event needs a finite time and three finite coordinates")
        object.__setattr__(self, "t", float(self.t))
        object.__setattr__(self, "x", x)


@dataclass(frozen=True)
class BoostVelocity:
    v: tuple

    def __post_init__(self):
        v = tuple(float(c) for c in self.v)
        if len(v) != 3 or not np.all(np.isfinite(v)):
            raise ArgumentError("boost velocity needs three finite components")
        object.__setattr__(self, "v", v)

    def check(self, c):
        speed = float(np.linalg.norm(self.v))
        if speed >= c:
            raise ArgumentError(f"boost speed {speed:.6g} must be below c = {c:.6g}")
        return speed


@dataclass(frozen=True, eq=False)
class AngularDecomposition:
    """Operator-applied fields ``J = L + S`` about one axis, on the grid of ``phi``."""

    J: np.ndarray
    L: np.ndarray
    S: np.ndarray
    axis: str = "z"

    def norms(self, mask=None):
        sel = (lambda a: a) if mask is None else (lambda a: a[mask])
        return {
            f"J{self.axis}": float(np.linalg.norm(sel(self.J))),
            f"L{self.axis}": float(np.linalg.norm(sel(self.L))),
            f"S{self.axis}": float(np.linalg.norm(sel(self.S))),
        }


def lorentz_factors(v2, c):
    """``gamma = 1/sqrt(1 - v^2/c^2)`` and ``K = (gamma - 1)/v^2``, elementwise.

    Below ``|v|/c = 1e-6`` ``K`` takes its Taylor value ``(1 + 3 v^2 / (4 c^2)) / (2 c^2)``.
    Above it ``K`` is evaluated as ``gamma^2 / (c^2 (1 + gamma))``, which equals
    ``(gamma - 1)/v^2`` without the cancellation in ``gamma - 1``.
    """
    v2 = np.asarray(v2, dtype=float)
    beta2 = v2 / c**2
    if np.any(beta2 >= 1.0):
        raise SuperluminalError("speed reached c")
    gam = 1.0 / np.sqrt(1.0 - beta2)
    small = beta2 < SMALL_BETA**2
    K = np.where(small, (1.0 + 0.75 * beta2) / (2.0 * c**2), gam**2 / (c**2 * (1.0 + gam)))
    return gam, K


def boost_arrays(t, x, v, c):
    """Vectorised boost; ``x`` and ``v`` have the 3-vector index last."""
    t = np.asarray(t, dtype=float)
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    gam, K = lorentz_factors(np.sum(v * v, axis=-1), c)
    xv = np.sum(x * v, axis=-1)
    xp = x + (K * xv)[..., None] * v - (gam * t)[..., None] * v
    tp = gam * (t - xv / c**2)
    return tp, xp


def boost(e, v, consts):
    """Event seen from a frame whose origin moves with velocity ``v`` (axes parallel)."""
    if not isinstance(v, BoostVelocity):
        v = BoostVelocity(tuple(v))
    v.check(consts.c)
    tp, xp = boost_arrays(e.t, np.array(e.x), np.array(v.v), consts.c)
    return Event(float(tp), tuple(xp))


def minkowski_dot(y, z):
    """``-y0 z0 + sum_i yi zi`` over the last axis."""
    y = np.asarray(y, dtype=float)
    z = np.asarray(z, dtype=float)
    return -y[..., 0] * z[..., 0] + np.sum(y[..., 1:] * z[..., 1:], axis=-1)


def interval(t, x, c):
    """``c^2 t^2 - |x|^2``."""
    x = np.asarray(x, dtype=float)
    return c**2 * np.asarray(t) ** 2 - np.sum(x * x, axis=-1)


def rotation_generator(x, axis="z"):
    """Infinitesimal rotation of material points, e.g. ``(-x2, x1, 0)`` about z.

    ``x`` has the 3-vector index first.
    """
    if axis not in ROTATION_PLANES:
        raise ArgumentError(f"axis must be one of x, y, z; got {axis!r}")
    i, j = ROTATION_PLANES[axis]
    w = np.zeros_like(x)
    w[i] = -x[j]
    w[j] = x[i]
    return w


def boosted_coordinates(r, consts):
    """``(X', t')`` of each sample after the boost by its own local velocity.

    Returns ``(Xp, tp, v)`` with the 3-vector index first in ``Xp`` and ``v``.
    """
    grid = r.grid
    if not grid.time_axis or len(grid.spatial_axes) != 3:
        raise ArgumentError("need a space-time grid with three spatial axes")
    if r.codim == 4:
        X = r.values[1:]
    elif r.codim == 3:
        X = r.values
    else:
        raise ArgumentError("position field must have 3 components or be (ct, X1, X2, X3)")
    v = consts.c * diff(X, grid.spacing[0], 1)
    t = grid.mesh()[0] / consts.c
    tp, Xp = boost_arrays(t, np.moveaxis(X, 0, -1), np.moveaxis(v, 0, -1), consts.c)
    return np.moveaxis(Xp, -1, 0), tp, v, X


def angular_decompose(phi, r, consts, axis="z"):
    """Split ``J = -i hbar d/de phi(X'_e, t'_e)`` into orbital and spin parts.

    ``phi`` holds samples ``phi(x, t) = varphi(X'(x, t), t'(x, t))``.  The
    derivatives of ``varphi`` in its own arguments come from the chain rule
    through the Jacobian of ``(t, x) -> (X', t')``, solved per point.  Rotation
    weights use the material coordinates of the grid.
    """
    if phi.grid != r.grid:
        raise ArgumentError("wave function and position field live on different grids")
    grid = phi.grid
    c, hbar = consts.c, consts.hbar
    Xp, tp, v, _ = boosted_coordinates(r, consts)
    v2 = np.sum(v * v, axis=0)
    gam, K = lorentz_factors(v2, c)

    # derivatives along (t, x1, x2, x3); axis 0 of the grid is c t
    scale = np.array([c, 1.0, 1.0, 1.0])
    h = grid.spacing
    targets = np.concatenate([Xp, tp[None]])  # (X'_1, X'_2, X'_3, t')
    M = np.stack(
        [scale[b] * diff(targets, h[b], b + 1) for b in range(4)], axis=-1
    )  # (4 targets, *shape, 4 sources)
    M = np.moveaxis(M, 0, -2)  # (*shape, target, source)
    dphi = np.stack([scale[b] * diff(phi.values, h[b], b) for b in range(4)], axis=-1)

    with np.errstate(all="ignore"):
        cond = np.linalg.cond(M)
    bad = ~np.isfinite(cond) | (cond > COND_LIMIT)
    if bad.any():
        p = tuple(int(i) for i in np.argwhere(bad)[0])
        raise ChainRuleError(f"coordinate map (t, x) -> (X', t') is singular at grid point {p}", p)
    # d phi / d source_b = sum_a d varphi / d target_a * M[a, b]
    MT = np.swapaxes(M, -1, -2)
    grad = np.linalg.solve(MT, dphi[..., None])[..., 0]
    dX = np.moveaxis(grad[..., :3], -1, 0)
    dt = grad[..., 3]

    x = np.stack(grid.mesh()[1:])
    w = rotation_generator(x, axis)
    wv = np.sum(w * v, axis=0)
    L = -1j * hbar * np.sum(w * dX, axis=0)
    S = -1j * hbar * K * wv * np.sum(v * dX, axis=0) + 1j * hbar * dt * gam * wv / c**2
    return AngularDecomposition(L + S, L, S, axis)


def angular_decompose_z(phi, r, consts):
    return angular_decompose(phi, r, consts, "z")


def epsilon_derivative_oracle(varphi, r, consts, axis="z", eps=1e-5):
    """``-i hbar [varphi(X'_e, t'_e) - varphi(X'_-e, t'_-e)] / (2 e)`` evaluated directly.

    ``varphi(X, t)`` must accept arrays (3-vector index first).  The local
    velocity is held fixed while the material point is rotated by ``e``.
    """
    grid = r.grid
    _, _, v, X = boosted_coordinates(r, consts)
    x = np.stack(grid.mesh()[1:])
    w = rotation_generator(x, axis)
    t = grid.mesh()[0] / consts.c
    vals = []
    for s in (eps, -eps):
        tp, Xp = boost_arrays(t, np.moveaxis(X + s * w, 0, -1), np.moveaxis(v, 0, -1), consts.c)
        vals.append(varphi(np.moveaxis(Xp, -1, 0), tp))
    return -1j * consts.hbar * (vals[0] - vals[1]) / (2.0 * eps)


def sample_through_boost(varphi, r, consts):
    """Samples ``varphi(X'(x, t), t'(x, t))`` as a ScalarField on the grid of ``r``."""
    Xp, tp, _, _ = boosted_coordinates(r, consts)
    return ScalarField(r.grid, varphi(Xp, tp))
