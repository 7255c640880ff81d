"""Action functionals, constraint residuals and Klein-Gordon residuals.

Every functional lives on a space-time grid whose axis 0 stores ``c t``.
Time integrals are the grid integral over that axis divided by ``c``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constants import PhysicalConstants
from .errors import ArgumentError, SuperluminalError
from .geometry import (
    Signature,
    analyze,
    curvature_density_first,
    curvature_density_normal,
)
from .grid import ScalarField, VectorField, diff, integrate, integrate_space

__all__ = [
    "PhysicalConstants",
    "EnergyBreakdown",
    "velocity",
    "newtonian_action",
    "normal_field_action",
    "relativistic_action",
    "mass_differential",
    "mass_constraint_residual",
    "multiplier_term_newtonian",
    "multiplier_term_relativistic",
    "flat_newtonian_gradient",
    "kg_residual_field",
    "kg_residual",
    "skg_residual_field",
    "skg_residual",
    "discrete_phase_energy",
]


@dataclass(frozen=True)
class EnergyBreakdown:
    """Separate terms of an action.

    ``kinetic`` is the velocity term with the sign it carries in the action
    (negative for the Newtonian form, the positive rest-energy term for the
    relativistic one).  ``constraint`` holds the per-time-sample mass residual
    ``int rho sqrt|g| dx - m``.
    """

    kinetic: float
    curvature: float
    constraint: np.ndarray
    multiplier_term: float

    @property
    def total(self):
        return self.kinetic + self.curvature + self.multiplier_term

    def to_dict(self):
        return {
            "kinetic": self.kinetic,
            "curvature": self.curvature,
            "multiplier_term": self.multiplier_term,
            "total": self.total,
            "constraint_max_abs": float(np.max(np.abs(self.constraint), initial=0.0)),
        }


def _require_time(grid):
    if not grid.time_axis:
        raise ArgumentError("this operation needs a space-time grid (time axis 0)")


def _spatial_components(r):
    g = r.grid
    if r.codim == g.dim:
        return slice(1, None)
    if r.codim == len(g.spatial_axes):
        return slice(None)
    raise ArgumentError(f"cannot identify spatial components of a {r.codim}-component field")


def velocity(r, consts, check=True):
    """Speed ``v`` and time derivative of the spatial components of ``r``.

    Raises SuperluminalError when ``check`` is set and ``v >= c`` somewhere.
    """
    _require_time(r.grid)
    h0 = r.grid.spacing[0]
    comps = r.values[_spatial_components(r)]
    drdt = consts.c * diff(comps, h0, 1)
    v = np.sqrt(np.sum(drdt**2, axis=0))
    if check:
        bad = v >= consts.c
        if bad.any():
            p = tuple(int(i) for i in np.argwhere(bad)[0])
            raise SuperluminalError(f"speed {v[p]:.6g} >= c at grid point {p}")
    return ScalarField(r.grid, v), VectorField(r.grid, drdt)


def _time_series(values, nt, name):
    arr = np.asarray(values, dtype=float)
    try:
        return np.broadcast_to(arr, (nt,))
    except ValueError:
        raise ArgumentError(f"{name} must be a scalar or have one entry per time sample ({nt})") from None


def _time_integral(series, grid, c):
    return float(np.dot(grid.trapezoid_weights(0), series)) / c


def _spacetime_integral(values, grid, c):
    return integrate(ScalarField(grid, values)) / c


def multiplier_term_newtonian(phi, metric_data, E, consts):
    """``-m int E(t) (int |phi|^2 sqrt(g) dx - 1) dt``."""
    norm_t = integrate_space(ScalarField(phi.grid, np.abs(phi.values) ** 2 * metric_data.sqrt_abs_det))
    E = _time_series(E, phi.grid.points[0], "E")
    return -consts.m * _time_integral(E * (norm_t - 1.0), phi.grid, consts.c)


def multiplier_term_relativistic(R, metric_data, E, consts):
    """``-int E(t) (int |R|^2 sqrt(-g) dx - m) dt``."""
    norm_t = integrate_space(ScalarField(R.grid, np.abs(R.values) ** 2 * metric_data.sqrt_abs_det))
    E = _time_series(E, R.grid.points[0], "E")
    return -_time_integral(E * (norm_t - consts.m), R.grid, consts.c)


def mass_constraint_residual(R, metric_data, consts, mass=None):
    """Per-time-sample ``int |R|^2 sqrt|g| dx - m``.

    Pass ``mass=1`` to check the normalisation of a wave function instead.
    """
    if R.grid != metric_data.grid:
        raise ArgumentError("field and metric live on different grids")
    mass = consts.m if mass is None else mass
    dens = ScalarField(R.grid, np.abs(R.values) ** 2 * metric_data.sqrt_abs_det)
    return np.atleast_1d(integrate_space(dens)) - mass


def _check_pair(r, phi):
    if r.grid != phi.grid:
        raise ArgumentError("position field and wave function live on different grids")
    _require_time(r.grid)


def newtonian_action(r, phi, E, consts):
    """Curvature-augmented Newtonian action with the mass multiplier.

    Kinetic term ``-1/2 int int m |phi|^2 |dr/dt|^2 sqrt(g)``, curvature term
    ``gamma/2 int int R sqrt(g)`` (Christoffel form) and multiplier
    ``-m int E(t) (int |phi|^2 sqrt(g) dx - 1) dt``.
    """
    _check_pair(r, phi)
    if r.codim != len(r.grid.spatial_axes):
        raise ArgumentError("the Newtonian action takes a spatial position field r(x, t)")
    m, gam = analyze(r, Signature.EUCLIDEAN)
    return _assemble_euclidean(r, phi, E, consts, m, curvature_density_first(phi, r, m, gam))


def normal_field_action(r, n, phi, E, consts):
    """Same assembly as :func:`newtonian_action` with the normal-field curvature.

    The pointwise constraints on ``n`` are returned separately by
    :func:`normal_field_constraints`; they carry no multiplier here.
    """
    _check_pair(r, phi)
    m, _ = analyze(r, Signature.EUCLIDEAN)
    return _assemble_euclidean(r, phi, E, consts, m, curvature_density_normal(phi, n, r, m))


def normal_field_constraints(n, r, consts):
    """Pointwise residuals ``n.n - 1`` and ``n . dr/dt``."""
    _, drdt = velocity(r, consts, check=False)
    nn = np.sum(n.values**2, axis=0) - 1.0
    nv = np.sum(n.values[_spatial_components(n)] * drdt.values, axis=0)
    return ScalarField(n.grid, nn), ScalarField(n.grid, nv)


def _assemble_euclidean(r, phi, E, consts, m, rhat):
    grid, c = r.grid, consts.c
    sg = m.sqrt_abs_det
    _, drdt = velocity(r, consts, check=False)
    speed2 = np.sum(drdt.values**2, axis=0)
    dens = np.abs(phi.values) ** 2
    kinetic = -0.5 * consts.m * _spacetime_integral(dens * speed2 * sg, grid, c)
    curvature = 0.5 * consts.gamma * _spacetime_integral(rhat.values * sg, grid, c)
    constraint = consts.m * mass_constraint_residual(phi, m, consts, mass=1.0)
    mult = multiplier_term_newtonian(phi, m, E, consts)
    return EnergyBreakdown(kinetic, curvature, constraint, mult)


def relativistic_action(r, R, consts, E=None):
    """Relativistic action ``c^2 int int |R|^2 sqrt(1 - v^2/c^2) sqrt(-g)
    + gamma/2 int int R_hat sqrt(-g)`` with ``phi = R / sqrt(m)``.

    ``r`` is the space-time map ``(ct, X1, X2, X3)``.  When ``E`` is given the
    multiplier ``-int E(t) (int |R|^2 sqrt(-g) dx - m) dt`` is included.
    """
    _check_pair(r, R)
    if r.codim != r.grid.dim:
        raise ArgumentError("the relativistic action takes r = (ct, X) with one component per axis")
    m, gam = analyze(r, Signature.MINKOWSKI)
    v, _ = velocity(r, consts)
    c = consts.c
    sg = m.sqrt_abs_det
    phi = R.with_values(R.values / np.sqrt(consts.m))
    rhat = curvature_density_first(phi, r, m, gam)
    dens = np.abs(R.values) ** 2
    rest = c**2 * _spacetime_integral(dens * np.sqrt(1.0 - (v.values / c) ** 2) * sg, r.grid, c)
    curvature = 0.5 * consts.gamma * _spacetime_integral(rhat.values * sg, r.grid, c)
    constraint = mass_constraint_residual(R, m, consts)
    mult = 0.0 if E is None else multiplier_term_relativistic(R, m, E, consts)
    return EnergyBreakdown(rest, curvature, constraint, mult)


def mass_differential(r, R, consts):
    """Density of ``dm = |R|^2 / sqrt(1 - v^2/c^2) sqrt|g|`` per coordinate volume."""
    signature = Signature.MINKOWSKI if r.codim == r.grid.dim else Signature.EUCLIDEAN
    m, _ = analyze(r, signature)
    v, _ = velocity(r, consts)
    lorentz = 1.0 / np.sqrt(1.0 - (v.values / consts.c) ** 2)
    return ScalarField(r.grid, np.abs(R.values) ** 2 * lorentz * m.sqrt_abs_det)


def _euler_lagrange_axis(values, h, w, axis):
    n = values.shape[axis]
    D = diff(np.eye(n), h, 0)
    d = np.moveaxis(np.tensordot(D, values, axes=([1], [axis])), 0, axis)
    shape = [1] * values.ndim
    shape[axis] = n
    wd = d * w.reshape(shape)
    back = np.moveaxis(np.tensordot(D.T, wd, axes=([1], [axis])), 0, axis)
    return back / w.reshape(shape)


def flat_newtonian_gradient(phi, E, consts):
    """Gradient of the discrete Newtonian action at the identity position field.

    Returns ``G`` with ``d/de J(phi + e psi)|_0 = Re sum_w conj(G) psi``, where
    ``sum_w`` uses the trapezoid space-time weights divided by ``c``.  ``G``
    is the discrete counterpart of ``-gamma Lap(phi) - 2 m E phi``.
    """
    grid = phi.grid
    _require_time(grid)
    out = np.zeros(grid.shape, dtype=complex)
    for ax in grid.spatial_axes:
        out += _euler_lagrange_axis(phi.values.astype(complex), grid.spacing[ax], grid.trapezoid_weights(ax), ax)
    E = _time_series(E, grid.points[0], "E").reshape((-1,) + (1,) * (grid.dim - 1))
    return consts.gamma * out - 2.0 * consts.m * E * phi.values


def _chunks(grid, max_points=2_000_000):
    nt = grid.points[0]
    per_slice = int(np.prod(grid.points[1:]))
    step = max(1, max_points // max(per_slice, 1))
    for i0 in range(1, nt - 1, step):
        yield i0, min(i0 + step, nt - 1)


def _wave_operator(f, grid, consts, i0, i1):
    """``gamma/2 (phi_tt/c^2 - Lap phi) + m c^2 phi`` at time rows i0..i1-1, interior points."""
    h = grid.spacing
    blk = f[i0 - 1 : i1 + 1]
    inner = (slice(1, -1),) * grid.dim
    sp = (slice(None),) + inner[1:]
    centre = blk[inner]
    out = (blk[2:][sp] - 2.0 * centre + blk[:-2][sp]) / h[0] ** 2
    for ax in grid.spatial_axes:
        lo = list(inner)
        hi = list(inner)
        lo[ax] = slice(0, -2)
        hi[ax] = slice(2, None)
        out = out - (blk[tuple(hi)] - 2.0 * centre + blk[tuple(lo)]) / h[ax] ** 2
    return 0.5 * consts.gamma * out + consts.rest_energy * centre, centre, blk


def _measure(grid, consts):
    return float(np.prod(grid.spacing[1:])) * grid.spacing[0] / consts.c


def _residual(phi, consts, tail, want_field):
    grid = phi.grid
    _require_time(grid)
    f = np.asarray(phi.values, dtype=complex)
    parts = []
    sq = 0.0
    for i0, i1 in _chunks(grid):
        op, centre, blk = _wave_operator(f, grid, consts, i0, i1)
        res = op - tail(centre, blk, i0, i1)
        if want_field:
            parts.append(res)
        sq += float(np.sum(res.real**2 + res.imag**2))
    norm = np.sqrt(sq * _measure(grid, consts))
    return (np.concatenate(parts), norm) if want_field else norm


def _kg_tail(E1, grid):
    E1 = _time_series(E1, grid.points[0], "E1")

    def tail(centre, blk, i0, i1):
        return E1[i0:i1].reshape((-1,) + (1,) * (grid.dim - 1)) * centre

    return tail


def _skg_tail(grid, consts):
    h0 = grid.spacing[0]
    sp = (slice(None),) + (slice(1, -1),) * (grid.dim - 1)

    def tail(centre, blk, i0, i1):
        dphidt = consts.c * (blk[2:][sp] - blk[:-2][sp]) / (2.0 * h0)
        return 1j * consts.hbar * dphidt

    return tail


def kg_residual_field(phi, E1, consts):
    """Pointwise ``gamma/2 (phi_tt/c^2 - Lap phi) + m c^2 phi - E1(t) phi`` on interior points."""
    return _residual(phi, consts, _kg_tail(E1, phi.grid), True)[0]


def kg_residual(phi, E1, consts):
    """Discrete L2 norm (space-time, interior points) of the Klein-Gordon residual."""
    return _residual(phi, consts, _kg_tail(E1, phi.grid), False)


def skg_residual_field(phi, consts):
    """Pointwise ``gamma/2 (phi_tt/c^2 - Lap phi) + m c^2 phi - i hbar phi_t`` on interior points."""
    return _residual(phi, consts, _skg_tail(phi.grid, consts), True)[0]


def skg_residual(phi, consts):
    """Discrete L2 norm of the Schroedinger-Klein-Gordon residual."""
    return _residual(phi, consts, _skg_tail(phi.grid, consts), False)


def discrete_phase_energy(E1, dt, consts):
    """Energy seen by the central time difference of ``exp(-i E1 t / hbar)``.

    ``i hbar D_t`` applied to that phase returns ``hbar sin(E1 dt / hbar) / dt``
    times the phase, so the Klein-Gordon residual evaluated with this energy
    coincides with the discrete Schroedinger-Klein-Gordon residual.
    """
    return consts.hbar * np.sin(E1 * dt / consts.hbar) / dt
