"""Discrete differential geometry of a sampled position field.

The position field ``r`` maps material coordinates into R^d.  Its tangent
frame ``g_k = dr/dx_k`` is taken along the *frame axes*: every grid axis when
``r`` has one component per axis (e.g. ``r = (ct, X1, X2, X3)`` on a 4-axis
space-time grid), or only the spatial axes when ``r`` has one component per
spatial axis and the grid carries a time axis (a spatial map evolving in time).

Per-point tensors are stored with the grid axes first and tensor indices
last, e.g. ``MetricData.g[..., i, j]`` and ``ChristoffelField.gamma[..., s, i, j]``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError, DegenerateMetricError
from .grid import Grid, ScalarField, VectorField, diff, second_partial

COND_LIMIT = 1e12


class Signature(enum.Enum):
    EUCLIDEAN = "euclidean"
    MINKOWSKI = "minkowski"

    def eta(self, dim):
        """Diagonal of the inner product; index 0 is time-like for Minkowski."""
        eta = np.ones(dim)
        if self is Signature.MINKOWSKI:
            eta[0] = -1.0
        return eta

    def dot(self, y, z):
        """Inner product over the last axis."""
        y = np.asarray(y)
        z = np.asarray(z)
        return np.sum(self.eta(y.shape[-1]) * y * z, axis=-1)


def frame_axes(grid, codim):
    if codim == grid.dim:
        return tuple(range(grid.dim))
    if grid.time_axis and codim == len(grid.spatial_axes):
        return grid.spatial_axes
    raise ArgumentError(
        f"a {codim}-component position field needs a grid with {codim} axes "
        f"(or {codim} spatial axes plus time); got {grid.dim} axes"
    )


@dataclass(frozen=True, eq=False)
class MetricData:
    grid: Grid
    g: np.ndarray
    g_inv: np.ndarray
    det_g: np.ndarray
    signature: Signature
    frame: np.ndarray
    axes: tuple

    @property
    def d(self):
        return len(self.axes)

    @property
    def sqrt_abs_det(self):
        return np.sqrt(np.abs(self.det_g))


@dataclass(frozen=True, eq=False)
class ChristoffelField:
    grid: Grid
    gamma: np.ndarray
    axes: tuple


def _check_same_grid(*fields):
    grid = fields[0].grid
    for f in fields[1:]:
        if f.grid != grid:
            raise ArgumentError("inputs live on different grids")
    return grid


def _jacobian(r):
    """``J[..., k, a] = d r_a / d x_k`` over the frame axes."""
    axes = frame_axes(r.grid, r.codim)
    h = r.grid.spacing
    cols = [diff(r.values, h[ax], ax + 1) for ax in axes]
    return np.moveaxis(np.stack(cols), (0, 1), (-2, -1)), axes


def tangent_basis(r):
    """Tangent vectors ``g_k = dr/dx_k``, one VectorField per frame axis."""
    jac, axes = _jacobian(r)
    return [VectorField(r.grid, np.moveaxis(jac[..., k, :], -1, 0)) for k in range(len(axes))]


def _first_bad(mask):
    idx = np.argwhere(mask)
    return tuple(int(i) for i in idx[0]) if len(idx) else None


def metric(basis, signature=Signature.EUCLIDEAN):
    """Metric, inverse and determinant of a tangent frame under ``signature``."""
    if not basis:
        raise ArgumentError("empty tangent basis")
    grid = _check_same_grid(*basis)
    codim = basis[0].codim
    axes = frame_axes(grid, codim)
    if len(basis) != len(axes):
        raise ArgumentError(f"expected {len(axes)} tangent vectors, got {len(basis)}")
    frame = np.stack([np.moveaxis(b.values, 0, -1) for b in basis], axis=-2)
    eta = signature.eta(codim)
    g = np.einsum("...ia,a,...ja->...ij", frame, eta, frame)
    g = 0.5 * (g + np.swapaxes(g, -1, -2))

    with np.errstate(all="ignore"):
        cond = np.linalg.cond(g)
    bad = ~np.isfinite(cond) | (cond > COND_LIMIT)
    if bad.any():
        p = _first_bad(bad)
        raise DegenerateMetricError(
            f"tangent frame is linearly dependent at grid point {p} (condition {cond[p]:.3g})", p
        )
    det = np.linalg.det(g)
    wrong = det <= 0 if signature is Signature.EUCLIDEAN else det >= 0
    if wrong.any():
        p = _first_bad(wrong)
        raise DegenerateMetricError(
            f"metric determinant {det[p]:.3g} at grid point {p} has the wrong sign for {signature.value}",
            p,
        )
    g_inv = np.linalg.inv(g)
    g_inv = 0.5 * (g_inv + np.swapaxes(g_inv, -1, -2))
    return MetricData(grid, g, g_inv, det, signature, frame, axes)


def christoffel(r, m):
    """Christoffel symbols from ``d2r/dx_i dx_j = sum_s Gamma^s_ij g_s``.

    Projects the second derivatives on the frame and raises with ``g^{sm}``,
    which solves the defining relation exactly when the frame is a basis.
    """
    if r.grid != m.grid:
        raise ArgumentError("position field and metric live on different grids")
    axes = frame_axes(r.grid, r.codim)
    if axes != m.axes:
        raise ArgumentError("metric was built on different frame axes")
    d = len(axes)
    d2 = np.empty(r.grid.shape + (d, d, r.codim))
    for i in range(d):
        for j in range(i, d):
            sp = np.moveaxis(second_partial(r, axes[i], axes[j]).values, 0, -1)
            d2[..., i, j, :] = sp
            d2[..., j, i, :] = sp
    eta = m.signature.eta(r.codim)
    proj = np.einsum("...ija,a,...ma->...ijm", d2, eta, m.frame)
    gamma = np.einsum("...sm,...ijm->...sij", m.g_inv, proj)
    return ChristoffelField(r.grid, gamma, axes)


def scalar_gradient(phi, axes):
    """Stack of ``d phi / d x_k`` for ``k`` in ``axes``, index last."""
    h = phi.grid.spacing
    return np.stack([diff(phi.values, h[ax], ax) for ax in axes], axis=-1)


def _real_part(values, scale, what):
    values = np.asarray(values)
    if np.iscomplexobj(values):
        resid = np.max(np.abs(values.imag), initial=0.0)
        if resid > 1e-10 * max(scale, 1.0):
            raise ArithmeticError(f"{what}: imaginary residue {resid:.3g} exceeds tolerance")
        values = values.real
    return values


def curvature_density_first(phi, r, m, gamma_field):
    """Curvature energy density in its Christoffel-expanded form.

    Sum over i, j, k, l, s, p of g^{ij} g^{kl} times
    ``g_jl phi_i phi*_k + phi phi*_k G^s_ij g_sl + phi* phi_i G^p_kl g_pj
    + |phi|^2 G^s_ij G^p_kl g_sp``.
    """
    _check_same_grid(phi, r, m, gamma_field)
    if gamma_field.axes != m.axes:
        raise ArgumentError("Christoffel field and metric use different frame axes")
    dphi = scalar_gradient(phi, m.axes)
    dphic = np.conj(dphi)
    f = phi.values
    gi, g, G = m.g_inv, m.g, gamma_field.gamma
    opt = dict(optimize=True)
    t1 = np.einsum("...ij,...kl,...jl,...i,...k->...", gi, gi, g, dphi, dphic, **opt)
    t2 = f * np.einsum("...ij,...kl,...k,...sij,...sl->...", gi, gi, dphic, G, g, **opt)
    t3 = np.conj(f) * np.einsum("...ij,...kl,...i,...pkl,...pj->...", gi, gi, dphi, G, g, **opt)
    t4 = np.abs(f) ** 2 * np.einsum("...ij,...kl,...sij,...pkl,...sp->...", gi, gi, G, G, g, **opt)
    total = t1 + t2 + t3 + t4
    scale = float(np.max(np.abs(t1) + np.abs(t2) + np.abs(t3) + np.abs(t4), initial=0.0))
    return ScalarField(phi.grid, _real_part(total, scale, "curvature_density_first"))


def normal_curvature_tensor(phi, n, m):
    """``b_ij = -d(phi n)/dx_j . g_i`` with the metric's inner product."""
    if n.codim != m.frame.shape[-1]:
        raise ArgumentError("normal field and position field have different codims")
    _check_same_grid(phi, n, m)
    u = phi.values[None] * n.values
    h = phi.grid.spacing
    du = np.stack([np.moveaxis(diff(u, h[ax], ax + 1), 0, -1) for ax in m.axes], axis=-2)
    eta = m.signature.eta(n.codim)
    return -np.einsum("...ja,a,...ia->...ij", du, eta, m.frame)


def curvature_density_normal(phi, n, r, m):
    """Curvature energy density from the normal-field tensor ``b_ij``.

    Indices follow the literal definitions: ``b^l_i = g^{lm} b_mi``,
    ``R^i_jkl = b^l_i conj(b_jk)``, ``R_jk = R^i_jik`` and ``R = g^{jk} R_jk``.
    """
    _check_same_grid(phi, n, r, m)
    if n.codim != r.codim:
        raise ArgumentError("normal field and position field have different codims")
    b = normal_curvature_tensor(phi, n, m)
    b_up = np.einsum("...lm,...mi->...li", m.g_inv, b)
    total = np.einsum("...jk,...ki,...ji->...", m.g_inv, b_up, np.conj(b), optimize=True)
    scale = float(np.max(np.sum(np.abs(b) ** 2, axis=(-1, -2)), initial=0.0)) * float(
        np.max(np.abs(m.g_inv), initial=1.0) ** 2
    )
    return ScalarField(phi.grid, _real_part(total, scale, "curvature_density_normal"))


def flat_density(phi, axes, signature=Signature.EUCLIDEAN):
    """Flat-limit density ``sum_k eta_k |d phi/dx_k|^2`` over ``axes``.

    On a space-time grid with axis 0 = ``c t`` the Minkowski version is
    ``-(1/c^2)|phi_t|^2 + |grad phi|^2``.
    """
    dphi = scalar_gradient(phi, axes)
    return ScalarField(phi.grid, np.sum(signature.eta(len(axes)) * np.abs(dphi) ** 2, axis=-1))


def analyze(r, signature=Signature.EUCLIDEAN):
    """Convenience: metric and Christoffel symbols of ``r`` in one call."""
    m = metric(tangent_basis(r), signature)
    return m, christoffel(r, m)
