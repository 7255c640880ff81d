"""Sublevel measure, entropy and temperature of an energy profile.

``W(E) = (1/T) int int_{E(x,t) <= E} |phi(x)|^2 dx dt``,
``S(E) = -int_{E0}^{E} W ln W dE'`` and ``dS/dE = 1/T_hat = -W ln W``,
with ``0 ln 0 = 0``.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError
from .grid import ScalarField, integrate, integrate_space

NORM_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class EnergyProfile:
    """Energy field over space(-time) and the wave function weighting it.

    ``phi`` may live on the spatial grid (time-independent) or on the same
    grid as ``E_field``.
    """

    E_field: ScalarField
    phi: ScalarField
    mu: float = 0.0
    c: float = 1.0
    check_norm: bool = True

    def __post_init__(self):
        if np.iscomplexobj(self.E_field.values):
            raise ArgumentError("energy field must be real")
        dens = self.density
        if self.check_norm:
            norm = np.atleast_1d(integrate_space(ScalarField(self.E_field.grid, dens)))
            if np.max(np.abs(norm - 1.0)) > NORM_TOL:
                raise ArgumentError(f"phi is not normalised: int |phi|^2 dx = {norm.tolist()}")

    @classmethod
    def from_multiplier(cls, E1_field, phi, mu, **kw):
        """Profile ``E(x, t) = E1(x, t) - mu |phi(x)|^2``."""
        prof = cls(E1_field, phi, mu, **kw)
        return cls(E1_field.with_values(E1_field.values - mu * prof.density), phi, mu, **kw)

    @property
    def density(self):
        g = self.E_field.grid
        d = np.abs(self.phi.values) ** 2
        if self.phi.grid == g:
            return d
        if g.time_axis and self.phi.grid == g.spatial_grid():
            return np.broadcast_to(d[None], g.shape)
        raise ArgumentError("phi must live on the energy grid or on its spatial part")

    @property
    def duration(self):
        g = self.E_field.grid
        return (g.upper[0] - g.lower[0]) / self.c if g.time_axis else 1.0


def sublevel_W(profile, E):
    """Normalised |phi|^2-measure of ``{E(x, t) <= E}`` (trapezoid, point-sampled indicator)."""
    g = profile.E_field.grid
    ind = profile.E_field.values <= E
    total = integrate(ScalarField(g, np.where(ind, profile.density, 0.0)))
    if g.time_axis:
        total /= profile.c
    return total / profile.duration


def neg_w_log_w(w):
    """``-w ln w`` with ``0 ln 0 = 0``; also 0 for ``w >= 1`` rounding overshoot."""
    w = np.asarray(w, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where((w > 0) & (w < 1), -w * np.log(np.where(w > 0, w, 1.0)), 0.0)
    return out if out.ndim else float(out)


def entropy_curve(profile, E0, E, n_levels):
    """Levels, W, -W ln W and S on ``n_levels`` equally spaced energies in [E0, E]."""
    if E < E0:
        raise ArgumentError("E must not be below E0")
    if n_levels < 2:
        raise ArgumentError("n_levels must be at least 2")
    levels = np.linspace(E0, E, int(n_levels))
    W = np.array([sublevel_W(profile, e) for e in levels])
    f = neg_w_log_w(W)
    dE = np.diff(levels)
    S = np.concatenate([[0.0], np.cumsum(0.5 * dE * (f[1:] + f[:-1]))])
    return levels, W, f, S


def entropy_S(profile, E0, E, n_levels):
    """Trapezoid quadrature of ``-W ln W`` over ``n_levels`` levels in [E0, E]."""
    if E == E0:
        return 0.0
    return float(entropy_curve(profile, E0, E, n_levels)[3][-1])


def inverse_temperature(profile, E):
    """``1/T_hat = dS/dE = -W(E) ln W(E)``; 0 where W is 0 or 1."""
    return float(neg_w_log_w(sublevel_W(profile, E)))


def curve_csv(levels, W, f, S):
    """RFC 4180 CSV with columns E, W, -WlnW, S."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(["E", "W", "-WlnW", "S"])
    for row in zip(levels, W, f, S):
        writer.writerow([repr(float(v)) for v in row])
    return buf.getvalue()
