"""Uniform Cartesian grids, sampled fields and the finite-difference toolkit.

A grid may carry a time axis.  When it does, the time axis is axis 0 and its
coordinate is ``x0 = c t`` so every axis shares length units.  All stencils
are second order: central in the interior, one-sided at the boundary.

Field container format (JSON)::

    {
      "schema": "kgvar.field/1",
      "kind": "scalar" | "vector",
      "grid": {"lower": [...], "upper": [...], "points": [...], "time_axis": bool},
      "codim": int | null,
      "dtype": "float64" | "complex128",
      "shape": [...],
      "real": [... row-major ...],
      "imag": [... row-major ...] | null
    }

For vector fields the leading array axis is the component index, so ``shape``
is ``[codim, *points]``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ArgumentError

FIELD_SCHEMA = "kgvar.field/1"


@dataclass(frozen=True)
class Grid:
    lower: tuple
    upper: tuple
    points: tuple
    time_axis: bool = False

    def __post_init__(self):
        lower = tuple(float(v) for v in self.lower)
        upper = tuple(float(v) for v in self.upper)
        points = tuple(int(v) for v in self.points)
        if not (len(lower) == len(upper) == len(points)) or not points:
            raise ArgumentError("lower, upper and points must have the same nonzero length")
        for ax, (a, b, n) in enumerate(zip(lower, upper, points)):
            if n < 3:
                raise ArgumentError(f"axis {ax}: need at least 3 points, got {n}")
            if not b > a:
                raise ArgumentError(f"axis {ax}: upper bound {b} must exceed lower bound {a}")
        if self.time_axis and len(points) < 2:
            raise ArgumentError("a space-time grid needs at least one spatial axis")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        object.__setattr__(self, "points", points)

    @classmethod
    def box(cls, lengths, n):
        """Grid on ``[0, L1] x ... x [0, Ld]`` with ``n`` points per axis."""
        lengths = tuple(float(v) for v in lengths)
        return cls((0.0,) * len(lengths), lengths, (int(n),) * len(lengths))

    @classmethod
    def spacetime(cls, t_final, nt, space, c=1.0, t_start=0.0):
        """Prepend a time axis (stored as ``c t``) to the spatial grid ``space``."""
        if space.time_axis:
            raise ArgumentError("spatial grid already has a time axis")
        return cls(
            (c * t_start,) + space.lower,
            (c * t_final,) + space.upper,
            (int(nt),) + space.points,
            time_axis=True,
        )

    @property
    def dim(self):
        return len(self.points)

    @property
    def shape(self):
        return self.points

    @property
    def spacing(self):
        return tuple((b - a) / (n - 1) for a, b, n in zip(self.lower, self.upper, self.points))

    @property
    def spatial_axes(self):
        return tuple(range(1, self.dim)) if self.time_axis else tuple(range(self.dim))

    @property
    def volume(self):
        return float(np.prod([b - a for a, b in zip(self.lower, self.upper)]))

    def spatial_grid(self):
        """The grid with the time axis dropped (or ``self`` when there is none)."""
        if not self.time_axis:
            return self
        return Grid(self.lower[1:], self.upper[1:], self.points[1:])

    def coords(self, axis):
        self._check_axis(axis)
        return np.linspace(self.lower[axis], self.upper[axis], self.points[axis])

    def mesh(self):
        """Coordinate arrays, one per axis, each with the full grid shape."""
        return np.meshgrid(*(self.coords(a) for a in range(self.dim)), indexing="ij")

    def trapezoid_weights(self, axis):
        self._check_axis(axis)
        w = np.full(self.points[axis], self.spacing[axis])
        w[0] *= 0.5
        w[-1] *= 0.5
        return w

    def _check_axis(self, axis):
        if not isinstance(axis, (int, np.integer)) or not 0 <= axis < self.dim:
            raise ArgumentError(f"axis {axis!r} out of range for a {self.dim}-axis grid")

    def to_dict(self):
        return {
            "lower": list(self.lower),
            "upper": list(self.upper),
            "points": list(self.points),
            "time_axis": self.time_axis,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(tuple(d["lower"]), tuple(d["upper"]), tuple(d["points"]), bool(d.get("time_axis", False)))


def _frozen(values):
    arr = np.array(values, copy=True)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class ScalarField:
    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        values = _frozen(self.values)
        if values.shape != self.grid.shape:
            raise ArgumentError(f"values shape {values.shape} does not match grid {self.grid.shape}")
        if not np.all(np.isfinite(values)):
            raise ArgumentError("field contains NaN or Inf")
        object.__setattr__(self, "values", values)

    def with_values(self, values):
        return ScalarField(self.grid, values)


@dataclass(frozen=True, eq=False)
class VectorField:
    """Vector-valued samples; ``values`` has shape ``(codim, *grid.shape)``."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        values = _frozen(self.values)
        if values.ndim != self.grid.dim + 1 or values.shape[1:] != self.grid.shape:
            raise ArgumentError(
                f"values shape {values.shape} does not match (codim, *{self.grid.shape})"
            )
        if not 1 <= values.shape[0] <= 4:
            raise ArgumentError(f"codim must be between 1 and 4, got {values.shape[0]}")
        if not np.all(np.isfinite(values)):
            raise ArgumentError("field contains NaN or Inf")
        object.__setattr__(self, "values", values)

    @property
    def codim(self):
        return self.values.shape[0]

    def component(self, i):
        return ScalarField(self.grid, self.values[i])

    @classmethod
    def from_components(cls, grid, components):
        return cls(grid, np.stack([np.broadcast_to(c, grid.shape) for c in components]))

    def with_values(self, values):
        return VectorField(self.grid, values)


def _array_axis(field, axis):
    field.grid._check_axis(axis)
    return axis + 1 if isinstance(field, VectorField) else axis


def diff(values, h, axis):
    """First derivative along ``axis`` of a raw array (2nd order everywhere).

    The one-sided end stencils are written in differences, so a field that is
    constant along ``axis`` has an exactly zero derivative.
    """
    f = np.moveaxis(np.asarray(values), axis, 0)
    n = f.shape[0]
    if n < 3:
        raise ArgumentError("a second-order derivative needs at least 3 points")
    out = np.empty(f.shape, dtype=np.result_type(f, float))
    out[1:-1] = (f[2:] - f[:-2]) / (2.0 * h)
    out[0] = (4.0 * (f[1] - f[0]) - (f[2] - f[0])) / (2.0 * h)
    out[-1] = -(4.0 * (f[-2] - f[-1]) - (f[-3] - f[-1])) / (2.0 * h)
    return np.moveaxis(out, 0, axis)


def diff2(values, h, axis):
    """Second derivative along ``axis`` of a raw array.

    Compact 3-point stencil inside; 4-point one-sided stencil at the ends
    (second order), falling back to the 3-point stencil when only 3 points exist.
    """
    f = np.moveaxis(np.asarray(values), axis, 0)
    n = f.shape[0]
    out = np.empty_like(f)
    out[1:-1] = (f[2:] - 2.0 * f[1:-1] + f[:-2]) / h**2
    if n >= 4:
        out[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / h**2
        out[-1] = (2.0 * f[-1] - 5.0 * f[-2] + 4.0 * f[-3] - f[-4]) / h**2
    else:
        out[0] = out[1]
        out[-1] = out[1]
    return np.moveaxis(out, 0, axis)


def partial(field, axis):
    """Derivative of a scalar or vector field along grid axis ``axis``."""
    a = _array_axis(field, axis)
    return field.with_values(diff(field.values, field.grid.spacing[axis], a))


def second_partial(field, axis_i, axis_j):
    """Second derivative d^2 f / dx_i dx_j.

    Mixed partials compose the first-derivative stencils along two different
    axes; those 1-D operators commute, so the result is symmetric in (i, j).
    """
    ai = _array_axis(field, axis_i)
    aj = _array_axis(field, axis_j)
    h = field.grid.spacing
    if axis_i == axis_j:
        return field.with_values(diff2(field.values, h[axis_i], ai))
    lo, hi = sorted((axis_i, axis_j))
    off = ai - axis_i
    inner = diff(field.values, h[lo], lo + off)
    return field.with_values(diff(inner, h[hi], hi + off))


def _weighted(field, weight):
    if weight is None:
        return field.values
    if weight.grid != field.grid:
        raise ArgumentError("weight lives on a different grid")
    return field.values * weight.values


def integrate(field, weight=None):
    """Trapezoidal integral of ``field * weight`` over every grid axis.

    Integrating over a time axis yields the integral in ``c t``; divide by
    ``c`` for a time integral.
    """
    g = field.grid
    acc = _weighted(field, weight)
    for ax in reversed(range(g.dim)):
        acc = np.tensordot(acc, g.trapezoid_weights(ax), axes=([ax], [0]))
    return complex(acc) if np.iscomplexobj(acc) else float(acc)


def integrate_space(field, weight=None):
    """Trapezoidal integral over the spatial axes only.

    Returns one value per time sample on a space-time grid, or a 0-d array
    on a purely spatial grid.
    """
    g = field.grid
    acc = _weighted(field, weight)
    for ax in reversed(g.spatial_axes):
        acc = np.tensordot(acc, g.trapezoid_weights(ax), axes=([ax], [0]))
    return acc


def dirichlet_mask(grid):
    """Boolean array, True on boundary points of the spatial axes."""
    mask = np.zeros(grid.shape, dtype=bool)
    for ax in grid.spatial_axes:
        idx = [slice(None)] * grid.dim
        idx[ax] = [0, grid.points[ax] - 1]
        mask[tuple(idx)] = True
    return mask


def interior_slices(grid, axes=None):
    """Index tuple selecting points interior along ``axes`` (default: all axes)."""
    axes = range(grid.dim) if axes is None else axes
    idx = [slice(None)] * grid.dim
    for ax in axes:
        idx[ax] = slice(1, -1)
    return tuple(idx)


def field_to_dict(field):
    vals = np.asarray(field.values)
    is_complex = np.iscomplexobj(vals)
    return {
        "schema": FIELD_SCHEMA,
        "kind": "vector" if isinstance(field, VectorField) else "scalar",
        "grid": field.grid.to_dict(),
        "codim": field.codim if isinstance(field, VectorField) else None,
        "dtype": "complex128" if is_complex else "float64",
        "shape": list(vals.shape),
        "real": vals.real.astype(float).ravel().tolist(),
        "imag": vals.imag.astype(float).ravel().tolist() if is_complex else None,
    }


def field_from_dict(d):
    if d.get("schema") != FIELD_SCHEMA:
        raise ArgumentError(f"unsupported field schema {d.get('schema')!r}")
    grid = Grid.from_dict(d["grid"])
    shape = tuple(d["shape"])
    vals = np.asarray(d["real"], dtype=float).reshape(shape)
    if d.get("imag") is not None:
        vals = vals + 1j * np.asarray(d["imag"], dtype=float).reshape(shape)
    if d["kind"] == "vector":
        return VectorField(grid, vals)
    return ScalarField(grid, vals)


def save_field(path, field):
    Path(path).write_text(json.dumps(field_to_dict(field)))


def load_field(path):
    return field_from_dict(json.loads(Path(path).read_text()))
