"""Property-based checks of the library invariants."""

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from kgvar import entropy, kg_solver, relkin
from kgvar.constants import PhysicalConstants
from kgvar.geometry import Signature, analyze, curvature_density_first, curvature_density_normal
from kgvar.grid import Grid, ScalarField, VectorField, diff, integrate, interior_slices, partial, second_partial

SETTINGS = settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])
finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)
positive = st.floats(0.1, 10.0)


@st.composite
def grids(draw, dim=None):
    d = draw(st.integers(1, 3)) if dim is None else dim
    lower = [draw(st.floats(-2, 2)) for _ in range(d)]
    lengths = [draw(st.floats(0.2, 3.0)) for _ in range(d)]
    points = [draw(st.integers(3, 9)) for _ in range(d)]
    return Grid(tuple(lower), tuple(a + b for a, b in zip(lower, lengths)), tuple(points))


@SETTINGS
@given(grids(), finite, finite, st.integers(0, 2**31 - 1))
def test_partial_is_linear(g, a, b, seed):
    rng = np.random.default_rng(seed)
    f = ScalarField(g, rng.normal(size=g.shape))
    h = ScalarField(g, rng.normal(size=g.shape))
    for ax in range(g.dim):
        lhs = partial(f.with_values(a * f.values + b * h.values), ax).values
        rhs = a * partial(f, ax).values + b * partial(h, ax).values
        scale = np.max(np.abs(a * partial(f, ax).values)) + np.max(np.abs(b * partial(h, ax).values)) + 1e-300
        assert np.max(np.abs(lhs - rhs)) <= 1e-12 * scale


@SETTINGS
@given(grids(), st.integers(0, 2**31 - 1))
def test_mixed_partials_commute(g, seed):
    f = ScalarField(g, np.random.default_rng(seed).normal(size=g.shape))
    for i in range(g.dim):
        for j in range(g.dim):
            a = second_partial(f, i, j).values
            b = second_partial(f, j, i).values
            assert np.max(np.abs(a - b)) <= 1e-12 * (np.max(np.abs(a)) + 1e-300)


@SETTINGS
@given(grids())
def test_integral_of_one_is_volume(g):
    assert integrate(ScalarField(g, np.ones(g.shape))) == pytest.approx(g.volume, rel=1e-12)


@pytest.mark.parametrize("fn,d1,d2", [(np.sin, np.cos, lambda x: -np.sin(x)),
                                      (np.exp, np.exp, np.exp)])
def test_derivative_orders(fn, d1, d2):
    e1, e2 = [], []
    for n in (17, 33, 65):
        x = np.linspace(0.3, 1.7, n)
        h = x[1] - x[0]
        e1.append(np.max(np.abs(diff(fn(x), h, 0) - d1(x))))
        g = Grid((0.3,), (1.7,), (n,))
        e2.append(np.max(np.abs(second_partial(ScalarField(g, fn(x)), 0, 0).values - d2(x))))
    for e in (e1, e2):
        assert np.log2(e[0] / e[1]) >= 1.9 and np.log2(e[1] / e[2]) >= 1.9


def _random_embedding(seed, n=6):
    rng = np.random.default_rng(seed)
    g = Grid((0.0, 0.0, 0.0), (1.0, 1.0, 1.0), (n, n, n))
    x = np.stack(g.mesh())
    A = np.eye(3) + 0.3 * rng.normal(size=(3, 3))
    c = 0.1 * rng.normal(size=(3, 3))
    vals = np.einsum("ab,b...->a...", A, x) + np.einsum("ab,b...->a...", c, np.sin(x))
    return g, VectorField(g, vals), rng


@SETTINGS
@given(st.integers(0, 2**31 - 1))
def test_metric_and_christoffel_invariants(seed):
    g, r, _ = _random_embedding(seed)
    m, gam = analyze(r)
    assert np.max(np.abs(m.g - np.swapaxes(m.g, -1, -2))) <= 1e-12
    eye = np.einsum("...ij,...jk->...ik", m.g, m.g_inv)
    assert np.max(np.abs(eye - np.eye(3))) <= 1e-10
    assert np.all(m.det_g > 0)
    assert np.max(np.abs(gam.gamma - np.swapaxes(gam.gamma, -1, -2))) <= 1e-10


@SETTINGS
@given(arrays(float, (3, 3), elements=st.floats(-2, 2)), arrays(float, (3,), elements=finite))
def test_affine_maps_have_no_christoffel(A, b):
    A = A + 4 * np.eye(3)
    g = Grid((0.0, -1.0, 0.5), (1.0, 1.0, 2.0), (5, 6, 7))
    x = np.stack(g.mesh())
    r = VectorField(g, np.einsum("ab,b...->a...", A, x) + b[:, None, None, None])
    _, gam = analyze(r)
    assert np.max(np.abs(gam.gamma)) <= 1e-8


def test_christoffel_reconstructs_second_derivatives():
    errs = []
    for n in (17, 33):
        g = Grid((1.0, 0.2), (2.0, 1.2), (n, n))
        rho, th = g.mesh()
        r = VectorField.from_components(g, [rho * np.cos(th), rho * np.sin(th)])
        m, gam = analyze(r)
        recon = np.einsum("...sij,...sa->...ija", gam.gamma, m.frame)
        exact = np.zeros(g.shape + (2, 2, 2))
        exact[..., 0, 1, :] = exact[..., 1, 0, :] = np.stack([-np.sin(th), np.cos(th)], -1)
        exact[..., 1, 1, :] = np.stack([-rho * np.cos(th), -rho * np.sin(th)], -1)
        errs.append(np.max(np.abs(recon - exact)[interior_slices(g)]))
    assert np.log2(errs[0] / errs[1]) >= 1.9


@SETTINGS
@given(st.integers(0, 2**31 - 1), st.floats(0, 2 * np.pi))
def test_curvature_densities_phase_invariant(seed, theta):
    g, r, rng = _random_embedding(seed)
    phi = ScalarField(g, rng.normal(size=g.shape) + 1j * rng.normal(size=g.shape))
    rot = phi.with_values(np.exp(1j * theta) * phi.values)
    m, gam = analyze(r)
    a = curvature_density_first(phi, r, m, gam).values
    b = curvature_density_first(rot, r, m, gam).values
    assert np.max(np.abs(a - b)) <= 1e-12 * np.max(np.abs(a))
    raw = rng.normal(size=(3,) + g.shape)
    n = VectorField(g, raw / np.linalg.norm(raw, axis=0))
    a = curvature_density_normal(phi, n, r, m).values
    b = curvature_density_normal(rot, n, r, m).values
    assert np.max(np.abs(a - b)) <= 1e-12 * np.max(np.abs(a))


vec4 = arrays(float, (4,), elements=finite)


@SETTINGS
@given(vec4, vec4, vec4, finite)
def test_minkowski_dot_symmetric_bilinear(y, z, w, a):
    assert relkin.minkowski_dot(y, z) == relkin.minkowski_dot(z, y)
    lhs = relkin.minkowski_dot(a * y + w, z)
    rhs = a * relkin.minkowski_dot(y, z) + relkin.minkowski_dot(w, z)
    scale = abs(a) * np.abs(y) @ np.abs(z) + np.abs(w) @ np.abs(z) + 1e-300
    assert abs(lhs - rhs) <= 1e-13 * scale
    assert relkin.minkowski_dot(y, y) == pytest.approx(float(Signature.MINKOWSKI.dot(y, y)))


@st.composite
def subluminal(draw, c):
    direction = draw(arrays(float, (3,), elements=st.floats(-1, 1)))
    norm = np.linalg.norm(direction)
    beta = draw(st.floats(0.0, 0.9))
    return (0 * direction) if norm < 1e-3 else direction / norm * beta * c


@SETTINGS
@given(st.floats(0.5, 5.0).flatmap(lambda c: st.tuples(st.just(c), subluminal(c))), vec4)
def test_boost_interval_and_roundtrip(cv, ev):
    c, v = cv
    consts = PhysicalConstants(1.0, c, 1.0)
    e = relkin.Event(ev[0], ev[1:])
    p = relkin.boost(e, v, consts)
    back = relkin.boost(p, -v, consts)
    scale = c**2 * e.t**2 + np.dot(e.x, e.x) + 1e-300
    assert abs(relkin.interval(p.t, p.x, c) - relkin.interval(e.t, e.x, c)) <= 1e-10 * scale
    err = np.hypot(c * (back.t - e.t), np.linalg.norm(np.subtract(back.x, e.x)))
    assert err <= 1e-12 * np.sqrt(scale) * 4


@SETTINGS
@given(st.floats(0.0, 1e5), positive, positive, positive, positive)
def test_dispersion_roots(lam, m, c, hbar, gamma):
    consts = PhysicalConstants(m, c, hbar, gamma)
    roots = kg_solver.solve_E1(lam, consts)
    target = -0.5 * gamma * lam
    for E in (roots.E1_plus, roots.E1_minus):
        terms = abs(gamma * E**2 / (2 * c**2 * hbar**2)) + consts.rest_energy + abs(E)
        assert abs(kg_solver.dispersion_E2(E, consts) - target) <= 1e-12 * terms


@SETTINGS
@given(st.integers(0, 2**31 - 1))
def test_eigenvalues_nonnegative_and_sorted(seed):
    rng = np.random.default_rng(seed)
    g = Grid.box(tuple(rng.uniform(0.5, 2.0, 2)), int(rng.integers(5, 12)))
    lam = [p.lam for p in kg_solver.laplacian_eigs(g, 6, seed=seed)]
    assert lam[0] > 0 and np.all(np.diff(lam) >= 0)


@SETTINGS
@given(arrays(float, (33,), elements=st.floats(-5, 5)), st.floats(-6, 0), st.floats(0.1, 12))
def test_W_and_S_monotone(E_vals, E0, span):
    space = Grid((0.0,), (1.0,), (33,))
    grid = Grid.spacetime(1.0, 3, space)
    prof = entropy.EnergyProfile(ScalarField(grid, np.broadcast_to(E_vals, grid.shape)), ScalarField(space, np.ones(33)))
    _, W, f, S = entropy.entropy_curve(prof, E0, E0 + span, 64)
    assert np.all(np.diff(W) >= -1e-15)
    assert W.min() >= 0 and W.max() <= 1 + 1e-6
    assert np.all(f >= 0) and np.all(np.diff(S) >= 0) and S[0] == 0
