import numpy as np
import pytest

from kgvar import energy, kg_solver
from kgvar.constants import PhysicalConstants
from kgvar.errors import ArgumentError, SuperluminalError
from kgvar.geometry import analyze
from kgvar.grid import Grid, ScalarField, VectorField, integrate


def _st(n=9, nt=7, c=1.0, dim=3):
    return Grid.spacetime(1.0, nt, Grid.box((1.0,) * dim, n), c=c)


def _wave(g, seed=0):
    rng = np.random.default_rng(seed)
    mesh = g.mesh()
    t = mesh[0]
    vals = np.exp(-1j * t) * np.prod([np.sin(np.pi * x) for x in mesh[1:]], axis=0)
    vals = vals + 0.05 * (rng.normal(size=g.shape) + 1j * rng.normal(size=g.shape))
    return ScalarField(g, vals)


def _identity_r(g, move=(0.0, 0.0, 0.0), c=1.0):
    x0, *xs = g.mesh()
    t = x0 / c
    return VectorField.from_components(g, [x + u * t for x, u in zip(xs, move)])


def test_velocity_of_translation(unit):
    g = _st()
    v, drdt = energy.velocity(_identity_r(g, (0.3, 0.0, -0.4)), unit)
    np.testing.assert_allclose(v.values, 0.5, atol=1e-13)
    np.testing.assert_allclose(drdt.values[2], -0.4, atol=1e-13)


def test_velocity_superluminal(unit):
    g = _st()
    with pytest.raises(SuperluminalError):
        energy.velocity(_identity_r(g, (1.2, 0.0, 0.0)), unit)


def test_newtonian_action_flat_static(unit):
    g = _st()
    phi = _wave(g)
    br = energy.newtonian_action(_identity_r(g), phi, 0.7, unit)
    assert br.kinetic == pytest.approx(0.0, abs=1e-14)
    flat = np.sum(np.abs(np.stack([np.gradient(phi.values, h, axis=a, edge_order=2)
                                   for a, h in zip((1, 2, 3), g.spacing[1:])])) ** 2, axis=0)
    assert br.curvature == pytest.approx(0.5 * integrate(ScalarField(g, flat)), rel=1e-12)
    norm = energy.mass_constraint_residual(phi, analyze(_identity_r(g))[0], unit, mass=1.0)
    assert br.multiplier_term == pytest.approx(-0.7 * np.dot(g.trapezoid_weights(0), norm), rel=1e-12)
    assert br.total == pytest.approx(br.kinetic + br.curvature + br.multiplier_term)


def test_newtonian_kinetic_term_of_translation(unit):
    g = _st()
    phi = _wave(g)
    br = energy.newtonian_action(_identity_r(g, (0.3, 0.4, 0.0)), phi, 0.0, unit)
    dens = integrate(ScalarField(g, np.abs(phi.values) ** 2))
    assert br.kinetic == pytest.approx(-0.5 * 0.25 * dens, rel=1e-12)


def test_action_is_phase_invariant(unit):
    g = _st()
    phi = _wave(g)
    r = _identity_r(g, (0.1, 0.0, 0.2))
    a = energy.newtonian_action(r, phi, 0.4, unit)
    b = energy.newtonian_action(r, phi.with_values(np.exp(0.83j) * phi.values), 0.4, unit)
    assert a.total == pytest.approx(b.total, rel=1e-13)


def test_curvature_term_scales_with_gamma_and_phi_squared(unit):
    g = _st()
    phi = _wave(g)
    r = _identity_r(g)
    base = energy.newtonian_action(r, phi, 0.0, unit).curvature
    other = PhysicalConstants(1.0, 1.0, 1.0, gamma=3.0)
    assert energy.newtonian_action(r, phi, 0.0, other).curvature == pytest.approx(3 * base, rel=1e-13)
    doubled = energy.newtonian_action(r, phi.with_values(2 * phi.values), 0.0, unit).curvature
    assert doubled == pytest.approx(4 * base, rel=1e-13)


def test_gateaux_derivative_matches_discrete_gradient(unit):
    g = _st(n=7, nt=5)
    phi = _wave(g, 1)
    psi = _wave(g, 2)
    r = _identity_r(g)
    E = np.linspace(0.2, 0.9, g.points[0])
    G = energy.flat_newtonian_gradient(phi, E, unit)
    predicted = integrate(ScalarField(g, np.real(np.conj(G) * psi.values))) / unit.c
    eps = 1e-6
    up = energy.newtonian_action(r, phi.with_values(phi.values + eps * psi.values), E, unit).total
    dn = energy.newtonian_action(r, phi.with_values(phi.values - eps * psi.values), E, unit).total
    assert (up - dn) / (2 * eps) == pytest.approx(predicted, rel=1e-7)


def test_relativistic_action_static_rest_term():
    consts = PhysicalConstants(2.0, 3.0, 1.0)
    g = Grid.spacetime(0.5, 5, Grid.box((1.0, 1.0, 1.0), 9), c=consts.c)
    x0, x, y, z = g.mesh()
    r = VectorField.from_components(g, [x0, x, y, z])
    R = ScalarField(g, np.sqrt(consts.m) * np.ones(g.shape))
    br = energy.relativistic_action(r, R, consts, E=1.5)
    # |R|^2 = m on a unit box for half a time unit
    assert br.kinetic == pytest.approx(consts.c**2 * consts.m * 0.5, rel=1e-12)
    np.testing.assert_allclose(br.constraint, 0.0, atol=1e-12)
    assert br.multiplier_term == pytest.approx(0.0, abs=1e-12)
    assert br.curvature == pytest.approx(0.0, abs=1e-10)


def test_relativistic_action_needs_full_map(unit):
    g = _st()
    with pytest.raises(ArgumentError):
        energy.relativistic_action(_identity_r(g), _wave(g), unit)


def test_mass_differential_lorentz_factor(unit):
    g = _st()
    x0, x, y, z = g.mesh()
    r = VectorField.from_components(g, [x0, x + 0.6 * x0, y, z])
    R = ScalarField(g, np.ones(g.shape))
    dm = energy.mass_differential(r, R, unit).values
    # sqrt(-g) = 1 for this shear, gamma = 1.25
    np.testing.assert_allclose(dm, 1.25, rtol=1e-12)


def test_normal_field_constraints(unit):
    g = _st()
    r = _identity_r(g, (0.5, 0.0, 0.0))
    ones, zeros = np.ones(g.shape), np.zeros(g.shape)
    n = VectorField.from_components(g, [zeros, ones, zeros])
    nn, nv = energy.normal_field_constraints(n, r, unit)
    np.testing.assert_allclose(nn.values, 0.0, atol=1e-14)
    np.testing.assert_allclose(nv.values, 0.0, atol=1e-14)
    tilted = VectorField.from_components(g, [ones, zeros, zeros])
    np.testing.assert_allclose(energy.normal_field_constraints(tilted, r, unit)[1].values, 0.5, atol=1e-13)


def test_normal_field_action_flat_matches_first_form(unit):
    g = _st()
    phi = _wave(g)
    r = _identity_r(g)
    ones, zeros = np.ones(g.shape), np.zeros(g.shape)
    n = VectorField.from_components(g, [zeros, zeros, ones])
    a = energy.normal_field_action(r, n, phi, 0.2, unit)
    b = energy.newtonian_action(r, phi, 0.2, unit)
    assert a.curvature == pytest.approx(b.curvature, rel=1e-12)


def test_kg_and_skg_coincide_after_discrete_substitution(unit):
    pair = kg_solver.laplacian_eigs(Grid.box((1.0, 1.0, 1.0), 9), 1)[0]
    E1 = kg_solver.solve_E1(pair.lam, unit).principal
    phi = kg_solver.stationary_state(pair, E1, 1.0, 9, unit)
    dt = phi.grid.spacing[0] / unit.c
    kg = energy.kg_residual_field(phi, energy.discrete_phase_energy(E1, dt, unit), unit)
    skg = energy.skg_residual_field(phi, unit)
    assert np.max(np.abs(kg - skg)) < 1e-13


def test_kg_residual_vanishes_for_exact_discrete_state(unit):
    # the discrete Laplacian eigenpair with the discrete time symbol gives an exact solution
    pair = kg_solver.laplacian_eigs(Grid.box((1.0, 1.0, 1.0), 9), 1)[0]
    E1 = kg_solver.solve_E1(pair.lam, unit).principal
    nt = 33
    phi = kg_solver.stationary_state(pair, E1, 1.0, nt, unit)
    dt = phi.grid.spacing[0]
    # continuum E1 vs discrete second difference symbol differ by O(dt^2)
    res = energy.kg_residual(phi, E1, unit)
    assert res < 0.5 * E1**4 * dt**2 / 12 + 1e-12


def test_residual_rejects_spatial_grid(unit):
    g = Grid.box((1.0, 1.0, 1.0), 5)
    with pytest.raises(ArgumentError):
        energy.kg_residual(ScalarField(g, np.zeros(g.shape)), 1.0, unit)


def test_time_series_length_checked(unit):
    g = _st()
    with pytest.raises(ArgumentError):
        energy.newtonian_action(_identity_r(g), _wave(g), np.ones(3), unit)


def test_discrete_phase_energy_limit(unit):
    assert energy.discrete_phase_energy(2.0, 1e-6, unit) == pytest.approx(2.0, rel=1e-11)
    assert energy.discrete_phase_energy(2.0, 0.1, unit) == pytest.approx(10 * np.sin(0.2), rel=1e-15)


def test_breakdown_serialises(unit):
    g = _st()
    br = energy.newtonian_action(_identity_r(g), _wave(g), 0.1, unit)
    d = br.to_dict()
    assert d["total"] == pytest.approx(br.total)
    assert {"kinetic", "curvature", "multiplier_term"} <= set(d)
