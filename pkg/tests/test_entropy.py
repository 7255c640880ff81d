import numpy as np
import pytest

from kgvar import checks, entropy
from kgvar.errors import ArgumentError
from kgvar.grid import Grid, ScalarField


def _profile(E_of_x, n=65, nt=5):
    space = Grid((0.0,), (1.0,), (n,))
    grid = Grid.spacetime(1.0, nt, space)
    _, x = grid.mesh()
    return entropy.EnergyProfile(ScalarField(grid, E_of_x(x)), ScalarField(space, np.ones(n)))


def test_neg_w_log_w_boundaries():
    assert entropy.neg_w_log_w(0.0) == 0.0
    assert entropy.neg_w_log_w(1.0) == 0.0
    assert entropy.neg_w_log_w(1.0 + 1e-9) == 0.0
    assert entropy.neg_w_log_w(np.exp(-1)) == pytest.approx(np.exp(-1))


def test_W_step_values():
    prof = _profile(lambda x: np.where(x < 0.5, 1.0, 2.0))
    assert entropy.sublevel_W(prof, 0.5) == 0.0
    # point-sampled indicator: the jump costs half a boundary cell, 1/128 here
    assert entropy.sublevel_W(prof, 1.5) == pytest.approx(0.5 - 0.5 / 64, abs=1e-12)
    assert entropy.sublevel_W(prof, 2.5) == pytest.approx(1.0, abs=1e-12)


def test_linear_profile_W_is_E():
    prof = _profile(lambda x: x, n=1001)
    for E in (0.1, 0.37, 0.8):
        assert entropy.sublevel_W(prof, E) == pytest.approx(E, abs=2e-3)


def test_entropy_two_level_closed_form():
    prof = _profile(lambda x: np.where(x < 0.5, 1.0, 2.0))
    assert entropy.entropy_S(prof, 0.0, 3.0, 601) == pytest.approx(0.5 * np.log(2), rel=0.01)


def test_constant_profile_zero_entropy():
    prof = _profile(lambda x: np.full_like(x, 1.5))
    assert entropy.entropy_S(prof, 0.0, 3.0, 256) == 0.0


def test_curve_monotone_and_bounded():
    prof = _profile(lambda x: np.sin(3 * x) ** 2)
    _, W, f, S = entropy.entropy_curve(prof, -0.1, 1.1, 128)
    assert np.all(np.diff(W) >= 0) and W[0] == 0 and W[-1] <= 1 + 1e-6
    assert np.all(f >= 0) and np.all(np.diff(S) >= 0)


def test_inverse_temperature_matches_slope():
    prof = _profile(lambda x: x, n=2001)
    dE = 0.02
    fd = (entropy.entropy_S(prof, 0.0, 0.5 + dE, 512) - entropy.entropy_S(prof, 0.0, 0.5 - dE, 512)) / (2 * dE)
    assert fd == pytest.approx(entropy.inverse_temperature(prof, 0.5), rel=0.01)


def test_from_multiplier_shifts_by_density():
    space = Grid((0.0,), (1.0,), (11,))
    grid = Grid.spacetime(1.0, 3, space)
    phi = ScalarField(space, np.ones(11))
    prof = entropy.EnergyProfile.from_multiplier(ScalarField(grid, np.full(grid.shape, 2.0)), phi, mu=0.5)
    np.testing.assert_allclose(prof.E_field.values, 1.5)


def test_normalisation_and_inputs_checked():
    space = Grid((0.0,), (1.0,), (11,))
    grid = Grid.spacetime(1.0, 3, space)
    with pytest.raises(ArgumentError):
        entropy.EnergyProfile(ScalarField(grid, np.zeros(grid.shape)), ScalarField(space, 2 * np.ones(11)))
    prof = entropy.EnergyProfile(ScalarField(grid, np.zeros(grid.shape)), ScalarField(space, np.ones(11)))
    with pytest.raises(ArgumentError):
        entropy.entropy_curve(prof, 1.0, 0.0, 10)
    with pytest.raises(ArgumentError):
        entropy.entropy_curve(prof, 0.0, 1.0, 1)


def test_csv_format():
    text = entropy.curve_csv([0.0, 1.0], [0.0, 1.0], [0.0, 0.0], [0.0, 0.0])
    assert text.startswith("E,W,-WlnW,S\r\n")
    assert text.count("\r\n") == 3


@pytest.mark.parametrize("kind", sorted(checks.ENTROPY_WINDOWS))
def test_reports_pass(kind):
    rep, _ = checks.entropy_report(kind, 64, 256)
    assert checks.all_passed(rep), rep["checks"]
