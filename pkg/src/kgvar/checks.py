"""Self-check scenarios behind the CLI commands.

Each ``*_report`` function builds its inputs, runs the library and returns a
JSON-ready dict with a ``checks`` mapping of name -> {value, limit, passed}.
"""

from __future__ import annotations

import numpy as np

from . import energy, entropy, kg_solver, relkin
from .geometry import (
    Signature,
    analyze,
    curvature_density_first,
    curvature_density_normal,
    flat_density,
)
from .grid import Grid, ScalarField, VectorField, interior_slices

EIG_RESIDUAL_LIMIT = 1e-8
ORTHO_LIMIT = 1e-8
REDUCTION_LIMIT = 1e-9
ORDER_MIN = 1.9
KG_SKG_LIMIT = 1e-12
INTERVAL_LIMIT = 1e-10
ROUNDTRIP_LIMIT = 1e-12
AFFINE_GAMMA_LIMIT = 1e-8
IDENTITY_LIMIT = 1e-12
ENTROPY_REL_LIMIT = 0.02
W_OVERSHOOT = 1e-6


def _check(value, limit, passed=None, kind="max"):
    value = float(value)
    if passed is None:
        passed = value <= limit if kind == "max" else value >= limit
    return {"value": value, "limit": float(limit), "passed": bool(passed)}


def all_passed(report):
    return all(c["passed"] for c in report.get("checks", {}).values())


def observed_orders(hs, errors):
    hs = np.asarray(hs, dtype=float)
    errors = np.asarray(errors, dtype=float)
    return [float(np.log(errors[i] / errors[i + 1]) / np.log(hs[i] / hs[i + 1])) for i in range(len(hs) - 1)]


# -- eigenvalues ---------------------------------------------------------------


def eig_report(box, n, k, consts, seed=0):
    grid = Grid.box(box, n)
    pairs = kg_solver.laplacian_eigs(grid, k, seed=seed)
    lams = [p.lam for p in pairs]
    analytic = kg_solver.analytic_box_spectrum(box, k)
    modes = []
    for i, (p, ref) in enumerate(zip(pairs, analytic)):
        modes.append(
            {
                "index": i + 1,
                **kg_solver.eigenpair_summary(p, consts),
                "analytic_lambda": ref,
                "rel_error_vs_analytic": abs(p.lam - ref) / ref,
            }
        )
    cell = float(np.prod(grid.spacing))
    V = np.stack([p.phi2.values.ravel() for p in pairs])
    gram = cell * V @ V.T
    ortho = float(np.max(np.abs(gram - np.eye(k))))
    cl = kg_solver.clusters(lams)
    report = {
        "command": "eig",
        "grid": grid.to_dict(),
        "k": k,
        "modes": modes,
        "clusters": [
            {"lambda": v, "size": s, "lambda_over_pi2": v / np.pi**2} for v, s in cl
        ],
        "analytic_clusters": [
            {"lambda": v, "size": s} for v, s in kg_solver.clusters(analytic, rtol=1e-12)
        ],
        "checks": {
            "max_residual": _check(max(p.residual for p in pairs), EIG_RESIDUAL_LIMIT),
            "orthonormality": _check(ortho, ORTHO_LIMIT),
        },
    }
    return report, pairs


# -- flat reductions -----------------------------------------------------------


def reduction_fields(n, nt, consts, perturb=0.0):
    space = Grid.box((1.0, 1.0, 1.0), n)
    grid = Grid.spacetime(1.0, nt, space, c=consts.c)
    x0, x, y, z = grid.mesh()
    t = x0 / consts.c
    phi = ScalarField(
        grid,
        np.sin(np.pi * x) * np.sin(np.pi * y) * np.sin(np.pi * z) * np.exp(-2.0j * t) * (1.0 + 0.3j * x)
        + 0.1 * x * y,
    )
    bump = perturb * np.sin(np.pi * x) * np.sin(np.pi * y) * np.sin(np.pi * z)
    X = [x + bump, y + 0.5 * bump, z - bump]
    r3 = VectorField.from_components(grid, X)
    r4 = VectorField.from_components(grid, [x0] + X)
    return grid, phi, r3, r4


def reduction_report(n, nt, consts, perturb=0.0):
    grid, phi, r3, r4 = reduction_fields(n, nt, consts, perturb)
    spatial = grid.spatial_axes
    m3, g3 = analyze(r3, Signature.EUCLIDEAN)
    m4, g4 = analyze(r4, Signature.MINKOWSKI)
    flat_e = flat_density(phi, spatial, Signature.EUCLIDEAN).values
    flat_m = flat_density(phi, tuple(range(grid.dim)), Signature.MINKOWSKI).values
    unit = np.ones(grid.shape)
    normal = VectorField.from_components(grid, [0.6 * unit, 0.0 * unit, 0.8 * unit])
    dev = {
        "first_form_euclidean": np.max(np.abs(curvature_density_first(phi, r3, m3, g3).values - flat_e)),
        "first_form_minkowski": np.max(np.abs(curvature_density_first(phi, r4, m4, g4).values - flat_m)),
        "normal_form_euclidean": np.max(np.abs(curvature_density_normal(phi, normal, r3, m3).values - flat_e)),
    }
    return {
        "command": "reduce-check",
        "grid": grid.to_dict(),
        "perturbation": perturb,
        "max_deviation": {k: float(v) for k, v in dev.items()},
        "checks": {k: _check(v, REDUCTION_LIMIT) for k, v in dev.items()},
    }


# -- Klein-Gordon residual -------------------------------------------------------


def residual_levels(n, nt, refine, mode, consts, t_final=1.0, root="principal", seed=0):
    rows = []
    for j in range(refine):
        nj = (n - 1) * 2**j + 1
        ntj = (nt - 1) * 2**j + 1
        pair = kg_solver.laplacian_eigs(Grid.box((1.0, 1.0, 1.0), nj), mode, seed=seed)[mode - 1]
        roots = kg_solver.solve_E1(pair.lam, consts)
        E1 = roots.principal if root == "principal" else roots.E1_minus
        phi = kg_solver.stationary_state(pair, E1, t_final, ntj, consts)
        dt = phi.grid.spacing[0] / consts.c
        kg = energy.kg_residual(phi, E1, consts)
        skg = energy.skg_residual(phi, consts)
        kg_discrete = energy.kg_residual(phi, energy.discrete_phase_energy(E1, dt, consts), consts)
        rows.append(
            {
                "n": nj,
                "nt": ntj,
                "h": phi.grid.spacing[1],
                "dt": dt,
                "lambda": pair.lam,
                "E1": E1,
                "kg_residual": kg,
                "skg_residual": skg,
                "kg_discrete_substitution": kg_discrete,
                "kg_skg_rel_diff": abs(kg_discrete - skg) / max(abs(skg), 1e-300),
            }
        )
    return rows


def residual_report(n, nt, refine, mode, consts, t_final=1.0, root="principal"):
    rows = residual_levels(n, nt, refine, mode, consts, t_final, root)
    hs = [np.hypot(r["h"], r["dt"]) for r in rows]
    orders = observed_orders(hs, [r["kg_residual"] for r in rows])
    return {
        "command": "residual",
        "mode": mode,
        "root": root,
        "levels": rows,
        "observed_orders": orders,
        "checks": {
            "min_observed_order": _check(min(orders), ORDER_MIN, kind="min"),
            "kg_skg_agreement": _check(max(r["kg_skg_rel_diff"] for r in rows), KG_SKG_LIMIT),
        },
    }


# -- Lorentz boosts --------------------------------------------------------------


def boost_report(event, v, consts, n_random=0, seed=0):
    c = consts.c
    e = relkin.Event(event[0], event[1:])
    bv = relkin.BoostVelocity(tuple(v))
    p = relkin.boost(e, bv, consts)
    back = relkin.boost(p, tuple(-np.asarray(bv.v)), consts)
    scale = c**2 * e.t**2 + float(np.dot(e.x, e.x))
    s0 = float(relkin.interval(e.t, e.x, c))
    s1 = float(relkin.interval(p.t, p.x, c))
    norm = np.sqrt(scale) if scale > 0 else 1.0
    roundtrip = np.hypot(c * (back.t - e.t), np.linalg.norm(np.subtract(back.x, e.x))) / norm
    report = {
        "command": "boost",
        "event": {"t": e.t, "x": list(e.x)},
        "velocity": list(bv.v),
        "boosted": {"t": p.t, "x": list(p.x)},
        "interval": {"before": s0, "after": s1},
        "checks": {
            "interval_rel": _check(abs(s1 - s0) / (scale if scale > 0 else 1.0), INTERVAL_LIMIT),
            "roundtrip_rel": _check(roundtrip, ROUNDTRIP_LIMIT),
        },
    }
    if not np.any(bv.v):
        report["checks"]["zero_velocity_identity"] = _check(
            0.0 if (p.t == e.t and p.x == e.x) else 1.0, 0.0
        )
    if n_random:
        report["random_suite"] = random_boost_suite(n_random, consts, seed)
        report["checks"]["random_interval_rel"] = _check(report["random_suite"]["max_interval_rel"], INTERVAL_LIMIT)
        report["checks"]["random_roundtrip_rel"] = _check(report["random_suite"]["max_roundtrip_rel"], ROUNDTRIP_LIMIT)
    return report


def random_boost_suite(count, consts, seed=0, max_beta=0.9):
    c = consts.c
    rng = np.random.default_rng(seed)
    t = rng.uniform(-1.0, 1.0, count)
    x = rng.uniform(-1.0, 1.0, (count, 3)) * c
    direction = rng.normal(size=(count, 3))
    direction /= np.linalg.norm(direction, axis=1, keepdims=True)
    v = direction * (rng.uniform(0.0, max_beta, count) * c)[:, None]
    tp, xp = relkin.boost_arrays(t, x, v, c)
    tb, xb = relkin.boost_arrays(tp, xp, -v, c)
    scale = c**2 * t**2 + np.sum(x * x, axis=1)
    ds = np.abs(relkin.interval(tp, xp, c) - relkin.interval(t, x, c)) / scale
    rt = np.sqrt(c**2 * (tb - t) ** 2 + np.sum((xb - x) ** 2, axis=1)) / np.sqrt(scale)
    return {
        "count": int(count),
        "max_beta": max_beta,
        "max_interval_rel": float(ds.max()),
        "max_roundtrip_rel": float(rt.max()),
    }


# -- spin ------------------------------------------------------------------------


def spin_test_function(Y, s):
    """Smooth complex test function of boosted coordinates (3-vector index first)."""
    return (Y[0] + 0.5j * Y[1] + 0.3 * Y[2] + 0.2) * np.exp(-0.4j * s) * np.exp(-0.1 * np.sum(Y * Y, axis=0))


def spin_grid(n, consts):
    space = Grid((-1.0, -1.0, -1.0), (1.0, 1.0, 1.0), (n, n, n))
    return Grid.spacetime(1.0, n, space, c=consts.c)


def translating_field(grid, u, consts):
    x0, x, y, z = grid.mesh()
    t = x0 / consts.c
    return VectorField.from_components(grid, [x + u[0] * t, y + u[1] * t, z + u[2] * t])


def spin_report(n, u, consts, eps=1e-5, axis="z", static=False):
    grid = spin_grid(n, consts)
    u = (0.0, 0.0, 0.0) if static else tuple(float(c) for c in u)
    r = translating_field(grid, u, consts)
    phi = relkin.sample_through_boost(spin_test_function, r, consts)
    dec = relkin.angular_decompose(phi, r, consts, axis)
    oracle = relkin.epsilon_derivative_oracle(spin_test_function, r, consts, axis, eps)
    mismatch = float(np.max(np.abs(dec.J - oracle)))
    h = max(grid.spacing[1:] + (grid.spacing[0] / consts.c,))
    scale = float(np.max(np.abs(oracle)))
    tol = (h**2 + eps**2) * max(scale, 1.0)
    identity = float(np.max(np.abs(dec.J - dec.L - dec.S)))
    report = {
        "command": "spin",
        "axis": axis,
        "grid": grid.to_dict(),
        "velocity": list(u),
        "epsilon": eps,
        "norms": dec.norms(),
        "oracle_mismatch": mismatch,
        "declared_tolerance": {"formula": "(h^2 + eps^2) * max(1, max|J_oracle|)", "value": tol},
        "checks": {
            "construction_identity": _check(identity, IDENTITY_LIMIT * max(scale, 1.0)),
            "epsilon_oracle": _check(mismatch, tol),
        },
    }
    if static:
        report["checks"]["static_spin_zero"] = _check(float(np.max(np.abs(dec.S))), 0.0)
    return report


def lz_eigen_report(consts, n=5):
    grid = spin_grid(n, consts)
    r = translating_field(grid, (0.0, 0.0, 0.0), consts)
    _, x, y, _ = grid.mesh()
    phi = ScalarField(grid, x + 1j * y)
    dec = relkin.angular_decompose(phi, r, consts, "z")
    inner = interior_slices(grid)
    err = float(np.max(np.abs(dec.L[inner] - consts.hbar * phi.values[inner])))
    return err


# -- entropy ---------------------------------------------------------------------


def entropy_profile(kind, n, nt=5, consts=None):
    c = 1.0 if consts is None else consts.c
    space = Grid((0.0,), (1.0,), (n,))
    grid = Grid.spacetime(1.0, nt, space, c=c)
    _, x = grid.mesh()
    phi = ScalarField(space, np.ones(n))
    if kind == "two-level":
        E = np.where(x < 0.5, 1.0, 2.0)
    elif kind == "linear":
        E = x.copy()
    elif kind == "constant":
        E = np.full(grid.shape, 1.5)
    else:
        raise ValueError(f"unknown profile {kind!r}")
    return entropy.EnergyProfile(ScalarField(grid, E), phi, c=c)


ENTROPY_WINDOWS = {"two-level": (0.0, 3.0), "linear": (-0.5, 1.5), "constant": (0.0, 3.0)}


def entropy_report(kind, n, levels, consts=None):
    prof = entropy_profile(kind, n, consts=consts)
    E0, E1 = ENTROPY_WINDOWS[kind]
    lv, W, f, S = entropy.entropy_curve(prof, E0, E1, levels)
    checks = {
        "W_monotone": _check(float(max(0.0, -np.min(np.diff(W)))), 0.0),
        "W_upper": _check(float(W.max()) - 1.0, W_OVERSHOOT),
        "W_lower": _check(float(-W.min()), 0.0),
    }
    out = {"command": "entropy", "profile": kind, "levels": levels, "S_final": float(S[-1])}
    if kind == "two-level":
        exact = (2.0 - 1.0) * 0.5 * np.log(2.0)
        out["S_exact"] = exact
        checks["S_closed_form"] = _check(abs(S[-1] - exact) / exact, ENTROPY_REL_LIMIT)
    elif kind == "constant":
        checks["S_zero"] = _check(abs(S[-1]), (E1 - E0) / (levels - 1))
    elif kind == "linear":
        E, dE = 0.5, 0.05
        fd = (entropy.entropy_S(prof, E0, E + dE, levels) - entropy.entropy_S(prof, E0, E - dE, levels)) / (2 * dE)
        it = entropy.inverse_temperature(prof, E)
        out["dS_dE_fd"] = fd
        out["inverse_temperature"] = it
        checks["dS_dE_vs_inverse_temperature"] = _check(abs(fd - it) / abs(it), ENTROPY_REL_LIMIT)
    out["checks"] = checks
    return out, (lv, W, f, S)


# -- Christoffel symbols ---------------------------------------------------------


def _polar(n):
    g = Grid((1.0, 0.2), (2.0, 1.2), (n, n))
    u1, u2 = g.mesh()
    r = VectorField.from_components(g, [u1 * np.cos(u2), u1 * np.sin(u2)])
    exact = np.zeros(g.shape + (2, 2, 2))
    exact[..., 0, 1, 1] = -u1
    exact[..., 1, 0, 1] = exact[..., 1, 1, 0] = 1.0 / u1
    return g, r, exact


def _spherical(n):
    g = Grid((1.0, 0.5, 0.0), (2.0, 1.5, 1.0), (n, n, n))
    rho, th, ph = g.mesh()
    r = VectorField.from_components(
        g, [rho * np.sin(th) * np.cos(ph), rho * np.sin(th) * np.sin(ph), rho * np.cos(th)]
    )
    ex = np.zeros(g.shape + (3, 3, 3))
    ex[..., 0, 1, 1] = -rho
    ex[..., 0, 2, 2] = -rho * np.sin(th) ** 2
    ex[..., 1, 0, 1] = ex[..., 1, 1, 0] = 1.0 / rho
    ex[..., 1, 2, 2] = -np.sin(th) * np.cos(th)
    ex[..., 2, 0, 2] = ex[..., 2, 2, 0] = 1.0 / rho
    ex[..., 2, 1, 2] = ex[..., 2, 2, 1] = np.cos(th) / np.sin(th)
    return g, r, ex


def _affine(n):
    g = Grid((0.0, 0.0, 0.0), (1.0, 2.0, 1.5), (n, n, n))
    x = np.stack(g.mesh())
    A = np.array([[2.0, 0.3, -0.1], [0.1, 1.5, 0.2], [0.0, -0.4, 1.0]])
    r = VectorField(g, np.einsum("ab,b...->a...", A, x) + np.array([1.0, -2.0, 0.5])[:, None, None, None])
    return g, r, np.zeros(g.shape + (3, 3, 3))


EMBEDDINGS = {"polar": _polar, "spherical": _spherical, "affine": _affine}


def christoffel_error(embedding, n):
    g, r, exact = EMBEDDINGS[embedding](n)
    _, gam = analyze(r)
    inner = interior_slices(g)
    return float(np.max(np.abs(gam.gamma - exact)[inner])), max(g.spacing)


def christoffel_report(embedding, n, refine):
    errs, hs = [], []
    for j in range(refine):
        e, h = christoffel_error(embedding, (n - 1) * 2**j + 1)
        errs.append(e)
        hs.append(h)
    out = {"command": "christoffel", "embedding": embedding, "h": hs, "max_interior_error": errs}
    if embedding == "affine":
        out["checks"] = {"affine_gamma": _check(max(errs), AFFINE_GAMMA_LIMIT)}
    else:
        out["observed_orders"] = observed_orders(hs, errs)
        out["checks"] = {"min_observed_order": _check(min(out["observed_orders"]), ORDER_MIN, kind="min")}
    return out
