import numpy as np
import pytest

from spindeform.clifford import MINKOWSKI
from spindeform.scenarios import standing_wave_initial
from spindeform.sigma import (ChartViolationError, LatticeSpec,
                              christoffel, covariant_operator_apply,
                              deformed_basis_shift, deformed_metric,
                              discrete_energy, embed_to_sphere,
                              sigma_eom_residual, sigma_evolve, target_metric,
                              target_metric_derivative)

L = 2 * np.pi


def test_basis_shift_limits_and_value():
    dx = np.array([1.0, 0.0, 0.0, 0.0])
    x = np.array([1.0, 0.0, 0.0, 0.0])
    assert np.allclose(deformed_basis_shift(dx, x, np.zeros(4)), dx)
    assert np.allclose(deformed_basis_shift(dx, np.zeros(4), np.full(4, 0.01)), dx)
    k = np.array([0.001, 0.0, 0.0, 0.0])
    assert np.allclose(deformed_basis_shift(dx, x, k), [1.002, 0, 0, 0])


def test_deformed_metric_limits_symmetry_and_value():
    assert np.allclose(deformed_metric(np.zeros(4), np.full(4, 0.01)), MINKOWSKI)
    assert np.allclose(deformed_metric(np.ones(4), np.zeros(4)), MINKOWSKI)
    rng = np.random.default_rng(59)
    for _ in range(20):
        x = rng.uniform(-2, 2, 4)
        k = rng.uniform(-0.01, 0.01, 4)
        e = deformed_metric(x, k)
        assert np.allclose(e, e.T)
    x = np.array([0.0, 1.0, 0.0, 0.0])
    k = np.array([0.0, 0.001, 0.0, 0.0])
    assert deformed_metric(x, k)[1, 1] == pytest.approx(-1.004)


def test_deformed_metric_against_tensor_product_expansion():
    # independent oracle: expand eta_ab (d^a_mu + 2 x^a k_mu)(d^b_nu + 2 x^b k_nu)
    # and drop the O(k^2) term
    rng = np.random.default_rng(61)
    for _ in range(30):
        x = rng.uniform(-2, 2, 4)
        k = rng.uniform(-0.01, 0.01, 4)
        want = np.zeros((4, 4))
        for mu in range(4):
            for nu in range(4):
                total = MINKOWSKI[mu, nu]
                for a in range(4):
                    total += MINKOWSKI[a, nu] * 2 * x[a] * k[mu]
                    total += MINKOWSKI[mu, a] * 2 * x[a] * k[nu]
                want[mu, nu] = total
        assert np.allclose(deformed_metric(x, k), want, atol=1e-15)


def test_target_metric_values_and_positivity():
    N = 3
    assert np.allclose(target_metric(np.zeros(N)), np.eye(N))
    g = target_metric(np.array([0.6]))
    assert g[0, 0] == pytest.approx(1.5625)
    rng = np.random.default_rng(67)
    for _ in range(1000):
        phi = rng.standard_normal(2)
        r = rng.uniform(0.0, 0.9)
        phi = phi / np.linalg.norm(phi) * r
        eig = np.linalg.eigvalsh(target_metric(phi))
        assert np.all(eig > 0)


def test_target_metric_chart_violation():
    with pytest.raises(ChartViolationError):
        target_metric(np.array([0.999, 0.02]))


def test_sphere_embedding_unit_norm():
    rng = np.random.default_rng(71)
    phi = rng.uniform(-0.4, 0.4, size=(100, 2))
    emb = embed_to_sphere(phi)
    assert np.max(np.abs(np.sum(emb**2, axis=-1) - 1.0)) <= 1e-12


def test_christoffel_pole_symmetry_and_oracles():
    N = 2
    assert np.max(np.abs(christoffel(np.zeros(N)))) == 0.0
    rng = np.random.default_rng(73)
    step = 1e-5
    for _ in range(100):
        phi = rng.standard_normal(N)
        phi *= rng.uniform(0, 0.85) / np.linalg.norm(phi)
        gam = christoffel(phi)
        assert np.allclose(gam, np.swapaxes(gam, -1, -2))
        # finite-difference oracle on the metric
        dg = np.zeros((N, N, N))
        for kk in range(N):
            dphi = np.zeros(N)
            dphi[kk] = step
            dg[kk] = (target_metric(phi + dphi) - target_metric(phi - dphi)) / (2 * step)
        assert np.max(np.abs(dg - target_metric_derivative(phi))) <= 1e-6
        g_inv = np.linalg.inv(target_metric(phi))
        want = np.zeros((N, N, N))
        for p in range(N):
            for i in range(N):
                for j in range(N):
                    acc = 0.0
                    for q in range(N):
                        acc += 0.5 * g_inv[p, q] * (dg[i][q, j] + dg[j][q, i] - dg[q][i, j])
                    want[p, i, j] = acc
        assert np.max(np.abs(gam - want)) <= 1e-6
        # closed-form candidate verified against the same oracle
        closed = phi[:, None, None] * target_metric(phi)[None, :, :]
        assert np.max(np.abs(gam - closed)) <= 1e-10


def independent_flat_residual(block, h, dt):
    """Standalone undeformed (k=0) residual used as a cross-check oracle."""
    P = np.asarray(block, dtype=float)
    dtP = (P[2:] - P[:-2]) / (2 * dt)
    dttP = (P[2:] - 2 * P[1:-1] + P[:-2]) / dt**2
    mid = P[1:-1]
    dxP = (np.roll(mid, -1, axis=1) - np.roll(mid, 1, axis=1)) / (2 * h)
    dxxP = (np.roll(mid, -1, axis=1) - 2 * mid + np.roll(mid, 1, axis=1)) / h**2
    S = 1.0 - np.sum(mid**2, axis=-1)
    N = mid.shape[-1]
    g = np.eye(N) + mid[..., :, None] * mid[..., None, :] / S[..., None, None]
    gam = mid[..., :, None, None] * g[..., None, :, :]
    quad = (np.einsum("txpij,txi,txj->txp", gam, dtP, dtP)
            - np.einsum("txpij,txi,txj->txp", gam, dxP, dxP))
    return dttP - dxxP + quad


def standing_block(nt, nx, dt, h, amp=0.1):
    t = np.arange(nt) * dt
    x = np.arange(nx) * h
    u = amp * np.cos(t[:, None]) * np.sin(x[None, :])
    return np.sin(u)[..., None]  # exact N=1 chart solution


def test_constant_field_zero_residual():
    spec = LatticeSpec(dt=0.01, h=0.05)
    block = np.full((5, 16, 2), 0.2)
    assert sigma_eom_residual(block, np.zeros(4), spec) == 0.0
    out = covariant_operator_apply(block, np.zeros(4), spec)
    assert np.max(np.abs(out)) == 0.0


def test_flat_limit_matches_independent_implementation():
    nx = 32
    h = L / nx
    dt = h / 4
    spec = LatticeSpec(dt=dt, h=h)
    block = standing_block(7, nx, dt, h)
    ours = sigma_eom_residual(block, np.zeros(4), spec)
    theirs = float(np.max(np.abs(independent_flat_residual(block, h, dt))))
    assert ours == pytest.approx(theirs, rel=1e-12)


def test_exact_solution_residual_second_order():
    res = []
    for nx in (32, 64, 128):
        h = L / nx
        dt = h / 4
        spec = LatticeSpec(dt=dt, h=h)
        block = standing_block(9, nx, dt, h)
        res.append(sigma_eom_residual(block, np.zeros(4), spec))
    assert 3.5 <= res[0] / res[1] <= 4.5
    assert 3.5 <= res[1] / res[2] <= 4.5


def test_covariant_apply_equals_integrand():
    nx = 24
    spec = LatticeSpec(dt=0.01, h=L / nx)
    rng = np.random.default_rng(79)
    smooth = 0.2 * np.sin(np.arange(nx) * 2 * np.pi / nx)
    block = np.stack([np.stack([smooth, 0.1 * np.cos(np.arange(nx) * 2 * np.pi / nx)],
                               axis=-1)] * 5)
    block = block + 0.01 * rng.standard_normal(block.shape)
    k = np.array([0.0, 0.003, 0.0, 0.0])
    a = covariant_operator_apply(block, k, spec)
    # reconstruct the plain-route integrand via the residual's max over |.|
    from spindeform.sigma import _eom_integrand
    b = _eom_integrand(block, k, spec, 1e-3, 0, regrouped=False)
    assert np.max(np.abs(a - b)) <= 1e-13
    # k -> 0 reduces to the standard operator
    a0 = covariant_operator_apply(block, np.zeros(4), spec)
    b0 = _eom_integrand(block, np.zeros(4), spec, 1e-3, 0, regrouped=False)
    assert np.max(np.abs(a0 - b0)) <= 1e-13


def test_static_evolution_stays_constant():
    nx = 32
    spec = LatticeSpec(dt=0.02, h=L / nx)
    phi0 = np.full((nx, 2), 0.15)
    v0 = np.zeros_like(phi0)
    result = sigma_evolve(phi0, v0, np.zeros(4), spec, steps=50)
    assert np.max(np.abs(result.history - phi0[None])) == 0.0


def test_energy_conservation_flat_run():
    nx = 256
    h = L / nx
    spec = LatticeSpec(dt=h / 4, h=h)
    phi0, v0 = standing_wave_initial(nx, L, 2, 0.05)
    result = sigma_evolve(phi0, v0, np.zeros(4), spec, steps=1000)
    drift = np.max(np.abs(result.energy - result.energy[0])) / abs(result.energy[0])
    assert drift <= 1e-6


def test_evolved_solution_residual_second_order():
    T = 1.0
    res = []
    for nx in (64, 128):
        h = L / nx
        dt = h / 4
        spec = LatticeSpec(dt=dt, h=h)
        phi0, v0 = standing_wave_initial(nx, L, 2, 0.1)
        steps = int(round(T / dt))
        result = sigma_evolve(phi0, v0, np.zeros(4), spec, steps=steps)
        sub = result.history[::2]
        sub_spec = LatticeSpec(dt=2 * dt, h=h)
        res.append(sigma_eom_residual(sub, np.zeros(4), sub_spec))
    assert 3.0 <= res[0] / res[1] <= 5.0


def test_small_k_drift_is_first_order():
    nx = 64
    h = L / nx
    spec = LatticeSpec(dt=h / 4, h=h)
    phi0, v0 = standing_wave_initial(nx, L, 2, 0.1)
    steps = 80
    base = sigma_evolve(phi0, v0, np.zeros(4), spec, steps=steps)
    drifts = []
    for eps in (1e-3, 5e-4):
        k = np.array([0.0, eps, 0.0, 0.0])
        run = sigma_evolve(phi0, v0, k, spec, steps=steps)
        drifts.append(np.max(np.abs(run.history[-1] - base.history[-1])))
    assert drifts[0] > 0
    assert 1.5 <= drifts[0] / drifts[1] <= 3.0


def test_cfl_and_chart_aborts():
    nx = 32
    h = L / nx
    with pytest.raises(ValueError, match="dt <= h/2"):
        sigma_evolve(np.zeros((nx, 1)), np.zeros((nx, 1)), np.zeros(4),
                     LatticeSpec(dt=h, h=h), steps=5)
    # uniform velocity pushes the field off the chart mid-run
    spec = LatticeSpec(dt=h / 4, h=h)
    phi0 = np.full((nx, 1), 0.25)
    v0 = np.full((nx, 1), -0.8)
    with pytest.raises(ChartViolationError) as err:
        sigma_evolve(phi0, v0, np.zeros(4), spec, steps=400, eps_chart=0.5)
    assert err.value.step is not None and err.value.step > 1


def test_energy_positive_and_diagnostics_shape():
    nx = 64
    h = L / nx
    spec = LatticeSpec(dt=h / 4, h=h)
    phi0, v0 = standing_wave_initial(nx, L, 2, 0.05)
    result = sigma_evolve(phi0, v0, np.zeros(4), spec, steps=20)
    assert result.history.shape == (21, nx, 2)
    assert len(result.energy) == 20
    assert len(result.max_chart_sq) == 21
    assert np.all(result.energy > 0)
    assert discrete_energy(phi0, phi0, spec) >= 0.0
