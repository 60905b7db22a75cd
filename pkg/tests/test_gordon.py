import numpy as np
import pytest

from spindeform.clifford import build_gammas
from spindeform.dirac import PlaneWaveMode, exact_plane_wave, standard_spinor
from spindeform.gordon import (MomentFitInput, gordon_decompose,
                               magnetic_moment, moment_ratio_roundtrip,
                               neutron_fit, phi_path_reconstruct,
                               total_current)

G = build_gammas()
M = 1.0
X0 = np.array([0.05, -0.02, 0.01, 0.03])


def wave_pair(p_row, p_col, k_mu=None):
    """Callables for the adjoint of wave A and the field of wave B."""
    k = np.zeros(4) if k_mu is None else np.asarray(k_mu, dtype=float)
    mode_a = PlaneWaveMode(p=p_row, m=M, k=k)
    mode_b = PlaneWaveMode(p=p_col, m=M, k=k)

    def bar_fn(x):
        return np.conj(exact_plane_wave(x, mode_a, G)) @ G.gamma[0]

    def fn(x):
        return exact_plane_wave(x, mode_b, G)

    return bar_fn, fn


def test_identity_on_random_pairs_constant_phi():
    rng = np.random.default_rng(47)
    worst = 0.0
    for _ in range(100):
        pa = rng.uniform(-0.5, 0.5, 3)
        pb = rng.uniform(-0.5, 0.5, 3)
        phi = rng.uniform(0.3, 1.0)
        bar_fn, fn = wave_pair(pa, pb)
        split = gordon_decompose(bar_fn, fn, phi, M, X0, g=G)
        j = total_current(bar_fn, fn, phi, X0, G)
        gap = np.linalg.norm(split.total - j) / np.linalg.norm(j)
        worst = max(worst, gap)
    assert worst <= 1e-10


def test_reality_for_adjoint_consistent_pairs():
    rng = np.random.default_rng(53)
    for _ in range(10):
        p = rng.uniform(-0.5, 0.5, 3)
        bar_fn, fn = wave_pair(p, p)
        split = gordon_decompose(bar_fn, fn, 0.8, M, X0, g=G)
        assert np.max(np.abs(split.j1.imag)) < 1e-12
        assert np.max(np.abs(split.j2.imag)) < 1e-12


def test_textbook_limit_single_standard_wave():
    p = np.array([0.4, -0.1, 0.25])
    bar_fn, fn = wave_pair(p, p)
    split = gordon_decompose(bar_fn, fn, 1.0, M, X0, g=G)
    u, p_lower = standard_spinor(p, M, +1, G)
    ubar = np.conj(u) @ G.gamma[0]
    scalar = (ubar @ u).real
    p_upper = np.array([p_lower[0], p[0], p[1], p[2]])
    assert np.allclose(split.j1.real, p_upper / M * scalar, atol=1e-9)
    assert np.max(np.abs(split.j2)) < 1e-9


def test_zero_spinor_gives_zero_split():
    zero_fn = lambda x: np.zeros(np.asarray(x).shape[:-1] + (4,), dtype=complex)
    split = gordon_decompose(zero_fn, zero_fn, 0.7, M, X0, g=G)
    assert np.max(np.abs(split.j1)) == 0.0
    assert np.max(np.abs(split.j2)) == 0.0


def test_identity_with_deformed_family_and_matching_phi():
    # varying phi = exp(k.x): the weight inside the divergence term matters
    k_mu = np.array([0.0, 0.006, -0.002, 0.001])
    pa = np.array([0.3, 0.1, -0.2])
    pb = np.array([-0.25, 0.4, 0.15])
    bar_fn, fn = wave_pair(pa, pb, k_mu)
    phi_fn = lambda pts: np.exp(np.asarray(pts, dtype=float) @ k_mu)
    split = gordon_decompose(bar_fn, fn, phi_fn, M, X0, g=G)
    j = total_current(bar_fn, fn, float(phi_fn(X0)), X0, G)
    gap = np.linalg.norm(split.total - j) / np.linalg.norm(j)
    assert gap <= 1e-9


def test_magnetic_moment_formula():
    assert magnetic_moment(1.0, 1.0) == pytest.approx(-0.5)
    assert magnetic_moment(0.4, 1.0) * 4.0 == pytest.approx(magnetic_moment(0.8, 1.0))
    with pytest.raises(ValueError):
        magnetic_moment(1.5, 1.0)
    with pytest.raises(ValueError):
        magnetic_moment(0.5, -1.0)


def test_neutron_fit_published_numbers():
    fit = neutron_fit(MomentFitInput(mu_ratio=-1.913, e_abs=0.303,
                                     beta=1.00138, mass_ratio_nm=1.00138))
    assert fit.phi_bar_sq_over_beta == pytest.approx(0.5796, abs=5e-4)
    assert fit.phi_bar == pytest.approx(0.7618, abs=5e-4)
    # charge from the fine-structure constant
    e = float(np.sqrt(4 * np.pi / 137.0))
    assert e == pytest.approx(0.3028, abs=5e-4)
    fit2 = neutron_fit(MomentFitInput(e_abs=e))
    assert fit2.phi_bar == pytest.approx(0.7618, abs=5e-4)


def test_fit_round_trip_reproduces_input_ratio():
    fit_input = MomentFitInput()
    fit = neutron_fit(fit_input)
    ratio = moment_ratio_roundtrip(fit, fit_input)
    assert ratio == pytest.approx(-1.913, rel=1e-4)


def test_fit_rejects_out_of_range_deformation():
    with pytest.raises(ValueError, match="deformation out of range"):
        neutron_fit(MomentFitInput(mu_ratio=-30.0))


def test_fit_input_validation():
    with pytest.raises(ValueError):
        MomentFitInput(e_abs=-1.0)
    with pytest.raises(ValueError):
        MomentFitInput(beta=0.0)


def test_phi_path_closed_loop_and_straight_segment():
    k = np.array([0.0, 0.001, 0.0, 0.0])
    loop = np.array([[0, 0, 0, 0], [0, 2, 0, 0], [0, 2, 3, 0],
                     [0, 0, 3, 0], [0, 0, 0, 0]], dtype=float)
    vals = phi_path_reconstruct(k, loop, 0.5)
    assert vals[-1] == pytest.approx(0.5)
    L = 7.0
    seg = np.array([[0, 0, 0, 0], [0, L, 0, 0]], dtype=float)
    vals = phi_path_reconstruct(k, seg, 0.5)
    assert vals[-1] == pytest.approx(0.5 * np.exp(0.001 * L), rel=1e-14)


def test_phi_path_independence_and_concatenation():
    k = np.array([0.0, -0.002, 0.0005, 0.0])
    a = np.array([[0, 0, 0, 0], [0, 1, 0, 0], [0, 1, 2, 0], [0, 3, 2, 0]],
                 dtype=float)
    b = np.array([[0, 0, 0, 0], [0, 0, 2, 0], [0, 3, 2, 0]], dtype=float)
    va = phi_path_reconstruct(k, a, 0.9)
    vb = phi_path_reconstruct(k, b, 0.9)
    assert va[-1] == pytest.approx(vb[-1], rel=1e-12)
    # multiplicative over concatenation: restart from the midpoint value
    first = phi_path_reconstruct(k, a[:2], 0.9)
    rest = phi_path_reconstruct(k, a[1:], first[-1])
    assert rest[-1] == pytest.approx(va[-1], rel=1e-12)


def test_phi_path_flags_regime_exit():
    k = np.array([0.0, 0.1, 0.0, 0.0])
    seg = np.array([[0, 0, 0, 0], [0, 50.0, 0, 0]], dtype=float)
    with pytest.raises(ValueError, match="valid deformation regime"):
        phi_path_reconstruct(k, seg, 0.5)
    with pytest.raises(ValueError, match=r"phi0 out of \(0,1\]"):
        phi_path_reconstruct(k, seg, 1.5)
