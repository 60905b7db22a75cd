import numpy as np
import pytest

from spindeform.clifford import (MINKOWSKI, bilinear_current, build_gammas,
                                 dirac_adjoint, raise_index, sigma_munu)

G = build_gammas()


def test_anticommutators_match_metric():
    for mu in range(4):
        for nu in range(4):
            anti = G.gamma[mu] @ G.gamma[nu] + G.gamma[nu] @ G.gamma[mu]
            want = 2 * MINKOWSKI[mu, nu] * np.eye(4)
            assert np.max(np.abs(anti - want)) <= 1e-14


def test_dirac_rep_block_structure_and_squares():
    assert np.allclose(np.diag(G.gamma[0]), [1, 1, -1, -1])
    assert np.max(np.abs(G.gamma[0] @ G.gamma[0] - np.eye(4))) <= 1e-14
    assert np.max(np.abs(G.gamma[1] @ G.gamma[1] + np.eye(4))) <= 1e-14


def test_trace_identities():
    for mu in range(4):
        assert abs(np.trace(G.gamma[mu])) <= 1e-14
        for nu in range(4):
            tr = np.trace(G.gamma[mu] @ G.gamma[nu])
            assert abs(tr - 4 * MINKOWSKI[mu, nu]) <= 1e-14


def test_hermiticity_pattern():
    assert np.max(np.abs(G.gamma[0] - G.gamma[0].conj().T)) <= 1e-14
    for mu in range(1, 4):
        assert np.max(np.abs(G.gamma[mu] + G.gamma[mu].conj().T)) <= 1e-14


def test_unsupported_representation():
    with pytest.raises(ValueError, match="unsupported representation"):
        build_gammas("weyl")


def test_sigma_diagonal_vanishes_and_antisymmetry():
    for mu in range(4):
        assert np.max(np.abs(sigma_munu(G, mu, mu))) == 0.0
        for nu in range(4):
            anti = sigma_munu(G, mu, nu) + sigma_munu(G, nu, mu)
            assert np.max(np.abs(anti)) <= 1e-14


def test_gamma_product_decomposition():
    # gamma^mu gamma^nu = eta^{mu nu} - i sigma^{mu nu}
    for mu in range(4):
        for nu in range(4):
            lhs = G.gamma[mu] @ G.gamma[nu]
            rhs = MINKOWSKI[mu, nu] * np.eye(4) - 1j * sigma_munu(G, mu, nu)
            assert np.max(np.abs(lhs - rhs)) <= 1e-14


def test_sigma_index_bounds():
    with pytest.raises(IndexError):
        sigma_munu(G, 0, 4)


def test_adjoint_of_upper_component():
    psi = np.array([1, 0, 0, 0], dtype=complex)
    assert np.allclose(dirac_adjoint(psi, G), [1, 0, 0, 0])


def test_adjoint_norm_real_and_lower_component_sign():
    rng = np.random.default_rng(7)
    for _ in range(50):
        psi = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        val = dirac_adjoint(psi, G) @ psi
        assert abs(val.imag) <= 1e-12
    psi = np.array([0, 0, 1, 0], dtype=complex)
    assert dirac_adjoint(psi, G) @ psi == pytest.approx(-1.0)


def test_scalar_bilinear_phase_invariant():
    rng = np.random.default_rng(11)
    psi = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    base = dirac_adjoint(psi, G) @ psi
    for alpha in (0.3, 1.2, -2.5):
        rotated = np.exp(1j * alpha) * psi
        assert dirac_adjoint(rotated, G) @ rotated == pytest.approx(base)


def test_current_of_basis_spinor():
    psi = np.array([1, 0, 0, 0], dtype=complex)
    j = bilinear_current(dirac_adjoint(psi, G), psi, G)
    assert np.allclose(j, [1, 0, 0, 0], atol=1e-15)


def test_current_density_positive_and_sesquilinear():
    rng = np.random.default_rng(13)
    for _ in range(100):
        psi = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        j = bilinear_current(dirac_adjoint(psi, G), psi, G)
        assert j[0] >= 0.0
        assert j[0] == pytest.approx(np.vdot(psi, psi).real)
        c = 1.7 - 0.4j
        jc = bilinear_current(dirac_adjoint(c * psi, G), c * psi, G)
        assert np.allclose(jc, abs(c) ** 2 * j)


def test_current_rejects_inconsistent_adjoint():
    rng = np.random.default_rng(17)
    psi = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    other = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    with pytest.raises(ValueError, match="non-real"):
        bilinear_current(dirac_adjoint(other, G), psi, G)


def test_raise_index_round_trip():
    v = np.array([1.0, 2.0, -3.0, 0.5])
    up = raise_index(v)
    assert np.allclose(up, [1.0, -2.0, 3.0, -0.5])
    assert np.allclose(raise_index(up), v)
