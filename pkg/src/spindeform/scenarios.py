"""Canonical cross-module configurations used by the CLI and the test suite.

The junction scenario pairs the slab profile with plane-wave families on
both sides of the region-2/region-3 interface, matched so that the field
(and hence the weighted current) extends continuously across the plane:
region 2 carries the damped exact family for the profile's constant k,
region 3 the undamped family rescaled by the accumulated damping at the
interface.
"""

import numpy as np

from .clifford import build_gammas
from .dirac import exact_plane_wave, PlaneWaveMode


def continuous_junction_currents(profile, m, p_first, p_second=None,
                                 second_coefficient=0.0, g=None):
    """Current callables (minus_side, plus_side) continuous across sigma2_end.

    Both sides weight the same bilinear with the profile's phi^2; the
    region-3 field is the continuous extension of the region-2 family, so
    the currents agree identically on the interface plane.
    """
    if g is None:
        g = build_gammas()
    k_mu = profile.k
    u2 = profile.sigma2_end
    modes = [PlaneWaveMode(p=p_first, m=m, k=k_mu, k_max=profile.k_max)]
    coeffs = [1.0]
    if p_second is not None and second_coefficient != 0.0:
        modes.append(PlaneWaveMode(p=p_second, m=m, k=k_mu, k_max=profile.k_max))
        coeffs.append(second_coefficient)
    free_modes = [PlaneWaveMode(p=mode.p, m=m, k=np.zeros(4)) for mode in modes]

    def weighted_current(points, side_modes, side_coeffs):
        x = np.asarray(points, dtype=float)
        psi = 0.0
        for mode, c in zip(side_modes, side_coeffs):
            psi = psi + exact_plane_wave(x, mode, g, c)
        phi_sq = profile.phi(x) ** 2
        psibar = np.conj(psi) @ g.gamma[0]
        j = np.stack(
            [np.einsum("...a,ab,...b->...", psibar, g.gamma[mu], psi).real
             for mu in range(4)],
            axis=-1,
        )
        return phi_sq[..., None] * j

    def j_minus(points):
        return weighted_current(points, modes, coeffs)

    # continuous extension: match exp(-k.x) on the interface plane
    damp = float(np.exp(-k_mu[profile.axis] * u2))
    plus_coeffs = [c * damp for c in coeffs]

    def j_plus(points):
        return weighted_current(points, free_modes, plus_coeffs)

    return j_minus, j_plus


def standing_wave_initial(n_sites, length, target_dim, amplitude):
    """Small standing wave in the first chart components, zero velocity."""
    x = np.arange(n_sites) * (length / n_sites)
    phi0 = np.zeros((n_sites, target_dim))
    phi0[:, 0] = amplitude * np.sin(2 * np.pi * x / length)
    if target_dim > 1:
        phi0[:, 1] = amplitude * np.cos(4 * np.pi * x / length)
    v0 = np.zeros_like(phi0)
    return phi0, v0
