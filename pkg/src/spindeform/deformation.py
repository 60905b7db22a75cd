"""Scalar deformation field, region partition and the induced connection.

The canonical geometry is a slab layout along one coordinate axis u:

    region 1 (u <= u1):       phase theta varies, amplitude phi = phi0
    region 2 (u1 < u <= u2):  theta constant, log-slope of phi equals a
                              small constant vector k along the axis
    region 3 (u > u2):        phi and theta both constant

phi is C^1 across the interfaces: the log-slope ramps up and back down
with a cubic smoothstep over a configurable blend width inside region 2,
so phi is exactly constant throughout regions 1 and 3.
"""

import enum
from dataclasses import dataclass

import numpy as np

FD_STEP = 1e-5  # central-difference default, domain units


class Region(enum.IntEnum):
    SIGMA1 = 1
    SIGMA2 = 2
    SIGMA3 = 3


class NonSmoothPointError(ValueError):
    """Finite differencing requested at a point where phi or theta has a kink."""


def _smoothstep(t):
    t = np.clip(t, 0.0, 1.0)
    return t * t * (3.0 - 2.0 * t)


def _smoothstep_integral(t):
    # integral of 3t^2 - 2t^3 from 0 to t, clipped to [0, 1]
    t = np.clip(t, 0.0, 1.0)
    return t**3 - 0.5 * t**4


@dataclass(frozen=True)
class SlabProfile:
    """Deformation profile phi(x), theta(x) with the slab region partition.

    k_slope is the constant interior log-derivative of phi along `axis`
    (region 2); its magnitude is capped by k_max.  phi0 anchors the value
    of phi on region 1 and defaults to 1 there.
    """

    axis: int = 1
    sigma1_end: float = 0.0
    sigma2_end: float = 4.0
    k_slope: float = -0.005
    blend_width: float = 0.5
    theta_amplitude: float = 1.0
    theta_width: float = 0.5
    phi0: float = 1.0
    k_max: float = 0.01

    def __post_init__(self):
        if not 0 <= self.axis <= 3:
            raise ValueError(f"axis must be 0..3, got {self.axis}")
        if not self.sigma1_end < self.sigma2_end:
            raise ValueError("sigma1_end must lie below sigma2_end")
        if self.blend_width < 0 or self.theta_width < 0:
            raise ValueError("blend widths must be nonnegative")
        if 2 * self.blend_width > self.sigma2_end - self.sigma1_end:
            raise ValueError("region 2 narrower than twice the blend width")
        if not 0.0 < self.phi0 <= 1.0:
            raise ValueError(f"phi out of (0,1]: phi0={self.phi0}")
        if abs(self.k_slope) > self.k_max:
            raise ValueError(
                f"|k_slope|={abs(self.k_slope)} exceeds the bound k_max={self.k_max}"
            )
        top = self.phi0 * np.exp(max(0.0, self.k_slope * self._ramp_total()))
        if top > 1.0 + 1e-15:
            raise ValueError("phi exceeds 1 inside region 2; reduce k_slope or phi0")

    # -- scalar fields ---------------------------------------------------

    def _ramp_total(self):
        return self.sigma2_end - self.sigma1_end - self.blend_width

    def _ramp_integral(self, u):
        """Integral from sigma1_end of the C^1 slope ramp (0 -> 1 -> 0)."""
        u1, u2, w = self.sigma1_end, self.sigma2_end, self.blend_width
        u = np.asarray(u, dtype=float)
        if w == 0.0:
            return np.clip(u, u1, u2) - u1
        up = w * _smoothstep_integral((u - u1) / w)
        plateau = np.clip(u - (u1 + w), 0.0, u2 - u1 - 2 * w)
        td = np.clip(u - (u2 - w), 0.0, w)
        down = td - w * _smoothstep_integral(td / w)
        return up + plateau + down

    def _ramp(self, u):
        u1, u2, w = self.sigma1_end, self.sigma2_end, self.blend_width
        u = np.asarray(u, dtype=float)
        if w == 0.0:
            return np.where((u > u1) & (u <= u2), 1.0, 0.0)
        return np.where(
            u <= u1 + w,
            _smoothstep((u - u1) / w),
            1.0 - _smoothstep((u - (u2 - w)) / w),
        )

    def phi(self, x):
        """Deformation amplitude at x, shape (..., 4) -> (...)."""
        u = np.asarray(x, dtype=float)[..., self.axis]
        return self.phi0 * np.exp(self.k_slope * self._ramp_integral(u))

    def theta(self, x):
        """Deformation phase at x; varies only inside region 1."""
        u = np.asarray(x, dtype=float)[..., self.axis]
        if self.theta_width == 0.0:
            return np.where(u < self.sigma1_end, self.theta_amplitude, 0.0)
        t = (u - (self.sigma1_end - self.theta_width)) / self.theta_width
        return self.theta_amplitude * (1.0 - _smoothstep(t))

    def log_phi_gradient(self, x):
        """Analytic d_mu ln phi, shape (..., 4) -> (..., 4)."""
        x = np.asarray(x, dtype=float)
        u = x[..., self.axis]
        out = np.zeros_like(x)
        out[..., self.axis] = self.k_slope * self._ramp(u)
        return out

    @property
    def k(self):
        """The constant covariant 4-vector valid in the region-2 interior."""
        out = np.zeros(4)
        out[self.axis] = self.k_slope
        return out

    def _kink_distance(self, x):
        u = float(np.asarray(x, dtype=float)[..., self.axis])
        kinks = []
        if self.blend_width == 0.0:
            kinks += [self.sigma1_end, self.sigma2_end]
        if self.theta_width == 0.0:
            kinks += [self.sigma1_end]
        if not kinks:
            return np.inf
        return min(abs(u - v) for v in kinks)


def region_classify(profile, x):
    """Deterministic region label; interface points go to the lowest index."""
    u = np.asarray(x, dtype=float)[..., profile.axis]
    lab = np.where(u <= profile.sigma1_end, int(Region.SIGMA1),
                   np.where(u <= profile.sigma2_end, int(Region.SIGMA2),
                            int(Region.SIGMA3)))
    if lab.ndim == 0:
        return Region(int(lab))
    return lab


def k_field(profile, x, step=FD_STEP):
    """Central finite-difference phi^{-1} d_mu phi at a point."""
    if profile._kink_distance(x) <= step:
        raise NonSmoothPointError(f"phi not differentiable within {step} of {x}")
    x = np.asarray(x, dtype=float)
    out = np.zeros(4)
    for mu in range(4):
        dx = np.zeros(4)
        dx[mu] = step
        out[mu] = (np.log(profile.phi(x + dx)) - np.log(profile.phi(x - dx))) / (2 * step)
    return out


def connection_B(profile, x, step=FD_STEP):
    """Connection coefficient B_mu = phi^{-1} d_mu phi + (i/2) d_mu theta.

    Each component multiplies the identity matrix; returned as a complex
    4-vector.
    """
    if profile._kink_distance(x) <= step:
        raise NonSmoothPointError(f"profile not differentiable within {step} of {x}")
    x = np.asarray(x, dtype=float)
    out = np.zeros(4, dtype=complex)
    for mu in range(4):
        dx = np.zeros(4)
        dx[mu] = step
        dlnphi = (np.log(profile.phi(x + dx)) - np.log(profile.phi(x - dx))) / (2 * step)
        dtheta = (profile.theta(x + dx) - profile.theta(x - dx)) / (2 * step)
        out[mu] = dlnphi + 0.5j * dtheta
    return out


def deformation_value(profile, x):
    """Complex scalar phi(x) e^{i theta(x)}; the matrix part is the identity."""
    return profile.phi(x) * np.exp(1j * profile.theta(x))


def map_exotic_to_standard(psi_tilde, x, profile):
    """Componentwise map psi = phi(x) e^{i theta(x)} psi_tilde."""
    value = deformation_value(profile, x)
    return np.asarray(value)[..., None] * np.asarray(psi_tilde)


def commutation_check(rho_bar, g):
    """Max commutator norm of the deformation matrix with the gammas.

    Accepts the scalar map value (treated as scalar times identity, hence
    zero by construction) or an explicit 4x4 matrix; kept as a regression
    guard against non-scalar deformations.
    """
    rho = np.asarray(rho_bar)
    if rho.ndim == 0:
        rho = complex(rho) * np.eye(4)
    worst = 0.0
    for mu in range(4):
        comm = rho @ g.gamma[mu] - g.gamma[mu] @ rho
        worst = max(worst, float(np.max(np.abs(comm))))
    return worst
