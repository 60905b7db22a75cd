"""Current matching across an interface hyperplane.

The total current written with one-sided pieces and Heaviside weights
acquires, on differentiation, a surface-localized term proportional to
the normal jump (j+ - j-).n.  The delta distribution itself is never
sampled: its coefficient field on the surface is what conservation
constrains, and the tangential components of the jump give the induced
current mismatch.

Surfaces are coordinate hyperplanes {x^axis = offset}; r = x^axis - offset
is then an exact affine coordinate, the normal is the coordinate covector
and the tangent frame is the remaining coordinate basis.
"""

from dataclasses import dataclass

import numpy as np

from .clifford import MINKOWSKI


@dataclass(frozen=True)
class CoordinateHyperplane:
    """Interface {x^axis = offset} with unit normal n_mu = orientation * d_mu r."""

    axis: int = 1
    offset: float = 0.0
    orientation: int = +1

    def __post_init__(self):
        if not 0 <= self.axis <= 3:
            raise ValueError(f"axis must be 0..3, got {self.axis}")
        if self.orientation not in (+1, -1):
            raise ValueError("orientation must be +1 or -1")

    @property
    def causal_type(self):
        # timelike normal (axis 0) <=> spacelike surface, mostly-minus metric
        return "spacelike" if self.axis == 0 else "timelike"

    @property
    def normal(self):
        """Covariant normal n_mu."""
        n = np.zeros(4)
        n[self.axis] = self.orientation
        return n

    @property
    def normal_squared(self):
        n = self.normal
        return float(n @ MINKOWSKI @ n)

    @property
    def tangent_frame(self):
        """Three coordinate basis vectors e_m^mu spanning the plane."""
        frame = np.zeros((3, 4))
        for row, mu in enumerate(mu for mu in range(4) if mu != self.axis):
            frame[row, mu] = 1.0
        return frame

    def r(self, x):
        return np.asarray(x, dtype=float)[..., self.axis] - self.offset

    def embed(self, z):
        """Map surface coordinates z (..., 3) to spacetime points (..., 4)."""
        z = np.asarray(z, dtype=float)
        x = np.zeros(z.shape[:-1] + (4,))
        cols = [mu for mu in range(4) if mu != self.axis]
        for row, mu in enumerate(cols):
            x[..., mu] = z[..., row]
        x[..., self.axis] = self.offset
        return x


def _singular_sign(causal_type):
    if causal_type == "spacelike":
        return +1.0
    if causal_type == "timelike":
        return -1.0
    raise ValueError(f"unknown causal type: {causal_type!r}")


def _bulk_divergence(j_fn, points, h):
    div = np.zeros(np.asarray(points).shape[:-1])
    for mu in range(4):
        dx = np.zeros(4)
        dx[mu] = h
        div += (j_fn(points + dx)[..., mu] - j_fn(points - dx)[..., mu]) / (2 * h)
    return div


def glue_currents(j_plus, j_minus, surf, z_points, fd_step=1e-5, bulk_offset=0.1):
    """Surface-delta coefficient and per-side bulk divergences.

    j_plus / j_minus are callables mapping (..., 4) points to (..., 4)
    current values, defined on their respective sides and extendable
    continuously to the surface.  Returns (bulk_plus_div, bulk_minus_div,
    singular_coefficient) with the coefficient sampled on the embedded
    z_points, sign set by the causal type (upper sign for spacelike).
    """
    x_surf = surf.embed(z_points)
    try:
        jump = j_plus(x_surf) - j_minus(x_surf)
    except Exception as exc:
        raise ValueError(f"current fields not evaluable at the surface: {exc}") from exc
    coeff = _singular_sign(surf.causal_type) * (jump @ surf.normal)

    shift = np.zeros(4)
    shift[surf.axis] = bulk_offset * surf.orientation
    div_plus = _bulk_divergence(j_plus, x_surf + shift, fd_step)
    div_minus = _bulk_divergence(j_minus, x_surf - shift, fd_step)
    return div_plus, div_minus, coeff


def junction_residual(j_plus, j_minus, surf, z_points):
    """Tangential mismatch e_m^mu (j+ - j-)_mu at the surface, shape (..., 3)."""
    x_surf = surf.embed(z_points)
    jump = j_plus(x_surf) - j_minus(x_surf)
    jump_lower = jump @ MINKOWSKI
    return jump_lower @ surf.tangent_frame.T


def heaviside_current(j_plus, j_minus, surf, x):
    """Side-selected current Theta(r) j+ + Theta(-r) j-; indeterminate at r = 0."""
    r = float(surf.r(x))
    if r == 0.0:
        raise ValueError("current indeterminate at the interface (r = 0)")
    chosen = j_plus if r > 0 else j_minus
    return chosen(np.asarray(x, dtype=float))
