"""Deformed Dirac dynamics: residuals, dispersion, damping, conservation.

The field equation carries the deformation through a constant covariant
vector k_mu (the log-gradient of the amplitude):

    i gamma^mu (d_mu + k_mu) psi - m psi = 0

For constant k the family  psi(x) = exp(-k.x) u(p) exp(-i p.x)  with
(gamma.p - m) u = 0 solves it exactly and serves as the test oracle
throughout this module.

Squaring the operator and dropping the gradient and quadratic terms in k
leaves a first-derivative (optical-potential-like) correction whose
plane-wave energies solve

    E^2 + 2i k0 E - p.(p + 2i kvec) - m^2 = 0

with complex roots: dispersion_exact solves this quadratic, while
dispersion_approx carries the first-order-in-k expansion

    E ~ +-sqrt(p^2 + m^2) + i { -k0 +- p.kvec / sqrt(p^2 + m^2) }.

Dispersion-level functions take k as the 4-tuple (k0, kvec) entering the
quadratic above; grid-level functions take the covariant k_mu of the
field equation.  The two differ by a sign flip of the spatial part
(clifford.raise_index).
"""

from dataclasses import dataclass, field

import numpy as np

from .clifford import GammaSet, build_gammas

K_MAX_FACTOR = 0.01  # default smallness bound on |k| relative to m


@dataclass(frozen=True)
class Grid4:
    """Uniform 4D Cartesian grid, shape n^4, spacing h, corner at origin."""

    n: int
    h: float
    origin: np.ndarray = field(default_factory=lambda: np.zeros(4))

    def __post_init__(self):
        if self.n < 5:
            raise ValueError("grid too small for the central stencil")
        if self.h <= 0:
            raise ValueError("grid spacing must be positive")

    def points(self):
        axes = [self.origin[i] + self.h * np.arange(self.n) for i in range(4)]
        return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)


@dataclass(frozen=True)
class PlaneWaveMode:
    """Plane-wave data: 3-momentum, mass, covariant deformation vector, branch."""

    p: np.ndarray
    m: float
    k: np.ndarray = field(default_factory=lambda: np.zeros(4))
    branch: int = +1
    k_max: float = None

    def __post_init__(self):
        object.__setattr__(self, "p", np.asarray(self.p, dtype=float))
        object.__setattr__(self, "k", np.asarray(self.k, dtype=float))
        if self.m <= 0:
            raise ValueError("mass must be positive")
        if self.branch not in (+1, -1):
            raise ValueError("branch must be +1 or -1")
        bound = self.k_max if self.k_max is not None else K_MAX_FACTOR * self.m
        object.__setattr__(self, "k_max", bound)
        if np.linalg.norm(self.k) > bound:
            raise ValueError(
                f"|k|={np.linalg.norm(self.k):.3e} exceeds the bound k_max={bound:.3e}"
            )

    @property
    def energy(self):
        return np.sqrt(self.p @ self.p + self.m**2)


def standard_spinor(p3, m, branch=+1, g=None, seed_vector=None):
    """Amplitude u with (gamma.p - m) u = 0 (branch +1) or (gamma.p + m) u = 0.

    Built by projecting a fixed seed with gamma.p +- m and normalizing.
    """
    if g is None:
        g = build_gammas()
    p3 = np.asarray(p3, dtype=float)
    E = np.sqrt(p3 @ p3 + m**2)
    p_lower = np.array([E, -p3[0], -p3[1], -p3[2]])
    slash = np.einsum("m,mab->ab", p_lower, g.gamma)
    if seed_vector is None:
        seed_vector = np.array([1.0, 0.25, 0.1, -0.3], dtype=complex)
    u = (slash + branch * m * np.eye(4)) @ seed_vector
    norm = np.linalg.norm(u)
    if norm < 1e-12:
        raise ValueError("degenerate seed vector for this momentum")
    return u / norm, p_lower


def exact_plane_wave(points, mode, g=None, coefficient=1.0):
    """Sample exp(-k.x) u(p) exp(-(branch) i p.x) on an array of points."""
    if g is None:
        g = build_gammas()
    u, p_lower = standard_spinor(mode.p, mode.m, mode.branch, g)
    x = np.asarray(points, dtype=float)
    phase = np.exp(-(x @ mode.k)) * np.exp(-1j * mode.branch * (x @ p_lower))
    return coefficient * phase[..., None] * u


def superpose(points, modes, coefficients, g=None):
    """Linear combination of exact modes sharing the same k and m."""
    ks = {tuple(np.asarray(m.k)) for m in modes}
    if len(ks) != 1:
        raise ValueError("superposed modes must share the deformation vector")
    out = 0.0
    for mode, c in zip(modes, coefficients):
        out = out + exact_plane_wave(points, mode, g, c)
    return out


def _central(arr, axis, h):
    return (np.roll(arr, -1, axis=axis) - np.roll(arr, 1, axis=axis)) / (2 * h)


def _interior(arr, margin=1):
    sl = (slice(margin, -margin),) * 4
    return arr[sl]


def deformed_dirac_residual(psi, k_mu, m, h, g=None):
    """Max-norm of i gamma^mu (D_mu + k_mu) psi - m psi over interior points.

    D_mu is the second-order central difference; boundary layers touched
    by the periodic roll are excluded from the norm.
    """
    if g is None:
        g = build_gammas()
    psi = np.asarray(psi, dtype=complex)
    if psi.ndim != 5 or any(s < 5 for s in psi.shape[:4]):
        raise ValueError("field must be an n^4 x 4 sample block with n >= 5")
    k_mu = np.asarray(k_mu, dtype=float)
    res = -m * psi
    for mu in range(4):
        cov = _central(psi, mu, h) + k_mu[..., mu, None] * psi
        res = res + 1j * np.einsum("ab,...b->...a", g.gamma[mu], cov)
    return float(np.max(np.linalg.norm(_interior(res), axis=-1)))


def squared_operator_residual(mode, grid, g=None):
    """Residual of the squared operator on the exact mode, and the dropped terms.

    Returns (full_residual, truncation_gap): the full second-order form

        box psi + m^2 psi + 2 k^mu d_mu psi + gamma^mu gamma^nu (d_mu k_nu) psi
          + k^2 psi

    evaluated with central stencils on the exact solution (vanishes with
    the grid spacing), and the max-norm of the terms the first-order
    approximation drops.  For constant k the gradient term is zero and the
    gap equals |k^2| times the field max-norm exactly.
    """
    if g is None:
        g = build_gammas()
    x = grid.points()
    psi = exact_plane_wave(x, mode, g)
    k_mu = mode.k
    eta = np.diag(np.array([1.0, -1.0, -1.0, -1.0]))
    k_up = eta @ k_mu
    k_sq = float(k_mu @ k_up)

    box = 0.0
    for mu in range(4):
        second = (np.roll(psi, -1, axis=mu) - 2 * psi + np.roll(psi, 1, axis=mu)) / grid.h**2
        box = box + eta[mu, mu] * second
    first = 0.0
    for mu in range(4):
        first = first + 2 * k_up[mu] * _central(psi, mu, grid.h)
    # k constant on the grid: d_mu k_nu = 0
    dropped = k_sq * psi
    res = box + mode.m**2 * psi + first + dropped
    full_residual = float(np.max(np.linalg.norm(_interior(res), axis=-1)))
    truncation_gap = abs(k_sq) * float(np.max(np.linalg.norm(psi, axis=-1)))
    return full_residual, truncation_gap


def dispersion_exact(p3, k4, m):
    """Both complex roots of E^2 + 2i k0 E - p.(p + 2i kvec) - m^2 = 0.

    k4 = (k0, kvec) as it enters the quadratic.  Roots are returned
    (plus_branch, minus_branch), paired by the sign of the real part.
    """
    if m <= 0:
        raise ValueError("mass must be positive")
    p3 = np.asarray(p3, dtype=float)
    k4 = np.asarray(k4, dtype=float)
    b = 2j * k4[0]
    c = -(p3 @ p3 + 2j * (p3 @ k4[1:])) - m**2
    disc = np.sqrt(complex(b * b - 4 * c))
    r1 = 0.5 * (-b + disc)
    r2 = 0.5 * (-b - disc)
    return (r1, r2) if r1.real >= r2.real else (r2, r1)


def dispersion_approx(p3, k4, m):
    """First-order-in-k energies, branch-paired with dispersion_exact."""
    if m <= 0:
        raise ValueError("mass must be positive")
    p3 = np.asarray(p3, dtype=float)
    k4 = np.asarray(k4, dtype=float)
    w = np.sqrt(p3 @ p3 + m**2)
    pk = p3 @ k4[1:]
    return (w + 1j * (-k4[0] + pk / w), -w + 1j * (-k4[0] - pk / w))


def group_velocity(p3, k4, m, branch=+1):
    """Complex 3-vector dE/dp_j for the requested branch.

    v_j = +- p_j/w -+ (i/w) [ (p.kvec) p_j / w^2 - k_j ],  w = sqrt(p^2+m^2).
    """
    if m <= 0:
        raise ValueError("mass must be positive")
    if branch not in (+1, -1):
        raise ValueError("branch must be +1 or -1")
    p3 = np.asarray(p3, dtype=float)
    kvec = np.asarray(k4, dtype=float)[1:]
    w = np.sqrt(p3 @ p3 + m**2)
    s = float(branch)
    return s * p3 / w - s * 1j / w * ((p3 @ kvec) * p3 / w**2 - kvec)


def causal_speed_squared(p3, k4, m, branch=+1):
    """Euclidean magnitude sum_j |v_j|^2 of the complex group velocity."""
    v = group_velocity(p3, k4, m, branch)
    return float(np.sum(np.abs(v) ** 2))


def damping_factor(p3, k4, m, t, branch=+1):
    """Per-branch factor exp[-(branch)(p.kvec/sqrt(p^2+m^2)) t]; needs k0 = 0."""
    k4 = np.asarray(k4, dtype=float)
    if k4[0] != 0.0:
        raise ValueError("damping factor requires k0 = 0; got k0 = " + repr(k4[0]))
    if m <= 0:
        raise ValueError("mass must be positive")
    if branch not in (+1, -1):
        raise ValueError("branch must be +1 or -1")
    p3 = np.asarray(p3, dtype=float)
    w = np.sqrt(p3 @ p3 + m**2)
    return float(np.exp(-branch * (p3 @ k4[1:]) / w * np.asarray(t)))


def current_field(points, modes, coefficients=None, phi0=1.0, g=None,
                  weight_exponent=2):
    """Conserved current phi^2 psibar gamma^mu psi for exact-family fields.

    phi is the matching amplitude profile phi0 exp(k.x); weight_exponent
    exists so tests can break the weight (use 1 instead of 2) as a
    negative control.
    """
    if g is None:
        g = build_gammas()
    if isinstance(modes, PlaneWaveMode):
        modes = [modes]
    if coefficients is None:
        coefficients = [1.0] * len(modes)
    x = np.asarray(points, dtype=float)
    psi = superpose(x, modes, coefficients, g)
    k_mu = modes[0].k
    weight = (phi0 * np.exp(x @ k_mu)) ** weight_exponent
    psibar = np.conj(psi) @ g.gamma[0]
    j = np.stack(
        [np.einsum("...a,ab,...b->...", psibar, g.gamma[mu], psi).real
         for mu in range(4)],
        axis=-1,
    )
    return weight[..., None] * j


def current_divergence_check(modes, grid, coefficients=None, phi0=1.0, g=None,
                             weight_exponent=2):
    """Max-norm of the central-difference divergence of the weighted current."""
    x = grid.points()
    j = current_field(x, modes, coefficients, phi0, g, weight_exponent)
    div = 0.0
    for mu in range(4):
        div = div + _central(j[..., mu], mu, grid.h)
    return float(np.max(np.abs(_interior(div))))
