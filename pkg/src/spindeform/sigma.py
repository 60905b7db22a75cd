"""Nonlinear sigma model on a slightly deformed flat background.

The coordinate one-forms pick up a position-dependent shift proportional
to the deformation log-gradient k, which to first order in k deforms the
flat metric to

    eta~_{mu nu}(x) = eta_{mu nu} + 2 eta_{mu a} x^a k_nu + 2 eta_{nu a} x^a k_mu.

Target space is the unit N-sphere in the chart Phi^1..Phi^N (last
embedding component reconstructed), with round metric

    g_ij = delta_ij + Phi^i Phi^j / (1 - Phi.Phi)

and field equations

    eta~_{mu nu} d^mu d^nu Phi^p
      + eta~_{mu nu} Gamma^p_ij d^mu Phi^i d^nu Phi^j
      + 10 k_a d^a Phi^p = 0,

where indices are raised with the flat eta and the coefficient 10 is the
4-dimensional trace factor d^mu eta~_{mu nu} = (2*4 + 2) k_nu.  The
lattice is 1+1 dimensional (time plus one periodic space axis) by
default, with the remaining coordinates frozen; residual evaluation also
accepts 1+3 blocks.

The integrator is a time-reversible central-difference scheme: the
velocity entering the quadratic term is the centered difference through
the unknown new slice, resolved by fixed-point iteration.  The k=0
discrete energy uses the staggered (half-step) form with compact spatial
differences, which the scheme conserves up to the quadratic coupling.
"""

from dataclasses import dataclass, field

import numpy as np

from .clifford import MINKOWSKI

EPS_CHART = 1e-3
DEFORMED_TRACE_COEFF = 10.0  # = 2*dim + 2 at dim = 4


class ChartViolationError(ValueError):
    """Field left the coordinate chart; carries the failing step if known."""

    def __init__(self, msg, step=None):
        super().__init__(msg)
        self.step = step


def deformed_basis_shift(dx, x, k):
    """Shifted displacement dx^mu + 2 x^mu (k . dx)."""
    dx = np.asarray(dx, dtype=float)
    x = np.asarray(x, dtype=float)
    k = np.asarray(k, dtype=float)
    return dx + 2.0 * x * (k @ dx)


def deformed_metric(x, k):
    """First-order deformed flat metric eta~_{mu nu} at x; symmetric 4x4."""
    x = np.asarray(x, dtype=float)
    k = np.asarray(k, dtype=float)
    eta_x = x @ MINKOWSKI  # eta_{mu a} x^a
    out = MINKOWSKI + 2.0 * (
        eta_x[..., :, None] * k[None, :] + eta_x[..., None, :] * k[:, None]
    )
    return out


def _chart_radius_sq(Phi):
    return np.sum(np.asarray(Phi) ** 2, axis=-1)


def _require_chart(Phi, eps_chart, step=None):
    worst = float(np.max(_chart_radius_sq(Phi)))
    if worst >= 1.0 - eps_chart:
        where = "" if step is None else f" at step {step}"
        raise ChartViolationError(
            f"chart violation{where}: max |Phi|^2 = {worst:.6f} >= {1 - eps_chart}",
            step=step,
        )


def target_metric(Phi, eps_chart=EPS_CHART):
    """Round sphere metric g_ij on the chart; shape (..., N, N)."""
    Phi = np.asarray(Phi, dtype=float)
    _require_chart(Phi, eps_chart)
    S = 1.0 - _chart_radius_sq(Phi)
    N = Phi.shape[-1]
    return np.eye(N) + Phi[..., :, None] * Phi[..., None, :] / S[..., None, None]


def embed_to_sphere(Phi):
    """Append the reconstructed component sqrt(1 - Phi.Phi)."""
    Phi = np.asarray(Phi, dtype=float)
    last = np.sqrt(1.0 - _chart_radius_sq(Phi))
    return np.concatenate([Phi, last[..., None]], axis=-1)


def target_metric_derivative(Phi, eps_chart=EPS_CHART):
    """Analytic d_k g_ij; shape (..., N, N, N) indexed [..., k, i, j]."""
    Phi = np.asarray(Phi, dtype=float)
    _require_chart(Phi, eps_chart)
    S = 1.0 - _chart_radius_sq(Phi)
    N = Phi.shape[-1]
    eye = np.eye(N)
    t1 = eye[..., :, :, None] * Phi[..., None, None, :]   # delta_ki Phi^j
    t2 = eye[..., :, None, :] * Phi[..., None, :, None]   # delta_kj Phi^i
    t3 = (2.0 * Phi[..., :, None, None] * Phi[..., None, :, None]
          * Phi[..., None, None, :] / S[..., None, None, None])
    return (t1 + t2 + t3) / S[..., None, None, None]


def christoffel(Phi, eps_chart=EPS_CHART):
    """Second-kind symbols Gamma^p_ij from the analytic metric derivative.

    For this chart they collapse to Phi^p g_ij, which the tests use as an
    independent cross-check.
    """
    Phi = np.asarray(Phi, dtype=float)
    g = target_metric(Phi, eps_chart)
    dg = target_metric_derivative(Phi, eps_chart)  # [..., k, i, j] = d_k g_ij
    g_inv = np.linalg.inv(g)
    # 1/2 g^{pq} (d_i g_qj + d_j g_qi - d_q g_ij)
    inner = (np.einsum("...iqj->...qij", dg)
             + np.einsum("...jqi->...qij", dg)
             - dg)
    return 0.5 * np.einsum("...pq,...qij->...pij", g_inv, inner)


# --------------------------------------------------------------------------
# lattice blocks


@dataclass(frozen=True)
class LatticeSpec:
    """Uniform lattice: dt in time, h along each periodic space axis.

    `frozen` holds the constant values of the coordinates not on the
    lattice (filled in increasing mu order after time and the active
    space axes).
    """

    dt: float
    h: float
    t0: float = 0.0
    space_origin: tuple = (0.0,)
    frozen: tuple = (0.0, 0.0)

    def __post_init__(self):
        if self.dt <= 0 or self.h <= 0:
            raise ValueError("lattice spacings must be positive")

    def coordinates(self, shape, t_offset=0):
        """Spacetime points for a block of the given (nt, *space) shape."""
        nt, *space = shape
        n_space = len(space)
        if n_space != len(self.space_origin):
            raise ValueError("block spatial rank does not match the lattice spec")
        axes = [self.t0 + self.dt * (np.arange(nt) + t_offset)]
        for dim, n in enumerate(space):
            axes.append(self.space_origin[dim] + self.h * np.arange(n))
        mesh = np.meshgrid(*axes, indexing="ij")
        x = np.zeros(tuple(shape) + (4,))
        for a, coord in enumerate(mesh):
            x[..., a] = coord
        # frozen coordinates fill the trailing positions
        for j, val in enumerate(self.frozen[: 4 - 1 - n_space]):
            x[..., 1 + n_space + j] = val
        return x


def _space_central(arr, axis, h):
    return (np.roll(arr, -1, axis=axis) - np.roll(arr, 1, axis=axis)) / (2 * h)


def _space_second(arr, axis, h):
    return (np.roll(arr, -1, axis=axis) - 2 * arr + np.roll(arr, 1, axis=axis)) / h**2


def _block_derivatives(block, spec):
    """First and second central derivatives on interior time slices.

    Returns (G, H, mid): G[a] and H[a][b] for active axes a,b (0 = time),
    aligned with block[1:-1].
    """
    block = np.asarray(block, dtype=float)
    nt = block.shape[0]
    if nt < 3:
        raise ValueError("need at least three time slices")
    n_space = block.ndim - 2
    dt, h = spec.dt, spec.h
    mid = block[1:-1]
    n_axes = 1 + n_space

    G = [None] * n_axes
    G[0] = (block[2:] - block[:-2]) / (2 * dt)
    for s in range(n_space):
        G[1 + s] = _space_central(mid, 1 + s, h)

    H = [[None] * n_axes for _ in range(n_axes)]
    H[0][0] = (block[2:] - 2 * mid + block[:-2]) / dt**2
    for s in range(n_space):
        ds_full = _space_central(block, 1 + s, h)
        H[0][1 + s] = (ds_full[2:] - ds_full[:-2]) / (2 * dt)
        H[1 + s][0] = H[0][1 + s]
        for s2 in range(n_space):
            if s2 == s:
                H[1 + s][1 + s] = _space_second(mid, 1 + s, h)
            else:
                H[1 + s][1 + s2] = _space_central(
                    _space_central(mid, 1 + s, h), 1 + s2, h
                )
    return G, H, mid


def _raised_metric_blocks(x, k, n_axes):
    """M^{ab} = eta^{a mu} eta~_{mu nu} eta^{nu b} on the active axes."""
    eta_d = np.diag(MINKOWSKI)
    etil = deformed_metric(x, k)
    M = np.empty(etil.shape[:-2] + (n_axes, n_axes))
    for a in range(n_axes):
        for b in range(n_axes):
            M[..., a, b] = eta_d[a] * etil[..., a, b] * eta_d[b]
    return M


def _k_raised(k, n_axes):
    eta_d = np.diag(MINKOWSKI)
    k = np.asarray(k, dtype=float)
    return (eta_d * k)[:n_axes]


def sigma_eom_residual(block, k, spec, eps_chart=EPS_CHART, t_offset=0):
    """Max-norm of the field-equation residual over interior sites.

    block has shape (nt, nx[, ny, nz], N); space is periodic, the first
    and last time slices only feed the stencils.
    """
    integrand = _eom_integrand(block, k, spec, eps_chart, t_offset, regrouped=False)
    return float(np.max(np.abs(integrand)))


def covariant_operator_apply(block, k, spec, eps_chart=EPS_CHART, t_offset=0):
    """Per-site value of the compact covariant operator acting on the field.

    Algebraically identical to the residual integrand: the connection is
    contracted into A^{i a}_k = Gamma^i_{jk} d^a Phi^j first, then applied
    to the gradient.
    """
    return _eom_integrand(block, k, spec, eps_chart, t_offset, regrouped=True)


def _eom_integrand(block, k, spec, eps_chart, t_offset, regrouped):
    block = np.asarray(block, dtype=float)
    _require_chart(block, eps_chart)
    G, H, mid = _block_derivatives(block, spec)
    n_axes = len(G)
    x = spec.coordinates(block.shape[:-1], t_offset)[1:-1]
    M = _raised_metric_blocks(x, k, n_axes)
    k_up = _k_raised(k, n_axes)
    Gam = christoffel(mid, eps_chart)

    Gs = np.stack(G, axis=-2)                      # (..., a, N)
    out = np.zeros_like(mid)
    for a in range(n_axes):
        for b in range(n_axes):
            out += M[..., a, b, None] * H[a][b]
    if regrouped:
        A = np.einsum("...ijk,...aj->...aik", Gam, Gs)
        quad = np.einsum("...ab,...aik,...bk->...i", M, A, Gs)
    else:
        quad = np.einsum("...ab,...pij,...ai,...bj->...p", M, Gam, Gs, Gs)
    out += quad
    out += np.einsum("a,...ai->...i", DEFORMED_TRACE_COEFF * k_up, Gs)
    return out


# --------------------------------------------------------------------------
# evolution


@dataclass
class EvolveResult:
    history: np.ndarray        # (steps+1, nx, N)
    times: np.ndarray
    max_chart_sq: np.ndarray   # per step
    energy: np.ndarray         # k=0 staggered discrete energy, per half step
    eom_residual: np.ndarray   # scheme-consistency diagnostic, per interior step
    spec: LatticeSpec = None
    k: np.ndarray = None


def discrete_energy(slice_a, slice_b, spec):
    """Staggered k=0 energy between consecutive slices (compact gradients)."""
    a = np.asarray(slice_a, dtype=float)
    b = np.asarray(slice_b, dtype=float)
    v = (b - a) / spec.dt
    mid = 0.5 * (a + b)
    g = target_metric(mid)
    g_link = 0.5 * (g + np.roll(g, -1, axis=0))
    da = (np.roll(a, -1, axis=0) - a) / spec.h
    db = (np.roll(b, -1, axis=0) - b) / spec.h
    dens = 0.5 * np.einsum("xij,xi,xj->x", g, v, v) \
        + 0.5 * np.einsum("xij,xi,xj->x", g_link, da, db)
    return spec.h * float(dens.sum())


def _acceleration(Phi, V, dtdx, x, k, h, eps_chart):
    """Solve the field equation for the second time derivative.

    Phi, V: current slice and velocity estimate, (nx, N); dtdx: mixed
    time-space derivative estimate; x: (nx, 4) positions of the slice.
    """
    n_axes = 2
    M = _raised_metric_blocks(x, k, n_axes)
    k_up = _k_raised(k, n_axes)
    Gam = christoffel(Phi, eps_chart)
    dx = _space_central(Phi, 0, h)
    dxx = _space_second(Phi, 0, h)
    Gs = np.stack([V, dx], axis=-2)
    quad = np.einsum("...ab,...pij,...ai,...bj->...p", M, Gam, Gs, Gs)
    rest = (2.0 * M[..., 0, 1, None] * dtdx
            + M[..., 1, 1, None] * dxx
            + quad
            + np.einsum("a,...ai->...i", DEFORMED_TRACE_COEFF * k_up, Gs))
    return -rest / M[..., 0, 0, None]


def sigma_evolve(phi0, v0, k, spec, steps, eps_chart=EPS_CHART,
                 max_iter=40, fp_tol=1e-15):
    """Evolve the lattice field; returns history plus per-step diagnostics.

    Explicit in structure but iterated to the time-symmetric fixed point:
    each step solves  Phi_next = 2 Phi - Phi_prev + dt^2 a(Phi, v_c)  with
    v_c the centered velocity through Phi_next.  Aborts with the step
    index if the chart constraint fails; rejects dt > h/2 up front.
    """
    phi0 = np.asarray(phi0, dtype=float)
    v0 = np.asarray(v0, dtype=float)
    if phi0.shape != v0.shape or phi0.ndim != 2:
        raise ValueError("initial data must be matching (nx, N) arrays")
    if spec.dt > 0.5 * spec.h + 1e-15:
        raise ValueError(f"time step violates dt <= h/2: dt={spec.dt}, h={spec.h}")
    _require_chart(phi0, eps_chart, step=0)
    k = np.asarray(k, dtype=float)
    nx, N = phi0.shape

    hist = np.empty((steps + 1, nx, N))
    hist[0] = phi0
    x_slice = spec.coordinates((1, nx))[0]

    dtdx0 = _space_central(v0, 0, spec.h)
    a0 = _acceleration(phi0, v0, dtdx0, x_slice, k, spec.h, eps_chart)
    hist[1] = phi0 + spec.dt * v0 + 0.5 * spec.dt**2 * a0
    _require_chart(hist[1], eps_chart, step=1)

    energies = [discrete_energy(hist[0], hist[1], spec)]
    chart = [float(np.max(_chart_radius_sq(hist[0])))]
    residuals = []

    for n in range(1, steps):
        prev, cur = hist[n - 1], hist[n]
        x_slice = spec.coordinates((1, nx), t_offset=n)[0]
        vc = (cur - prev) / spec.dt
        dtdx = _space_central(vc, 0, spec.h)
        nxt = None
        for _ in range(max_iter):
            a = _acceleration(cur, vc, dtdx, x_slice, k, spec.h, eps_chart)
            cand = 2 * cur - prev + spec.dt**2 * a
            if nxt is not None and np.max(np.abs(cand - nxt)) < fp_tol:
                nxt = cand
                break
            nxt = cand
            vc = (nxt - prev) / (2 * spec.dt)
            dtdx = _space_central(vc, 0, spec.h)
        _require_chart(nxt, eps_chart, step=n + 1)
        hist[n + 1] = nxt
        energies.append(discrete_energy(cur, nxt, spec))
        chart.append(float(np.max(_chart_radius_sq(cur))))
        residuals.append(
            sigma_eom_residual(hist[n - 1:n + 2], k, spec, eps_chart, t_offset=n - 1)
        )
    chart.append(float(np.max(_chart_radius_sq(hist[-1]))))

    return EvolveResult(
        history=hist,
        times=spec.t0 + spec.dt * np.arange(steps + 1),
        max_chart_sq=np.array(chart),
        energy=np.array(energies),
        eom_residual=np.array(residuals),
        spec=spec,
        k=k,
    )
