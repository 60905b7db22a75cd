"""Dirac gamma-matrix algebra and spinor bilinears, signature (+,-,-,-)."""

from dataclasses import dataclass, field

import numpy as np

# metric diag, mostly minus
MINKOWSKI = np.diag([1.0, -1.0, -1.0, -1.0])

ALGEBRA_TOL = 1e-14     # exact identities in double precision
COMPOSED_TOL = 1e-12    # composed expressions

_S0 = np.eye(2, dtype=complex)
_SX = np.array([[0, 1], [1, 0]], dtype=complex)
_SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
_SZ = np.array([[1, 0], [0, -1]], dtype=complex)


@dataclass(frozen=True)
class GammaSet:
    """The four 4x4 gamma matrices (index order mu=0..3) plus the metric."""

    gamma: np.ndarray                   # shape (4, 4, 4), complex
    metric: np.ndarray = field(default_factory=lambda: MINKOWSKI.copy())

    def check(self, tol=ALGEBRA_TOL):
        """Raise if the defining relations fail at tolerance `tol`."""
        for mu in range(4):
            for nu in range(4):
                anti = self.gamma[mu] @ self.gamma[nu] + self.gamma[nu] @ self.gamma[mu]
                want = 2.0 * self.metric[mu, nu] * np.eye(4)
                if np.max(np.abs(anti - want)) > tol:
                    raise ValueError(f"anticommutator failure at (mu,nu)=({mu},{nu})")
        if np.max(np.abs(self.gamma[0] - self.gamma[0].conj().T)) > tol:
            raise ValueError("gamma^0 not Hermitian")
        for mu in range(1, 4):
            if np.max(np.abs(self.gamma[mu] + self.gamma[mu].conj().T)) > tol:
                raise ValueError(f"gamma^{mu} not anti-Hermitian")
        for mu in range(4):
            if abs(np.trace(self.gamma[mu])) > tol:
                raise ValueError(f"gamma^{mu} not traceless")


def build_gammas(representation_id="dirac"):
    """Construct a GammaSet in the requested representation.

    Only the standard ("dirac") representation is provided: gamma^0 block
    diagonal (1,1,-1,-1), spatial gammas off-diagonal in Pauli blocks.
    """
    if representation_id != "dirac":
        raise ValueError(f"unsupported representation id: {representation_id!r}")
    zero = np.zeros((2, 2), dtype=complex)
    g0 = np.block([[_S0, zero], [zero, -_S0]])
    gi = [np.block([[zero, s], [-s, zero]]) for s in (_SX, _SY, _SZ)]
    g = GammaSet(gamma=np.stack([g0] + gi))
    g.check()
    return g


def sigma_munu(g, mu, nu):
    """Spin generator (i/2)[gamma^mu, gamma^nu]."""
    if not (0 <= mu <= 3 and 0 <= nu <= 3):
        raise IndexError(f"gamma index out of range: ({mu}, {nu})")
    a, b = g.gamma[mu], g.gamma[nu]
    return 0.5j * (a @ b - b @ a)


def dirac_adjoint(psi, g):
    """Row covector psi^dagger gamma^0."""
    return np.conj(np.asarray(psi)) @ g.gamma[0]


def bilinear_current(psi_bar, psi, g, imag_tol=COMPOSED_TOL):
    """Vector bilinear j^mu = psi_bar gamma^mu psi, returned as a real 4-vector.

    When psi_bar is the Dirac adjoint of psi each component is real; a
    residual imaginary part above `imag_tol` signals inconsistent inputs.
    """
    psi_bar = np.asarray(psi_bar)
    psi = np.asarray(psi)
    j = np.array([psi_bar @ g.gamma[mu] @ psi for mu in range(4)])
    if np.max(np.abs(j.imag)) > imag_tol:
        raise ValueError(
            f"non-real current component (max imag {np.max(np.abs(j.imag)):.3e}); "
            "psi_bar is not the adjoint of psi"
        )
    return j.real


def raise_index(v):
    """Raise (or lower) a 4-vector index with the mostly-minus metric."""
    v = np.asarray(v, dtype=float)
    return MINKOWSKI @ v
