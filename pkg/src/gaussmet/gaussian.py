"""Pure multimode Gaussian states and conversions between their
squeezing-matrix, disentangled (Takagi), and covariance representations.

Conventions: quadratures q = (c + c†)/√2, p = (c† - c)/(√2 i); the vacuum
covariance matrix is the identity, so a mode squeezed by r carries the
2x2 block diag(e^{+2r}, e^{-2r}) with the p quadrature squeezed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import matkernel
from .errors import DimensionMismatchError, NonFiniteError

_UNITARY_TOL = 1e-10


@dataclass(frozen=True)
class GaussianPureState:
    """Displacement vector beta and complex symmetric squeezing matrix f."""

    n_modes: int
    beta: np.ndarray
    f: np.ndarray
    basis_label: str = "a"

    def __post_init__(self):
        beta = matkernel.require_finite(np.asarray(self.beta, dtype=complex), "beta")
        if beta.shape != (self.n_modes,):
            raise DimensionMismatchError(
                f"beta has shape {beta.shape}, expected ({self.n_modes},)"
            )
        f = matkernel.require_symmetric(np.asarray(self.f, dtype=complex), name="f")
        if f.shape != (self.n_modes, self.n_modes):
            raise DimensionMismatchError(
                f"f has shape {f.shape}, expected {(self.n_modes, self.n_modes)}"
            )
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "f", f)


@dataclass(frozen=True)
class DisentangledForm:
    """Mode-mixing unitary V, displacements alpha, squeezing magnitudes r.

    Represents V [prod_n D(alpha_n) S(r_n)] |0>: the state is a product of
    single-mode displaced squeezed vacua in the modes given by V's columns.
    """

    V: np.ndarray
    alpha: np.ndarray
    r: np.ndarray

    def __post_init__(self):
        v = matkernel.require_finite(np.asarray(self.V, dtype=complex), "V")
        m = v.shape[0]
        if v.shape != (m, m):
            raise DimensionMismatchError("V must be square")
        if matkernel.max_norm(v.conj().T @ v - np.eye(m)) > _UNITARY_TOL * m:
            raise NonFiniteError("V is not unitary within tolerance")
        alpha = matkernel.require_finite(np.asarray(self.alpha, dtype=complex), "alpha")
        r = np.asarray(self.r, dtype=float)
        if alpha.shape != (m,) or r.shape != (m,):
            raise DimensionMismatchError("alpha and r must have length n_modes")
        if np.any(r < -1e-12):
            raise NonFiniteError("squeezing magnitudes must be nonnegative")
        object.__setattr__(self, "V", v)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "r", np.maximum(r, 0.0))

    @property
    def n_modes(self) -> int:
        return self.V.shape[0]


@dataclass(frozen=True)
class CovarianceForm:
    """Quadrature mean vector and 2M x 2M covariance matrix, (q1,p1,q2,p2,...)."""

    mean: np.ndarray
    Sigma: np.ndarray

    @property
    def n_modes(self) -> int:
        return self.mean.shape[0] // 2


def vacuum(n_modes: int) -> GaussianPureState:
    return GaussianPureState(
        n_modes=n_modes,
        beta=np.zeros(n_modes, dtype=complex),
        f=np.zeros((n_modes, n_modes), dtype=complex),
    )


def disentangle(state: GaussianPureState) -> DisentangledForm:
    """Factor a Gaussian state into independent single-mode operations.

    The squeezing matrix is Takagi-factored as f = V diag(r) V^T and the
    displacement transforms as alpha = V† beta.
    """
    tak = matkernel.takagi(state.f)
    alpha = tak.V.conj().T @ state.beta
    return DisentangledForm(V=tak.V, alpha=alpha, r=tak.r)


def assemble(d: DisentangledForm, basis_label: str = "a") -> GaussianPureState:
    """Inverse of :func:`disentangle`: rebuild (beta, f) from the factors."""
    f = d.V @ np.diag(d.r).astype(complex) @ d.V.T
    beta = d.V @ d.alpha
    return GaussianPureState(n_modes=d.n_modes, beta=beta, f=f, basis_label=basis_label)


def to_covariance(d: DisentangledForm) -> CovarianceForm:
    """Covariance form in the basis where the state is a product state."""
    m = d.n_modes
    mean = np.zeros(2 * m)
    sigma = np.zeros((2 * m, 2 * m))
    for n in range(m):
        mean[2 * n] = np.sqrt(2.0) * d.alpha[n].real
        mean[2 * n + 1] = np.sqrt(2.0) * d.alpha[n].imag
        sigma[2 * n, 2 * n] = np.exp(2.0 * d.r[n])
        sigma[2 * n + 1, 2 * n + 1] = np.exp(-2.0 * d.r[n])
    return CovarianceForm(mean=mean, Sigma=sigma)


def total_photon_number(d: DisentangledForm) -> float:
    """Mean photon number: squeezing plus displacement contributions."""
    return float(np.sum(np.sinh(d.r) ** 2) + np.sum(np.abs(d.alpha) ** 2))
