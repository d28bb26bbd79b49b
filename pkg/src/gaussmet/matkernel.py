"""Dense complex-matrix kernel: Hermitian eigendecompositions, Takagi
factorizations of complex symmetric matrices, and unitary exponentials.

Every routine validates its input against a max-norm relative tolerance
(default 1e-10) and produces deterministic output for identical input,
including inside degenerate eigenvalue or singular-value clusters.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import NonFiniteError, NotHermitianError, NotSymmetricError

DEFAULT_TOL = 1e-10


def max_norm(a: np.ndarray) -> float:
    """Largest entry magnitude, the norm all tolerances are relative to."""
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


def require_finite(a: np.ndarray, name: str = "matrix") -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if not np.all(np.isfinite(a.real)) or not np.all(np.isfinite(a.imag)):
        raise NonFiniteError(f"{name} contains NaN or infinite entries")
    return a


def require_hermitian(a: np.ndarray, tol: float = DEFAULT_TOL, name: str = "matrix") -> np.ndarray:
    a = require_finite(a, name)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NotHermitianError(f"{name} must be square, got shape {a.shape}")
    dev = max_norm(a - a.conj().T)
    if dev > tol * max(1.0, max_norm(a)):
        raise NotHermitianError(f"{name} deviates from Hermitian by {dev:.3e}")
    return (a + a.conj().T) / 2.0


def require_symmetric(a: np.ndarray, tol: float = DEFAULT_TOL, name: str = "matrix") -> np.ndarray:
    a = require_finite(a, name)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NotSymmetricError(f"{name} must be square, got shape {a.shape}")
    dev = max_norm(a - a.T)
    if dev > tol * max(1.0, max_norm(a)):
        raise NotSymmetricError(f"{name} deviates from symmetric by {dev:.3e}")
    return (a + a.T) / 2.0


@dataclass(frozen=True)
class HermitianEig:
    """Ascending eigenvalues and the unitary of column eigenvectors."""

    eigvals: np.ndarray
    U: np.ndarray


@dataclass(frozen=True)
class TakagiFactorization:
    """Takagi factors of a complex symmetric matrix: f = V diag(r) V^T.

    ``r`` is real, nonnegative and descending; ``V`` is unitary.
    """

    V: np.ndarray
    r: np.ndarray


def _fix_phase(v: np.ndarray) -> np.ndarray:
    """Rotate a vector so its largest-magnitude entry is real positive."""
    k = int(np.argmax(np.abs(v)))
    ph = v[k]
    if abs(ph) == 0.0:
        return v
    return v * (abs(ph) / ph)


def _cluster_slices(values: np.ndarray, gap: float) -> list[slice]:
    """Split a sorted real vector into runs whose internal gaps are < gap."""
    slices = []
    start = 0
    for k in range(1, len(values)):
        if values[k] - values[k - 1] >= gap:
            slices.append(slice(start, k))
            start = k
    slices.append(slice(start, len(values)))
    return slices


def _pivoted_basis(subspace: np.ndarray) -> np.ndarray:
    """Deterministic orthonormal basis of span(subspace columns).

    Runs pivoted Gram-Schmidt on the projections of the canonical basis
    vectors onto the subspace, always picking the largest residual first,
    so the result does not depend on how LAPACK oriented the input columns.
    """
    m, k = subspace.shape
    proj = subspace @ subspace.conj().T
    candidates = proj.copy()  # column j = P e_j
    chosen: list[np.ndarray] = []
    for _ in range(k):
        norms = np.linalg.norm(candidates, axis=0)
        j = int(np.argmax(norms))
        v = candidates[:, j] / norms[j]
        chosen.append(_fix_phase(v))
        # deflate remaining candidates
        candidates = candidates - np.outer(v, v.conj() @ candidates)
    return np.column_stack(chosen)


def hermitian_eig(a: np.ndarray, tol: float = DEFAULT_TOL) -> HermitianEig:
    """Eigendecomposition of a Hermitian matrix with ascending eigenvalues.

    Inside eigenvalue clusters closer than 1e-9 * max|a| the eigenvectors
    are re-orthonormalized deterministically; isolated eigenvectors get a
    fixed phase. Raises NotHermitianError / NonFiniteError on bad input.
    """
    a = require_hermitian(a, tol)
    w, u = np.linalg.eigh(a)
    gap = 1e-9 * max(1.0, max_norm(a))
    cols = []
    for sl in _cluster_slices(w, gap):
        block = u[:, sl]
        if block.shape[1] == 1:
            cols.append(_fix_phase(block[:, 0]))
        else:
            basis = _pivoted_basis(block)
            cols.extend(basis.T)
    return HermitianEig(eigvals=w, U=np.column_stack(cols))


def takagi(f: np.ndarray, tol: float = DEFAULT_TOL) -> TakagiFactorization:
    """Takagi factorization f = V diag(r) V^T of a complex symmetric matrix.

    Built on the SVD: the symmetric unitary residue U^H f conj(U) is
    diagonal up to degenerate singular-value blocks, whose symmetric
    square root absorbs the remaining mixing. Zero singular values keep
    their SVD columns unchanged.
    """
    f = require_symmetric(f, tol)
    m = f.shape[0]
    if max_norm(f) == 0.0:
        return TakagiFactorization(V=np.eye(m, dtype=complex), r=np.zeros(m))
    u, sigma, _ = np.linalg.svd(f)
    z = u.conj().T @ f @ u.conj()  # symmetric, block diagonal over sigma clusters
    gap = 1e-10 * max(1.0, sigma[0])
    v = np.zeros_like(u)
    for sl in _cluster_slices(-sigma, gap):  # sigma is descending
        s_val = sigma[sl][0]
        if s_val <= gap:
            v[:, sl] = u[:, sl]
            continue
        block = z[sl, sl] / s_val  # unitary and symmetric
        if sl.stop - sl.start == 1:
            q = np.array([[np.exp(0.5j * np.angle(block[0, 0]))]])
        else:
            q = scipy.linalg.sqrtm(block)
        v[:, sl] = u[:, sl] @ q
    return TakagiFactorization(V=v, r=sigma)


def unitary_exp(h: np.ndarray, scale: float, tol: float = DEFAULT_TOL) -> np.ndarray:
    """exp(-1j * scale * h) for Hermitian h, unitary to working precision."""
    eig = hermitian_eig(h, tol)
    phases = np.exp(-1j * scale * eig.eigvals)
    return (eig.U * phases) @ eig.U.conj().T
