"""Truncated Fock-space oracle for small Gaussian probes.

Builds exact state vectors of up to three modes by exponentiating the
truncated displacement, squeezing, and mode-mixing Hamiltonians, and
evaluates the QFI as four times the generator variance plus the Fisher
information of photon counting in an arbitrary mode basis. This module is
the independent check for every closed form in the package: it shares no
algebra with the Gaussian engine.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg

from . import matkernel
from .errors import TailTooLargeError, TooManyModesError
from .gaussian import DisentangledForm
from .generator import Generator

MAX_MODES = 3


@dataclass(frozen=True)
class OracleConfig:
    """Per-mode cutoff, finite-difference step, and truncation budget."""

    cutoff: int
    fd_step: float = 1e-5
    tail_tol: float = 1e-9

    def __post_init__(self):
        if self.cutoff < 1:
            raise ValueError("cutoff must be at least 1")
        if not (0.0 < self.tail_tol < 1.0):
            raise ValueError("tail_tol must lie in (0, 1)")
        if self.fd_step <= 0:
            raise ValueError("fd_step must be positive")


@dataclass(frozen=True)
class FockStateVector:
    """Normalized truncated amplitudes, shape (cutoff+1,) * n_modes."""

    n_modes: int
    cutoff: int
    amplitudes: np.ndarray
    norm_deficit: float


def _annihilator(cutoff: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, cutoff + 1, dtype=float)), 1).astype(complex)


def _occupations(cutoff: int, n_modes: int) -> np.ndarray:
    """Photon counts per mode for every lattice point, shape (M, dim)."""
    return np.indices((cutoff + 1,) * n_modes).reshape(n_modes, -1)


def _quadratic_sparse(coeffs: np.ndarray, cutoff: int, n_modes: int) -> scipy.sparse.csr_matrix:
    """Sparse lattice matrix of sum_nm coeffs[n, m] a_n^dag a_m."""
    dim = (cutoff + 1) ** n_modes
    counts = _occupations(cutoff, n_modes)
    strides = (cutoff + 1) ** np.arange(n_modes - 1, -1, -1)
    flat = np.arange(dim)
    rows, cols, vals = [], [], []
    diag = np.zeros(dim, dtype=complex)
    for n in range(n_modes):
        for m in range(n_modes):
            c = coeffs[n, m]
            if abs(c) == 0.0:
                continue
            if n == m:
                diag += c * counts[n]
                continue
            mask = (counts[m] >= 1) & (counts[n] <= cutoff - 1)
            src = flat[mask]
            dst = src + strides[n] - strides[m]
            amp = c * np.sqrt(counts[m][mask] * (counts[n][mask] + 1.0))
            rows.append(dst)
            cols.append(src)
            vals.append(amp)
    rows.append(flat)
    cols.append(flat)
    vals.append(diag)
    return scipy.sparse.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(dim, dim),
    )


def _passive_hamiltonian(v: np.ndarray) -> np.ndarray:
    """Hermitian h with v = exp(-1j h), via a Schur form of the unitary."""
    t, q = scipy.linalg.schur(v, output="complex")
    h = q @ np.diag(-np.angle(np.diag(t))) @ q.conj().T
    return (h + h.conj().T) / 2.0


def apply_mode_transform(psi: np.ndarray, v: np.ndarray, cutoff: int) -> np.ndarray:
    """Apply the Fock-space lift of a passive mode transform matrix v."""
    n_modes = int(v.shape[0])
    if matkernel.max_norm(v - np.eye(n_modes)) < 1e-14:
        return psi
    h = _passive_hamiltonian(v)
    ham = _quadratic_sparse(h, cutoff, n_modes)
    flat = scipy.sparse.linalg.expm_multiply(-1j * ham, psi.reshape(-1))
    return flat.reshape(psi.shape)


def fock_build(d: DisentangledForm, cfg: OracleConfig) -> FockStateVector:
    """Truncated state vector of V [prod_n D(alpha_n) S(r_n)] |0>.

    Displacement and squeezing act as matrix exponentials of the truncated
    single-mode Hamiltonians on a padded working space (the truncated
    generators are anti-Hermitian, so the exponentials themselves are
    unitary; the padding keeps their aliasing error far above the declared
    cutoff). Projecting the working space back down to the cutoff loses
    the genuine tail probability, which is reported as the norm deficit
    before renormalization. The mode mixer then acts as the exponential of
    its photon-conserving quadratic Hamiltonian on the full lattice.
    """
    m = d.n_modes
    if m > MAX_MODES:
        raise TooManyModesError(f"oracle supports up to {MAX_MODES} modes, got {m}")
    c = cfg.cutoff
    work = 2 * (c + 1) + 16  # padded single-mode dimension
    a = _annihilator(work - 1)
    adag = a.conj().T
    vacuum = np.zeros(work, dtype=complex)
    vacuum[0] = 1.0
    factors = []
    for n in range(m):
        column = vacuum
        if d.r[n] != 0.0:
            sq = scipy.linalg.expm(0.5 * d.r[n] * (adag @ adag - a @ a))
            column = sq @ column
        if d.alpha[n] != 0.0:
            disp = scipy.linalg.expm(d.alpha[n] * adag - np.conj(d.alpha[n]) * a)
            column = disp @ column
        factors.append(column[: c + 1])
    # the pre-mix state is a product state, so the joint kept probability
    # factorizes over modes
    norm_sq = float(np.prod([np.sum(np.abs(f) ** 2) for f in factors]))
    deficit = max(0.0, 1.0 - norm_sq)
    if deficit > cfg.tail_tol:
        raise TailTooLargeError(
            f"truncated tail {deficit:.3e} exceeds tail_tol {cfg.tail_tol:.3e}; raise cutoff"
        )
    psi = factors[0]
    for factor in factors[1:]:
        psi = np.multiply.outer(psi, factor)
    psi = psi / np.sqrt(norm_sq)
    psi = apply_mode_transform(psi, d.V, c)
    return FockStateVector(n_modes=m, cutoff=c, amplitudes=np.ascontiguousarray(psi), norm_deficit=deficit)


def _diagonal_moments(psi: FockStateVector, g_diag: np.ndarray) -> tuple[float, float]:
    counts = _occupations(psi.cutoff, psi.n_modes)
    values = g_diag @ counts
    prob = np.abs(psi.amplitudes.reshape(-1)) ** 2
    mean = float(np.sum(prob * values))
    second = float(np.sum(prob * values**2))
    return mean, second


def fock_qfi(psi: FockStateVector, gen: Generator) -> float:
    """QFI as 4 Var(G) on the truncated state.

    Diagonal generators are evaluated directly; otherwise the state is
    rotated to the generator eigenbasis by the lifted mode transform first.
    """
    if gen.n_modes != psi.n_modes:
        raise TooManyModesError("generator and state mode counts differ")
    g = gen.G
    off = matkernel.max_norm(g - np.diag(np.diag(g)))
    if off <= 1e-12 * max(1.0, matkernel.max_norm(g)):
        mean, second = _diagonal_moments(psi, np.diag(g).real)
    else:
        rotated = apply_mode_transform(
            psi.amplitudes, gen.eig.U.conj().T, psi.cutoff
        )
        rotated_state = FockStateVector(
            n_modes=psi.n_modes,
            cutoff=psi.cutoff,
            amplitudes=rotated,
            norm_deficit=psi.norm_deficit,
        )
        mean, second = _diagonal_moments(rotated_state, gen.eig.eigvals)
    return 4.0 * (second - mean**2)


def fock_superposition_qfi(n_cut: int, g_min: float, g_max: float) -> float:
    """QFI of (|n_cut, 0> + |0, n_cut>)/sqrt(2) under diag(g_min, g_max).

    The photon-number-truncated benchmark state; its value equals
    (g_max - g_min)^2 n_cut^2 = 4 dg^2 N^2.
    """
    if n_cut < 1:
        raise ValueError("n_cut must be at least 1")
    psi = np.zeros((n_cut + 1, n_cut + 1), dtype=complex)
    psi[n_cut, 0] = 1.0 / np.sqrt(2.0)
    psi[0, n_cut] = 1.0 / np.sqrt(2.0)
    state = FockStateVector(n_modes=2, cutoff=n_cut, amplitudes=psi, norm_deficit=0.0)
    mean, second = _diagonal_moments(state, np.array([g_min, g_max]))
    return 4.0 * (second - mean**2)


def fock_counting_fi(
    psi_builder,
    basis_rotation: np.ndarray | None,
    lam0: float,
    cfg: OracleConfig,
    richardson: bool = True,
) -> float:
    """Fisher information of photon counting in a rotated mode basis.

    ``psi_builder(lam)`` must return the parameter-imprinted
    FockStateVector; probabilities are |amplitudes|^2 after rotating into
    the counting basis (rows of ``basis_rotation`` define the counted
    modes), and the lambda derivative is a central difference with step
    ``cfg.fd_step``. Outcomes with probability below 1e-14 are dropped.

    With ``richardson`` the value is recomputed at half the step and a
    relative change above 1e-4 triggers a step-size warning.
    """

    def counted_probs(lam: float) -> np.ndarray:
        psi = psi_builder(lam)
        if psi.n_modes > MAX_MODES:
            raise TooManyModesError("too many modes for the counting oracle")
        amps = psi.amplitudes
        if basis_rotation is not None:
            amps = apply_mode_transform(amps, np.asarray(basis_rotation, complex), psi.cutoff)
        return np.abs(amps.reshape(-1)) ** 2

    p0 = counted_probs(lam0)
    keep = p0 > 1e-14

    def fi_at(h: float) -> float:
        dp = (counted_probs(lam0 + h) - counted_probs(lam0 - h)) / (2.0 * h)
        return float(np.sum(dp[keep] ** 2 / p0[keep]))

    value = fi_at(cfg.fd_step)
    if richardson:
        refined = fi_at(0.5 * cfg.fd_step)
        if abs(refined - value) > 1e-4 * max(abs(value), 1e-12):
            warnings.warn(
                f"counting FI changes by {abs(refined - value):.3e} when the "
                "difference step is halved; decrease fd_step",
                stacklevel=2,
            )
    return value
