"""Hermitian generator matrices of mode transformations.

Covers explicit matrices, discretized shift generators on uniform grids
(time, frequency, transverse momentum/position), the tridiagonal
Hermite-Gauss generator of coordinate shifts, and numerical extraction of
a generator from a parameterized mode family.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import matkernel
from .errors import ModesNotOrthonormalError

SHIFT_DOMAINS = ("time_shift", "frequency_shift", "beam_displacement", "beam_tilt")

_DIAGONAL_BASIS = {
    "time_shift": "frequency_bins",
    "frequency_shift": "time_bins",
    "beam_displacement": "momentum_bins",
    "beam_tilt": "position_bins",
}

DEFAULT_SIGNAL_TOL = 1e-12


@dataclass(frozen=True)
class Generator:
    """Hermitian generator with cached ascending eigendecomposition.

    ``eig.eigvals`` are ascending; modes whose eigenvalue magnitude is at
    most ``signal_tol * max|g|`` are idlers, untouched by the transform.
    """

    G: np.ndarray
    eig: matkernel.HermitianEig
    signal_tol: float = DEFAULT_SIGNAL_TOL
    basis_label: str = "a"
    meta: dict = field(default_factory=dict)

    @property
    def n_modes(self) -> int:
        return self.G.shape[0]

    @property
    def idler_mask(self) -> np.ndarray:
        g = self.eig.eigvals
        scale = np.max(np.abs(g)) if g.size else 0.0
        if scale == 0.0:
            return np.ones_like(g, dtype=bool)
        return np.abs(g) <= self.signal_tol * scale

    @property
    def idler_indices(self) -> np.ndarray:
        return np.nonzero(self.idler_mask)[0]


def from_matrix(
    g_matrix: np.ndarray,
    signal_tol: float = DEFAULT_SIGNAL_TOL,
    basis_label: str = "a",
    meta: dict | None = None,
) -> Generator:
    """Wrap a Hermitian matrix with its ascending eigendecomposition."""
    g_matrix = matkernel.require_hermitian(np.asarray(g_matrix, dtype=complex), name="G")
    eig = matkernel.hermitian_eig(g_matrix)
    return Generator(
        G=g_matrix, eig=eig, signal_tol=signal_tol, basis_label=basis_label, meta=meta or {}
    )


def signal_projector(gen: Generator) -> np.ndarray:
    """Projector onto the span of eigenvectors with nonzero eigenvalue."""
    keep = (~gen.idler_mask).astype(float)
    b = gen.eig.U
    return (b * keep) @ b.conj().T


@dataclass(frozen=True)
class DiscretizationGrid:
    """Uniform binning of an interval together with its Fourier-dual grid.

    The dual bin width is fixed by delta_p = 2*pi / (z_max - z_min), so
    delta_z * delta_p * n_bins = 2*pi holds by construction. The dual
    offset defaults to a centered dual grid and may be overridden.
    """

    z_min: float
    z_max: float
    n_bins: int
    p_min: float | None = None

    def __post_init__(self):
        if not (self.z_max > self.z_min):
            raise ValueError("z_max must exceed z_min")
        if self.n_bins < 1:
            raise ValueError("n_bins must be at least 1")
        if self.p_min is None:
            object.__setattr__(self, "p_min", -np.pi / self.delta_z + self.delta_p / 2.0)

    @property
    def delta_z(self) -> float:
        return (self.z_max - self.z_min) / self.n_bins

    @property
    def delta_p(self) -> float:
        return 2.0 * np.pi / (self.z_max - self.z_min)

    @property
    def z_values(self) -> np.ndarray:
        return self.z_min + self.delta_z * np.arange(self.n_bins)

    @property
    def p_values(self) -> np.ndarray:
        return self.p_min + self.delta_p * np.arange(self.n_bins)

    def quadrature_nodes(self) -> np.ndarray:
        """Trapezoid nodes spanning the interval, one per bin edge."""
        return np.linspace(self.z_min, self.z_max, self.n_bins + 1)


def shift_generator(
    grid: DiscretizationGrid,
    domain: str,
    physical_scale: float = 1.0,
    signal_tol: float = DEFAULT_SIGNAL_TOL,
) -> Generator:
    """Diagonal generator of a shift transformation on a uniform grid.

    Eigenvalues are the grid points times ``physical_scale`` (the ratio
    omega/c for beam tilt, 1 otherwise), expressed in the bin basis in
    which the shift generator is diagonal. Valid for small tilt angles
    only; callers in the tilt domain choose the regime.
    """
    if domain not in SHIFT_DOMAINS:
        raise ValueError(f"domain must be one of {SHIFT_DOMAINS}, got {domain!r}")
    values = physical_scale * grid.z_values
    return from_matrix(
        np.diag(values.astype(complex)),
        signal_tol=signal_tol,
        basis_label=_DIAGONAL_BASIS[domain],
        meta={"domain": domain, "physical_scale": physical_scale},
    )


@dataclass(frozen=True)
class HGParams:
    """Center, carrier, width, and global phase of a Hermite-Gauss family."""

    center_z: float = 0.0
    center_p: float = 0.0
    sigma_z: float = 1.0
    theta: float = 0.0

    def __post_init__(self):
        if not self.sigma_z > 0:
            raise ValueError("sigma_z must be positive")


def hg_generator(
    hg: HGParams,
    n_modes: int,
    domain_sign: str = "z_shift",
    signal_tol: float = DEFAULT_SIGNAL_TOL,
) -> Generator:
    """Shift generator in a truncated Hermite-Gauss mode basis.

    G[n, m] = i/(sqrt(2) sigma) (sqrt(m/2) d_{n,m-1} - sqrt((m+1)/2) d_{n,m+1})
              + p0 d_{n,m},  n, m = 0..n_modes-1.

    Truncation silently drops the coupling of level n_modes-1 upward; its
    magnitude sqrt(n_modes/2)/(sqrt(2) sigma) is reported in ``meta`` so
    callers can size the basis.
    """
    if domain_sign != "z_shift":
        raise ValueError("only the z_shift sign convention is defined")
    if n_modes < 2:
        raise ValueError("need at least two Hermite-Gauss levels")
    m = n_modes
    g = np.diag(np.full(m, hg.center_p, dtype=complex))
    pref = 1.0 / (np.sqrt(2.0) * hg.sigma_z)
    for k in range(1, m):
        # column k couples down to row k-1 with +i sqrt(k/2) prefactor
        g[k - 1, k] = 1j * pref * np.sqrt(k / 2.0)
        g[k, k - 1] = np.conj(g[k - 1, k])
    dropped = pref * np.sqrt(m / 2.0)
    return from_matrix(
        g,
        signal_tol=signal_tol,
        basis_label="hermite_gauss",
        meta={"dropped_coupling": dropped, "hg_params": hg},
    )


def hg_mode(n: int, z: np.ndarray, hg: HGParams) -> np.ndarray:
    """Hermite-Gauss mode function of physicist's Hermite polynomials."""
    x = (np.asarray(z, dtype=float) - hg.center_z) / (np.sqrt(2.0) * hg.sigma_z)
    norm = (1.0 / (2.0 * np.pi * hg.sigma_z**2)) ** 0.25 * np.sqrt(
        2.0 ** (-n) / math.factorial(n)
    )
    herm = np.polynomial.hermite.hermval(x, [0.0] * n + [1.0])
    phase = np.exp(-1j * hg.center_p * (z - hg.center_z)) * np.exp(-1j * hg.theta)
    return norm * herm * np.exp(-0.5 * x**2) * phase


def generator_from_modes(
    mode_family: Callable[[int, np.ndarray, float], np.ndarray],
    n_modes: int,
    lam0: float,
    fd_step: float,
    quadrature_grid: DiscretizationGrid,
    gram_tol: float = 1e-4,
    signal_tol: float = DEFAULT_SIGNAL_TOL,
) -> Generator:
    """Extract the generator matrix from a parameterized mode family.

    The defining relation d/d(lambda) Psi_m = -i sum_n G[n, m] Psi_n gives
    -i G[n, m] = integral conj(Psi_n) d/d(lambda) Psi_m dz, evaluated with
    a central difference in lambda and composite-trapezoid quadrature on
    the grid nodes. The result is Hermitized; the anti-Hermitian residual
    magnitude is reported in ``meta``.
    """
    if fd_step <= 0:
        raise ValueError("fd_step must be positive")
    z = quadrature_grid.quadrature_nodes()
    modes0 = np.array([mode_family(n, z, lam0) for n in range(n_modes)])
    gram = np.array(
        [[np.trapezoid(np.conj(mn) * mm, z) for mm in modes0] for mn in modes0]
    )
    gram_dev = matkernel.max_norm(gram - np.eye(n_modes))
    if gram_dev > gram_tol:
        raise ModesNotOrthonormalError(
            f"mode family Gram matrix deviates from identity by {gram_dev:.3e}"
        )
    plus = np.array([mode_family(n, z, lam0 + fd_step) for n in range(n_modes)])
    minus = np.array([mode_family(n, z, lam0 - fd_step) for n in range(n_modes)])
    dmodes = (plus - minus) / (2.0 * fd_step)
    raw = np.empty((n_modes, n_modes), dtype=complex)
    for n in range(n_modes):
        for m in range(n_modes):
            raw[n, m] = 1j * np.trapezoid(np.conj(modes0[n]) * dmodes[m], z)
    herm = (raw + raw.conj().T) / 2.0
    residual = matkernel.max_norm(raw - raw.conj().T) / 2.0
    return from_matrix(
        herm,
        signal_tol=signal_tol,
        basis_label="mode_family",
        meta={"anti_hermitian_residual": residual, "gram_deviation": gram_dev},
    )
