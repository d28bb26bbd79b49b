"""Constructors for the named probe states of mode-parameter estimation.

Each constructor targets a resource triple (signal photons N, generator
mean gbar, generator spread dg) and returns the probe in disentangled
form together with the achieved resources, the residual of matching the
required generator eigenvalues onto the available spectrum, and the exact
QFI the construction predicts.

Probe kinds and their asymptotic QFI coefficients (c_gbar, c_dg) on the
N^2 term: optimal (8, 4), variance_optimal (4, 4), mean_optimal (8, 0),
derivative_displaced (2, 4), idler_assisted (8, 4).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import metrology
from .errors import (
    ConditionViolatedError,
    DimensionMismatchError,
    NoIdlerModesError,
    SpectrumUnreachableError,
)
from .gaussian import DisentangledForm
from .generator import Generator

PROBE_KINDS = (
    "optimal",
    "variance_optimal",
    "mean_optimal",
    "derivative_displaced",
    "idler_assisted",
)


@dataclass(frozen=True)
class ProbeSpec:
    """Requested probe kind, resource targets, and optional mode choices."""

    kind: str
    n_signal: float
    target_gmean: float = 0.0
    target_gvar: float = 0.0
    squeeze_angles: tuple[float, float] = (0.0, 0.0)
    mode_choice: tuple[int, ...] | None = None
    mode_vector: np.ndarray | None = None
    spectrum_tol: float = np.inf

    def __post_init__(self):
        if self.kind not in PROBE_KINDS:
            raise ValueError(f"kind must be one of {PROBE_KINDS}, got {self.kind!r}")
        if not self.n_signal > 0:
            raise ValueError("n_signal must be positive")
        if self.target_gvar < 0:
            raise ValueError("target_gvar must be nonnegative")


@dataclass(frozen=True)
class ProbeResult:
    state: DisentangledForm
    achieved: metrology.ResourceTriple
    eigen_residual: float
    predicted_qfi: float


def _two_mode_squeezed_qfi(g_i: float, si2: float, g_j: float, sj2: float) -> float:
    return 8.0 * (g_i**2 * si2 * (si2 + 1.0) + g_j**2 * sj2 * (sj2 + 1.0))


def _nearest_signal_index(gen: Generator, value: float, taken: set[int]) -> int:
    g = gen.eig.eigvals
    order = np.argsort(np.abs(g - value), kind="stable")
    for idx in order:
        idx = int(idx)
        if idx not in taken and not gen.idler_mask[idx]:
            return idx
    raise SpectrumUnreachableError("no free signal eigenvalue available")


def _phase_diag(m: int, entries: dict[int, float]) -> np.ndarray:
    t = np.ones(m, dtype=complex)
    for idx, phi in entries.items():
        t[idx] = np.exp(0.5j * phi)
    return np.diag(t)


def _complete_unitary(v: np.ndarray) -> np.ndarray:
    """Unitary whose first column is the given unit vector."""
    m = v.shape[0]
    pivot = int(np.argmax(np.abs(v)))
    others = [np.eye(m, dtype=complex)[:, k] for k in range(m) if k != pivot]
    a = np.column_stack([v] + others)
    q, r = np.linalg.qr(a)
    # undo the arbitrary phase QR put on the first column
    q[:, 0] = q[:, 0] * (r[0, 0] / abs(r[0, 0]))
    return q


def _eigen_matched_pair(
    spec: ProbeSpec, gen: Generator, si2: float, sj2: float
) -> tuple[int, int, float]:
    """Pick spectrum indices for the required eigenvalues and the residual."""
    gbar, dg = spec.target_gmean, np.sqrt(spec.target_gvar)
    want_i = gbar - dg * np.sqrt(sj2 / si2)
    want_j = gbar + dg * np.sqrt(si2 / sj2)
    if spec.mode_choice is not None:
        i, j = int(spec.mode_choice[0]), int(spec.mode_choice[1])
        if i == j:
            raise ValueError("two-mode probes need two distinct mode indices")
    else:
        i = _nearest_signal_index(gen, want_i, set())
        j = _nearest_signal_index(gen, want_j, {i})
    g = gen.eig.eigvals
    residual = max(abs(g[i] - want_i), abs(g[j] - want_j))
    if residual > spec.spectrum_tol:
        raise SpectrumUnreachableError(
            f"eigenvalue residual {residual:.3e} exceeds tolerance {spec.spectrum_tol:.3e}"
        )
    return i, j, residual


def _optimal_split(spec: ProbeSpec) -> tuple[float, float]:
    gbar, dg = spec.target_gmean, np.sqrt(spec.target_gvar)
    q = gbar / np.hypot(gbar, dg)
    si2 = 0.5 * spec.n_signal * (1.0 - q)
    sj2 = 0.5 * spec.n_signal * (1.0 + q)
    return si2, sj2


def _build_two_mode(
    spec: ProbeSpec, gen: Generator, si2: float, sj2: float
) -> ProbeResult:
    i, j, residual = _eigen_matched_pair(spec, gen, si2, sj2)
    m = gen.n_modes
    r = np.zeros(m)
    r[i] = np.arcsinh(np.sqrt(si2))
    r[j] = np.arcsinh(np.sqrt(sj2))
    phases = {i: spec.squeeze_angles[0], j: spec.squeeze_angles[1]}
    v = gen.eig.U @ _phase_diag(m, phases)
    state = DisentangledForm(V=v, alpha=np.zeros(m, dtype=complex), r=r)
    g = gen.eig.eigvals
    predicted = _two_mode_squeezed_qfi(g[i], si2, g[j], sj2)
    return ProbeResult(
        state=state,
        achieved=metrology.resources(state, gen),
        eigen_residual=residual,
        predicted_qfi=predicted,
    )


def _build_mean_optimal(spec: ProbeSpec, gen: Generator) -> ProbeResult:
    m = gen.n_modes
    if spec.mode_vector is not None:
        vec = np.asarray(spec.mode_vector, dtype=complex)
        if vec.shape != (m,):
            raise DimensionMismatchError("mode_vector must have length n_modes")
        vec = vec / np.linalg.norm(vec)
        v = _complete_unitary(vec)
    else:
        if spec.mode_choice is not None:
            idx = int(spec.mode_choice[0])
        else:
            idx = int(np.argmax(np.abs(gen.eig.eigvals)))
        cols = [idx] + [k for k in range(m) if k != idx]
        v = gen.eig.U[:, cols]
    v = v @ _phase_diag(m, {0: spec.squeeze_angles[0]})
    r = np.zeros(m)
    r[0] = np.arcsinh(np.sqrt(spec.n_signal))
    state = DisentangledForm(V=v, alpha=np.zeros(m, dtype=complex), r=r)
    achieved = metrology.resources(state, gen)
    n, g2, d2 = achieved.n_signal, achieved.g_mean**2, achieved.g_var
    # exact for a single squeezed mode: 8 gbar^2 N (N+1) + 4 dg^2 N
    predicted = 8.0 * g2 * n * (n + 1.0) + 4.0 * d2 * n
    return ProbeResult(
        state=state, achieved=achieved, eigen_residual=0.0, predicted_qfi=predicted
    )


def _build_derivative_displaced(spec: ProbeSpec, gen: Generator) -> ProbeResult:
    m = gen.n_modes
    i, j = (0, 1) if spec.mode_choice is None else tuple(spec.mode_choice[:2])
    g_mat = gen.G
    scale = max(1.0, float(np.max(np.abs(g_mat))))
    off_support = [abs(g_mat[k, i]) for k in range(m) if k not in (i, j)]
    if off_support and max(off_support) > 1e-9 * scale:
        raise ConditionViolatedError(
            "base-mode derivative couples outside the chosen pair"
        )
    if abs(g_mat[i, i] - g_mat[j, j]) > 1e-9 * scale:
        raise ConditionViolatedError("diagonal generator entries of the pair differ")
    half = 0.5 * spec.n_signal
    # relative squeezing angle chosen so the displacement-squeezing cross
    # term adds constructively (real coupling, real displacement)
    phi_j = 2.0 * np.angle(g_mat[j, i]) if abs(g_mat[j, i]) > 0 else 0.0
    v = _phase_diag(m, {i: 0.0, j: phi_j})
    alpha = np.zeros(m, dtype=complex)
    alpha[i] = np.sqrt(half)
    r = np.zeros(m)
    r[j] = np.arcsinh(np.sqrt(half))
    state = DisentangledForm(V=v, alpha=alpha, r=r)
    s2, c2 = half, half + 1.0
    sc = np.sqrt(s2 * c2)
    gd = float(g_mat[i, i].real)
    g01 = abs(g_mat[i, j])
    col_extra = sum(abs(g_mat[k, j]) ** 2 for k in range(m) if k not in (i, j))
    predicted = 4.0 * (
        gd**2 * half
        + 2.0 * gd**2 * s2 * c2
        + g01**2 * ((2.0 * s2 + 1.0) * half + s2)
        + 2.0 * g01**2 * half * sc
        + col_extra * s2
    )
    return ProbeResult(
        state=state,
        achieved=metrology.resources(state, gen),
        eigen_residual=0.0,
        predicted_qfi=predicted,
    )


def _build_idler_assisted(spec: ProbeSpec, gen: Generator) -> ProbeResult:
    m = gen.n_modes
    si2, sj2 = _optimal_split(spec)
    if spec.mode_choice is not None:
        i, i_idl, j, j_idl = (int(k) for k in spec.mode_choice)
        g = gen.eig.eigvals
        gbar, dg = spec.target_gmean, np.sqrt(spec.target_gvar)
        residual = max(
            abs(g[i] - (gbar - dg * np.sqrt(sj2 / si2))),
            abs(g[j] - (gbar + dg * np.sqrt(si2 / sj2))),
        )
    else:
        idlers = gen.idler_indices
        if len(idlers) < 2:
            raise NoIdlerModesError("generator provides fewer than two idler modes")
        i_idl, j_idl = int(idlers[0]), int(idlers[1])
        i, j, residual = _eigen_matched_pair(spec, gen, si2, sj2)
    if residual > spec.spectrum_tol:
        raise SpectrumUnreachableError(
            f"eigenvalue residual {residual:.3e} exceeds tolerance {spec.spectrum_tol:.3e}"
        )
    # zero-phase 50:50 beamsplitters pair each signal mode with its idler;
    # with equal squeezing angles inside a pair, the beamsplitter leaves
    # the pair's squeezing matrix invariant, which is what keeps the QFI
    # and resource structure identical to the idler-less probe (an angle
    # offset of pi would entangle the pair and halve the leading term)
    bs = np.eye(m, dtype=complex)
    for a, b in ((i, i_idl), (j, j_idl)):
        c = 1.0 / np.sqrt(2.0)
        bs[a, a] = c
        bs[a, b] = -c
        bs[b, a] = c
        bs[b, b] = c
    phases = {
        i: spec.squeeze_angles[0],
        i_idl: spec.squeeze_angles[0],
        j: spec.squeeze_angles[1],
        j_idl: spec.squeeze_angles[1],
    }
    v = gen.eig.U @ bs @ _phase_diag(m, phases)
    r = np.zeros(m)
    r[i] = r[i_idl] = np.arcsinh(np.sqrt(si2))
    r[j] = r[j_idl] = np.arcsinh(np.sqrt(sj2))
    state = DisentangledForm(V=v, alpha=np.zeros(m, dtype=complex), r=r)
    g = gen.eig.eigvals
    predicted = _two_mode_squeezed_qfi(g[i], si2, g[j], sj2)
    return ProbeResult(
        state=state,
        achieved=metrology.resources(state, gen),
        eigen_residual=residual,
        predicted_qfi=predicted,
    )


def build_probe(spec: ProbeSpec, gen: Generator) -> ProbeResult:
    """Build the requested probe against a generator's spectrum.

    Eigenvalue matching is nearest-neighbor with ties toward the smaller
    index; the residual is reported so callers on coarse spectra can
    refine. A vanishing spread target degenerates the optimal kind to the
    single-mode mean-optimal construction.
    """
    if spec.kind == "optimal":
        if spec.target_gvar <= 1e-24:
            return _build_mean_optimal(spec, gen)
        si2, sj2 = _optimal_split(spec)
        return _build_two_mode(spec, gen, si2, sj2)
    if spec.kind == "variance_optimal":
        half = 0.5 * spec.n_signal
        return _build_two_mode(spec, gen, half, half)
    if spec.kind == "mean_optimal":
        return _build_mean_optimal(spec, gen)
    if spec.kind == "derivative_displaced":
        return _build_derivative_displaced(spec, gen)
    return _build_idler_assisted(spec, gen)
