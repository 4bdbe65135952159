"""Gaussian-state covariance toolbox in shot-noise units.

Conventions used throughout:

* vacuum quadrature variance is 1 (so a thermal state has variance 2*nbar + 1),
* quadratures are ordered (q1, p1, q2, p2, ...),
* the symplectic form is Omega = diag([[0, 1], [-1, 0]], ...) in that ordering.

Everything here works on plain covariance matrices; first moments never enter
any of the entropic quantities we need, so they are not tracked.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

I2 = np.eye(2)
SIGMA_Z = np.diag([1.0, -1.0])

# Symplectic eigenvalue pairs from eigvals(i*Omega*sigma) must agree to this
# tolerance, otherwise the spectrum is numerically meaningless.
PAIR_TOL = 1e-6

# Eigenvalues this far below 1 are treated as exact vacuum modes; anything
# lower means the matrix is not a physical covariance matrix.
VACUUM_SLACK = 1e-9


class NumericalError(ArithmeticError):
    """A covariance-matrix computation produced unusable numbers."""


def omega(n_modes: int) -> np.ndarray:
    """Symplectic form for n modes in (q1, p1, q2, p2, ...) ordering."""
    block = np.array([[0.0, 1.0], [-1.0, 0.0]])
    out = np.zeros((2 * n_modes, 2 * n_modes))
    for k in range(n_modes):
        out[2 * k : 2 * k + 2, 2 * k : 2 * k + 2] = block
    return out


class CovMatrix:
    """Covariance matrix of an n-mode Gaussian state.

    Construction validates shape and symmetry; `entries` is stored read-only
    so downstream code cannot mutate a state in place.
    """

    __slots__ = ("entries", "n_modes")

    def __init__(self, entries):
        arr = np.array(entries, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError(f"covariance matrix must be square, got shape {arr.shape}")
        dim = arr.shape[0]
        if dim == 0 or dim % 2 != 0:
            raise ValueError(f"covariance matrix dimension must be positive and even, got {dim}")
        if not np.allclose(arr, arr.T, rtol=0.0, atol=1e-12):
            raise ValueError("covariance matrix must be symmetric")
        arr = 0.5 * (arr + arr.T)
        arr.flags.writeable = False
        object.__setattr__(self, "entries", arr)
        object.__setattr__(self, "n_modes", dim // 2)

    def __setattr__(self, name, value):
        raise AttributeError("CovMatrix is immutable")

    def __repr__(self):
        return f"CovMatrix(n_modes={self.n_modes})"

    def mode_indices(self, mode: int) -> slice:
        if not 0 <= mode < self.n_modes:
            raise ValueError(f"mode index {mode} out of range for {self.n_modes} modes")
        return slice(2 * mode, 2 * mode + 2)


@dataclass(frozen=True)
class SymplecticSpectrum:
    """Symplectic eigenvalues of a covariance matrix, descending."""

    values: tuple[float, ...]

    def __iter__(self):
        return iter(self.values)

    def __len__(self):
        return len(self.values)


def vacuum_cm(n_modes: int) -> CovMatrix:
    """n-mode vacuum: identity covariance."""
    return CovMatrix(np.eye(2 * n_modes))

def thermal_cm(variance: float) -> CovMatrix:
    """Single thermal mode with quadrature variance >= 1."""
    if variance < 1.0 - VACUUM_SLACK:
        raise ValueError(f"thermal variance must be >= 1, got {variance}")
    return CovMatrix(variance * I2)


def tmsv_cm(v: float) -> CovMatrix:
    """Two-mode squeezed vacuum with quadrature variance v per arm.

    Block form [[v*I, c*sz], [c*sz, v*I]] with c = sqrt(v^2 - 1); the state is
    pure, so both symplectic eigenvalues equal 1.
    """
    if v < 1.0:
        raise ValueError(f"TMSV variance must be >= 1, got {v}")
    c = np.sqrt(v * v - 1.0)
    top = np.hstack([v * I2, c * SIGMA_Z])
    bot = np.hstack([c * SIGMA_Z, v * I2])
    return CovMatrix(np.vstack([top, bot]))


def direct_sum(a: CovMatrix, b: CovMatrix) -> CovMatrix:
    """Tensor product of two uncorrelated states: block-diagonal covariance."""
    na, nb = 2 * a.n_modes, 2 * b.n_modes
    out = np.zeros((na + nb, na + nb))
    out[:na, :na] = a.entries
    out[na:, na:] = b.entries
    return CovMatrix(out)


def apply_beamsplitter(cm: CovMatrix, mode_a: int, mode_b: int, transmittance: float) -> CovMatrix:
    """Mix two modes on a beamsplitter of the given transmittance.

    The symplectic action on (mode_a, mode_b) is
        a' =  sqrt(T) a + sqrt(1-T) b
        b' = -sqrt(1-T) a + sqrt(T) b
    so T = 1 is the identity and T = 0 swaps the modes up to a sign.
    """
    if not 0.0 <= transmittance <= 1.0:
        raise ValueError(f"beamsplitter transmittance must lie in [0, 1], got {transmittance}")
    if mode_a == mode_b:
        raise ValueError("beamsplitter needs two distinct modes")
    ct = np.sqrt(transmittance)
    st = np.sqrt(1.0 - transmittance)
    s = np.eye(2 * cm.n_modes)
    ia, ib = cm.mode_indices(mode_a), cm.mode_indices(mode_b)
    s[ia, ia] = ct * I2
    s[ib, ib] = ct * I2
    s[ia, ib] = st * I2
    s[ib, ia] = -st * I2
    return CovMatrix(s @ cm.entries @ s.T)


def heterodyne_condition(cm: CovMatrix, measured_mode: int) -> CovMatrix:
    """Covariance of the remaining modes after heterodyning one mode.

    Heterodyne measures both quadratures of the mode through a balanced
    beamsplitter with vacuum, which conditions the rest via the Schur-type
    update sigma_R - C (M + I)^{-1} C^T.  The update is independent of the
    measurement outcome, so no outcome argument is needed.
    """
    idx = cm.mode_indices(measured_mode)
    keep = np.ones(2 * cm.n_modes, dtype=bool)
    keep[idx] = False
    sigma = cm.entries
    m = sigma[idx, idx]
    c = sigma[keep][:, idx]
    rest = sigma[keep][:, keep]
    try:
        inv = np.linalg.inv(m + I2)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"singular measured block in heterodyne conditioning: {exc}") from exc
    return CovMatrix(rest - c @ inv @ c.T)


def symplectic_spectrum(cm: CovMatrix) -> SymplecticSpectrum:
    """Symplectic eigenvalues, computed from eigvals(i * Omega * sigma).

    The ordinary eigenvalues of i*Omega*sigma come in +/- nu pairs; the pair
    structure is checked and each pair is averaged.  Pair mismatch beyond
    PAIR_TOL raises NumericalError rather than returning garbage.  No
    physicality check happens here (intermediate algebra may produce blocks
    with nu < 1); use is_physical for that.
    """
    n = cm.n_modes
    mat = 1j * omega(n) @ cm.entries
    try:
        raw = np.sort(np.abs(np.linalg.eigvals(mat)))
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigen-solver failure on covariance matrix: {exc}") from exc
    nus = []
    for k in range(n):
        lo, hi = raw[2 * k], raw[2 * k + 1]
        if hi - lo > PAIR_TOL * max(1.0, hi):
            raise NumericalError(
                f"symplectic eigenvalue pair mismatch: |{lo}| vs |{hi}| (tol {PAIR_TOL})"
            )
        nus.append(0.5 * (lo + hi))
    nus.sort(reverse=True)
    return SymplecticSpectrum(tuple(nus))


def is_physical(cm: CovMatrix) -> bool:
    """Whether every symplectic eigenvalue is >= 1 - VACUUM_SLACK."""
    return all(nu >= 1.0 - VACUUM_SLACK for nu in symplectic_spectrum(cm))


def g_func(nu: float) -> float:
    """Bosonic entropy of a single symplectic eigenvalue, in bits.

    g(nu) = ((nu+1)/2) log2((nu+1)/2) - ((nu-1)/2) log2((nu-1)/2), with
    g(1) = 0 by continuity.  Inputs within VACUUM_SLACK below 1 are treated
    as 1; anything lower is rejected.
    """
    if nu < 1.0 - VACUUM_SLACK:
        raise ValueError(f"symplectic eigenvalue must be >= 1, got {nu}")
    if nu <= 1.0:
        return 0.0
    up = 0.5 * (nu + 1.0)
    dn = 0.5 * (nu - 1.0)
    return float(up * np.log2(up) - dn * np.log2(dn))


def von_neumann_entropy(cm: CovMatrix) -> float:
    """Entropy of a Gaussian state in bits: sum of g over the symplectic spectrum."""
    return float(sum(g_func(nu) for nu in symplectic_spectrum(cm)))
