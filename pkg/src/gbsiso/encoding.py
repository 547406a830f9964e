"""Map adjacency matrices onto squeezed-vacuum samplers.

A rescaled adjacency ``At = c * A`` with spectral radius below one is written
as ``At = U diag(tanh r) U^T`` with ``U`` unitary and ``r >= 0``. Negative
eigenvalues are absorbed as a factor ``1j`` on the matching column of ``U``.

Every photon-number statistic of the output state follows from two real
symmetric contraction matrices,

    N[x, y] = <a_x^dag a_y> = (At^2 (1 - At^2)^-1)[x, y]
    E[x, y] = <a_x a_y>     = (At (1 - At^2)^-1)[x, y]

which are matrix functions of ``At`` and therefore independent of the
(non-unique) choice of ``U``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EncodingError, NumericError

DEFAULT_ALPHA = 0.9
UNITARITY_TOL = 1e-10
RECONSTRUCTION_TOL = 1e-8


@dataclass(frozen=True)
class EncodedSampler:
    unitary: np.ndarray
    squeezing: np.ndarray
    scale: float
    eigenvalues: np.ndarray  # signed eigenvalues of the rescaled matrix, column order of ``unitary``

    @property
    def modes(self) -> int:
        return self.unitary.shape[0]

    def kernel(self) -> np.ndarray:
        """``U diag(tanh r) U^T``; equals the rescaled adjacency."""
        u = self.unitary
        return (u * np.tanh(self.squeezing)) @ u.T


@dataclass(frozen=True)
class GaussianMoments:
    n: np.ndarray
    e: np.ndarray

    @property
    def modes(self) -> int:
        return self.n.shape[0]

    def permuted(self, perm) -> "GaussianMoments":
        from .graph import apply_permutation

        return GaussianMoments(apply_permutation(self.n, perm), apply_permutation(self.e, perm))


def spectral_radius(a: np.ndarray) -> float:
    a = np.asarray(a, dtype=float)
    if not a.size:
        return 0.0
    return float(np.max(np.abs(np.linalg.eigvalsh(a))))


def rescale(a: np.ndarray, alpha: float = DEFAULT_ALPHA) -> tuple[np.ndarray, float]:
    """Scale ``a`` so that its spectral radius becomes ``alpha``."""
    if not 0.0 < alpha < 1.0:
        raise EncodingError(f"alpha must lie in (0, 1), got {alpha}")
    a = np.asarray(a, dtype=float)
    rho = spectral_radius(a)
    if rho == 0.0:
        raise EncodingError("cannot rescale a matrix with zero spectral radius")
    c = alpha / rho
    return c * a, c


def shared_scale(a1: np.ndarray, a2: np.ndarray, alpha: float = DEFAULT_ALPHA) -> float:
    """Common factor for a pair so both spectral radii stay at or below ``alpha``.

    Two zero matrices get a factor of 1; their encodings are both vacuum.
    """
    if not 0.0 < alpha < 1.0:
        raise EncodingError(f"alpha must lie in (0, 1), got {alpha}")
    rho = max(spectral_radius(a1), spectral_radius(a2))
    return alpha / rho if rho > 0.0 else 1.0


def takagi(at: np.ndarray, scale: float = 1.0) -> EncodedSampler:
    """Takagi factors of a real symmetric matrix with spectral radius < 1."""
    at = np.asarray(at, dtype=float)
    if at.ndim != 2 or at.shape[0] != at.shape[1]:
        raise EncodingError("takagi needs a square matrix")
    if not np.allclose(at, at.T, rtol=0.0, atol=1e-14):
        raise EncodingError("takagi needs a symmetric matrix")
    lam, q = np.linalg.eigh((at + at.T) / 2)
    if lam.size and np.max(np.abs(lam)) >= 1.0:
        raise EncodingError(
            f"spectral radius {np.max(np.abs(lam)):.6g} >= 1; squeezing would be infinite"
        )
    idx = np.argsort(-lam, kind="stable")
    lam, q = lam[idx], q[:, idx]
    # fix eigenvector signs so repeated runs emit identical factors
    pivots = np.argmax(np.abs(q), axis=0)
    q = q * np.where(q[pivots, np.arange(q.shape[1])] < 0, -1.0, 1.0)

    u = q.astype(complex)
    u[:, lam < 0] *= 1j
    r = np.arctanh(np.abs(lam))
    enc = EncodedSampler(u, r, float(scale), lam)

    dev = np.max(np.abs(u.conj().T @ u - np.eye(len(lam)))) if lam.size else 0.0
    if dev > UNITARITY_TOL:
        raise NumericError(f"Takagi factor is not unitary (deviation {dev:.3e})")
    res = np.max(np.abs(enc.kernel() - at)) if lam.size else 0.0
    if res > RECONSTRUCTION_TOL:
        raise NumericError(f"Takagi reconstruction residual {res:.3e}")
    return enc


def encode(a: np.ndarray, alpha: float = DEFAULT_ALPHA, scale: float | None = None) -> EncodedSampler:
    """Rescale (unless ``scale`` is given) and Takagi-decompose an adjacency matrix."""
    a = np.asarray(a, dtype=float)
    if scale is None:
        at, scale = rescale(a, alpha)
    else:
        at = scale * a
    return takagi(at, scale)


def moments_from_sampler(enc: EncodedSampler) -> GaussianMoments:
    """Output contractions obtained by pushing the single-mode values through ``U``."""
    u = enc.unitary
    s = np.sinh(enc.squeezing)
    n_occ = s**2
    ecc = np.sinh(2 * enc.squeezing) / 2
    n = (u.conj() * n_occ) @ u.T
    e = (u * ecc) @ u.T
    for name, m in (("N", n), ("E", e)):
        scale = max(1.0, float(np.max(np.abs(m)))) if m.size else 1.0
        if m.size and np.max(np.abs(m.imag)) > 1e-10 * scale:
            raise NumericError(f"{name} has an imaginary part; phase convention broken")
    n, e = n.real, e.real
    return GaussianMoments((n + n.T) / 2, (e + e.T) / 2)


def moments_direct(at: np.ndarray) -> GaussianMoments:
    """Closed-form contractions ``N = At^2 (1-At^2)^-1`` and ``E = At (1-At^2)^-1``."""
    at = np.asarray(at, dtype=float)
    m = at.shape[0]
    if m and spectral_radius(at) >= 1.0:
        raise EncodingError("spectral radius must be below 1")
    try:
        e = np.linalg.solve(np.eye(m) - at @ at, at)
    except np.linalg.LinAlgError as exc:
        raise EncodingError(f"1 - At^2 is singular: {exc}") from exc
    n = at @ e
    return GaussianMoments((n + n.T) / 2, (e + e.T) / 2)
