"""Photon-number moments and cumulants of a Gaussian sampler output.

Moments of number operators are Gaussian expectations of ladder-operator
products, so they reduce to hafnians of the two-point contraction matrix
(Wick). Cumulants (Ursell functions) then follow from moments by the usual
alternating sum over set partitions.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.linalg import expm

from .combinatorics import hafnian, set_partitions
from .encoding import EncodedSampler, GaussianMoments, moments_from_sampler
from .errors import GuardError, OracleInconclusive

MAX_ORDER = 6
MAX_TENSOR_ENTRIES = 10**8


@dataclass(frozen=True)
class CorrelationTensor:
    order: int
    values: np.ndarray

    @property
    def modes(self) -> int:
        return self.values.shape[0] if self.order else 0

    def slice(self, i: int) -> np.ndarray:
        """Entries whose first index is ``i``, flattened."""
        return np.ravel(self.values[i])

    def to_nested(self) -> list:
        return self.values.tolist()


def _check_order(k: int, max_order: int) -> None:
    if k < 1:
        raise ValueError("correlation order must be at least 1")
    if k > max_order:
        raise GuardError(f"order {k} exceeds guard {max_order}")


def contraction_matrix(mom: GaussianMoments, modes: Sequence[int]) -> np.ndarray:
    """Pairwise contractions of ``(a^dag_x1, a_x1, ..., a^dag_xk, a_xk)``.

    Entry ``(p, q)`` with ``p < q`` is the expectation of ``op_p op_q`` in that
    order; the lower triangle mirrors it so the hafnian sees a symmetric matrix.
    """
    idx = np.repeat(np.asarray(modes, dtype=int), 2)
    dag = np.tile([True, False], len(modes))
    n = mom.n[np.ix_(idx, idx)]
    e = mom.e[np.ix_(idx, idx)]
    same = idx[:, None] == idx[None, :]
    dp, dq = dag[:, None], dag[None, :]
    w = np.where(dp == dq, e, n + (~dp & dq & same))
    upper = np.triu(w, 1)
    return upper + upper.T


def wick_moment(mom: GaussianMoments, modes: Sequence[int], max_order: int = MAX_ORDER) -> float:
    """``<n_x1 n_x2 ... n_xk>`` as the hafnian of the contraction matrix."""
    _check_order(len(modes), max_order)
    return float(hafnian(contraction_matrix(mom, modes)))


def _ursell(moment, modes: Sequence[int]) -> float:
    total = 0.0
    for part in set_partitions(len(modes)):
        nb = len(part)
        coef = (-1) ** (nb - 1) * math.factorial(nb - 1)
        prod = 1.0
        for block in part:
            prod *= moment(tuple(sorted(modes[q] for q in block)))
            if prod == 0.0:
                break
        total += coef * prod
    return total


def cumulant(
    mom: GaussianMoments,
    modes: Sequence[int],
    max_order: int = MAX_ORDER,
    cache: dict[tuple[int, ...], float] | None = None,
) -> float:
    """Joint cumulant of ``n_x1 ... n_xk``.

    ``cache`` maps sorted mode tuples to moments and may be shared between
    calls on the same ``mom``.
    """
    _check_order(len(modes), max_order)
    memo = {} if cache is None else cache

    def moment(block: tuple[int, ...]) -> float:
        val = memo.get(block)
        if val is None:
            val = memo[block] = wick_moment(mom, block, max_order)
        return val

    return _ursell(moment, list(modes))


def correlation_tensor(
    mom: GaussianMoments,
    k: int,
    max_order: int = MAX_ORDER,
    max_entries: int = MAX_TENSOR_ENTRIES,
) -> CorrelationTensor:
    """All order-``k`` cumulants, evaluated once per sorted index tuple."""
    _check_order(k, max_order)
    m = mom.modes
    if m**k > max_entries:
        raise GuardError(f"tensor with {m}^{k} entries exceeds guard {max_entries}")
    values = np.empty((m,) * k)
    memo: dict[tuple[int, ...], float] = {}
    for tup in itertools.combinations_with_replacement(range(m), k):
        v = cumulant(mom, tup, max_order, memo)
        for p in set(itertools.permutations(tup)):
            values[p] = v
    return CorrelationTensor(k, values)


# ---------------------------------------------------------------------------
# Fock-space oracle
# ---------------------------------------------------------------------------

ORACLE_MAX_MODES = 3
ORACLE_MAX_STATE = 2_000_000
ORACLE_TAIL_TOL = 1e-8


def _squeezed_vacuum(r: float, cutoff: int) -> tuple[np.ndarray, float]:
    """Amplitudes of ``exp(r (a^dag^2 - a^2) / 2)|0>`` up to ``cutoff`` photons.

    The squeeze operator is exponentiated in a padded Fock space so the kept
    amplitudes are converged; the norm beyond ``cutoff`` is returned as the
    truncation tail.
    """
    dim = 3 * cutoff + 40
    a = np.diag(np.sqrt(np.arange(1, dim)), 1)
    gen = 0.5 * r * (a.T @ a.T - a @ a)
    vac = np.zeros(dim)
    vac[0] = 1.0
    psi = expm(gen) @ vac
    return psi[: cutoff + 1], float(np.linalg.norm(psi[cutoff + 1 :]))


def _lower(state: np.ndarray, axis: int) -> np.ndarray:
    s = np.moveaxis(state, axis, 0)
    out = np.zeros_like(s)
    amp = np.sqrt(np.arange(1, s.shape[0]))
    out[:-1] = amp.reshape((-1,) + (1,) * (s.ndim - 1)) * s[1:]
    return np.moveaxis(out, 0, axis)


def _raise(state: np.ndarray, axis: int) -> np.ndarray:
    s = np.moveaxis(state, axis, 0)
    out = np.zeros_like(s)
    amp = np.sqrt(np.arange(1, s.shape[0]))
    out[1:] = amp.reshape((-1,) + (1,) * (s.ndim - 1)) * s[:-1]
    return np.moveaxis(out, 0, axis)


class FockOracle:
    """Photon-number moments of ``U S(r)|0>`` by explicit operator application.

    The squeezed input is held as a truncated product state; output-mode
    ladder operators ``b_x = sum_a U[x, a] a_a`` act on it directly, inside a
    Fock space padded far enough that no operator application is clipped.
    """

    def __init__(self, enc: EncodedSampler, cutoff: int, max_order: int = 4):
        m = enc.modes
        if m > ORACLE_MAX_MODES:
            raise GuardError(f"Fock oracle limited to {ORACLE_MAX_MODES} modes, got {m}")
        width = cutoff + 1 + 2 * max_order
        if width**m > ORACLE_MAX_STATE:
            raise GuardError(f"Fock state of {width}^{m} amplitudes exceeds guard")
        self.unitary = enc.unitary
        self.max_order = max_order
        tails = []
        state = np.ones((1,) * 0, dtype=complex)
        for r in enc.squeezing:
            amp, tail = _squeezed_vacuum(float(r), cutoff)
            padded = np.zeros(width, dtype=complex)
            padded[: cutoff + 1] = amp
            state = np.multiply.outer(state, padded)
            tails.append(tail)
        self.state = state
        kept = -math.expm1(sum(math.log1p(-t * t) for t in tails))
        self.tail = math.sqrt(max(kept, 0.0))
        self._moments: dict[tuple[int, ...], float] = {}

    def _apply_b(self, psi: np.ndarray, x: int, dagger: bool) -> np.ndarray:
        out = np.zeros_like(psi)
        for a, u in enumerate(self.unitary[x]):
            if u == 0:
                continue
            out += (np.conj(u) * _raise(psi, a)) if dagger else (u * _lower(psi, a))
        return out

    def moment(self, modes: tuple[int, ...]) -> float:
        if len(modes) > self.max_order:
            raise GuardError(f"oracle built for order <= {self.max_order}")
        key = tuple(sorted(modes))
        if key not in self._moments:
            phi = self.state
            for x in reversed(key):
                phi = self._apply_b(self._apply_b(phi, x, dagger=False), x, dagger=True)
            self._moments[key] = float(np.vdot(self.state, phi).real)
        return self._moments[key]

    def cumulant(self, modes: Sequence[int]) -> float:
        return _ursell(self.moment, list(modes))


def fock_oracle_cumulant(
    enc: EncodedSampler,
    modes: Sequence[int],
    cutoff: int | None = None,
    tail_tol: float = ORACLE_TAIL_TOL,
) -> tuple[float, float]:
    """Cumulant of ``n_x1..n_xk`` from the truncated Fock state, with its tail norm.

    With ``cutoff=None`` the smallest even cutoff meeting ``tail_tol`` is used.
    """
    k = len(modes)
    if cutoff is None:
        cutoff = oracle_cutoff(enc.squeezing, tail_tol)
    oracle = FockOracle(enc, cutoff, max_order=max(k, 1))
    if oracle.tail > tail_tol:
        raise OracleInconclusive(
            f"truncation tail {oracle.tail:.3e} above {tail_tol:.1e}; raise the cutoff"
        )
    return oracle.cumulant(modes), oracle.tail


def oracle_cutoff(squeezing: Sequence[float], tail_tol: float = ORACLE_TAIL_TOL, limit: int = 200) -> int:
    """Smallest even per-mode cutoff whose squeezed-vacuum tail meets ``tail_tol``."""
    r = float(max(squeezing, default=0.0))
    cutoff = 2
    while cutoff <= limit:
        if _squeezed_vacuum(r, cutoff)[1] * math.sqrt(max(len(squeezing), 1)) <= tail_tol:
            return cutoff
        cutoff += 2
    raise OracleInconclusive(f"no cutoff <= {limit} reaches tail {tail_tol:.1e} at r={r:.4g}")


# ---------------------------------------------------------------------------
# click-pattern probabilities
# ---------------------------------------------------------------------------

PATTERN_MAX_MODES = 10


def pattern_probability(enc: EncodedSampler, pattern: Sequence[int]) -> float:
    """Probability of a collision-free photon pattern.

    ``|Haf(B_S)|^2 / sqrt(det sigma_Q)`` with ``B = U diag(tanh r) U^T``
    restricted to the occupied modes and ``sigma_Q`` the Husimi covariance of
    the output state in the ``(a, a^dag)`` basis.
    """
    pattern = [int(p) for p in pattern]
    m = enc.modes
    if len(pattern) != m:
        raise ValueError(f"pattern length {len(pattern)} != {m} modes")
    if any(p not in (0, 1) for p in pattern):
        raise ValueError("only collision-free (0/1) patterns are supported")
    if m > PATTERN_MAX_MODES:
        raise GuardError(f"pattern probabilities limited to {PATTERN_MAX_MODES} modes")
    mom = moments_from_sampler(enc)
    eye = np.eye(m)
    sigma_q = np.block([[mom.n.T + eye, mom.e], [mom.e.conj(), mom.n + eye]])
    occupied = [i for i, p in enumerate(pattern) if p]
    sub = enc.kernel()[np.ix_(occupied, occupied)]
    return float(abs(hafnian(sub)) ** 2 / math.sqrt(np.linalg.det(sigma_q)))
