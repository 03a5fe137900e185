"""Hypocoercivity index and unitary reductions of semi-dissipative matrices.

Two independent routes to the index are provided: ``hc_index_definitional``
builds the matrices ``T_m = sum_j L_S^j L_H (L_S^*)^j`` until one is negative
definite, and ``hc_index_staircase`` counts the blocks of the staircase form of
``(L_S, L_H)``.  They are meant to cross-check each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from rkcert.errors import InputError, NotAsymptoticallyStable, WitnessNotFound
from rkcert.linalg import (
    TOL_PSD,
    adjoint,
    as_matrix,
    eig_tol,
    hermitian_split,
    is_hermitian,
    is_skew_hermitian,
    lambda_max,
    psd_sqrt,
    spectral_norm,
)

TOL_RANK = 1e-12


@dataclass
class HCCertificate:
    """Result of the definitional index computation.

    ``m_hc`` is ``None`` when no ``T_m`` with ``m <= max_m`` is negative definite.
    ``t_chain_max_eigs[k]`` is the largest eigenvalue of ``T_k`` of the input
    matrix and ``t_chain_tols[k]`` the matching tolerance ``tol * max(1, ||T_k||)``.
    The decision itself is taken on the unit-norm rescaling (see
    ``hc_index_definitional``), so near the threshold the two can disagree.
    """

    m_hc: int | None
    t_chain_max_eigs: list[float]
    t_chain_tols: list[float]
    witness: np.ndarray | None = None

    @property
    def finite(self) -> bool:
        return self.m_hc is not None


@dataclass
class RankDecision:
    """Singular values seen at one staircase step and the threshold applied."""

    step: int
    singular_values: list[float]
    threshold: float
    rank: int

    @property
    def gap(self) -> tuple[float, float]:
        """Smallest kept and largest dropped singular value (``nan`` if absent)."""
        kept = self.singular_values[: self.rank]
        dropped = self.singular_values[self.rank :]
        return (min(kept) if kept else math.nan, max(dropped) if dropped else math.nan)


@dataclass
class StaircaseForm:
    v: np.ndarray
    r: int
    block_sizes: list[int]
    j_t: np.ndarray
    r_t: np.ndarray
    rank_decisions: list[RankDecision] = field(default_factory=list)

    @property
    def n_last(self) -> int:
        return self.block_sizes[-1]

    def block(self, mat: np.ndarray, i: int, k: int) -> np.ndarray:
        """Block ``(i, k)`` (1-based, as in the block layout) of a transformed matrix."""
        off = np.concatenate([[0], np.cumsum(self.block_sizes)])
        return mat[off[i - 1] : off[i], off[k - 1] : off[k]]


@dataclass
class BlockDiagonalForm:
    v: np.ndarray
    l1: np.ndarray | None
    l2: np.ndarray | None

    @property
    def n1(self) -> int:
        return 0 if self.l1 is None else self.l1.shape[0]

    @property
    def n2(self) -> int:
        return 0 if self.l2 is None else self.l2.shape[0]


def _require_semidissipative(a: np.ndarray, tol: float | None) -> None:
    top = lambda_max(hermitian_split(a).h)
    if tol is None:
        tol = eig_tol(a)
    if top > tol:
        raise InputError(f"matrix is not semi-dissipative: Hermitian part has eigenvalue {top:.6g} > 0")


def hc_index_definitional(m, tol: float = TOL_PSD, max_m: int | None = None) -> HCCertificate:
    """Smallest ``k`` with ``T_k`` negative definite.

    The decision uses the matrix scaled to unit spectral norm.  ``T_k`` is not
    homogeneous in ``m``, but each summand is negative semidefinite, so the
    kernel of ``T_k`` (and hence the index) does not depend on the scale.
    ``T_k`` counts as
    negative definite when its largest eigenvalue is ``<= -tol * max(1, ||T_k||)``.

    Args:
        m: semi-dissipative matrix.
        tol: relative tolerance for the negative-definiteness decision.
        max_m: largest index tried; defaults to ``n``.

    Raises:
        InputError: if ``m`` is not semi-dissipative.
    """
    a = as_matrix(m)
    _require_semidissipative(a, None)
    n = a.shape[0]
    if max_m is None:
        max_m = n
    scale = spectral_norm(a)
    if scale == 0.0:
        return HCCertificate(None, [0.0] * (max_m + 1), [tol] * (max_m + 1))
    # decisions on the unit-norm matrix; reported eigenvalues from T_k of the input
    h, s = hermitian_split(a / scale)
    h0, s0 = hermitian_split(a)
    term, term0 = h, h0
    t, t0 = h.copy(), h0.copy()
    eigs, tols = [], []
    for k in range(max_m + 1):
        if k:
            term = s @ term @ adjoint(s)
            term0 = s0 @ term0 @ adjoint(s0)
            t = t + term
            t0 = t0 + term0
        lam = lambda_max(t)
        thr = tol * max(1.0, spectral_norm(t))
        eigs.append(lambda_max(t0))
        tols.append(tol * max(1.0, spectral_norm(t0)))
        if lam <= -thr:
            witness = None
            if k >= 1:
                try:
                    witness = witness_vector(a, k)
                except WitnessNotFound:
                    pass
            return HCCertificate(k, eigs, tols, witness)
    return HCCertificate(None, eigs, tols)


def _kernel_basis(stack: np.ndarray, n: int, rel: float) -> np.ndarray:
    """Orthonormal basis of the numerical null space of ``stack``."""
    if stack.size == 0:
        return np.eye(n, dtype=complex)
    _, sv, vh = np.linalg.svd(stack, full_matrices=True)
    thr = rel * max(1.0, sv[0] if sv.size else 0.0)
    rank = int(np.sum(sv > thr))
    return adjoint(vh[rank:])


def witness_vector(m, level: int, tol: float | None = None) -> np.ndarray:
    """Unit ``u0`` with ``(-L_H)^{1/2} L_S^j u0 = 0`` for ``j < level`` and nonzero at ``j = level``.

    The admissible set ``ker T_{level-1}`` is obtained as the null space of the
    stacked matrix ``[(-L_H)^{1/2} L_S^j]_{j<level}`` (same subspace, but
    singular values instead of their squares).  Inside it, the dominant right
    singular vector of ``(-L_H)^{1/2} L_S^level`` is returned.

    Args:
        m: semi-dissipative matrix.
        level: required level, ``0 <= level <= m_HC``.
        tol: minimal size of ``||(-L_H)^{1/2} L_S^level u0||`` relative to
            ``||m||^(level+1/2)``; defaults to ``sqrt(TOL_PSD)``.

    Raises:
        WitnessNotFound: if the kernel is trivial or the final quantity vanishes
            (this happens exactly when ``level > m_HC``).
    """
    a = as_matrix(m)
    _require_semidissipative(a, None)
    if level < 0:
        raise InputError("level must be non-negative")
    n = a.shape[0]
    rel = math.sqrt(TOL_PSD) if tol is None else tol
    scale = spectral_norm(a)
    if scale == 0.0:
        raise WitnessNotFound("zero matrix has no witness")
    h, s = hermitian_split(a / scale)
    sq = psd_sqrt(-h)
    powers = [sq]
    for _ in range(level):
        powers.append(powers[-1] @ s)
    basis = _kernel_basis(np.vstack(powers[:level]) if level else np.zeros((0, n)), n, rel)
    if basis.shape[1] == 0:
        raise WitnessNotFound(f"ker T_{level - 1} is trivial: level {level} exceeds the HC-index")
    _, sv, vh = np.linalg.svd(powers[level] @ basis)
    if sv[0] <= rel:
        raise WitnessNotFound(f"(-L_H)^(1/2) L_S^{level} vanishes on ker T_{level - 1}")
    u = basis @ vh[0].conj()
    u = u / np.linalg.norm(u)
    k = int(np.argmax(np.abs(u)))
    return u * (abs(u[k]) / u[k])


def staircase(j, r, tol: float = TOL_RANK) -> StaircaseForm:
    """Unitary staircase reduction of a skew-Hermitian/Hermitian pair.

    ``V`` is built block by block: first an orthonormal basis of ``range(R)``,
    then repeatedly the range of the coupling ``Z* J V_prev`` into the
    still-unresolved subspace ``Z``.  Ranks use the threshold
    ``n * tol * max(||J||, ||R||)``.  The result satisfies ``V J V* = j_t`` and
    ``V R V* = r_t``.

    Raises:
        InputError: if ``j`` is not skew-Hermitian, ``r`` not Hermitian, or ``r = 0``.
    """
    jj = as_matrix(j, "j")
    rr = as_matrix(r, "r")
    if jj.shape != rr.shape:
        raise InputError("j and r must have the same shape")
    if not is_skew_hermitian(jj):
        raise InputError("j must be skew-Hermitian")
    if not is_hermitian(rr):
        raise InputError("r must be Hermitian")
    n = jj.shape[0]
    scale = max(spectral_norm(jj), spectral_norm(rr))
    thr = n * tol * scale
    w, u = np.linalg.eigh((rr + adjoint(rr)) / 2)
    keep = np.abs(w) > thr
    order = np.argsort(-np.abs(w))
    decisions = [RankDecision(1, [float(x) for x in np.abs(w)[order]], thr, int(keep.sum()))]
    if not keep.any():
        raise InputError("r must be nonzero")
    if keep.all():
        v = np.eye(n, dtype=complex)
        return StaircaseForm(v, 2, [n, 0], jj.copy(), rr.copy(), decisions)

    blocks = [u[:, keep]]
    rest = u[:, ~keep]
    step = 1
    while rest.shape[1]:
        step += 1
        coupling = adjoint(rest) @ jj @ blocks[-1]
        uc, sv, _ = np.linalg.svd(coupling, full_matrices=True)
        k = int(np.sum(sv > thr))
        decisions.append(RankDecision(step, [float(x) for x in sv], thr, k))
        if k == 0:
            break
        blocks.append(rest @ uc[:, :k])
        rest = rest @ uc[:, k:]
    sizes = [b.shape[1] for b in blocks] + [rest.shape[1]]
    v = adjoint(np.hstack(blocks + [rest]))
    return StaircaseForm(v, len(sizes), sizes, v @ jj @ adjoint(v), v @ rr @ adjoint(v), decisions)


def hc_index_staircase(m, tol: float = TOL_RANK) -> int:
    """HC-index as ``r - 2`` from the staircase form of ``(L_S, L_H)``.

    Raises:
        InputError: if ``m`` is not semi-dissipative or ``L_H = 0``.
        NotAsymptoticallyStable: if the staircase leaves an uncoupled block.
    """
    a = as_matrix(m)
    _require_semidissipative(a, None)
    h, s = hermitian_split(a)
    if spectral_norm(h) <= a.shape[0] * tol * max(spectral_norm(a), 1e-300):
        raise InputError("Hermitian part vanishes; the staircase index needs L_H != 0")
    form = staircase(s, h, tol)
    if form.n_last:
        k = form.n_last
        raise NotAsymptoticallyStable(
            f"staircase leaves a skew-Hermitian block of size {k}", form.j_t[-k:, -k:]
        )
    return form.r - 2


def block_diagonalize(m, tol: float = TOL_RANK) -> BlockDiagonalForm:
    """Unitary ``V`` with ``V m V* = diag(L1, L2)``, ``L1`` asymptotically stable, ``L2`` skew.

    Raises:
        InputError: if ``m`` is not semi-dissipative.
    """
    a = as_matrix(m)
    _require_semidissipative(a, None)
    n = a.shape[0]
    h, s = hermitian_split(a)
    if spectral_norm(h) <= n * tol * max(spectral_norm(a), 1e-300):
        return BlockDiagonalForm(np.eye(n, dtype=complex), None, a.copy())
    form = staircase(s, h, tol)
    t = form.v @ a @ adjoint(form.v)
    k = n - form.n_last
    l2 = t[k:, k:] if form.n_last else None
    return BlockDiagonalForm(form.v, t[:k, :k], l2)


def border_eigenvector(m, tol: float | None = None) -> np.ndarray | None:
    """Eigenvector ``v`` of ``L_S`` with ``L_H v = 0``, or ``None`` if there is none.

    For semi-dissipative ``m`` such a vector exists exactly when ``m`` has an
    eigenvalue on the imaginary axis.  Eigenspaces of ``L_S`` are resolved by
    clustering; inside each, the smallest singular direction of ``L_H`` is tested.
    """
    a = as_matrix(m)
    h, s = hermitian_split(a)
    scale = max(1.0, spectral_norm(a))
    if tol is None:
        tol = math.sqrt(TOL_PSD) * scale
    w, q = np.linalg.eigh(1j * s)
    start = 0
    n = len(w)
    while start < n:
        stop = start + 1
        while stop < n and w[stop] - w[stop - 1] <= tol:
            stop += 1
        basis = q[:, start:stop]
        _, sv, vh = np.linalg.svd(h @ basis)
        if sv[-1] <= tol:
            v = basis @ vh[-1].conj()
            return v / np.linalg.norm(v)
        start = stop
    return None
