"""Random semi-dissipative test matrices with a prescribed HC-index.

Instances are assembled directly in staircase form (block tridiagonal skew
part with full-row-rank subdiagonal blocks, Hermitian part supported on the
first block) and then hidden by a random unitary congruence.
"""

from __future__ import annotations

import os

import numpy as np

from rkcert.linalg import adjoint, random_unitary

SEED_ENV = "RKCERT_SEED"


def make_rng(seed: int | None = None) -> np.random.Generator:
    """Generator seeded from ``seed``, else ``$RKCERT_SEED``, else 0."""
    if seed is None:
        seed = int(os.environ.get(SEED_ENV, "0"))
    return np.random.default_rng(seed)


def _cplx(rng, *shape) -> np.ndarray:
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def _with_singular_values(rng, rows: int, cols: int, lo: float, hi: float) -> np.ndarray:
    """``rows x cols`` matrix (rows <= cols) with singular values drawn from ``[lo, hi]``."""
    u = random_unitary(rows, rng)
    v = random_unitary(cols, rng)
    sig = np.zeros((rows, cols))
    sig[np.arange(rows), np.arange(rows)] = rng.uniform(lo, hi, rows)
    return u @ sig @ adjoint(v)


def block_sizes(n: int, m_hc: int, rng: np.random.Generator) -> list[int]:
    """Random nonincreasing composition of ``n`` into ``m_hc + 1`` positive parts."""
    k = m_hc + 1
    if n < k:
        raise ValueError(f"n = {n} is too small for HC-index {m_hc}")
    sizes = [1] * k
    for _ in range(n - k):
        sizes[int(rng.integers(k))] += 1
    return sorted(sizes, reverse=True)


def structured_instance(
    n: int,
    m_hc: int,
    rng: np.random.Generator | None = None,
    coupling: tuple[float, float] = (0.5, 2.0),
    hide: bool = True,
) -> np.ndarray:
    """Asymptotically stable semi-dissipative ``n x n`` matrix with HC-index ``m_hc``."""
    rng = make_rng() if rng is None else rng
    sizes = block_sizes(n, m_hc, rng)
    off = np.concatenate([[0], np.cumsum(sizes)])
    j = np.zeros((n, n), dtype=complex)
    for i, ni in enumerate(sizes):
        x = _cplx(rng, ni, ni)
        j[off[i] : off[i + 1], off[i] : off[i + 1]] = (x - adjoint(x)) / 4
        if i + 1 < len(sizes):
            sub = _with_singular_values(rng, sizes[i + 1], ni, *coupling)
            j[off[i + 1] : off[i + 2], off[i] : off[i + 1]] = sub
            j[off[i] : off[i + 1], off[i + 1] : off[i + 2]] = -adjoint(sub)
    q = random_unitary(sizes[0], rng)
    r = np.zeros((n, n), dtype=complex)
    r[: sizes[0], : sizes[0]] = -(q * rng.uniform(*coupling, sizes[0])) @ adjoint(q)
    mat = j + r
    if hide:
        u = random_unitary(n, rng)
        mat = u @ mat @ adjoint(u)
    return mat


def with_skew_block(mat: np.ndarray, k: int, rng: np.random.Generator | None = None) -> np.ndarray:
    """Append an uncoupled ``k x k`` skew-Hermitian block and hide it: semi-dissipative, not asymptotically stable."""
    rng = make_rng() if rng is None else rng
    n = mat.shape[0]
    x = _cplx(rng, k, k)
    out = np.zeros((n + k, n + k), dtype=complex)
    out[:n, :n] = mat
    out[n:, n:] = (x - adjoint(x)) / 2
    u = random_unitary(n + k, rng)
    return u @ out @ adjoint(u)
