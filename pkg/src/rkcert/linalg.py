"""Dense complex linear algebra used throughout rkcert.

All routines take and return ``numpy`` arrays of dtype ``complex128`` (real
input is promoted).  Tolerances follow one convention: sign decisions on
eigenvalues use ``TOL_EIG * max(1, ||m||_2)``; a value inside ``(-tol, tol)``
is *marginal* and is reported as such instead of being rounded to a side.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.linalg

from rkcert.errors import DimensionError, InputError, NumericalError, SpectrumError

TOL_SYM = 1e-12
TOL_SQRT = 1e-12
TOL_EIG = 1e-9
TOL_PSD = 1e-9
TOL_LYAP = 1e-10

_EPS = np.finfo(float).eps


class Truth(enum.Enum):
    """Three-valued outcome of a numerical sign test."""

    TRUE = "true"
    FALSE = "false"
    MARGINAL = "marginal"

    def __bool__(self) -> bool:
        return self is Truth.TRUE


def strictly_negative(value: float, tol: float) -> Truth:
    """Decide ``value < 0`` with a marginal band of half-width ``tol``."""
    if value <= -tol:
        return Truth.TRUE
    if value >= tol:
        return Truth.FALSE
    return Truth.MARGINAL


def as_matrix(m, name: str = "matrix") -> np.ndarray:
    """Validate ``m`` as a finite square matrix and return a complex copy."""
    a = np.array(m, dtype=complex)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise DimensionError(f"{name} must be a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InputError(f"{name} has non-finite entries")
    return a


def adjoint(m: np.ndarray) -> np.ndarray:
    return m.conj().T


def eig_tol(m: np.ndarray, rel: float = TOL_EIG) -> float:
    """Absolute tolerance for sign decisions on eigenvalues of ``m``."""
    return rel * max(1.0, spectral_norm(m))


class HermitianSplit(NamedTuple):
    h: np.ndarray
    s: np.ndarray


def hermitian_split(m) -> HermitianSplit:
    """Split ``m`` into Hermitian part ``(m + m*)/2`` and skew part ``(m - m*)/2``."""
    a = as_matrix(m)
    ah = adjoint(a)
    return HermitianSplit((a + ah) / 2, (a - ah) / 2)


def is_hermitian(m: np.ndarray, tol: float = TOL_SYM) -> bool:
    scale = max(1.0, spectral_norm(m))
    return bool(np.max(np.abs(m - adjoint(m))) <= tol * scale)


def is_skew_hermitian(m: np.ndarray, tol: float = TOL_SYM) -> bool:
    scale = max(1.0, spectral_norm(m))
    return bool(np.max(np.abs(m + adjoint(m))) <= tol * scale)


def spectral_norm(m) -> float:
    """Largest singular value."""
    a = np.asarray(m)
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def lambda_max(h: np.ndarray) -> float:
    """Largest eigenvalue of a Hermitian matrix (the Hermitian part is used)."""
    h = (h + adjoint(h)) / 2
    return float(np.linalg.eigvalsh(h)[-1])


class Stability(enum.Enum):
    ASYMPTOTICALLY_STABLE = "AsymptoticallyStable"
    LYAPUNOV_STABLE_NOT_AS = "LyapunovStableNotAS"
    UNSTABLE = "Unstable"


@dataclass(frozen=True)
class StabilityClass:
    tag: Stability
    spectral_abscissa: float
    defective_imag_eigs: bool


def _cluster(values: np.ndarray, radius: float) -> list[list[int]]:
    """Group eigenvalues into clusters by single linkage at ``radius``."""
    clusters: list[list[int]] = []
    for i in range(len(values)):
        hits = [c for c in clusters if np.min(np.abs(values[c] - values[i])) <= radius]
        merged = [i]
        for c in hits:
            merged.extend(c)
            clusters.remove(c)
        clusters.append(sorted(merged))
    return clusters


def classify_stability(m, tol: float | None = None) -> StabilityClass:
    """Classify ``m`` as asymptotically stable, Lyapunov stable or unstable.

    Eigenvalues on the imaginary axis (within ``tol``) are grouped into clusters;
    a cluster is defective when the numerical nullity of ``m - mean(cluster) I``
    is smaller than the cluster size.

    Args:
        m: square matrix.
        tol: absolute tolerance for the sign of real parts; defaults to
            ``TOL_EIG * max(1, ||m||_2)``.
    """
    a = as_matrix(m)
    n = a.shape[0]
    if tol is None:
        tol = eig_tol(a)
    try:
        lam = np.linalg.eigvals(a)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigenvalue computation failed: {exc}") from exc
    abscissa = float(np.max(lam.real))
    if abscissa < -tol:
        return StabilityClass(Stability.ASYMPTOTICALLY_STABLE, abscissa, False)

    # a defective eigenvalue of multiplicity k splits by ~eps**(1/k); cluster at sqrt(eps)
    scale = max(1.0, spectral_norm(a))
    radius = max(tol, math.sqrt(_EPS) * scale)
    on_axis = np.flatnonzero(np.abs(lam.real) <= tol)
    defective = False
    for cluster in _cluster(lam[on_axis], radius):
        center = lam[on_axis][cluster].mean()
        sv = np.linalg.svd(a - center * np.eye(n), compute_uv=False)
        nullity = int(np.sum(sv <= 10 * radius))
        if nullity < len(cluster):
            defective = True
            break
    if abscissa > tol or defective:
        return StabilityClass(Stability.UNSTABLE, abscissa, defective)
    return StabilityClass(Stability.LYAPUNOV_STABLE_NOT_AS, abscissa, False)


def is_semidissipative(m, tol: float | None = None) -> bool:
    """True iff the largest eigenvalue of the Hermitian part is at most ``tol``."""
    a = as_matrix(m)
    if tol is None:
        tol = eig_tol(a)
    return lambda_max(hermitian_split(a).h) <= tol


def is_dissipative(m, tol: float | None = None) -> bool:
    a = as_matrix(m)
    if tol is None:
        tol = eig_tol(a)
    return lambda_max(hermitian_split(a).h) <= -tol


@dataclass(frozen=True)
class LyapunovCertificate:
    """A weight ``p`` with residual ``q = -(m* p + p m)``."""

    p: np.ndarray
    q: np.ndarray
    strict: bool


def solve_lyapunov(m, q=None) -> np.ndarray:
    """Solve ``m* P + P m = -q`` for Hermitian positive definite ``P``.

    Args:
        m: asymptotically stable matrix.
        q: Hermitian positive definite right-hand side; identity by default.

    Raises:
        SpectrumError: if ``m`` is not asymptotically stable.
    """
    a = as_matrix(m)
    n = a.shape[0]
    qq = np.eye(n, dtype=complex) if q is None else as_matrix(q, "q")
    if qq.shape != a.shape:
        raise DimensionError("m and q must have the same shape")
    if not is_hermitian(qq):
        raise InputError("q must be Hermitian")
    cls = classify_stability(a)
    if cls.tag is not Stability.ASYMPTOTICALLY_STABLE:
        raise SpectrumError(
            f"Lyapunov solve needs an asymptotically stable matrix "
            f"(spectral abscissa {cls.spectral_abscissa:.3g})"
        )
    p = scipy.linalg.solve_continuous_lyapunov(adjoint(a), -qq)
    p = (p + adjoint(p)) / 2
    resid = spectral_norm(adjoint(a) @ p + p @ a + qq)
    if resid > TOL_LYAP * max(1.0, spectral_norm(qq)) * max(1.0, spectral_norm(a) * spectral_norm(p)):
        raise NumericalError(f"Lyapunov residual too large: {resid:.3g}")
    return p


def lyapunov_certificate(m, p) -> LyapunovCertificate:
    """Package ``p`` with its residual and whether the inequality is strict."""
    a = as_matrix(m)
    pp = as_matrix(p, "p")
    q = -(adjoint(a) @ pp + pp @ a)
    q = (q + adjoint(q)) / 2
    strict = verify_lyapunov(a, pp, strict=True)
    return LyapunovCertificate(pp, q, strict)


def verify_lyapunov(m, p, strict: bool = False, tol: float | None = None) -> bool:
    """Check ``p > 0`` and ``m* p + p m <= 0`` (``< 0`` when ``strict``)."""
    a = as_matrix(m)
    pp = as_matrix(p, "p")
    if pp.shape != a.shape:
        raise DimensionError("m and p must have the same shape")
    if not is_hermitian(pp):
        raise InputError("p must be Hermitian")
    resid = adjoint(a) @ pp + pp @ a
    if tol is None:
        tol = TOL_PSD * max(1.0, spectral_norm(resid), spectral_norm(pp))
    if np.linalg.eigvalsh((pp + adjoint(pp)) / 2)[0] <= tol:
        return False
    top = lambda_max(resid)
    return top <= -tol if strict else top <= tol


def _hpd_eigh(p, name: str = "p") -> tuple[np.ndarray, np.ndarray]:
    pp = as_matrix(p, name)
    if not is_hermitian(pp):
        raise InputError(f"{name} must be Hermitian")
    w, v = np.linalg.eigh((pp + adjoint(pp)) / 2)
    if w[0] <= TOL_SQRT * max(1.0, w[-1]):
        raise InputError(f"{name} is not positive definite (smallest eigenvalue {w[0]:.3g})")
    return w, v


def hpd_sqrt(p) -> np.ndarray:
    """Hermitian positive definite square root via eigendecomposition."""
    w, v = _hpd_eigh(p)
    s = (v * np.sqrt(w)) @ adjoint(v)
    return (s + adjoint(s)) / 2


def psd_sqrt(h: np.ndarray) -> np.ndarray:
    """Square root of a Hermitian positive semi-definite matrix.

    Eigenvalues below ``n * eps * max|w|`` are rounding noise of a singular
    matrix and are set to zero; otherwise their square roots (``~1e-8``) would
    swamp the exact null space.
    """
    w, v = np.linalg.eigh((h + adjoint(h)) / 2)
    floor = w.size * _EPS * (np.abs(w).max() if w.size else 0.0)
    w = np.where(w > floor, w, 0.0)
    return (v * np.sqrt(w)) @ adjoint(v)


def hpd_inv_sqrt(p) -> np.ndarray:
    """``(p^{-1})^{1/2}``."""
    w, v = _hpd_eigh(p)
    s = (v / np.sqrt(w)) @ adjoint(v)
    return (s + adjoint(s)) / 2


def transform_to_dissipative(m, p) -> np.ndarray:
    """Return ``P^{1/2} m P^{-1/2}``; semi-dissipative when ``(m, p)`` is a Lyapunov pair."""
    a = as_matrix(m)
    return hpd_sqrt(p) @ a @ hpd_inv_sqrt(p)


def expm1(m, t: float = 1.0) -> np.ndarray:
    """Compute ``exp(t m) - I`` without forming the identity part.

    Scaling and squaring on the shifted form: Taylor series for
    ``exp(B) - I`` with ``||B||_1 <= 1/2``, then ``F <- F^2 + 2F`` per squaring.
    Keeping the ``-I`` out of the arithmetic preserves relative accuracy of the
    small deviation from the identity that short-time analyses look at.
    """
    a = as_matrix(m) * t
    n = a.shape[0]
    norm1 = float(np.linalg.norm(a, 1))
    if norm1 == 0.0:
        return np.zeros((n, n), dtype=complex)
    k = max(0, math.ceil(math.log2(norm1 / 0.5)))
    b = a / 2.0**k
    f = np.zeros_like(b)
    term = np.eye(n, dtype=complex)
    for j in range(1, 40):
        term = term @ b / j
        f += term
        if np.linalg.norm(term, 1) <= _EPS * np.linalg.norm(f, 1):
            break
    for _ in range(k):
        f = f @ f + 2 * f
    if not np.all(np.isfinite(f)):
        raise NumericalError("matrix exponential overflowed")
    return f


def matrix_exponential(m, t: float = 1.0) -> np.ndarray:
    """``exp(t m)``."""
    f = expm1(m, t)
    return f + np.eye(f.shape[0])


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary matrix."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))
