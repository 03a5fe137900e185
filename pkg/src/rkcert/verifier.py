"""Numerical certification: norm sweeps, short-time exponents, Gram defects, counterexamples.

Norms that sit within rounding of 1 are computed through their deviation from
the identity.  With ``N = R(tau L) - I`` (Horner without the constant term),
``||R(tau L)||^2 - 1`` is the top eigenvalue of ``N + N* + N* N``, which keeps
full relative accuracy even when the excess is ``1e-20``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from rkcert.errors import InputError, InsufficientDataError
from rkcert.hypocoercivity import witness_vector
from rkcert.linalg import (
    adjoint,
    as_matrix,
    expm1,
    hermitian_split,
    hpd_inv_sqrt,
    hpd_sqrt,
    psd_sqrt,
    spectral_norm,
)
from rkcert.rk import StabilityPolynomial, eval_poly_minus_identity

TOL_VIOL = 1e-11
FIT_LO = 1e-12
FIT_HI = 1e-2
MIN_FIT_POINTS = 4


def default_grid(m, points: int = 200, lo: float = 1e-6, hi: float = 1e-1) -> np.ndarray:
    """Log-spaced steps in ``[lo, hi] / ||m||_2``."""
    scale = spectral_norm(m) or 1.0
    return np.logspace(math.log10(lo), math.log10(hi), points) / scale


def _check_grid(grid) -> np.ndarray:
    g = np.asarray(grid, dtype=float)
    if g.ndim != 1 or g.size == 0 or np.any(g <= 0) or np.any(np.diff(g) <= 0):
        raise InputError("grid must be a non-empty, positive, strictly increasing sequence")
    return g


def _excess_from_defect(n: np.ndarray) -> tuple[float, np.ndarray]:
    """``||I + n|| - 1`` and the top right singular vector of ``I + n``."""
    g = n + adjoint(n) + adjoint(n) @ n
    w, v = np.linalg.eigh((g + adjoint(g)) / 2)
    lam = float(w[-1])
    return lam / (1.0 + math.sqrt(max(1.0 + lam, 0.0))), v[:, -1]


@dataclass
class SweepResult:
    grid: np.ndarray
    norms: np.ndarray
    excess: np.ndarray
    first_violation: tuple[float, float] | None
    max_excess: float
    weighted: bool = False

    @property
    def threshold(self) -> float:
        """Largest grid step below which no violation occurs (``0`` if the first step violates)."""
        bad = np.flatnonzero(self.excess > TOL_VIOL)
        if bad.size == 0:
            return float(self.grid[-1])
        return float(self.grid[bad[0] - 1]) if bad[0] > 0 else 0.0


def _weight_pair(weight) -> tuple[np.ndarray, np.ndarray] | None:
    if weight is None:
        return None
    try:
        return hpd_sqrt(weight), hpd_inv_sqrt(weight)
    except InputError as exc:
        raise InputError(f"weight must be Hermitian positive definite: {exc}") from exc


def _step_defect(poly, a, tau, wp) -> np.ndarray:
    n = eval_poly_minus_identity(poly, a, tau)
    if wp is not None:
        n = wp[0] @ n @ wp[1]
    return n


def norm_sweep(poly: StabilityPolynomial, m, grid=None, weight=None) -> SweepResult:
    """``||R(tau m)||_2`` (or ``||P^{1/2} R(tau m) P^{-1/2}||_2``) over a grid of steps.

    A violation is a step where the norm exceeds ``1 + TOL_VIOL``.

    Raises:
        InputError: bad grid or a weight that is not Hermitian positive definite.
    """
    a = as_matrix(m)
    g = _check_grid(default_grid(a) if grid is None else grid)
    wp = _weight_pair(weight)
    excess = np.empty(g.size)
    for i, tau in enumerate(g):
        excess[i], _ = _excess_from_defect(_step_defect(poly, a, tau, wp))
    bad = np.flatnonzero(excess > TOL_VIOL)
    first = (float(g[bad[0]]), float(1.0 + excess[bad[0]])) if bad.size else None
    return SweepResult(g, 1.0 + excess, excess, first, float(excess.max()), wp is not None)


@dataclass
class Counterexample:
    tau: float
    u: np.ndarray
    growth: float


def counterexample_search(poly: StabilityPolynomial, m, grid=None, weight=None) -> Counterexample | None:
    """Step and initial vector with the largest one-step growth, if it exceeds ``TOL_VIOL``.

    At each step the candidate is the dominant right singular vector of the
    (weighted) propagator.
    """
    a = as_matrix(m)
    g = _check_grid(default_grid(a) if grid is None else grid)
    wp = _weight_pair(weight)
    best: Counterexample | None = None
    for tau in g:
        growth, u = _excess_from_defect(_step_defect(poly, a, tau, wp))
        if best is None or growth > best.growth:
            best = Counterexample(float(tau), u, growth)
    if best is None or best.growth <= TOL_VIOL:
        return None
    if wp is not None:
        # map back from the transformed variable P^{1/2} u
        best.u = wp[1] @ best.u
        best.u /= math.sqrt(abs(np.vdot(best.u, weight @ best.u)))
    return best


def exp_norm_deficit(m, t: float) -> float:
    """``1 - ||exp(t m)||_2`` computed without cancellation."""
    f = expm1(m, t)
    excess, _ = _excess_from_defect(f)
    return -excess


@dataclass
class ExponentFit:
    a_hat: float
    c_hat: float
    residual: float
    window: tuple[float, float]
    points: int


def fit_short_time_exponent(
    f: Callable[[float], float], window: tuple[float, float], points: int = 64
) -> ExponentFit:
    """Least-squares slope of ``log(1 - f(tau))`` against ``log tau``.

    Only points with ``1 - f(tau)`` in ``[1e-12, 1e-2]`` enter the fit.

    Raises:
        InsufficientDataError: fewer than four usable points.
    """
    lo, hi = window
    if not 0 < lo < hi:
        raise InputError("window must satisfy 0 < lo < hi")
    taus = np.logspace(math.log10(lo), math.log10(hi), points)
    deficit = np.array([1.0 - f(t) for t in taus])
    keep = (deficit >= FIT_LO) & (deficit <= FIT_HI)
    if keep.sum() < MIN_FIT_POINTS:
        raise InsufficientDataError(
            f"only {int(keep.sum())} points with 1 - f in [{FIT_LO:g}, {FIT_HI:g}] inside {window}"
        )
    x, y = np.log(taus[keep]), np.log(deficit[keep])
    (slope, icpt), res, *_ = np.polyfit(x, y, 1, full=True)
    rms = math.sqrt(float(res[0]) / keep.sum()) if res.size else 0.0
    return ExponentFit(float(slope), math.exp(icpt), rms, (float(taus[keep][0]), float(taus[keep][-1])), int(keep.sum()))


def exponent_window(m, lo: float = FIT_LO, hi: float = FIT_HI) -> tuple[float, float]:
    """Steps where ``1 - ||exp(t m)||_2`` reaches ``lo`` and ``hi``.

    The deficit is nondecreasing in ``t`` for semi-dissipative ``m``; each end is
    located by bisection in ``log t``.
    """
    a = as_matrix(m)
    scale = spectral_norm(a)
    if scale == 0.0:
        raise InsufficientDataError("zero matrix has no decay")

    def locate(target: float) -> float:
        left, right = -12.0, 0.0
        while exp_norm_deficit(a, 10.0**right / scale) < target:
            right += 1.0
            if right > 6:
                raise InsufficientDataError(f"deficit never reaches {target:g}")
        for _ in range(60):
            mid = 0.5 * (left + right)
            if exp_norm_deficit(a, 10.0**mid / scale) < target:
                left = mid
            else:
                right = mid
        return 10.0**right / scale

    return locate(lo), locate(hi)


def fit_exp_norm_exponent(m, points: int = 64) -> ExponentFit:
    """Fit the short-time exponent of ``||exp(t m)||_2`` on an automatically selected window."""
    a = as_matrix(m)
    lo, hi = exponent_window(a)
    # widen slightly so the end points fall inside the usable band
    return fit_short_time_exponent(lambda t: 1.0 - exp_norm_deficit(a, t), (lo * 1.0001, hi * 0.9999), points)


@dataclass
class GramDefect:
    grid: np.ndarray
    defect_norms: np.ndarray
    fitted_order: float | None
    measured_coefficient: float | None
    predicted_coefficient: float
    series_coefficient: float
    degenerate: bool


def _gram_minus_identity_rk(poly, a, tau) -> np.ndarray:
    n = eval_poly_minus_identity(poly, a, tau)
    return n + adjoint(n) + adjoint(n) @ n


def _gram_minus_identity_exp(a, tau) -> np.ndarray:
    f = expm1(a, tau)
    return f + adjoint(f) + adjoint(f) @ f


def _series_leading(poly: StabilityPolynomial, a: np.ndarray) -> np.ndarray:
    """Order ``p+1`` coefficient of ``G - Q`` from the binomial expansions of both Gram matrices."""
    j = poly.p + 1
    n = a.shape[0]
    pw = [np.eye(n, dtype=complex)]
    for _ in range(j):
        pw.append(pw[-1] @ a)
    acc = np.zeros((n, n), dtype=complex)
    for k in range(j + 1):
        term = adjoint(pw[k]) @ pw[j - k] * math.comb(j, k)
        acc += (complex(poly.coef(k)).conjugate() * poly.coef(j - k) - 1.0) * term
    return acc / math.factorial(j)


def gram_defect(poly: StabilityPolynomial, m, grid=None) -> GramDefect:
    """Compare ``G = R(tau L)* R(tau L)`` with ``Q = exp(tau L*) exp(tau L)``.

    The fitted log-log slope of ``||G - Q||_2`` is the observed order; the
    predicted leading coefficient is ``|c_{p+1} - 1| ||L^{p+1} + (L*)^{p+1}||_2 / (p+1)!``.
    A vanishing leading matrix is reported as ``degenerate`` (order at least ``p + 2``).
    """
    a = as_matrix(m)
    scale = spectral_norm(a)
    p = poly.p
    if grid is None:
        grid = np.logspace(-2.5, -1.5, 16) / (scale or 1.0)
    g = _check_grid(grid)
    lead = np.linalg.matrix_power(a, p + 1)
    lead = lead + adjoint(lead)
    c_tilde = complex(poly.coef(p + 1)) - 1.0
    predicted = abs(c_tilde) * spectral_norm(lead) / math.factorial(p + 1)
    series = spectral_norm(_series_leading(poly, a))
    norms = np.array(
        [spectral_norm(_gram_minus_identity_rk(poly, a, t) - _gram_minus_identity_exp(a, t)) for t in g]
    )
    degenerate = predicted <= 1e-12 * max(1.0, scale) ** (p + 1)
    if np.all(norms == 0.0):
        return GramDefect(g, norms, None, None, predicted, series, True)
    pos = norms > 0
    slope = None
    if pos.sum() >= 2:
        slope = float(np.polyfit(np.log(g[pos]), np.log(norms[pos]), 1)[0])
    measured = float(norms[0] / g[0] ** (p + 1))
    return GramDefect(g, norms, slope, measured, predicted, series, degenerate)


@dataclass
class QuadraticFormCheck:
    lhs: float
    rhs: float
    match: bool
    full_power_norm_sq: float


def quadratic_form_identity(m, u0, level: int, tol: float = 1e-9) -> QuadraticFormCheck:
    """Evaluate both sides of ``u0*(L^{2k+1} + (L*)^{2k+1}) u0 = -2 (-1)^k ||(-L_H)^{1/2} L_S^k u0||^2``.

    ``full_power_norm_sq`` is ``||(-L_H)^{1/2} L^k u0||^2``, which agrees with the
    ``L_S`` version on the admissible subspace.

    Raises:
        InputError: if ``u0`` does not satisfy the witness conditions at ``level``.
    """
    a = as_matrix(m)
    u = np.asarray(u0, dtype=complex).reshape(-1)
    if u.shape[0] != a.shape[0]:
        raise InputError("u0 has the wrong length")
    h, s = hermitian_split(a)
    sq = psd_sqrt(-h)
    scale = max(1.0, spectral_norm(a))
    nu = np.linalg.norm(u)
    v = u.copy()
    for j in range(level):
        if np.linalg.norm(sq @ v) > math.sqrt(tol) * scale ** (j + 0.5) * nu:
            raise InputError(f"u0 violates the witness condition at j = {j}")
        v = s @ v
    top = sq @ v
    if np.linalg.norm(top) <= math.sqrt(tol) * scale ** (level + 0.5) * nu:
        raise InputError(f"(-L_H)^(1/2) L_S^{level} u0 vanishes")
    pw = np.linalg.matrix_power(a, 2 * level + 1)
    lhs = np.vdot(u, (pw + adjoint(pw)) @ u)
    rhs = -2.0 * (-1) ** level * float(np.vdot(top, top).real)
    full = sq @ np.linalg.matrix_power(a, level) @ u
    lhs_r = float(lhs.real)
    match = abs(lhs_r - rhs) <= 1e-8 * (abs(lhs_r) + abs(rhs) + 1.0) and abs(lhs.imag) <= 1e-8 * (abs(lhs_r) + 1.0)
    return QuadraticFormCheck(lhs_r, rhs, bool(match), float(np.vdot(full, full).real))


def witness_identity(m, level: int) -> QuadraticFormCheck:
    """Quadratic-form identity evaluated on the witness vector at ``level``."""
    return quadratic_form_identity(m, witness_vector(m, level), level)


def violation_threshold(poly: StabilityPolynomial, m, grid: Sequence[float] | None = None, weight=None) -> float:
    """Largest grid step below which the (weighted) one-step norm never exceeds 1."""
    return norm_sweep(poly, m, grid, weight).threshold
