"""Butcher tableaux, stability polynomials and the scalar coefficient conditions."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from rkcert.errors import DimensionError, InconsistentSchemeError, InputError, NotExplicitError
from rkcert.linalg import Truth, as_matrix, strictly_negative

TOL_ORDER = 1e-10
# |c_{p+1} - 1| inside (TOL_ORDER, ORDER_AMBIGUITY) is flagged as an ambiguous order
ORDER_AMBIGUITY = 1e-6
# half-width of the marginal band for scalar sign decisions
TOL_MARGIN = 1e-9


@dataclass(frozen=True)
class ButcherTableau:
    a: np.ndarray
    b: np.ndarray
    name: str = ""

    def __post_init__(self):
        a = np.atleast_2d(np.asarray(self.a))
        b = np.atleast_1d(np.asarray(self.b))
        dtype = complex if (np.iscomplexobj(a) or np.iscomplexobj(b)) else float
        a = a.astype(dtype)
        b = b.astype(dtype)
        s = b.shape[0]
        if a.shape != (s, s):
            raise DimensionError(f"a must be {s}x{s} to match b, got {a.shape}")
        if np.any(np.triu(a) != 0):
            raise NotExplicitError("a must be strictly lower triangular for an explicit scheme")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def s(self) -> int:
        return self.b.shape[0]

    def step(self, m, tau: float, u: np.ndarray) -> np.ndarray:
        """One step of the stage recursion for ``du/dt = m u``."""
        mat = np.asarray(m)
        k = []
        for i in range(self.s):
            y = u + tau * sum((self.a[i, j] * k[j] for j in range(i)), np.zeros_like(u))
            k.append(mat @ y)
        return u + tau * sum((self.b[i] * k[i] for i in range(self.s)), np.zeros_like(u))


@dataclass
class StabilityPolynomial:
    """``R(z) = sum_j d_j z^j`` with normalized coefficients ``c_j = j! d_j``.

    ``p`` is detected on construction (see ``linear_order``); ``stages`` records
    the stage count of the originating tableau when known.
    """

    d: np.ndarray
    name: str = ""
    stages: int | None = None
    p: int = field(init=False, default=-1)
    order_ambiguous: bool = field(init=False, default=False)

    def __post_init__(self):
        d = np.atleast_1d(np.asarray(self.d))
        d = d.astype(complex if np.iscomplexobj(d) and np.any(d.imag != 0) else float)
        if d.ndim != 1 or d.size == 0:
            raise InputError("coefficient list must be a non-empty vector")
        nz = np.flatnonzero(d)
        self.d = d[: (nz[-1] + 1 if nz.size else 1)]
        linear_order(self)

    @classmethod
    def from_c(cls, c, name: str = "", stages: int | None = None) -> StabilityPolynomial:
        c = np.asarray(c)
        fact = np.array([math.factorial(j) for j in range(c.size)], dtype=float)
        return cls(c / fact, name=name, stages=stages)

    @classmethod
    def truncated_exponential(cls, s: int) -> StabilityPolynomial:
        return cls.from_c(np.ones(s + 1), name=f"texp{s}", stages=s)

    @property
    def degree(self) -> int:
        return self.d.size - 1

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self.d)

    @property
    def c(self) -> np.ndarray:
        fact = np.array([math.factorial(j) for j in range(self.d.size)], dtype=float)
        return self.d * fact

    def coef(self, j: int):
        """Normalized coefficient ``c_j`` (zero beyond the degree)."""
        if j < 0 or j > self.degree:
            return 0.0
        return self.d[j] * math.factorial(j)

    @property
    def is_truncated_exponential(self) -> bool:
        return self.degree == self.p


def stability_polynomial(t: ButcherTableau) -> StabilityPolynomial:
    """Coefficients ``d_0 = 1``, ``d_j = b . A^(j-1) 1`` of the stability polynomial."""
    d = [1.0 + 0 * t.b[0]]
    v = np.ones(t.s, dtype=t.a.dtype)
    for _ in range(t.s):
        d.append(t.b @ v)
        v = t.a @ v
    return StabilityPolynomial(np.array(d), name=t.name, stages=t.s)


def linear_order(poly: StabilityPolynomial, tol: float = TOL_ORDER) -> int:
    """Largest ``p`` with ``|c_j - 1| <= tol`` for all ``j <= p``; stored on ``poly``.

    Raises:
        InconsistentSchemeError: if ``R(0) != 1``.
    """
    if abs(poly.coef(0) - 1) > tol:
        raise InconsistentSchemeError(f"R(0) = {poly.coef(0)} != 1")
    p = 0
    while abs(poly.coef(p + 1) - 1) <= tol:
        p += 1
    poly.p = p
    poly.order_ambiguous = abs(poly.coef(p + 1) - 1) < ORDER_AMBIGUITY
    return p


@dataclass(frozen=True)
class KSIndicators:
    """Imaginary-axis indicators: ``gamma`` for odd ``p``, ``delta`` for even ``p``."""

    p: int
    gamma: float | None
    delta: float | None
    c_p1: float
    c_p2: float

    @property
    def parity(self) -> str:
        return "odd" if self.p % 2 else "even"


def _real_coef(poly: StabilityPolynomial, j: int) -> float:
    c = complex(poly.coef(j))
    if c.imag != 0:
        raise InputError(f"c_{j} = {c} is not real; real coefficients are required")
    return c.real


def ks_indicators(poly: StabilityPolynomial) -> KSIndicators:
    p = poly.p
    c1 = _real_coef(poly, p + 1)
    c2 = _real_coef(poly, p + 2)
    if p % 2:
        return KSIndicators(p, (-1) ** ((p + 1) // 2) * (1 - c1), None, c1, c2)
    return KSIndicators(p, None, (-1) ** (p // 2) * (c2 - (p + 2) * c1 + (p + 1)), c1, c2)


@dataclass(frozen=True)
class ConditionValue:
    """Left-hand side of a strict inequality ``value < 0`` and its three-valued truth."""

    value: float
    holds: Truth


def condition_c(poly: StabilityPolynomial, tol: float = TOL_MARGIN) -> ConditionValue:
    """Sufficient condition for failure of strong stability on asymptotically stable, semi-dissipative matrices."""
    p = poly.p
    c1 = _real_coef(poly, p + 1)
    if p % 2:
        value = (-1) ** ((p + 1) // 2) * (1 - c1)
    else:
        value = 1 + (-1) ** (p // 2) * (c1 - 1) * math.comb(p, p // 2)
    return ConditionValue(value, strictly_negative(value, tol))


def condition_thm25(poly: StabilityPolynomial, tol: float = TOL_MARGIN) -> Truth:
    """Combined non-strong-stability test: odd ``p`` uses gamma, even ``p`` delta or condition (c)."""
    ind = ks_indicators(poly)
    if poly.p % 2:
        return strictly_negative(ind.gamma, tol)
    first = strictly_negative(ind.delta, tol)
    second = condition_c(poly, tol).holds
    if Truth.TRUE in (first, second):
        return Truth.TRUE
    if Truth.MARGINAL in (first, second):
        return Truth.MARGINAL
    return Truth.FALSE


def eval_poly(poly: StabilityPolynomial, z: complex) -> complex:
    acc = poly.d[-1]
    for dj in poly.d[-2::-1]:
        acc = acc * z + dj
    return acc


def eval_poly_minus_identity(poly: StabilityPolynomial, m, tau: float) -> np.ndarray:
    """``R(tau m) - I`` by Horner's rule, never adding the identity.

    Works on a single matrix or a stack ``(..., n, n)``.
    """
    x = tau * np.asarray(m, dtype=complex)
    n = x.shape[-1]
    eye = np.eye(n)
    acc = poly.d[-1] * eye
    for dj in poly.d[-2:0:-1]:
        acc = dj * eye + x @ acc
    if poly.degree == 0:
        return np.zeros_like(x)
    return x @ acc


def eval_poly_matrix(poly: StabilityPolynomial, m, tau: float = 1.0) -> np.ndarray:
    """``R(tau m)``."""
    a = as_matrix(m)
    return eval_poly_minus_identity(poly, a, tau) + np.eye(a.shape[0])
