"""Theorem-backed strong-stability verdicts for explicit Runge-Kutta schemes.

Every verdict is three-valued.  ``Undecided`` is returned whenever no result
covers the case (the even-order gap, ``delta_{p+1} = 0``) or a deciding
quantity falls inside the marginal band.

Citation tokens:

* ``Thm 2.1``: strong stability splits into the asymptotically stable
  semi-dissipative class and purely imaginary scalars.
* ``Thm 2.3(a)``, ``Thm 2.3(b)``, ``Thm 2.3(c)``: index bound, coefficient
  condition (c), singleton failure.
* ``Cor 2.4``: ``s = p`` with ``p = 0, 1 mod 4`` is not strongly stable.
* ``Thm 2.5``: combined failure conditions.
* ``Thm 3.6``: gamma/delta indicators on the imaginary axis.
* ``Thm 2.7``: weak form equals imaginary-axis stability.
* ``Table 1``: the ``s = p`` summary table.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from rkcert.errors import InputError
from rkcert.hypocoercivity import hc_index_definitional, hc_index_staircase
from rkcert.linalg import Stability, Truth, as_matrix, classify_stability, is_semidissipative
from rkcert.rk import (
    TOL_MARGIN,
    KSIndicators,
    StabilityPolynomial,
    condition_c,
    condition_thm25,
    ks_indicators,
)


class Conclusion(enum.Enum):
    YES = "Yes"
    NO = "No"
    UNDECIDED = "Undecided"


@dataclass
class Verdict:
    conclusion: Conclusion
    decided_by: str
    evidence: dict = field(default_factory=dict)

    def __str__(self) -> str:
        return f"{self.conclusion.value} ({self.decided_by})"


@dataclass
class StabilityReport:
    name: str
    p: int
    degree: int
    stages: int | None
    c: list
    indicators: KSIndicators
    condition_c_value: float
    order_ambiguous: bool
    imag_axis: Verdict
    class_as: Verdict
    index_bound: int
    overall: Verdict
    weak_form: Verdict
    pair: Verdict | None = None


def _require_real(poly: StabilityPolynomial) -> Verdict | None:
    if not poly.is_real:
        return Verdict(Conclusion.UNDECIDED, "complex coefficients", {"c": [str(x) for x in poly.c]})
    return None


def classify_imag_axis(ind: KSIndicators, tol: float = TOL_MARGIN) -> Verdict:
    """Local stability on the imaginary axis from the sign of gamma (odd p) or delta (even p)."""
    if ind.p % 2:
        ev = {"gamma": ind.gamma, "p": ind.p}
        if ind.gamma >= tol:
            return Verdict(Conclusion.YES, "Thm 3.6", ev)
        if ind.gamma <= -tol:
            return Verdict(Conclusion.NO, "Thm 3.6", ev)
        ev["note"] = "gamma = 0 would force c_{p+1} = 1, contradicting the order"
        return Verdict(Conclusion.NO, "Thm 3.6", ev)
    ev = {"delta": ind.delta, "p": ind.p}
    if ind.delta >= tol:
        return Verdict(Conclusion.YES, "Thm 3.6", ev)
    if ind.delta <= -tol:
        return Verdict(Conclusion.NO, "Thm 3.6", ev)
    return Verdict(Conclusion.UNDECIDED, "open: delta=0", ev)


def index_bound(p: int) -> int:
    """Largest HC-index ``m`` with ``2m + 1 <= p``."""
    return (p - 1) // 2


def classify_class_AS(poly: StabilityPolynomial, tol: float = TOL_MARGIN) -> tuple[Verdict, int]:
    """Verdict on the whole asymptotically stable semi-dissipative class, plus the guaranteed index bound."""
    bound = index_bound(poly.p)
    bad = _require_real(poly)
    if bad:
        return bad, bound
    cond = condition_c(poly, tol)
    ev = {"condition_c": cond.value, "p": poly.p, "index_bound": bound}
    if cond.holds is Truth.TRUE:
        return Verdict(Conclusion.NO, "Thm 2.3(b)", ev), bound
    if cond.holds is Truth.MARGINAL:
        return Verdict(Conclusion.UNDECIDED, "marginal: condition (c)", ev), bound
    if poly.is_truncated_exponential and poly.p % 4 == 3:
        return Verdict(Conclusion.YES, "Table 1", ev), bound
    if poly.p % 2 == 0:
        return Verdict(Conclusion.UNDECIDED, "open: even-p gap", ev), bound
    return Verdict(Conclusion.UNDECIDED, "open: no covering theorem", ev), bound


def classify_weak_form(ind: KSIndicators, tol: float = TOL_MARGIN) -> Verdict:
    v = classify_imag_axis(ind, tol)
    return Verdict(v.conclusion, "Thm 2.7", dict(v.evidence))


def classify_overall(poly: StabilityPolynomial, tol: float = TOL_MARGIN) -> StabilityReport:
    """Full report; rule precedence for the overall citation is Thm 2.5, Thm 3.6, Thm 2.3(b), Table 1, Thm 2.1."""
    bad = _require_real(poly)
    if bad:
        raise InputError("classification needs real stability-polynomial coefficients")
    ind = ks_indicators(poly)
    imag = classify_imag_axis(ind, tol)
    cas, bound = classify_class_AS(poly, tol)
    weak = classify_weak_form(ind, tol)
    thm25 = condition_thm25(poly, tol)
    cond = condition_c(poly, tol)

    triggered = []
    if thm25 is Truth.TRUE:
        corollary = poly.is_truncated_exponential and poly.p % 4 in (0, 1)
        triggered.append("Cor 2.4" if corollary else "Thm 2.5")
    if imag.conclusion is Conclusion.NO:
        triggered.append("Thm 3.6")
    if cas.conclusion is Conclusion.NO:
        triggered.append("Thm 2.3(b)")
    evidence = {
        "imag_axis": imag.conclusion.value,
        "class_as": cas.conclusion.value,
        "thm25": thm25.value,
        "condition_c": cond.value,
    }
    if triggered:
        evidence["triggered"] = triggered
        overall = Verdict(Conclusion.NO, triggered[0], evidence)
    elif imag.conclusion is Conclusion.YES and cas.conclusion is Conclusion.YES:
        overall = Verdict(Conclusion.YES, "Thm 2.1", evidence)
    else:
        overall = Verdict(Conclusion.UNDECIDED, "Thm 2.1", evidence)

    return StabilityReport(
        name=poly.name,
        p=poly.p,
        degree=poly.degree,
        stages=poly.stages,
        c=[float(x) for x in poly.c],
        indicators=ind,
        condition_c_value=cond.value,
        order_ambiguous=poly.order_ambiguous,
        imag_axis=imag,
        class_as=cas,
        index_bound=bound,
        overall=overall,
        weak_form=weak,
    )


def classify_pair(poly: StabilityPolynomial, m, tol: float = TOL_MARGIN) -> Verdict:
    """Strong stability with respect to the single matrix ``m``.

    The index comes from the definitional computation; the staircase index is
    recorded as a cross-check only.

    Raises:
        InputError: if ``m`` is not semi-dissipative or not asymptotically stable.
    """
    a = as_matrix(m)
    if not is_semidissipative(a):
        raise InputError("matrix is not semi-dissipative")
    cls = classify_stability(a)
    if cls.tag is not Stability.ASYMPTOTICALLY_STABLE:
        raise InputError(f"matrix is not asymptotically stable ({cls.tag.value})")
    cert = hc_index_definitional(a)
    m_hc = cert.m_hc
    ev: dict = {"m_hc": m_hc, "p": poly.p}
    try:
        ev["m_hc_staircase"] = hc_index_staircase(a)
    except InputError:
        ev["m_hc_staircase"] = None
    if m_hc is None:
        return Verdict(Conclusion.UNDECIDED, "no finite HC-index found", ev)
    ev["2m_hc+1"] = 2 * m_hc + 1
    if 2 * m_hc + 1 <= poly.p:
        return Verdict(Conclusion.YES, "Thm 2.3(a)", ev)
    if not poly.is_real:
        return Verdict(Conclusion.UNDECIDED, "complex coefficients", ev)
    cond = condition_c(poly, tol)
    ev["condition_c"] = cond.value
    if cond.holds is Truth.TRUE:
        return Verdict(Conclusion.NO, "Thm 2.3(c)", ev)
    return Verdict(Conclusion.UNDECIDED, "no covering theorem", ev)


def verdict_triple(report: StabilityReport) -> tuple[str, str, str]:
    return (report.class_as.conclusion.value, report.imag_axis.conclusion.value, report.overall.conclusion.value)


def pair_report(poly: StabilityPolynomial, m) -> StabilityReport:
    report = classify_overall(poly)
    report.pair = classify_pair(poly, np.asarray(m))
    return report
