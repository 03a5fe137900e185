"""JSON/CSV readers and writers for matrices, schemes, reports and sweeps.

Matrix JSON::

    {"n": 3, "entries": [[[re, im], ...], ...]}

rows are row-major; an entry may also be a bare number.  Tableau JSON is
``{"s": 4, "a": [[...]], "b": [...]}`` and polynomial JSON ``{"c": [c_0, ...]}``
(normalized coefficients ``c_j = j! d_j``).  Report JSON keeps a fixed key
order and shortest round-trip floats, so ``dumps(loads(text)) == text``.
"""

from __future__ import annotations

import csv
import enum
import io
import json
import math
from pathlib import Path

import numpy as np

from rkcert.classifier import StabilityReport, Verdict
from rkcert.errors import InputError
from rkcert.rk import ButcherTableau, StabilityPolynomial, stability_polynomial


def _number(x) -> complex:
    if isinstance(x, (list, tuple)):
        if len(x) != 2:
            raise InputError(f"complex entry must be [re, im], got {x!r}")
        return complex(float(x[0]), float(x[1]))
    if isinstance(x, (int, float)) and not isinstance(x, bool):
        return complex(float(x), 0.0)
    raise InputError(f"not a number: {x!r}")


def matrix_from_json(obj: dict) -> np.ndarray:
    try:
        rows = obj["entries"]
    except (KeyError, TypeError) as exc:
        raise InputError("matrix JSON needs an 'entries' field") from exc
    mat = np.array([[_number(x) for x in row] for row in rows], dtype=complex)
    n = obj.get("n", mat.shape[0])
    if mat.ndim != 2 or mat.shape != (n, n):
        raise InputError(f"matrix JSON declares n = {n} but entries have shape {mat.shape}")
    return mat


def matrix_to_json(mat: np.ndarray) -> dict:
    a = np.asarray(mat, dtype=complex)
    return {
        "n": int(a.shape[0]),
        "entries": [[[float(z.real), float(z.imag)] for z in row] for row in a],
    }


def _vector(xs) -> np.ndarray:
    vals = np.array([_number(x) for x in xs], dtype=complex)
    return vals.real if np.all(vals.imag == 0) else vals


def tableau_from_json(obj: dict, name: str = "") -> ButcherTableau:
    try:
        a = np.array([_vector(row) for row in obj["a"]])
        b = _vector(obj["b"])
    except (KeyError, TypeError) as exc:
        raise InputError("tableau JSON needs 'a' and 'b'") from exc
    if "s" in obj and obj["s"] != b.shape[0]:
        raise InputError(f"tableau declares s = {obj['s']} but has {b.shape[0]} weights")
    return ButcherTableau(a, b, name=name)


def polynomial_from_json(obj: dict, name: str = "") -> StabilityPolynomial:
    try:
        c = _vector(obj["c"])
    except (KeyError, TypeError) as exc:
        raise InputError("polynomial JSON needs 'c'") from exc
    return StabilityPolynomial.from_c(c, name=name)


def load_json(path: str | Path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def load_scheme_file(path: str | Path, kind: str) -> StabilityPolynomial:
    obj = load_json(path)
    name = Path(path).stem
    if kind == "tableau":
        return stability_polynomial(tableau_from_json(obj, name))
    return polynomial_from_json(obj, name)


def clean(x):
    """Convert numpy scalars/arrays and non-finite floats into JSON-safe values."""
    if isinstance(x, dict):
        return {str(k): clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [clean(v) for v in x]
    if isinstance(x, np.ndarray):
        return clean(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else None
    if isinstance(x, complex):
        return [clean(x.real), clean(x.imag)]
    if isinstance(x, enum.Enum):
        return clean(x.value)
    return x


def dumps(obj) -> str:
    return json.dumps(clean(obj), indent=2, allow_nan=False) + "\n"


def verdict_to_json(v: Verdict) -> dict:
    return {"conclusion": v.conclusion.value, "decided_by": v.decided_by, "evidence": v.evidence}


def report_to_json(rep: StabilityReport) -> dict:
    ind = rep.indicators
    out = {
        "scheme": rep.name,
        "p": rep.p,
        "degree": rep.degree,
        "stages": rep.stages,
        "c": rep.c,
        "order_ambiguous": rep.order_ambiguous,
        "indicators": {"parity": ind.parity, "gamma": ind.gamma, "delta": ind.delta, "c_p1": ind.c_p1, "c_p2": ind.c_p2},
        "condition_c": rep.condition_c_value,
        "index_bound": rep.index_bound,
        "verdicts": {
            "class_as": verdict_to_json(rep.class_as),
            "imag_axis": verdict_to_json(rep.imag_axis),
            "overall": verdict_to_json(rep.overall),
            "weak_form": verdict_to_json(rep.weak_form),
        },
    }
    if rep.pair is not None:
        out["verdicts"]["pair"] = verdict_to_json(rep.pair)
    return out


def sweep_csv(sweep) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["tau", "norm", "excess"])
    for t, nrm, ex in zip(sweep.grid, sweep.norms, sweep.excess):
        w.writerow([repr(float(t)), repr(float(nrm)), repr(float(ex))])
    return buf.getvalue()
