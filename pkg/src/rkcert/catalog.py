"""Bundled schemes and fixture matrices."""

from __future__ import annotations

import numpy as np

from rkcert.rk import ButcherTableau, StabilityPolynomial, stability_polynomial

TABLEAUX = {
    "euler": ButcherTableau([[0.0]], [1.0], name="euler"),
    "heun2": ButcherTableau([[0, 0], [1, 0]], [0.5, 0.5], name="heun2"),
    "heun3": ButcherTableau(
        [[0, 0, 0], [1 / 3, 0, 0], [0, 2 / 3, 0]], [1 / 4, 0, 3 / 4], name="heun3"
    ),
    "kutta3": ButcherTableau(
        [[0, 0, 0], [1 / 2, 0, 0], [-1, 2, 0]], [1 / 6, 2 / 3, 1 / 6], name="kutta3"
    ),
    "rk4": ButcherTableau(
        [[0, 0, 0, 0], [0.5, 0, 0, 0], [0, 0.5, 0, 0], [0, 0, 1, 0]],
        [1 / 6, 1 / 3, 1 / 3, 1 / 6],
        name="rk4",
    ),
}


def scheme(name: str) -> StabilityPolynomial:
    """Stability polynomial of a catalog scheme (``euler``, ``rk4``, ``texp1`` .. ``texp8``, ...)."""
    if name in TABLEAUX:
        return stability_polynomial(TABLEAUX[name])
    if name.startswith("texp") and name[4:].isdigit() and 1 <= int(name[4:]) <= 8:
        return StabilityPolynomial.truncated_exponential(int(name[4:]))
    raise KeyError(f"unknown scheme {name!r}; known: {', '.join(scheme_names())}")


def scheme_names() -> list[str]:
    return list(TABLEAUX) + [f"texp{s}" for s in range(1, 9)]


SUN_SHU = -np.array([[1, 2, 2], [0, 1, 2], [0, 0, 1]], dtype=float)
LEVY_TADMOR = -5.0 * (np.eye(5) + np.triu(2 * np.ones((5, 5)), 1))
# Jordan-basis factor of -SUN_SHU; P = W W* makes SUN_SHU strictly dissipative
WW = np.array([[1, 0, 0], [0, 2, 0], [0, 2, 4]], dtype=float)

MATRICES = {
    "sunshu": SUN_SHU,
    "levytadmor": LEVY_TADMOR,
    "minus-identity": -np.eye(3),
    "w": WW,
    "ww-star": WW @ WW.T,
    # L_H = diag(-1, 0) coupled by a rotation: HC-index 1
    "hc1": np.array([[-1.0, 1.0], [-1.0, 0.0]]),
    "skew2": np.array([[0.0, 1.0], [-1.0, 0.0]]),
}

MATRIX_NOTES = {
    "sunshu": "3x3 semi-dissipative, HC-index 2",
    "levytadmor": "5x5 semi-dissipative, HC-index 4",
    "minus-identity": "-I (3x3), HC-index 0",
    "w": "W with P = W W*",
    "ww-star": "weight P = W W* for sunshu",
    "hc1": "2x2 semi-dissipative, HC-index 1",
    "skew2": "2x2 real skew matrix, no finite HC-index",
}


def matrix(name: str) -> np.ndarray:
    if name not in MATRICES:
        raise KeyError(f"unknown matrix {name!r}; known: {', '.join(MATRICES)}")
    return MATRICES[name].astype(complex)
