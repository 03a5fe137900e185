"""Strong-stability certification for explicit Runge-Kutta schemes on semi-dissipative linear systems."""

from rkcert.catalog import matrix, scheme
from rkcert.classifier import Conclusion, Verdict, classify_overall, classify_pair
from rkcert.errors import InputError, NotAsymptoticallyStable, RKCertError
from rkcert.hypocoercivity import (
    block_diagonalize,
    hc_index_definitional,
    hc_index_staircase,
    staircase,
    witness_vector,
)
from rkcert.linalg import hermitian_split, solve_lyapunov
from rkcert.rk import ButcherTableau, StabilityPolynomial, ks_indicators, stability_polynomial
from rkcert.verifier import fit_exp_norm_exponent, gram_defect, norm_sweep, quadratic_form_identity

__all__ = [
    "ButcherTableau",
    "Conclusion",
    "InputError",
    "NotAsymptoticallyStable",
    "RKCertError",
    "StabilityPolynomial",
    "Verdict",
    "block_diagonalize",
    "classify_overall",
    "classify_pair",
    "fit_exp_norm_exponent",
    "gram_defect",
    "hc_index_definitional",
    "hc_index_staircase",
    "hermitian_split",
    "ks_indicators",
    "matrix",
    "norm_sweep",
    "quadratic_form_identity",
    "scheme",
    "solve_lyapunov",
    "stability_polynomial",
    "staircase",
    "witness_vector",
]
