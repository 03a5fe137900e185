"""``rkcert`` command-line front end.

Exit codes: 0 for Yes / no violation, 3 for No / violation found, 4 for
Undecided, 2 for malformed input or library errors.
"""

from __future__ import annotations

import argparse
import math
import sys
import time
from pathlib import Path

import numpy as np

from rkcert import catalog
from rkcert.classifier import Conclusion, classify_overall, classify_pair
from rkcert.errors import RKCertError
from rkcert.formats import (
    dumps,
    load_json,
    load_scheme_file,
    matrix_from_json,
    matrix_to_json,
    report_to_json,
    sweep_csv,
    verdict_to_json,
)
from rkcert.hypocoercivity import (
    TOL_RANK,
    block_diagonalize,
    hc_index_definitional,
    staircase,
)
from rkcert.instances import make_rng, structured_instance
from rkcert.linalg import (
    TOL_PSD,
    hermitian_split,
    lambda_max,
    solve_lyapunov,
    spectral_norm,
)
from rkcert.verifier import counterexample_search, fit_exp_norm_exponent, gram_defect, norm_sweep

EXIT_OK, EXIT_ERROR, EXIT_NO, EXIT_UNDECIDED = 0, 2, 3, 4
_EXIT = {Conclusion.YES: EXIT_OK, Conclusion.NO: EXIT_NO, Conclusion.UNDECIDED: EXIT_UNDECIDED}


class CLIError(Exception):
    pass


def _g(x) -> str:
    """Shortest round-trip rendering for floats; ``None`` and non-finite values are kept readable."""
    if x is None:
        return "-"
    if isinstance(x, (complex, np.complexfloating)) and x.imag != 0:
        return f"{_g(x.real)}{'+' if x.imag >= 0 else '-'}{_g(abs(x.imag))}i"
    if isinstance(x, (complex, np.complexfloating)):
        x = x.real
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    return repr(x) if math.isfinite(x) else str(x)


def load_matrix(source: str) -> np.ndarray:
    if source in catalog.MATRICES:
        return catalog.matrix(source)
    if Path(source).is_file():
        return matrix_from_json(load_json(source))
    raise CLIError(f"{source!r} is neither a catalog matrix ({', '.join(catalog.MATRICES)}) nor a file")


def load_scheme(args):
    if args.tableau:
        return load_scheme_file(args.tableau, "tableau")
    if args.poly:
        return load_scheme_file(args.poly, "poly")
    try:
        return catalog.scheme(args.catalog)
    except KeyError as exc:
        raise CLIError(exc.args[0]) from exc


def _matrix_arg(args) -> np.ndarray:
    source = args.matrix or args.catalog
    if source is None:
        raise CLIError("a matrix is required (--matrix NAME|FILE or --catalog NAME)")
    return load_matrix(source)


def _grid(args) -> np.ndarray:
    if not 0 < args.grid_min < args.grid_max or args.grid_points < 2:
        raise CLIError("grid needs 0 < --grid-min < --grid-max and --grid-points >= 2")
    return np.logspace(math.log10(args.grid_min), math.log10(args.grid_max), args.grid_points)


def _emit(args, text: str, obj) -> None:
    sys.stdout.write(dumps(obj) if args.format == "json" else text)


def _require_semidissipative(mat: np.ndarray, tol_eig: float) -> None:
    top = lambda_max(hermitian_split(mat).h)
    if top > tol_eig * max(1.0, spectral_norm(mat)):
        raise CLIError(f"matrix is not semi-dissipative: L_H has positive eigenvalue {_g(top)}")


# --- commands -----------------------------------------------------------------


def cmd_analyze_scheme(args) -> int:
    rep = classify_overall(load_scheme(args))
    ind = rep.indicators
    lines = [
        f"scheme      {rep.name or '-'}",
        f"order p     {rep.p}" + ("  (ambiguous: a coefficient is close to 1)" if rep.order_ambiguous else ""),
        f"stages s    {_g(rep.stages)}",
        f"degree      {rep.degree}",
        "c           " + " ".join(_g(c) for c in rep.c),
        f"gamma       {_g(ind.gamma)}" if ind.p % 2 else f"delta       {_g(ind.delta)}",
        f"cond (c)    {_g(rep.condition_c_value)}  (holds when < 0)",
        f"index bound m_HC <= {rep.index_bound}",
        f"class AS    {rep.class_as}",
        f"imag axis   {rep.imag_axis}",
        f"overall     {rep.overall}",
        f"weak form   {rep.weak_form}",
    ]
    _emit(args, "\n".join(lines) + "\n", report_to_json(rep))
    return _EXIT[rep.overall.conclusion]


def cmd_hc_index(args) -> int:
    mat = _matrix_arg(args)
    _require_semidissipative(mat, args.tol_eig)
    t0 = time.perf_counter()
    cert = hc_index_definitional(mat, tol=args.tol_eig)
    h, s = hermitian_split(mat)
    form = staircase(s, h, args.tol_rank) if spectral_norm(h) > 0 else None
    elapsed = time.perf_counter() - t0
    m_stair = None
    if form is not None and form.n_last == 0:
        m_stair = form.r - 2
    obj = {
        "m_hc_definitional": cert.m_hc,
        "m_hc_staircase": m_stair,
        "t_chain_max_eigs": cert.t_chain_max_eigs,
        "staircase": None if form is None else {
            "r": form.r,
            "block_sizes": form.block_sizes,
            "rank_decisions": [
                {"step": d.step, "singular_values": d.singular_values, "threshold": d.threshold,
                 "rank": d.rank, "gap": list(d.gap)}
                for d in form.rank_decisions
            ],
        },
    }
    lines = [
        f"m_HC (definitional)  {_g(cert.m_hc)}",
        f"m_HC (staircase)     {_g(m_stair)}",
        "max eig T_k          " + " ".join(_g(x) for x in cert.t_chain_max_eigs),
    ]
    if form is not None:
        sizes = form.block_sizes[:-1] if form.n_last == 0 else form.block_sizes
        lines.append(f"staircase r = {form.r}, blocks ({','.join(map(str, sizes))})")
        if form.n_last:
            lines.append(f"uncoupled skew block of size {form.n_last}: not asymptotically stable")
        for d in form.rank_decisions:
            kept, dropped = d.gap
            lines.append(
                f"  step {d.step}: rank {d.rank}, threshold {_g(d.threshold)}, "
                f"smallest kept {_g(kept)}, largest dropped {_g(dropped)}"
            )
    if args.timing:
        lines.append(f"elapsed {elapsed:.4f} s")
    _emit(args, "\n".join(lines) + "\n", obj)
    return EXIT_OK


def cmd_staircase(args) -> int:
    mat = _matrix_arg(args)
    _require_semidissipative(mat, args.tol_eig)
    h, s = hermitian_split(mat)
    form = staircase(s, h, args.tol_rank)
    recon = form.v.conj().T @ (form.j_t + form.r_t) @ form.v
    err = spectral_norm(recon - mat)
    obj = {
        "r": form.r,
        "block_sizes": form.block_sizes,
        "reconstruction_error": err,
        "v": matrix_to_json(form.v),
        "j_tilde": matrix_to_json(form.j_t),
        "r_tilde": matrix_to_json(form.r_t),
        "rank_decisions": [{"step": d.step, "singular_values": d.singular_values, "rank": d.rank}
                           for d in form.rank_decisions],
    }
    text = (
        f"r = {form.r}, block sizes {tuple(form.block_sizes)}\n"
        f"reconstruction error {_g(err)}\n"
        + "".join(f"  step {d.step}: singular values {' '.join(_g(x) for x in d.singular_values)}, rank {d.rank}\n"
                  for d in form.rank_decisions)
    )
    _emit(args, text, obj)
    return EXIT_OK


def cmd_block_diag(args) -> int:
    mat = _matrix_arg(args)
    _require_semidissipative(mat, args.tol_eig)
    bd = block_diagonalize(mat, args.tol_rank)
    obj = {
        "n1": bd.n1,
        "n2": bd.n2,
        "v": matrix_to_json(bd.v),
        "l1": None if bd.l1 is None else matrix_to_json(bd.l1),
        "l2": None if bd.l2 is None else matrix_to_json(bd.l2),
    }
    text = f"asymptotically stable block: {bd.n1}\nskew-Hermitian block: {bd.n2}\n"
    _emit(args, text, obj)
    return EXIT_OK


def cmd_classify_pair(args) -> int:
    poly = load_scheme(args)
    mat = load_matrix(args.matrix)
    v = classify_pair(poly, mat)
    text = f"{v}\n" + "".join(f"  {k}: {_g(x) if not isinstance(x, str) else x}\n" for k, x in v.evidence.items())
    _emit(args, text, {"scheme": poly.name, "matrix": args.matrix, "verdict": verdict_to_json(v)})
    return _EXIT[v.conclusion]


def _weight(args, mat):
    if args.weight is None:
        return None
    if args.weight == "auto":
        return solve_lyapunov(mat)
    return load_matrix(args.weight)


def cmd_verify(args) -> int:
    poly = load_scheme(args)
    mat = load_matrix(args.matrix)
    weight = _weight(args, mat)
    grid = _grid(args)
    sweep = norm_sweep(poly, mat, grid, weight)
    cex = counterexample_search(poly, mat, grid, weight) if sweep.first_violation else None
    summary = {
        "scheme": poly.name,
        "matrix": args.matrix,
        "weight": args.weight,
        "points": int(grid.size),
        "firstViolation": None if sweep.first_violation is None else
        {"tau": sweep.first_violation[0], "norm": sweep.first_violation[1]},
        "maxExcess": sweep.max_excess,
        "threshold": sweep.threshold,
        "counterexample": None if cex is None else {"tau": cex.tau, "growth": cex.growth},
    }
    if args.format == "csv":
        sys.stdout.write(sweep_csv(sweep))
    elif args.format == "json":
        sys.stdout.write(dumps(summary))
    else:
        if sweep.first_violation:
            tau, nrm = sweep.first_violation
            sys.stdout.write(f"violation: ||R(tau L)|| = {_g(nrm)} at tau = {_g(tau)}\n")
            sys.stdout.write(f"largest violation-free step {_g(sweep.threshold)}\n")
            if cex is not None:
                sys.stdout.write(f"worst growth {_g(cex.growth)} at tau = {_g(cex.tau)}\n")
        else:
            sys.stdout.write(f"no violation on {grid.size} steps in [{_g(grid[0])}, {_g(grid[-1])}]\n")
        sys.stdout.write(f"max excess {_g(sweep.max_excess)}\n")
    return EXIT_NO if sweep.first_violation else EXIT_OK


def cmd_fit_exponent(args) -> int:
    mat = _matrix_arg(args)
    fit = fit_exp_norm_exponent(mat)
    obj = {"a_hat": fit.a_hat, "c_hat": fit.c_hat, "residual": fit.residual, "window": list(fit.window),
           "points": fit.points}
    text = (
        f"a_hat {_g(fit.a_hat)}\nc_hat {_g(fit.c_hat)}\nresidual {_g(fit.residual)}\n"
        f"window [{_g(fit.window[0])}, {_g(fit.window[1])}] with {fit.points} points\n"
    )
    _emit(args, text, obj)
    return EXIT_OK


def cmd_gram_defect(args) -> int:
    poly = load_scheme(args)
    mat = load_matrix(args.matrix)
    gd = gram_defect(poly, mat)
    obj = {
        "fitted_order": gd.fitted_order,
        "measured_coefficient": gd.measured_coefficient,
        "predicted_coefficient": gd.predicted_coefficient,
        "series_coefficient": gd.series_coefficient,
        "degenerate": gd.degenerate,
    }
    text = (
        f"fitted order {_g(gd.fitted_order)}\n"
        f"leading coefficient measured {_g(gd.measured_coefficient)}, predicted {_g(gd.predicted_coefficient)}, "
        f"series {_g(gd.series_coefficient)}\n"
        + ("degenerate: defect vanishes on the grid\n" if gd.degenerate else "")
    )
    _emit(args, text, obj)
    return EXIT_OK


def cmd_catalog(args) -> int:
    if args.action == "list":
        lines = ["schemes:"] + [f"  {n}" for n in catalog.scheme_names()]
        lines += ["matrices:"] + [f"  {n:16s}{catalog.MATRIX_NOTES[n]}" for n in catalog.MATRICES]
        _emit(args, "\n".join(lines) + "\n",
              {"schemes": catalog.scheme_names(), "matrices": dict(catalog.MATRIX_NOTES)})
        return EXIT_OK
    if args.action == "show":
        if args.name is None:
            raise CLIError("catalog show needs a NAME")
        if args.name in catalog.MATRICES:
            sys.stdout.write(dumps(matrix_to_json(catalog.matrix(args.name))))
        else:
            try:
                poly = catalog.scheme(args.name)
            except KeyError as exc:
                raise CLIError(exc.args[0]) from exc
            sys.stdout.write(dumps({"c": poly.c}))
        return EXIT_OK
    # random
    rng = make_rng(args.seed)
    sys.stdout.write(dumps(matrix_to_json(structured_instance(args.n, args.index, rng))))
    return EXIT_OK


# --- parser -------------------------------------------------------------------


def _add_common(p: argparse.ArgumentParser, formats=("text", "json")) -> None:
    p.add_argument("--format", choices=formats, default="text")
    p.add_argument("--tol-eig", type=float, default=TOL_PSD, help="relative eigenvalue tolerance")
    p.add_argument("--tol-rank", type=float, default=TOL_RANK, help="relative numerical-rank tolerance")


def _add_scheme(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--catalog", metavar="NAME", help="catalog scheme")
    g.add_argument("--tableau", metavar="FILE", help="Butcher tableau JSON")
    g.add_argument("--poly", metavar="FILE", help="stability polynomial JSON")


def _add_matrix_only(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--matrix", metavar="NAME|FILE")
    g.add_argument("--catalog", metavar="NAME", help="catalog matrix")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rkcert", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze-scheme", help="theorem-based verdicts for a scheme")
    _add_scheme(p)
    _add_common(p)
    p.set_defaults(func=cmd_analyze_scheme)

    for name, func, hlp in [
        ("hc-index", cmd_hc_index, "hypocoercivity index by both methods"),
        ("staircase", cmd_staircase, "staircase form of (L_S, L_H)"),
        ("block-diag", cmd_block_diag, "split into stable and skew-Hermitian parts"),
        ("fit-exponent", cmd_fit_exponent, "short-time decay exponent of ||exp(tL)||"),
    ]:
        p = sub.add_parser(name, help=hlp)
        _add_matrix_only(p)
        _add_common(p)
        if name == "hc-index":
            p.add_argument("--timing", action="store_true")
        p.set_defaults(func=func)

    p = sub.add_parser("classify-pair", help="verdict for a scheme and a single matrix")
    _add_scheme(p)
    p.add_argument("--matrix", required=True, metavar="NAME|FILE")
    _add_common(p)
    p.set_defaults(func=cmd_classify_pair)

    p = sub.add_parser("verify", help="norm sweep of R(tau L) over a step grid")
    _add_scheme(p)
    p.add_argument("--matrix", required=True, metavar="NAME|FILE")
    p.add_argument("--weight", metavar="NAME|FILE|auto", help="weight P; 'auto' solves L* P + P L = -I")
    p.add_argument("--grid-min", type=float, default=1e-6)
    p.add_argument("--grid-max", type=float, default=1e-1)
    p.add_argument("--grid-points", type=int, default=200)
    _add_common(p, ("text", "json", "csv"))
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("gram-defect", help="order of ||G(tau) - Q(tau)||")
    _add_scheme(p)
    p.add_argument("--matrix", required=True, metavar="NAME|FILE")
    _add_common(p)
    p.set_defaults(func=cmd_gram_defect)

    p = sub.add_parser("catalog", help="bundled schemes and matrices")
    p.add_argument("action", choices=["list", "show", "random"])
    p.add_argument("name", nargs="?")
    p.add_argument("--n", type=int, default=6)
    p.add_argument("--index", type=int, default=2)
    p.add_argument("--seed", type=int, default=None, help="defaults to $RKCERT_SEED, then 0")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_catalog)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CLIError, RKCertError, ValueError, KeyError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"rkcert: error: {msg}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
