"""Command line front end.

Exit codes: 0 success/feasible, 1 infeasible or rejected, 2 usage or parse
error, 3 numerical breakdown.
"""

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .dilation import DilationProblem, check_dilation_conditions, complete, verify_dilation
from .exceptions import (
    ConditionsViolated,
    DimensionMismatch,
    HypothesisViolated,
    InfeasibleProblem,
    NonFiniteInput,
    AsymmetricInput,
    NotMarginallyStable,
    NumericalBreakdown,
)
from .generators import (
    dilation_triple,
    make_rng,
    marginal_system,
    projection_feasible,
    projection_infeasible,
    quadratic_instance,
    slemma_instance,
)
from .io import (
    MatrixFileError,
    dump_json,
    format_matrix,
    make_certificate,
    matrix_from_obj,
    read_json,
    read_matrix,
    read_vector,
)
from .linalg import Tolerances, spectral_norm
from .projection import (
    ProjectionProblem,
    check_conditions,
    construct_witness,
    residual_scale,
    verify_witness,
)
from .quadratic import (
    QuadraticForm,
    SLemmaPair,
    finsler,
    interpolate,
    interpolation_residuals,
    matrix_s_lemma,
    min_eig_along,
    scalar_s_lemma,
)
from .stability import (
    StabilityCertificate,
    certificate_P_form,
    certificate_S_form,
    is_marginally_stable,
    verify_certificate,
)

log = logging.getLogger("nspkit")

EXIT_OK, EXIT_INFEASIBLE, EXIT_USAGE, EXIT_BREAKDOWN = 0, 1, 2, 3

INPUT_ERRORS = (
    MatrixFileError,
    DimensionMismatch,
    NonFiniteInput,
    AsymmetricInput,
    ValueError,
)


def _tolerances(args):
    base = Tolerances.from_env()
    return base.replace(
        tol_rank=args.tol_rank,
        tol_psd=args.tol_psd,
        tol_sym=args.tol_sym,
        tol_residual=args.tol_residual,
    )


def _emit(args, doc):
    text = dump_json(doc)
    if getattr(args, "out", None):
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


# -- projection ---------------------------------------------------------------


def _load_projection(args, tol):
    return ProjectionProblem(read_matrix(args.Q), read_matrix(args.U), read_matrix(args.V), tol)


def cmd_check(args):
    tol = _tolerances(args)
    prob = _load_projection(args, tol)
    report = check_conditions(prob)
    if args.json:
        doc = report.to_dict()
        doc["projected_U"] = report.projected_U
        doc["projected_V"] = report.projected_V
        sys.stdout.write(dump_json(doc))
    else:
        print(_format_report(report))
    return EXIT_OK if report.feasible else EXIT_INFEASIBLE


def _format_report(report):
    def verdict(c):
        return f"{c.verdict.value} (min eigenvalue {c.min_eig:.6g})"

    lines = [
        f"feasible:         {'yes' if report.feasible else 'no'}",
        f"kernel of U:      {verdict(report.kernel_cond_U)}",
        f"kernel of V:      {verdict(report.kernel_cond_V)}",
        f"coupling:         {'holds' if report.coupling_cond else 'violated'}"
        f" (residual {report.coupling_residual:.3g})",
        f"helmersson:       {'holds' if report.helmersson_cond else 'violated'}",
        f"strict feasible:  {'yes' if report.strict else 'no'}",
    ]
    return "\n".join(lines)


def cmd_solve(args):
    tol = _tolerances(args)
    prob = _load_projection(args, tol)
    report = check_conditions(prob)
    problem = {"Q": prob.Q, "U": prob.U, "V": prob.V}
    if not report.feasible:
        _emit(args, make_certificate("projection", problem, "infeasible", None, _report_diag(report), tol))
        return EXIT_INFEASIBLE
    witness = construct_witness(prob, report)
    diag = _report_diag(report)
    diag.update(
        residual_min_eig=witness.residual_min_eig,
        residual_scale=witness.scale,
        alpha=witness.blocks.alpha,
    )
    _emit(args, make_certificate("projection", problem, "feasible", witness.X, diag, tol))
    return EXIT_OK


def _report_diag(report):
    return {
        "kernel_U_min_eig": report.kernel_cond_U.min_eig,
        "kernel_V_min_eig": report.kernel_cond_V.min_eig,
        "coupling_residual": report.coupling_residual,
        "coupling_holds": float(report.coupling_cond),
        "helmersson_holds": float(report.helmersson_cond),
    }


# -- applications -------------------------------------------------------------


def cmd_stability(args):
    tol = _tolerances(args)
    A = read_matrix(args.A)
    form = args.form.upper()
    problem = {"A": A, "form": form}
    report = is_marginally_stable(A, tol)
    if not report.stable:
        diag = {"spectral_radius": report.spectral_radius}
        doc = make_certificate("stability", problem, "not marginally stable", None, diag, tol)
        doc["reasons"] = report.reasons
        _emit(args, doc)
        for reason in report.reasons:
            print(reason, file=sys.stderr)
        return EXIT_INFEASIBLE
    build = certificate_P_form if form == "P" else certificate_S_form
    cert = build(A, tol)
    check = verify_certificate(A, cert, tol)
    diag = {
        "lmi_min_eig": cert.lmi_min_eig,
        "lyap_min_eig": cert.lyap_min_eig,
        "x_sigma_ratio": check.x_condition,
        "spectral_radius": report.spectral_radius,
    }
    doc = make_certificate("stability", problem, "marginally stable", cert.X, diag, tol)
    doc["auxiliary"] = {"P_or_S": cert.P_or_S}
    _emit(args, doc)
    return EXIT_OK


def cmd_dilate(args):
    tol = _tolerances(args)
    prob = DilationProblem(read_matrix(args.A), read_matrix(args.B), read_matrix(args.C), tol)
    problem = {"A": prob.A, "B": prob.B, "C": prob.C}
    cond = check_dilation_conditions(prob)
    diag = {"row_norm": cond.row_norm, "col_norm": cond.col_norm}
    if not cond.passed:
        _emit(args, make_certificate("dilation", problem, "conditions violated", None, diag, tol))
        return EXIT_INFEASIBLE
    D = complete(prob)
    diag["dilated_norm"] = verify_dilation(prob, D)
    _emit(args, make_certificate("dilation", problem, "completed", D, diag, tol))
    return EXIT_OK


def cmd_interpolate(args):
    tol = _tolerances(args)
    form = QuadraticForm(read_matrix(args.P), args.n, tol)
    z = read_vector(args.z)
    w = read_vector(args.w)
    problem = {"P": form.P, "n": form.n, "z": z.reshape(-1, 1), "w": w.reshape(-1, 1)}
    try:
        Delta = interpolate(form, z, w)
    except HypothesisViolated as exc:
        doc = make_certificate("interpolation", problem, "infeasible", None, {}, tol)
        doc["reason"] = str(exc)
        _emit(args, doc)
        return EXIT_INFEASIBLE
    err, lam = interpolation_residuals(form, z, w, Delta)
    diag = {"match_error": err, "min_eig": lam}
    _emit(args, make_certificate("interpolation", problem, "interpolated", Delta, diag, tol))
    return EXIT_OK


def cmd_slemma(args):
    tol = _tolerances(args)
    M = read_matrix(args.M)
    N = read_matrix(args.N)
    problem = {"M": M, "N": N, "variant": args.variant}
    if args.variant == "matrix":
        if args.n is None:
            raise ValueError("--n is required for the matrix variant")
        problem["n"] = args.n
        result = matrix_s_lemma(SLemmaPair(M, N, args.n, tol))
    elif args.variant == "scalar":
        if args.xbar is None:
            raise ValueError("--xbar is required for the scalar variant")
        xbar = read_vector(args.xbar)
        problem["xbar"] = xbar.reshape(-1, 1)
        result = scalar_s_lemma(M, N, xbar, tol)
    else:
        result = finsler(M, N, tol)
    diag = {
        "min_eig": result.min_eig,
        "bracket_lo": result.bracket[0],
        "bracket_hi": result.bracket[1],
    }
    verdict = result.status.replace("_", " ")
    witness = np.array([[result.alpha]]) if result.feasible else None
    _emit(args, make_certificate("slemma", problem, verdict, witness, diag, tol))
    return EXIT_OK if result.feasible else EXIT_INFEASIBLE


# -- verification -------------------------------------------------------------


def _mat(doc, key):
    return matrix_from_obj(doc["problem"][key], key)


def verify_document(doc):
    """Re-check a certificate produced by any solve command.

    Returns ``(ok, message)``.
    """
    tol = Tolerances(**doc["tolerances"])
    kind = doc["kind"]
    witness = doc.get("witness")
    if kind == "projection":
        prob = ProjectionProblem(_mat(doc, "Q"), _mat(doc, "U"), _mat(doc, "V"), tol)
        if witness is None:
            report = check_conditions(prob)
            return not report.feasible, "infeasibility reconfirmed"
        X = matrix_from_obj(witness, "witness")
        lam = verify_witness(prob, X)
        bound = -tol.tol_residual * residual_scale(prob, X)
        return lam >= bound, f"min eigenvalue {lam:.6g} (bound {bound:.3g})"
    if kind == "stability":
        A = _mat(doc, "A")
        if witness is None:
            return not is_marginally_stable(A, tol).stable, "instability reconfirmed"
        cert = StabilityCertificate(
            form=doc["problem"]["form"],
            P_or_S=matrix_from_obj(doc["auxiliary"]["P_or_S"], "P_or_S"),
            X=matrix_from_obj(witness, "witness"),
            lmi_min_eig=0.0,
            lyap_min_eig=0.0,
        )
        check = verify_certificate(A, cert, tol)
        return check.passed, "; ".join(check.failures) or "certificate verified"
    if kind == "dilation":
        prob = DilationProblem(_mat(doc, "A"), _mat(doc, "B"), _mat(doc, "C"), tol)
        if witness is None:
            return not check_dilation_conditions(prob).passed, "violation reconfirmed"
        norm = verify_dilation(prob, matrix_from_obj(witness, "witness"))
        return norm <= 1.0 + tol.tol_residual, f"dilated norm {norm:.12g}"
    if kind == "interpolation":
        form = QuadraticForm(_mat(doc, "P"), int(doc["problem"]["n"]), tol)
        z = _mat(doc, "z").ravel()
        w = _mat(doc, "w").ravel()
        if witness is None:
            x = np.concatenate([z, w])
            return float(x @ form.P @ x) < 0.0, "negative quadratic value reconfirmed"
        Delta = matrix_from_obj(witness, "witness")
        err, lam = interpolation_residuals(form, z, w, Delta)
        scale = max(1.0, spectral_norm(form.P)) * max(1.0, spectral_norm(Delta) ** 2)
        ok = err <= tol.tol_residual * (1.0 + np.linalg.norm(w)) and lam >= -tol.tol_residual * scale
        return ok, f"match error {err:.3g}, min eigenvalue {lam:.6g}"
    if kind == "slemma":
        M, N = _mat(doc, "M"), _mat(doc, "N")
        if witness is None:
            problem = doc["problem"]
            variant = problem["variant"]
            if variant == "matrix":
                again = matrix_s_lemma(SLemmaPair(M, N, int(problem["n"]), tol))
            elif variant == "scalar":
                again = scalar_s_lemma(M, N, _mat(doc, "xbar").ravel(), tol)
            else:
                again = finsler(M, N, tol)
            return not again.feasible, f"search repeated: {again.status}"
        alpha = float(matrix_from_obj(witness, "witness")[0, 0])
        lam = min_eig_along(M, N)(alpha)
        sign_ok = alpha >= 0.0 or doc["problem"]["variant"] == "finsler"
        return lam > 0.0 and sign_ok, f"alpha {alpha:.12g}, min eigenvalue {lam:.6g}"
    raise ValueError(f"unknown certificate kind {kind!r}")


def cmd_verify(args):
    doc = read_json(args.certificate)
    try:
        ok, message = verify_document(doc)
    except KeyError as exc:
        raise MatrixFileError(f"{args.certificate}: missing field {exc}") from exc
    print(("verified: " if ok else "FAILED: ") + message)
    return EXIT_OK if ok else EXIT_INFEASIBLE


# -- instance generation ------------------------------------------------------

GEN_KINDS = ("projection-feasible", "projection-infeasible", "marginal", "dilation", "quadratic", "slemma")


def generate_instance(kind, dim, seed):
    """Return ``(files, manifest)`` for one generated instance."""
    rng = make_rng(seed)
    manifest = {"kind": kind, "dim": dim, "seed": seed, "generator": "numpy PCG64"}
    if kind == "projection-feasible":
        Q, U, V, X0 = projection_feasible(rng, dim)
        files = {"Q": Q, "U": U, "V": V, "X0": X0}
        manifest["property"] = "feasible: X0 satisfies the inequality by construction"
    elif kind == "projection-infeasible":
        Q, U, V, depth = projection_infeasible(rng, dim)
        files = {"Q": Q, "U": U, "V": V}
        manifest["property"] = f"infeasible: planted kernel direction with value -{depth!r}"
    elif kind == "marginal":
        files = {"A": marginal_system(rng, dim)}
        manifest["property"] = "marginally stable by construction"
    elif kind == "dilation":
        dims = [int(x) for x in rng.integers(1, dim + 1, 4)]
        target = float(rng.choice([0.5, 0.9, 1.0 - 1e-12]))
        A, B, C = dilation_triple(rng, *dims, target)
        files = {"A": A, "B": B, "C": C}
        manifest["property"] = f"both condition norms equal {target!r}"
    elif kind == "quadratic":
        n = int(rng.integers(1, dim)) if dim > 1 else 1
        m = max(dim - n, 1)
        P, z, w = quadratic_instance(rng, n, m)
        files = {"P": P, "z": z.reshape(-1, 1), "w": w.reshape(-1, 1)}
        manifest["n"] = n
        manifest["property"] = "[z; w]^T P [z; w] >= 0 by construction"
    elif kind == "slemma":
        variant = str(rng.choice(["matrix", "scalar", "finsler"]))
        M, N, n, xbar = slemma_instance(rng, max(dim, 2), variant)
        files = {"M": M, "N": N}
        if xbar is not None:
            files["xbar"] = xbar.reshape(-1, 1)
        manifest.update(variant=variant, n=n, property="random multiplier search instance")
    else:
        raise ValueError(f"unknown kind {kind!r}")
    manifest["files"] = {name: f"{name}.json" for name in files}
    return files, manifest


def cmd_gen(args):
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files, manifest = generate_instance(args.kind, args.dim, args.seed)
    for name, A in files.items():
        (out / f"{name}.json").write_text(format_matrix(A))
    (out / "manifest.json").write_text(dump_json(manifest))
    print(out)
    return EXIT_OK


# -- parser -------------------------------------------------------------------


def _add_tol_flags(p):
    p.add_argument("--tol-rank", type=float, default=None, help="relative singular value cutoff")
    p.add_argument("--tol-psd", type=float, default=None, help="relative eigenvalue slack")
    p.add_argument("--tol-sym", type=float, default=None, help="relative symmetry slack")
    p.add_argument("--tol-residual", type=float, default=None, help="witness verification slack")
    p.add_argument("--json", action="store_true", help="machine readable output")
    p.add_argument("-o", "--out", default=None, help="write the certificate here instead of stdout")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="nspkit",
        description="Non-strict projection inequalities: decide, solve, certify.",
    )
    parser.add_argument("--version", action="version", version=f"nspkit {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, func, help_ in (
        ("check", cmd_check, "decide feasibility of Q + U^T X V + V^T X^T U >= 0"),
        ("solve", cmd_solve, "construct a witness X"),
    ):
        p = sub.add_parser(name, help=help_)
        p.add_argument("Q")
        p.add_argument("U")
        p.add_argument("V")
        _add_tol_flags(p)
        p.set_defaults(func=func)

    p = sub.add_parser("stability", help="marginal stability certificate for x+ = A x")
    p.add_argument("A")
    p.add_argument("--form", choices=("p", "s", "P", "S"), default="p")
    _add_tol_flags(p)
    p.set_defaults(func=cmd_stability)

    p = sub.add_parser("dilate", help="complete [[A, B], [C, D]] with norm at most one")
    p.add_argument("A")
    p.add_argument("B")
    p.add_argument("C")
    _add_tol_flags(p)
    p.set_defaults(func=cmd_dilate)

    p = sub.add_parser("interpolate", help="find Delta with w = Delta z inside a quadratic constraint")
    p.add_argument("P")
    p.add_argument("n", type=int)
    p.add_argument("z")
    p.add_argument("w")
    _add_tol_flags(p)
    p.set_defaults(func=cmd_interpolate)

    p = sub.add_parser("slemma", help="multiplier search for M - alpha N > 0")
    p.add_argument("M")
    p.add_argument("N")
    p.add_argument("--variant", choices=("matrix", "scalar", "finsler"), default="matrix")
    p.add_argument("--xbar", default=None, help="Slater point file (scalar variant)")
    p.add_argument("--n", type=int, default=None, help="upper block size (matrix variant)")
    _add_tol_flags(p)
    p.set_defaults(func=cmd_slemma)

    p = sub.add_parser("verify", help="re-check a certificate written by a solve command")
    p.add_argument("certificate")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("gen", help="write a seeded random instance")
    p.add_argument("--kind", choices=GEN_KINDS, required=True)
    p.add_argument("--dim", type=int, default=6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except NumericalBreakdown as exc:
        print(f"numerical breakdown: {exc}", file=sys.stderr)
        return EXIT_BREAKDOWN
    except (InfeasibleProblem, NotMarginallyStable, ConditionsViolated) as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (HypothesisViolated,) + INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
