"""Command-line entry point.

Exit codes: 0 success, 1 mathematical failure (not closed, inconsistent,
failed check), 2 usage or parse error.
"""
from __future__ import annotations

import argparse
import sys
import time

from ..algebra import Jet, Poly
from ..decompose import (
    Decomposition,
    NotClosedError,
    decompose,
    is_exact_form,
    renormalize,
    verify_decomposition,
)
from ..determinacy import NormalizationError, determinacy_bound, normalize_to_finite_jet, verify_conjugation
from ..forms import DivisorError, closedness_check
from ..residue import (
    ResidueError,
    line_multiplicity_check,
    numeric_contour_residue,
    pencil_constancy_check,
)
from .parser import ParseError, ProblemFile, parse_polynomial, parse_problem
from .report import Report, complex_text, digest, one_form_text, poly_text, rational, render_report, two_form_text

ORACLE_TOLERANCE = 1e-8


class UsageError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", help="problem file (default: stdin)")
    common.add_argument("--order", type=int, default=10, help="jet order of G (default 10)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--timing", action="store_true", help="append wall-clock time to the report")

    parser = argparse.ArgumentParser(prog="merodecomp", description="Residues and exact part of closed meromorphic 1-forms.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("decompose", parents=[common], help="compute residues and G")
    sub.add_parser("check-closed", parents=[common], help="decide closedness")
    sub.add_parser("verify", parents=[common], help="check the expected (or computed) decomposition")
    sub.add_parser("is-exact", parents=[common], help="decide whether the form has a meromorphic primitive")
    p = sub.add_parser("residues", parents=[common], help="line and pencil residue checks")
    p.add_argument("--lines", type=int, default=50)
    p.add_argument("--pencil-samples", type=int, default=10)
    p = sub.add_parser("oracle", parents=[common], help="numeric contour integral at the problem's points")
    p.add_argument("--component", type=int, help="1-based pole component (default: the one through each point)")
    p.add_argument("--radius", type=float, default=0.05)
    p.add_argument("--points", type=int, default=512)
    for name in ("determinacy", "normalize"):
        p = sub.add_parser(name, parents=[common], help="finite determinacy of g" if name == "determinacy"
                           else "conjugate g to its finite jet")
        p.add_argument("--g", help="germ in x, y (default: product of the pole components)")
        p.add_argument("--max-k", type=int, default=12)
        if name == "normalize":
            p.add_argument("--k", type=int, help="jet degree (default: certified bound)")
    return parser


def _read_input(path: str | None) -> bytes:
    if path is None or path == "-":
        return sys.stdin.buffer.read()
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _load(raw: bytes) -> ProblemFile:
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise UsageError(f"input is not UTF-8: {exc}") from None
    return parse_problem(text)


def _decomposition_data(d: Decomposition, names) -> dict:
    return {
        "lambdas": [rational(v) for v in d.lambdas],
        "G": poly_text(d.G.poly, names),
        "G_order": d.G.order,
        "normalization": poly_text(Poly.monomial(d.normalization), names) if d.normalization else None,
        "valid_order": d.valid_order,
        "g_is_polynomial": d.g_is_polynomial,
    }


def _expected_check(problem: ProblemFile, d: Decomposition) -> dict | None:
    exp = problem.expected
    if exp is None:
        return None
    out = {}
    if exp.lambdas is not None:
        out["lambdas"] = "match" if tuple(exp.lambdas) == d.lambdas else "mismatch"
    if exp.G is not None:
        F = problem.form().divisor.exact_denominator()
        G = exp.G
        if d.normalization is not None:
            G = renormalize(G, F, d.normalization, d.G.order)
        out["G"] = "match" if G.truncate(d.G.order) == d.G.poly else "mismatch"
    return out


def _not_closed(report: Report, exc: NotClosedError, names) -> Report:
    report.status = "not_closed"
    report.exit_code = 1
    report.data["witness"] = two_form_text(exc.result.witness, names)
    report.data["valid_order"] = exc.result.valid_order
    return report


def cmd_decompose(args, problem: ProblemFile, report: Report) -> Report:
    names = problem.vars
    w = problem.form()
    try:
        d, rep = decompose(w, args.order, seed=args.seed)
    except NotClosedError as exc:
        return _not_closed(report, exc, names)
    report.status = rep.status
    report.data.update(_decomposition_data(d, names))
    report.data["equations"] = rep.equations
    report.data["unknowns"] = rep.unknowns
    report.data["lambda_stable_from_order"] = rep.lambda_stable_from_order
    if rep.message:
        report.data["message"] = rep.message
    if not rep.solved:
        report.data["residual"] = one_form_text(rep.residual, names)
        report.exit_code = 1
    check = _expected_check(problem, d)
    if check is not None:
        report.data["expected"] = check
        if "mismatch" in check.values():
            report.exit_code = 1
    return report


def cmd_check_closed(args, problem: ProblemFile, report: Report) -> Report:
    result = closedness_check(problem.form())
    report.status = result.status
    report.data["valid_order"] = result.valid_order
    if not result.closed:
        report.data["witness"] = two_form_text(result.witness, problem.vars)
        report.exit_code = 1
    return report


def cmd_verify(args, problem: ProblemFile, report: Report) -> Report:
    names = problem.vars
    w = problem.form()
    exp = problem.expected
    if exp is not None and exp.lambdas is not None:
        G = exp.G if exp.G is not None else Poly.zero(w.nvars)
        s = int(w.divisor.reduced_equation().order())
        valid = args.order + s - 1
        if w.eta.order is not None:
            valid = min(valid, w.eta.order)
        d = Decomposition(tuple(exp.lambdas), Jet(G, args.order), None, valid)
        report.data["source"] = "expected"
    else:
        try:
            d, _ = decompose(w, args.order, seed=args.seed)
        except NotClosedError as exc:
            return _not_closed(report, exc, names)
        report.data["source"] = "computed"
    try:
        rep = verify_decomposition(w, d)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    report.status = rep.status
    report.data["lambdas"] = [rational(v) for v in d.lambdas]
    report.data["G"] = poly_text(d.G.poly, names)
    report.data["valid_order"] = d.valid_order
    report.data["residual"] = one_form_text(rep.residual, names)
    report.exit_code = 0 if rep.solved else 1
    return report


def cmd_is_exact(args, problem: ProblemFile, report: Report) -> Report:
    names = problem.vars
    try:
        result = is_exact_form(problem.form(), args.order, seed=args.seed)
    except NotClosedError as exc:
        return _not_closed(report, exc, names)
    report.status = result.status
    if result.exact:
        d = result.decomposition
        F = problem.form().divisor.exact_denominator()
        report.data["primitive_numerator"] = poly_text(d.G.poly, names)
        report.data["primitive_denominator"] = poly_text(F, names)
        report.data["G_order"] = d.G.order
    elif result.nonzero_lambdas:
        report.data["nonzero_lambdas"] = {str(i + 1): rational(v) for i, v in result.nonzero_lambdas.items()}
    else:
        report.data["message"] = result.report.message
        report.exit_code = 1
    return report


def cmd_residues(args, problem: ProblemFile, report: Report) -> Report:
    names = problem.vars
    w = problem.form()
    try:
        d, rep = decompose(w, args.order, seed=args.seed)
    except NotClosedError as exc:
        return _not_closed(report, exc, names)
    if not rep.solved:
        report.status = rep.status
        report.data["message"] = rep.message
        report.exit_code = 1
        return report
    report.data["lambdas"] = [rational(v) for v in d.lambdas]
    ok = True
    lines = line_multiplicity_check(w, d, args.lines, args.seed)
    report.data["line_check"] = {
        "expected": rational(lines.expected),
        "lines": len(lines.residues),
        "skipped": lines.skipped,
        "failures": len(lines.failures),
    }
    ok &= lines.ok
    if w.nvars >= 3 and args.pencil_samples > 0:
        try:
            pencil = pencil_constancy_check(w, args.pencil_samples, args.seed, args.order)
        except ResidueError as exc:
            report.data["pencil"] = {"verdict": "insufficient", "message": str(exc)}
            ok = False
        else:
            agrees = pencil.lambdas == d.lambdas
            report.data["pencil"] = {
                "verdict": pencil.verdict,
                "usable": len(pencil.usable),
                "skipped": len(pencil.samples) - len(pencil.usable),
                "lambdas": [rational(v) for v in pencil.lambdas] if pencil.lambdas else None,
                "matches_global": agrees,
                "samples": [{"plane": s.plane.label, "status": s.status} for s in pencil.samples],
            }
            ok &= pencil.verdict == "constant" and agrees
    report.status = "consistent" if ok else "inconsistent"
    report.exit_code = 0 if ok else 1
    return report


def cmd_oracle(args, problem: ProblemFile, report: Report) -> Report:
    names = problem.vars
    w = problem.form()
    if not problem.points:
        raise UsageError("the oracle needs at least one 'point:' line in the problem file")
    try:
        d, rep = decompose(w, args.order, seed=args.seed)
    except NotClosedError as exc:
        return _not_closed(report, exc, names)
    if not rep.solved:
        report.status = rep.status
        report.exit_code = 1
        return report
    samples = []
    ok = True
    for point in problem.points:
        if args.component is not None:
            comp = args.component - 1
            if not 0 <= comp < len(w.divisor):
                raise UsageError(f"--component must be between 1 and {len(w.divisor)}")
        else:
            values = [abs(complex(f.evaluate([complex(z) for z in point]))) for f in w.divisor.functions]
            comp = min(range(len(values)), key=values.__getitem__)
        entry = {"point": " ".join(complex_text(z) for z in point), "component": comp + 1}
        try:
            est = numeric_contour_residue(w, comp, point, None, args.radius, args.points)
        except ResidueError as exc:
            entry["error"] = str(exc)
            ok = False
        else:
            exact = d.lambdas[comp]
            err = abs(est - float(exact))
            entry.update({"estimate": complex_text(est), "exact": rational(exact), "abs_error": f"{err:.3e}"})
            ok &= err <= ORACLE_TOLERANCE
        samples.append(entry)
    report.data["tolerance"] = ORACLE_TOLERANCE
    report.data["samples"] = samples
    report.status = "agree" if ok else "disagree"
    report.exit_code = 0 if ok else 1
    return report


def _germ(args, problem: ProblemFile | None) -> Poly:
    if args.g is not None:
        try:
            return parse_polynomial(args.g, ["x", "y"])
        except ParseError as exc:
            raise UsageError(f"--g: {exc}") from None
    if problem is None:
        raise UsageError("give --g or --input")
    if len(problem.vars) != 2:
        raise UsageError("determinacy works in two variables")
    return problem.form().divisor.reduced_equation()


def cmd_determinacy(args, problem, report: Report) -> Report:
    g = _germ(args, problem)
    report.data["g"] = poly_text(g, ["x", "y"])
    cert = determinacy_bound(g, args.max_k)
    if cert is None:
        report.status = "none"
        report.data["max_k"] = args.max_k
        report.exit_code = 1
        return report
    report.status = "determined"
    report.data["k"] = cert.k
    report.data["checked_order"] = cert.checked_order
    report.data["witnesses"] = len(cert.witnesses)
    return report


def cmd_normalize(args, problem, report: Report) -> Report:
    g = _germ(args, problem)
    names = ["x", "y"]
    report.data["g"] = poly_text(g, names)
    k = args.k
    if k is None:
        cert = determinacy_bound(g, args.max_k)
        if cert is None:
            report.status = "not_determined"
            report.exit_code = 1
            return report
        k = cert.k
    try:
        g0, phi = normalize_to_finite_jet(g, k, args.order)
    except NormalizationError as exc:
        report.status = "failed"
        report.data["message"] = f"{exc} (degree {exc.degree})"
        report.exit_code = 1
        return report
    report.status = "normalized"
    report.data["k"] = k
    report.data["g0"] = poly_text(g0, names)
    report.data["phi_x"] = poly_text(phi.component_maps[0].poly, names)
    report.data["phi_y"] = poly_text(phi.component_maps[1].poly, names)
    report.data["order"] = args.order
    report.data["verified"] = verify_conjugation(g, g0, phi, args.order)
    return report


COMMANDS = {
    "decompose": cmd_decompose,
    "check-closed": cmd_check_closed,
    "verify": cmd_verify,
    "is-exact": cmd_is_exact,
    "residues": cmd_residues,
    "oracle": cmd_oracle,
    "determinacy": cmd_determinacy,
    "normalize": cmd_normalize,
}


def run_command(argv=None) -> tuple[int, Report | None]:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0), None
    if args.order < 0:
        print("error: --order must be non-negative", file=sys.stderr)
        return 2, None
    start = time.perf_counter()
    try:
        problem = None
        raw = b""
        if args.command not in ("determinacy", "normalize") or args.input is not None or args.g is None:
            raw = _read_input(args.input)
            problem = _load(raw)
        if problem is None:
            raw = args.g.encode("utf-8")
        report = Report(args.command, digest(raw), "")
        report = COMMANDS[args.command](args, problem, report)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2, None
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2, None
    except (DivisorError, ResidueError) as exc:
        print(f"failure: {exc}", file=sys.stderr)
        return 1, None
    report.timing = time.perf_counter() - start
    sys.stdout.write(render_report(report, args.format, args.timing))
    return report.exit_code, report


def main(argv=None) -> int:
    code, _ = run_command(argv)
    return code


if __name__ == "__main__":
    sys.exit(main())
