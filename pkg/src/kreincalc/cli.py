"""Command line interface.

Problems are JSON files; every command reads one with --input, writes a JSON
report to --output (default stdout), and exits 0 on success.  Failures keep
the report shape with status "error" and map onto exit codes:

    2  validation failure (bad JSON, wrong shapes or labels)
    3  violated mathematical precondition (pole on the spectrum,
       not self-adjoint, not positive, not in the commutant, ...)
    4  internal inconsistency (a proved identity violated beyond tolerance)

Complex scalars are written as [re, im]; the point at infinity as "inf".
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .errors import InconsistencyError, KreinCalcError, PreconditionError, ValidationError
from .jetcalc import JetFunction, apply_calculus, decompose, embed_rational, norm_f, spectral_projection
from .krein import GramSpace, gram_factorize, theta_op, verify_definitizing, xi
from .rational import Polynomial, RationalFunction
from .relations import INF, LinearRelation, is_inf
from .spectral import rational_apply, spectrum
from .tolerances import PSD_CUTOFF, PSD_TOL, RANK_TOL

# -- JSON decoding -----------------------------------------------------------


def _decode_scalar(value) -> complex:
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, list) and len(value) == 2 and all(isinstance(t, (int, float)) for t in value):
        return complex(value[0], value[1])
    raise ValidationError(f"expected a number or [re, im] pair, got {value!r}")


def _decode_point(value):
    if value == "inf":
        return INF
    return _decode_scalar(value)


def _decode_matrix(value, name: str) -> np.ndarray:
    if not isinstance(value, list) or not all(isinstance(row, list) for row in value):
        raise ValidationError(f"{name} must be a list of rows")
    try:
        mat = np.array([[_decode_scalar(e) for e in row] for row in value], dtype=complex)
    except ValueError as exc:  # ragged rows
        raise ValidationError(f"{name} must be rectangular") from exc
    if mat.ndim != 2:
        raise ValidationError(f"{name} must be rectangular")
    return mat


def _decode_label(key: str):
    """Spectral-point label used as a JSON object key: "inf" or "[re, im]"."""
    if key == "inf":
        return INF
    try:
        parsed = json.loads(key)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"bad spectral label {key!r}") from exc
    return _decode_point(parsed)


def _decode_coeffs(value, name: str) -> Polynomial:
    if not isinstance(value, list) or not value:
        raise ValidationError(f"{name} must be a nonempty coefficient list")
    return Polynomial([_decode_scalar(c) for c in value])


def _decode_rational(obj, name: str) -> RationalFunction:
    if not isinstance(obj, dict) or "num" not in obj:
        raise ValidationError(f"{name} must be an object with 'num' (and optional 'den')")
    num = _decode_coeffs(obj["num"], f"{name}.num")
    den = _decode_coeffs(obj["den"], f"{name}.den") if "den" in obj else Polynomial.one()
    return RationalFunction(num, den)


# -- JSON encoding -----------------------------------------------------------


def _encode_scalar(z) -> list:
    z = complex(z)
    return [float(z.real) + 0.0, float(z.imag) + 0.0]


def _encode_point(p):
    return "inf" if is_inf(p) else _encode_scalar(p)


def _encode_matrix(mat: np.ndarray) -> list:
    mat = np.asarray(mat, dtype=complex)
    return [[_encode_scalar(e) for e in row] for row in mat]


def _encode_rational(func: RationalFunction) -> dict:
    return {
        "num": [_encode_scalar(c) for c in func.num.coeffs],
        "den": [_encode_scalar(c) for c in func.den.coeffs],
    }


# -- problem assembly --------------------------------------------------------


class Problem:
    """Decoded problem file plus the derived objects commands share."""

    def __init__(self, raw: dict, rank_tol: float, psd_tol: float):
        if not isinstance(raw, dict):
            raise ValidationError("problem file must contain a JSON object")
        self.raw = raw
        self.rank_tol = rank_tol
        self.psd_tol = psd_tol

    def relation(self) -> LinearRelation:
        obj = self.raw.get("relation")
        if not isinstance(obj, dict):
            raise ValidationError("problem needs a 'relation' object")
        if "operator" in obj:
            return LinearRelation.from_operator(_decode_matrix(obj["operator"], "relation.operator"))
        xkey = "X" if "X" in obj else "x"
        ykey = "Y" if "Y" in obj else "y"
        if xkey in obj and ykey in obj:
            x = _decode_matrix(obj[xkey], "relation.X")
            y = _decode_matrix(obj[ykey], "relation.Y")
            return LinearRelation.from_graph_columns(x, y, rank_tol=self.rank_tol)
        raise ValidationError("relation must give 'operator' or graph columns 'X' and 'Y'")

    def gram(self, dim: int) -> GramSpace:
        obj = self.raw.get("gram")
        if obj is None:
            return GramSpace.standard(dim)
        space = GramSpace(_decode_matrix(obj, "gram"))
        if space.dim != dim:
            raise ValidationError("gram matrix size does not match the relation")
        return space

    def q(self) -> RationalFunction:
        if "q" not in self.raw:
            raise ValidationError("problem needs a definitizing function 'q'")
        return _decode_rational(self.raw["q"], "q")

    def pair(self):
        rel = self.relation()
        space = self.gram(rel.space_dim)
        return verify_definitizing(space, rel, self.q(), psd_tol=self.psd_tol)

    def rational_function(self) -> RationalFunction:
        obj = self.raw.get("function")
        if not isinstance(obj, dict) or "rational" not in obj:
            raise ValidationError("problem needs function.rational")
        return _decode_rational(obj["rational"], "function.rational")

    def jet_function(self, pair) -> JetFunction:
        obj = self.raw.get("function")
        if not isinstance(obj, dict):
            raise ValidationError("problem needs a 'function' object")
        if "rational" in obj:
            return embed_rational(pair, _decode_rational(obj["rational"], "function.rational"))
        if "jets" in obj:
            entries = obj["jets"]
            if not isinstance(entries, dict):
                raise ValidationError("function.jets must map labels to entry lists")
            mapping = {}
            for key, values in entries.items():
                if not isinstance(values, list):
                    raise ValidationError(f"jet entries for {key!r} must be a list")
                mapping[_decode_label(key)] = [_decode_scalar(e) for e in values]
            return JetFunction.from_points(pair, mapping)
        raise ValidationError("function must give 'rational' or 'jets'")

    def delta(self) -> list:
        obj = self.raw.get("delta")
        if not isinstance(obj, list):
            raise ValidationError("problem needs a 'delta' list of spectral points")
        return [_decode_point(p) for p in obj]


def _spectrum_payload(report) -> dict:
    return {
        "is_full_sphere": report.is_full_sphere,
        "points": [
            {"point": _encode_point(p), "multiplicity": int(m)} for p, m in report.points
        ],
    }


# -- commands ----------------------------------------------------------------


def _cmd_spectrum(problem: Problem, args) -> dict:
    rel = problem.relation()
    report = spectrum(rel)
    return {"spectrum": _spectrum_payload(report), "results": {"is_proper": rel.is_proper}}


def _cmd_adjoint(problem: Problem, args) -> dict:
    rel = problem.relation()
    space = problem.gram(rel.space_dim)
    adj = rel.adjoint(space.gram)
    x, y = adj.graph_columns()
    return {
        "results": {
            "X": _encode_matrix(x),
            "Y": _encode_matrix(y),
            "is_self_adjoint": rel.same_as(adj),
        }
    }


def _cmd_definitize(problem: Problem, args) -> dict:
    pair = problem.pair()
    h = pair.space.gram @ pair.q_matrix
    eigvals = np.linalg.eigvalsh((h + h.conj().T) / 2.0)
    kept = eigvals > PSD_CUTOFF * max(float(np.max(np.abs(eigvals))), 1.0)
    diagnostics = dict(pair.diagnostics)
    diagnostics["psd_margin"] = float(np.min(eigvals[kept])) if np.any(kept) else 0.0
    return {
        "spectrum": _spectrum_payload(pair.report),
        "results": {
            "q_matrix": _encode_matrix(pair.q_matrix),
            "degrees": [
                {"point": _encode_point(w), "degree": int(pair.degrees[w])} for w in pair.points
            ],
            "critical_points": [_encode_point(w) for w in pair.critical_points],
        },
        "diagnostics": diagnostics,
    }


def _factorize(problem: Problem):
    pair = problem.pair()
    return pair, gram_factorize(pair)


def _cmd_factorize(problem: Problem, args) -> dict:
    pair, fact = _factorize(problem)
    payload = {
        "rank": fact.rank,
        "factor": _encode_matrix(fact.factor),
        "factor_adjoint": _encode_matrix(fact.factor_adjoint),
        "measure": [
            {"point": _encode_point(p), "projector": _encode_matrix(proj)}
            for p, proj in fact.measure.atoms
        ],
    }
    if fact.rank and fact.theta.is_operator():
        payload["theta_matrix"] = _encode_matrix(fact.theta.operator_matrix())
    return {
        "spectrum": _spectrum_payload(pair.report),
        "results": payload,
        "diagnostics": dict(fact.diagnostics),
    }


def _cmd_theta(problem: Problem, args) -> dict:
    pair, fact = _factorize(problem)
    func = problem.rational_function()
    mat = rational_apply(func, pair.relation, pair.report)
    out = theta_op(fact, mat)
    return {
        "results": {
            "input_matrix": _encode_matrix(mat),
            "output_matrix": _encode_matrix(out),
        }
    }


def _cmd_xi(problem: Problem, args) -> dict:
    pair, fact = _factorize(problem)
    func = problem.rational_function()
    if fact.rank == 0:
        mat = np.zeros((0, 0), dtype=complex)
    else:
        mat = rational_apply(func, fact.theta, spectrum(fact.theta))
    out = xi(fact, mat)
    return {
        "results": {
            "input_matrix": _encode_matrix(mat),
            "output_matrix": _encode_matrix(out),
        }
    }


def _cmd_rational_apply(problem: Problem, args) -> dict:
    rel = problem.relation()
    func = problem.rational_function()
    report = spectrum(rel)
    mat = rational_apply(func, rel, report)
    return {
        "spectrum": _spectrum_payload(report),
        "results": {"matrix": _encode_matrix(mat), "function": _encode_rational(func)},
    }


def _mu_of(args):
    if args.mu is None:
        return None
    return complex(args.mu[0], args.mu[1])


def _cmd_calculus(problem: Problem, args) -> dict:
    pair, fact = _factorize(problem)
    phi = problem.jet_function(pair)
    mu = _mu_of(args)
    dec = decompose(pair, phi, mu)
    mat = apply_calculus(fact, phi, mu)
    return {
        "spectrum": _spectrum_payload(pair.report),
        "results": {
            "matrix": _encode_matrix(mat),
            "rational_part": _encode_rational(dec.s),
            "scalar_part": [
                {"point": _encode_point(w), "value": _encode_scalar(dec.g[w])}
                for w in pair.points
            ],
        },
    }


def _cmd_project(problem: Problem, args) -> dict:
    pair, fact = _factorize(problem)
    proj = spectral_projection(fact, problem.delta(), _mu_of(args))
    return {
        "spectrum": _spectrum_payload(pair.report),
        "results": {
            "matrix": _encode_matrix(proj),
            "trace": _encode_scalar(np.trace(proj)),
        },
    }


def _cmd_norm_f(problem: Problem, args) -> dict:
    pair = problem.pair()
    phi = problem.jet_function(pair)
    return {"results": {"value": float(norm_f(phi))}}


_COMMANDS = {
    "spectrum": _cmd_spectrum,
    "adjoint": _cmd_adjoint,
    "definitize": _cmd_definitize,
    "factorize": _cmd_factorize,
    "theta": _cmd_theta,
    "xi": _cmd_xi,
    "rational-apply": _cmd_rational_apply,
    "calculus": _cmd_calculus,
    "project": _cmd_project,
    "norm-f": _cmd_norm_f,
}

_EXIT_CODES = {"validation": 2, "precondition": 3, "inconsistency": 4}


def _write_report(report: dict, path) -> None:
    text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kreincalc",
        description="Functional calculus for self-adjoint relations on Krein spaces.",
    )
    parser.add_argument("command", choices=sorted(_COMMANDS))
    parser.add_argument("--input", required=True, help="problem file (JSON)")
    parser.add_argument("--output", default=None, help="report file (default: stdout)")
    parser.add_argument(
        "--tol-rank", type=float, default=RANK_TOL,
        help="relative rank cutoff used when reading graph columns",
    )
    parser.add_argument(
        "--tol-psd", type=float, default=PSD_TOL,
        help="relative tolerance for the positivity check of q(A)",
    )
    parser.add_argument(
        "--mu", nargs=2, type=float, metavar=("RE", "IM"), default=None,
        help="base point for the rational part of the decomposition",
    )
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        try:
            with open(args.input, "r", encoding="utf-8") as handle:
                raw = json.load(handle)
        except OSError as exc:
            raise ValidationError(f"cannot read input file: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ValidationError(f"input is not valid JSON: {exc}") from exc
        problem = Problem(raw, rank_tol=args.tol_rank, psd_tol=args.tol_psd)
        body = _COMMANDS[args.command](problem, args)
    except KreinCalcError as exc:
        report = {
            "command": args.command,
            "status": "error",
            "error": {"code": exc.code, "message": str(exc)},
        }
        _write_report(report, args.output)
        return _EXIT_CODES[exc.family]
    report = {"command": args.command, "status": "ok"}
    report.update(body)
    _write_report(report, args.output)
    return 0


if __name__ == "__main__":
    sys.exit(main())
