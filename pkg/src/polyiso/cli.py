"""Command-line front end.

Exit codes: 0 success/true, 1 witness replay failed (or internal
inconsistency), 2 property false, 3 decomposition failed (PhiDisagreement and
friends), 4 not an isometry, 5 (St) falsified, 64 usage error, 65 input
parse error.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import fixtures as fx
from .formats import (
    FORMAT,
    FormatError,
    decomposition_to_doc,
    digest,
    jsonable,
    load_json,
    operator_from_doc,
    operator_to_doc,
    space_from_doc,
    space_to_doc,
    spec_from_doc,
    wc_from_doc,
)
from .function_space import UnknownLabel
from .isometry_engine import (
    DecompositionFailure,
    FailureKind,
    ShapeMismatch,
    check_isometry,
    decompose,
    linear_isometries,
    make_weighted_composition,
    structural_decompose,
    verify_decomposition_strong,
)
from .polyhedral_space import DimensionMismatch, SpaceError
from .st_norm_layer import (
    InvalidMetric,
    MaxNormSpec,
    NotMaxNormIsometry,
    PropositionViolation,
    StFalsified,
    st_falsify,
    theorem_app_pipeline,
)
from .tset_geometry import discrepancy_matrix, discrepant, gamma, has_property_D, has_property_Dw, tsets

EXIT_OK = 0
EXIT_REPLAY_FAILED = 1
EXIT_FALSE = 2
EXIT_DECOMPOSITION = 3
EXIT_NOT_ISOMETRY = 4
EXIT_ST = 5
EXIT_USAGE = 64
EXIT_PARSE = 65

COMMANDS = (
    "space-analyze",
    "space-tsets",
    "check-d",
    "check-dw",
    "op-verify",
    "op-decompose",
    "op-make-wc",
    "st-check",
    "pipeline",
    "fixtures",
)

FIXTURES = (
    "square",
    "diamond",
    "hexagon",
    "octahedron",
    "cube_bipyramid",
    "line",
    "identity_op",
    "swap_op",
    "mixing_swap",
    "wc_random",
    "metric_swap",
    "planted_zero_column",
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--space", help="space file (or max-norm spec file for pipeline)")
    common.add_argument("--space2", help="second space / codomain spec file")
    common.add_argument("--op", help="operator file (weighted-composition file for op-make-wc)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--samples", type=int, default=None)
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--verify-witness", metavar="REPORT", help="re-check the witnesses of an earlier report")
    parser = _Parser(prog="polyiso", description="T-set geometry and isometry decomposition for polyhedral norms")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common])
        if name == "fixtures":
            sp.add_argument("name")
    return parser


# -- input loading ---------------------------------------------------------------


class Inputs:
    """Parsed inputs plus the raw documents they came from (for the digest)."""

    def __init__(self, args):
        self.args = args
        self.docs = {}

    def _doc(self, key: str):
        path = getattr(self.args, key)
        if path is None:
            raise UsageError(f"--{key.replace('_', '-')} is required for {self.args.command}")
        try:
            doc = load_json(path)
        except OSError as exc:
            raise FormatError(f"cannot read {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}: invalid JSON: {exc}") from exc
        self.docs[key] = doc
        return doc, Path(path).parent

    def space(self, key: str = "space"):
        doc, _ = self._doc(key)
        return space_from_doc(doc)

    def spec(self, key: str) -> MaxNormSpec:
        doc, base = self._doc(key)
        return spec_from_doc(doc, base)

    def operator(self):
        doc, base = self._doc("op")
        return operator_from_doc(doc, base)

    def wc(self):
        doc, base = self._doc("op")
        return wc_from_doc(doc, base)

    def digest(self) -> str:
        a = self.args
        meta = {"command": a.command, "seed": a.seed, "samples": a.samples}
        return digest(meta, {k: self.docs[k] for k in sorted(self.docs)})


def _specs(inp: Inputs):
    T, A, B = inp.operator()
    if inp.args.space:
        A = inp.spec("space")
    if inp.args.space2:
        B = inp.spec("space2")
    if A.fspace != T.domain or B.fspace != T.codomain:
        raise FormatError("spec files do not match the operator's function spaces")
    return T, A, B


# -- commands --------------------------------------------------------------------


def _report_discrepancy(rep) -> dict:
    return {
        "pair": list(rep.pair),
        "verdict": rep.verdict.value,
        "witness": rep.witness,
        "blocking_evidence": {str(k): list(v) for k, v in rep.blocking_evidence.items()},
    }


def cmd_space_analyze(inp: Inputs):
    E = inp.space()
    ts = tsets(E)
    mat_ = discrepancy_matrix(E)
    pd, pdw = has_property_D(E), has_property_Dw(E)
    result = {
        "dim": E.dim,
        "n_vertices": len(E.vertices),
        "n_facets": len(E.facets),
        "n_tsets": len(ts),
        "vertices": jsonable(E.vertices),
        "tsets": [
            {"id": t.facet_id, "vertex_ids": sorted(t.incident_vertex_ids), "gamma": jsonable(gamma(E, t).functionals)}
            for t in ts
        ],
        "discrepancy": [_report_discrepancy(r) for r in mat_.values()],
        "not_discrepant_pairs": [list(k) for k, r in mat_.items() if not r.discrepant],
        "property_D": {
            "holds": pd.holds,
            "counterexample": _report_discrepancy(pd.counterexample) if pd.counterexample else None,
        },
        "property_Dw": {"holds": pdw.holds, "witness": pdw.witness},
    }
    if inp.args.space2:
        F = inp.space("space2")
        result["linear_isometries_to_space2"] = len(linear_isometries(E, F))
    return result, EXIT_OK


def cmd_space_tsets(inp: Inputs):
    E = inp.space()
    return {
        "n_tsets": len(E.facets),
        "tsets": [
            {
                "id": t.facet_id,
                "support": jsonable(t.support),
                "vertex_ids": sorted(t.incident_vertex_ids),
                "gamma": jsonable(gamma(E, t).functionals),
            }
            for t in tsets(E)
        ],
    }, EXIT_OK


def cmd_check_d(inp: Inputs):
    E = inp.space()
    pd = has_property_D(E)
    result = {
        "holds": pd.holds,
        "counterexample": _report_discrepancy(pd.counterexample) if pd.counterexample else None,
    }
    return result, EXIT_OK if pd.holds else EXIT_FALSE


def cmd_check_dw(inp: Inputs):
    E = inp.space()
    pdw = has_property_Dw(E)
    result = {
        "holds": pdw.holds,
        "witness": pdw.witness,
        "rejections": {str(k): _report_discrepancy(r) for k, r in pdw.rejections.items()},
    }
    if pdw.holds:
        r0 = pdw.witness
        result["witness_reports"] = [
            _report_discrepancy(discrepant(E, r0, r)) for r in range(len(E.facets)) if r != r0
        ]
    return result, EXIT_OK if pdw.holds else EXIT_FALSE


def cmd_op_verify(inp: Inputs):
    T, _, _ = inp.operator()
    chk = check_isometry(T)
    return {"isometry": chk.ok, "reason": chk.reason, "witness": jsonable(chk.witness)}, (
        EXIT_OK if chk.ok else EXIT_NOT_ISOMETRY
    )


def _failure(exc: DecompositionFailure):
    code = EXIT_NOT_ISOMETRY if exc.kind is FailureKind.NOT_ISOMETRY else EXIT_DECOMPOSITION
    return {"status": exc.kind.value, "witness": jsonable(exc.witness)}, code


def cmd_op_decompose(inp: Inputs):
    T, _, _ = inp.operator()
    try:
        D = decompose(T)
    except DecompositionFailure as exc:
        return _failure(exc)
    strong = verify_decomposition_strong(T, D)
    try:
        S = structural_decompose(T)
        agrees = S.phi == D.phi and S.fibers == D.fibers
    except DecompositionFailure:
        agrees = False
    return {
        "status": "decomposed",
        "decomposition": decomposition_to_doc(D),
        "strong": jsonable(strong),
        "structural_agrees": agrees,
    }, EXIT_OK


def cmd_op_make_wc(inp: Inputs):
    A, B, phi, fibers = inp.wc()
    T = make_weighted_composition(A.fspace, B.fspace, phi, fibers)
    return operator_to_doc(T, A, B), EXIT_OK


def _st_result(res) -> dict:
    if res.counterexample is None:
        return {"counterexample": None, "checked": res.checked}
    u, y0 = res.counterexample
    return {"counterexample": {"u": jsonable(u), "y0": y0}, "checked": res.checked}


def cmd_st_check(inp: Inputs):
    T, _, B = _specs(inp)
    res = st_falsify(T, B, inp.args.samples or 10000, inp.args.seed)
    return _st_result(res), EXIT_ST if res.found else EXIT_OK


def cmd_pipeline(inp: Inputs):
    T, A, B = _specs(inp)
    samples = inp.args.samples or 10000
    try:
        rep = theorem_app_pipeline(T, A, B, samples, inp.args.seed)
    except NotMaxNormIsometry as exc:
        return {"status": "NotMaxNormIsometry", "witness": jsonable(exc.check.witness)}, EXIT_NOT_ISOMETRY
    except StFalsified as exc:
        out = {"status": "StFalsified", "direction": exc.direction}
        out.update(_st_result(exc.result))
        return out, EXIT_ST
    except PropositionViolation as exc:
        return {"status": "PropositionViolation", "detail": str(exc)}, EXIT_REPLAY_FAILED
    except DecompositionFailure as exc:
        return _failure(exc)
    return {
        "status": "decomposed",
        "max_norm_exact": rep.max_norm_check.exact,
        "st_forward": _st_result(rep.st_forward),
        "st_inverse": _st_result(rep.st_inverse),
        "sup_isometry": rep.sup_isometry,
        "decomposition": decomposition_to_doc(rep.decomposition),
    }, EXIT_OK


def fixture_doc(name: str, seed: int = 0) -> dict:
    if name in fx.SPACES:
        return space_to_doc(fx.SPACES[name]())
    if name == "identity_op":
        return operator_to_doc(fx.identity_op())
    if name == "swap_op":
        return operator_to_doc(fx.swap_op())
    if name == "mixing_swap":
        return operator_to_doc(fx.mixing_swap())
    if name == "wc_random":
        return operator_to_doc(fx.wc_random(seed))
    if name == "metric_swap":
        return operator_to_doc(*fx.metric_swap())
    if name == "planted_zero_column":
        return operator_to_doc(*fx.planted_zero_column())
    raise UsageError(f"unknown fixture {name!r}; choose from {', '.join(FIXTURES)}")


HANDLERS = {
    "space-analyze": cmd_space_analyze,
    "space-tsets": cmd_space_tsets,
    "check-d": cmd_check_d,
    "check-dw": cmd_check_dw,
    "op-verify": cmd_op_verify,
    "op-decompose": cmd_op_decompose,
    "op-make-wc": cmd_op_make_wc,
    "st-check": cmd_st_check,
    "pipeline": cmd_pipeline,
}


# -- output ----------------------------------------------------------------------


def _text(obj, prefix: str = "") -> list[str]:
    if isinstance(obj, dict):
        lines = []
        for k in sorted(obj):
            lines.extend(_text(obj[k], f"{prefix}{k}."))
        return lines
    if isinstance(obj, list) and obj and all(isinstance(x, (dict, list)) for x in obj):
        lines = []
        for i, x in enumerate(obj):
            lines.extend(_text(x, f"{prefix}{i}."))
        return lines
    return [f"{prefix.rstrip('.')}: {json.dumps(obj)}"]


def render(report: dict, style: str) -> str:
    if style == "text":
        return "\n".join(_text(report)) + "\n"
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def run(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)

    t0 = time.perf_counter()
    try:
        if args.command == "fixtures":
            doc = fixture_doc(args.name, args.seed)
            _emit(render(doc, args.format), args.out)
            return EXIT_OK
        inp = Inputs(args)
        result, code = HANDLERS[args.command](inp)
        if args.command == "op-make-wc":
            _emit(render(result, args.format), args.out)
            return code
        if args.verify_witness:
            from .witness import replay

            ok, checks = replay(args.command, inp, load_json(args.verify_witness))
            report = {"format": FORMAT, "command": args.command, "replay": True, "verified": ok, "checks": checks}
            _emit(render(report, args.format), args.out)
            return EXIT_OK if ok else EXIT_REPLAY_FAILED
    except UsageError as exc:
        print(f"polyiso: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FormatError, SpaceError, DimensionMismatch, InvalidMetric, ShapeMismatch, UnknownLabel, ValueError,
            TypeError, ZeroDivisionError) as exc:
        print(f"polyiso: input error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_PARSE

    report = {
        "format": FORMAT,
        "command": args.command,
        "inputs_digest": inp.digest(),
        "seed": args.seed,
        "samples": args.samples,
        "exit_code": code,
        "result": result,
        "timing": {"elapsed_ms": round((time.perf_counter() - t0) * 1000, 3)},
    }
    _emit(render(report, args.format), args.out)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
