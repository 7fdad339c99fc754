"""Command-line front end.

Verbs: solve, wfs, trace, check-axioms, check-identities.  JSON is the
stable machine interface (one config header line, then payload lines);
text output is for humans.  Output is byte-identical across runs for the
same command, seed and inputs.

Exit codes: 0 ok, 1 identity/axiom findings, 2 syntax error,
3 no convergence, 4 internal consistency failure, 64 usage.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys

from stratfix import axioms as AX
from stratfix import identities as ID
from stratfix import models as M
from stratfix import programs as P
from stratfix import values as V
from stratfix.errors import (
    FixpointCheckFailed,
    InnerNotConverged,
    NotConverged,
    ProgramSyntaxError,
    StratfixError,
    UsageError,
)

EXIT_OK = 0
EXIT_FINDINGS = 1
EXIT_SYNTAX = 2
EXIT_NOT_CONVERGED = 3
EXIT_INCONSISTENT = 4
EXIT_USAGE = 64


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{message}\n{self.format_usage()}")


def _emit(obj, fmt, out):
    if fmt == "json":
        out.write(json.dumps(obj, separators=(",", ":")) + "\n")
    else:
        out.write(_as_text(obj) + "\n")


def _as_text(obj, indent=""):
    if isinstance(obj, dict):
        lines = []
        for k, v in obj.items():
            if isinstance(v, (dict, list)):
                lines.append(f"{indent}{k}:")
                lines.append(_as_text(v, indent + "  "))
            else:
                lines.append(f"{indent}{k}: {v}")
        return "\n".join(lines)
    if isinstance(obj, list):
        return "\n".join(_as_text(v, indent) for v in obj)
    return f"{indent}{obj}"


def _header(args, fields, fmt, out):
    config = {"command": args.verb, **fields}
    _emit({"config": config}, fmt, out)


# --- program verbs ------------------------------------------------------------


def _load_program(path: str) -> P.Program:
    with open(path, "r", encoding="utf-8") as fh:
        return P.parse_program(fh.read())


def _solve_options(args) -> P.SolveOptions:
    return P.SolveOptions(
        stratum_budget=args.budget,
        plateau_window=args.plateau,
        trace=getattr(args, "verb", "") == "trace",
    )


def _solve_payload(result: P.SolveResult) -> dict:
    return {
        "model": V.interp_to_json(result.model),
        "wfs": result.wfs(),
        "strata_used": result.strata_used,
        "settled_at": result.settled_at,
    }


def _cmd_solve(args, out):
    _header(
        args,
        {
            "path": args.path,
            "budget": args.budget,
            "plateau": args.plateau,
            "verify": args.verify,
        },
        args.format, out,
    )
    program = _load_program(args.path)
    result = P.solve(program, _solve_options(args))
    payload = _solve_payload(result)
    if args.verify:
        oracle = P.wfs_oracle(program)
        payload["oracle"] = oracle
        if oracle != payload["wfs"]:
            _emit(payload, args.format, out)
            _save_replay(args.path, program, payload, oracle)
            return EXIT_INCONSISTENT
    _emit(payload, args.format, out)
    return EXIT_OK


def _cmd_wfs(args, out):
    _header(args, {"path": args.path}, args.format, out)
    program = _load_program(args.path)
    result = P.solve(program, _solve_options(args))
    wfs = result.wfs()
    oracle = P.wfs_oracle(program)
    payload = {"wfs": wfs, "oracle": oracle, "agrees": wfs == oracle}
    _emit(payload, args.format, out)
    if wfs != oracle:
        _save_replay(args.path, program, {"wfs": wfs}, oracle)
        return EXIT_INCONSISTENT
    return EXIT_OK


def _cmd_trace(args, out):
    _header(
        args,
        {"path": args.path, "budget": args.budget, "plateau": args.plateau},
        args.format, out,
    )
    program = _load_program(args.path)
    result = P.solve(program, _solve_options(args))
    for record in result.trace.records:
        _emit(
            {
                "alpha": record.alpha,
                "x": V.interp_to_text(record.start),
                "z": V.interp_to_text(record.result),
                "inner_steps": record.inner_steps,
            },
            args.format, out,
        )
    _emit(_solve_payload(result), args.format, out)
    return EXIT_OK


def _save_replay(path, program, payload, oracle):
    blob = {
        "input": path,
        "program": program.to_text(),
        "solver": payload,
        "oracle": oracle,
    }
    digest = hashlib.sha256(
        json.dumps(blob, sort_keys=True).encode()
    ).hexdigest()[:12]
    name = f"stratfix-replay-{digest}.json"
    with open(name, "w", encoding="utf-8") as fh:
        json.dump(blob, fh, indent=2, sort_keys=True)
    print(f"replay bundle saved to {name}", file=sys.stderr)


# --- models and axioms -----------------------------------------------------------


def _builtin_model(name: str):
    if name in ("1", "terminal"):
        return M.terminal_model(1)
    if name.endswith("chain") and name[:-5].isdigit():
        return M.chain_model(int(name[:-5]), 2)
    if name == "diamond":
        return M.diamond_model(2)
    if name == "twisted-bit":
        return M.twisted_bit_model()
    if name.startswith("truth:"):
        parts = name.split(":")
        if len(parts) != 3:
            raise UsageError(f"bad model spec {name!r}; want truth:LEVEL:a,b")
        return M.truncated_truth_model(int(parts[1]), parts[2].split(","))
    return None


def _load_model(spec: str):
    builtin = _builtin_model(spec)
    if builtin is not None:
        return builtin
    try:
        with open(spec, "r", encoding="utf-8") as fh:
            return M.FiniteModel.from_json_dict(json.load(fh))
    except FileNotFoundError:
        raise UsageError(
            f"{spec!r} is neither a builtin model name nor a readable file"
        )


def _cmd_check_axioms(args, out):
    _header(
        args, {"model": args.model, "axioms": args.axioms}, args.format, out
    )
    model = _load_model(args.model)
    which = None if args.axioms == "all" else args.axioms.split(",")
    report = AX.check_axioms(model, which)
    payload = report.to_json()
    payload["order_maxima"] = {
        "leq_max": str(model.leq_max_id()),
        "stratified_max": str(model.stratified_max_id()),
    }
    _emit(payload, args.format, out)
    return EXIT_OK if report.holds() else EXIT_FINDINGS


# --- identity suites -----------------------------------------------------------------


def _cmd_check_identities(args, out):
    if args.config:
        with open(args.config, "r", encoding="utf-8") as fh:
            config = json.load(fh)
        suite = config.get("suite", args.suite)
        cases = config.get("cases", args.cases)
        seed = config.get("seed", args.seed)
        model_specs = config.get("models")
    else:
        suite, cases, seed, model_specs = (
            args.suite, args.cases, args.seed, None,
        )
    _header(
        args,
        {"suite": suite, "cases": cases, "seed": seed,
         "exhaustive": args.exhaustive},
        args.format, out,
    )

    if suite == "conway" and args.exhaustive:
        models = (
            [_load_model(s) for s in model_specs] if model_specs else None
        )
        results, summary = ID.run_conway_exhaustive(models)
    elif suite == "conway":
        results, summary = ID.run_conway_random(cases, seed)
    elif suite == "bekic":
        results, summary = ID.run_conway_random(cases, seed, ("bekic",))
    elif suite == "functorial":
        results, summary = ID.run_weak_functorial(cases, seed)
    elif suite == "abstraction":
        results, summary = ID.run_abstraction_exhaustive()
    elif suite == "induction":
        results, summary = ID.run_fp_induction_exhaustive()
    else:
        raise UsageError(f"unknown suite {suite!r}")

    for r in results:
        _emit(r.to_json(), args.format, out)
    _emit({"summary": summary}, args.format, out)
    return EXIT_OK if summary["failures"] == 0 else EXIT_FINDINGS


# --- entry point -------------------------------------------------------------------------


def build_parser() -> _Parser:
    parser = _Parser(prog="stratfix", description=__doc__)
    sub = parser.add_subparsers(dest="verb", required=True)

    def common(p):
        p.add_argument("--format", choices=("text", "json"), default="json")

    for verb, fn in (("solve", _cmd_solve), ("wfs", _cmd_wfs),
                     ("trace", _cmd_trace)):
        p = sub.add_parser(verb)
        p.add_argument("path", help="program file (.lp)")
        p.add_argument("--budget", type=int, default=None,
                       help="stratum budget (default 4*atoms+4)")
        p.add_argument("--plateau", type=int, default=None,
                       help="inner plateau window (default atoms+2)")
        if verb == "solve":
            p.add_argument("--verify", action="store_true",
                           help="cross-check against the alternating-fixpoint oracle")
        common(p)
        p.set_defaults(run=fn)

    p = sub.add_parser("check-axioms")
    p.add_argument("model", help="builtin name (2chain, diamond, twisted-bit, "
                                 "truth:N:a,b) or a model .json file")
    p.add_argument("--axioms", default="all",
                   help="comma-separated subset, e.g. refine,lub")
    common(p)
    p.set_defaults(run=_cmd_check_axioms)

    p = sub.add_parser("check-identities")
    p.add_argument("--suite", default="conway",
                   choices=("conway", "bekic", "functorial", "abstraction",
                            "induction"))
    p.add_argument("--cases", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--exhaustive", action="store_true",
                   help="run the catalog tier instead of seeded cases")
    p.add_argument("--config", default=None,
                   help="JSON file {suite, models, cases, seed}")
    common(p)
    p.set_defaults(run=_cmd_check_identities)
    return parser


def main(argv=None) -> int:
    out = sys.stdout
    try:
        args = build_parser().parse_args(argv)
        return args.run(args, out)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ProgramSyntaxError as exc:
        print(f"syntax error: {exc}", file=sys.stderr)
        return EXIT_SYNTAX
    except (NotConverged, InnerNotConverged) as exc:
        print(f"did not converge: {exc}", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    except FixpointCheckFailed as exc:
        print(f"internal consistency failure: {exc}", file=sys.stderr)
        return EXIT_INCONSISTENT
    except StratfixError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
