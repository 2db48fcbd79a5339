"""Command-line interface.

Exit codes: 0 success, 1 invalid input data, 2 verification failure,
3 budget exhausted.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import io
from .bounds import dgs_bound, f_k, neg_bound
from .combinatorics import ramsey_pair
from .decomposition import decompose, verify_trace
from .errors import (
    AmbiguousMatchError,
    HypothesisError,
    RamseyFailure,
    SphereCodeError,
)
from .geometry import (
    VIOLATION,
    Code,
    ProjectionConfig,
    factor_gram,
    project_chain,
    validate_code,
)
from .search import SearchConfig, icosahedron_code, max_code_search, simplex_code

EXIT_OK, EXIT_INPUT, EXIT_VERIFY, EXIT_BUDGET = 0, 1, 2, 3


class _Exit(Exception):
    def __init__(self, code, payload):
        super().__init__(payload.get("error", ""))
        self.code = code
        self.payload = payload


def _config(args) -> ProjectionConfig:
    cfg = ProjectionConfig.from_env()
    if args.tol is not None:
        cfg = cfg.with_tol(args.tol)
    return cfg


def _read_code(path: str, cfg) -> Code:
    if path == "-":
        text = sys.stdin.read()
        data = io._parse(text, "<stdin>")
    else:
        with open(path) as fh:
            data = io._parse(fh.read(), path)
    loaded = io.code_from_dict(data, cfg)
    if isinstance(loaded, np.ndarray):
        return factor_gram(loaded, data["dim"], cfg)
    return loaded


def _emit(args, payload: dict, text: str) -> None:
    if args.json:
        print(json.dumps(payload))
    else:
        print(text)


def cmd_validate(args, cfg) -> int:
    code = _read_code(args.code, cfg)
    L = io.load_angles(args.angles)
    try:
        cls = validate_code(code, L, cfg)
    except AmbiguousMatchError as exc:
        raise _Exit(EXIT_VERIFY, {"error": "ambiguous_match", "pair": list(exc.pair),
                                  "value": exc.value, "angles": exc.angles})
    n = len(code)
    pairs = []
    lines = []
    for i in range(n):
        for j in range(i + 1, n):
            c = int(cls.colors[i, j])
            v = float(cls.products[i, j])
            label = "violation" if c == VIOLATION else str(c)
            pairs.append({"i": i, "j": j, "product": v, "color": label})
            lines.append(f"{i} {j} {v:+.12f} {label}")
    lines.append("valid" if cls.valid else f"invalid: {len(cls.violations)} violating pairs")
    _emit(args, {"valid": cls.valid, "pairs": pairs}, "\n".join(lines))
    return EXIT_OK if cls.valid else EXIT_VERIFY


def cmd_project(args, cfg) -> int:
    code = _read_code(args.code, cfg)
    if args.basis:
        basis = [int(s) for s in args.basis.split(",") if s.strip()]
    elif args.pivot is not None:
        basis = [args.pivot]
    else:
        raise _Exit(EXIT_INPUT, {"error": "one of --pivot or --basis is required"})
    n = len(code)
    if any(not 0 <= b < n for b in basis) or len(set(basis)) != len(basis):
        raise _Exit(EXIT_INPUT, {"error": f"basis indices must be distinct and in [0, {n})"})
    rest = [i for i in range(n) if i not in basis]
    projected, _ = project_chain(code.vectors[rest], code.vectors[basis], cfg)
    out = Code(code.dim, projected.reshape(-1, code.dim))
    sys.stdout.write(io.dumps_code(out, source=f"projected away from {basis}"))
    return EXIT_OK


def cmd_bound(args, cfg) -> int:
    def need(name):
        if getattr(args, name) is None:
            raise _Exit(EXIT_INPUT, {"error": f"--{name} is required for --kind {args.kind}"})
        return getattr(args, name)

    if args.kind == "dgs":
        value = dgs_bound(need("d"), need("k"))
        _emit(args, {"kind": "dgs", "value": value}, str(value))
    elif args.kind == "neg":
        value = neg_bound(need("beta"))
        _emit(args, {"kind": "neg", "value": value}, str(value))
    else:
        lv = f_k(need("beta"), need("k"))
        _emit(args, {"kind": "fk", "log2": lv.log2}, f"2^{lv.log2!r}")
    return EXIT_OK


def cmd_ramsey(args, cfg) -> int:
    coloring = io.load_coloring(args.coloring)
    try:
        pair = ramsey_pair(coloring, args.k, args.t, args.m, force=args.force)
    except RamseyFailure as exc:
        raise _Exit(EXIT_VERIFY, exc.to_dict())
    except HypothesisError as exc:
        raise _Exit(EXIT_INPUT, {"error": "hypothesis", "message": str(exc)})
    d = pair.to_dict()
    _emit(args, d, f"color {pair.color}\nX {list(pair.X)}\nY {list(pair.Y)}")
    return EXIT_OK


def cmd_decompose(args, cfg) -> int:
    code = _read_code(args.code, cfg)
    L = io.load_angles(args.angles)
    trace = decompose(code, L, cfg, force_t=args.force_t)
    text = io.dumps_trace(trace)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    status = "verified" if trace.verified else "FAILED"
    summary = {"case": trace.root.case.value, "bound": trace.claimed_bound,
               "verified": trace.verified, "size": len(code)}
    _emit(args, summary,
          f"{trace.root.case.value}: |C| = {len(code)} <= {trace.claimed_bound} ({status})")
    return EXIT_OK if trace.verified else EXIT_VERIFY


def cmd_verify(args, cfg) -> int:
    trace = io.load_trace(args.trace)
    report = verify_trace(trace, cfg)
    payload = {"passed": report.passed, "bound": report.bound,
               "stamp": trace.verified, "stamp_reproduced": trace.verified == report.passed,
               "failures": [{"node": p, "message": m} for p, m in report.failures]}
    lines = [f"{'pass' if report.passed else 'FAIL'} bound={report.bound}"]
    lines += [f"{p}: {m}" for p, m in report.failures]
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK if report.passed else EXIT_VERIFY


def cmd_search(args, cfg) -> int:
    try:
        values = [float(v) for v in args.values.split(",") if v.strip()]
    except ValueError:
        raise _Exit(EXIT_INPUT, {"error": f"bad --values {args.values!r}"})
    scfg = SearchConfig(tuple(values), args.d, args.nmax, args.budget,
                        not args.no_symmetry, cfg)
    result = max_code_search(scfg)
    lines = [f"best_n {result.best_n}", f"exhaustive {str(result.exhaustive).lower()}",
             f"nodes {result.nodes_visited}", "witness:"]
    lines += [" ".join(f"{v:+.6f}" for v in row) for row in result.witness]
    _emit(args, result.to_dict(), "\n".join(lines))
    return EXIT_OK if result.exhaustive else EXIT_BUDGET


def cmd_witness(args, cfg) -> int:
    if args.kind == "simplex":
        if args.d is None:
            raise _Exit(EXIT_INPUT, {"error": "--d is required for simplex"})
        code, name = simplex_code(args.d), f"simplex-{args.d}"
    else:
        code, name = icosahedron_code(), "icosahedron"
    text = io.dumps_code(code, name=name, source="spherecode witness")
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="structured output")
    common.add_argument("--tol", type=float, default=None,
                        help="tolerance override (beats SPHERECODE_TOL)")
    common.add_argument("--seed", type=int, default=None,
                        help="reserved for corpus generators; commands are deterministic")
    common.add_argument("--threads", type=int, default=1)

    parser = argparse.ArgumentParser(prog="spherecode", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="classify every pair of a code")
    p.add_argument("--code", default="-", help="code file, '-' for stdin")
    p.add_argument("--angles", required=True, help="angle file or inline JSON")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("project", parents=[common], help="normalized projection of a code")
    p.add_argument("--code", default="-")
    p.add_argument("--pivot", type=int)
    p.add_argument("--basis", help="comma-separated indices spanning the removed subspace")
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("bound", parents=[common], help="evaluate a closed-form bound")
    p.add_argument("--kind", choices=("dgs", "neg", "fk"), required=True)
    p.add_argument("--d", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--beta", type=float)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("ramsey", parents=[common], help="greedy monochromatic pair")
    p.add_argument("--coloring", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--force", action="store_true", help="run even if n <= k^(kt) m")
    p.set_defaults(func=cmd_ramsey)

    p = sub.add_parser("decompose", parents=[common], help="write a verified case trace")
    p.add_argument("--code", default="-")
    p.add_argument("--angles", required=True)
    p.add_argument("--out")
    p.add_argument("--force-t", type=int, default=None,
                   help="small Ramsey block size for exercising the projection step")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("verify", parents=[common], help="re-verify a trace file")
    p.add_argument("--trace", required=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("search", parents=[common], help="exhaustive Gram search")
    p.add_argument("--values", required=True, help="comma-separated inner products")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--nmax", type=int, default=8)
    p.add_argument("--budget", type=float, default=None, help="seconds")
    p.add_argument("--no-symmetry", action="store_true")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("witness", parents=[common], help="emit a classical code")
    p.add_argument("--kind", choices=("simplex", "icosahedron"), required=True)
    p.add_argument("--d", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_witness)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config(args)
        return args.func(args, cfg)
    except _Exit as exc:
        code, payload = exc.code, exc.payload
    except (SphereCodeError, ValueError, OSError) as exc:
        code = EXIT_INPUT
        payload = {"error": type(exc).__name__, "message": str(exc)}
        field = getattr(exc, "field", None)
        if field:
            payload["field"] = field
    if args.json:
        print(json.dumps(payload))
    else:
        print(f"error: {payload.get('message') or payload.get('error')}", file=sys.stderr)
        extra = {k: v for k, v in payload.items() if k not in ("error", "message")}
        if extra:
            print(json.dumps(extra), file=sys.stderr)
    return code

if __name__ == "__main__":
    sys.exit(main())
