"""Batch command-line front end.

Exit codes: 0 success, 2 infeasible or violation (a report is still
written), 1 error, 64 usage error.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import acceptance, bounds, cf, hankel, opspace, parrott, poly
from .config import resolve, tolerance_of
from .errors import CFLabError
from .linalg import as_matrix, is_contraction, matrix_from_json, operator_norm

SCHEMA = "cf-lab/1"
EXIT_OK, EXIT_ERROR, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2, 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    return x


def _complex(s: str) -> complex:
    try:
        return complex(s.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {s!r}") from None


def _read_json(path: str):
    return json.loads(Path(path).read_text())


# -- subcommand handlers -------------------------------------------------------
# Each returns (result dict, exit code, optional table rows).

def cmd_cf1(args, cfg, tol):
    prob = cf.CFProblem1D(args.a1, args.a2)
    feasible = cf.cf1_feasible(prob, tol)
    res = {"feasible": feasible, "a1": prob.a1, "a2": prob.a2,
           "defect": 1 - abs(prob.a2) - abs(prob.a1) ** 2}
    if not feasible:
        res["toeplitz_norm"] = operator_norm(np.array([[prob.a1, prob.a2], [0, prob.a1]]))
        return res, EXIT_VIOLATION, None
    f = cf.cf1_construct(prob, args.theta, tol)
    coeffs = f.taylor(8)
    res["numerator"] = f.num.coeff_list()
    res["denominator"] = f.den.coeff_list()
    res["blocks"] = coeffs
    res["certificates"] = {
        "sup_norm": f.sup_norm(4096),
        "taylor_residual": max(abs(coeffs[0]), abs(coeffs[1] - prob.a1), abs(coeffs[2] - prob.a2)),
    }
    rows = [{"k": k, "re": c.real, "im": c.imag} for k, c in enumerate(coeffs)]
    return res, EXIT_OK, rows


def cmd_cf2(args, cfg, tol):
    try:
        vals = [_complex(s) for s in args.coeffs.split(",")]
    except argparse.ArgumentTypeError as exc:
        raise UsageError(str(exc)) from None
    if len(vals) != 5:
        raise UsageError("--coeffs needs five numbers a10,a01,a20,a11,a02")
    prob = cf.CFProblem2D(*vals)
    nec = cf.cf2_necessary_report(prob, window=cfg["window"], tol=tol)
    res = {"feasible": nec.feasible, "pointwise_max": nec.pointwise_max,
           "operator_norm": nec.operator_norm}
    if not nec.feasible:
        return res, EXIT_VIOLATION, None
    out = cf.cf2_extend(prob, cfg["max_degree"], cfg["window"], args.mode, tol)
    res.update({
        "status": out.status,
        "blocks": [cf.format_laurent(b) for b in out.blocks],
        "block_coefficients": [{str(k): v for k, v in b.items()} for b in out.blocks],
        "violation_k": out.violation_k,
        "forced_symbol": cf.format_laurent(out.forced_symbol) if out.forced_symbol else None,
        "degenerate": out.degenerate,
        "caveat": out.caveat,
        "certificates": {"norms": out.norms, "residuals": out.residuals},
    })
    rows = [{"k": k, "symbol": cf.format_laurent(b)} for k, b in enumerate(out.blocks, start=1)]
    return res, (EXIT_OK if out.extended else EXIT_VIOLATION), rows


def _symbol_from_json(obj) -> dict:
    return {tuple(t["exp"]): complex(t.get("re", 0.0), t.get("im", 0.0)) for t in obj["terms"]}


def cmd_nehari(args, cfg, tol):
    phi = _symbol_from_json(_read_json(args.symbol))
    br = hankel.nehari_gap(phi, cfg["window"], cfg["budget"], tol=tol)
    res = {"lower": br.lower, "upper": br.upper, "window": br.window, "budget": br.budget,
           "monotonicity_trace": [{"budget": b, "upper": u} for b, u in br.trace]}
    return res, EXIT_OK, res["monotonicity_trace"]


def cmd_bounds(args, cfg, tol):
    if args.what == "c2":
        e = bounds.c2_lower_experiment(cfg["grid"])
        return vars(e), EXIT_OK, None
    if args.what == "minips":
        v = bounds.min_inner_product_sum(args.m, args.n, args.restarts, cfg["seed"])
        return {"m": args.m, "n": args.n, "minimum": v, "expected": -args.m / 2}, EXIT_OK, None
    if args.what == "d2probe":
        r = bounds.second_derivative_bound_probe(args.samples, cfg["seed"], tol=tol)
        return {"max_norm": r.max_norm, "bound": bounds.SECOND_DERIVATIVE_BOUND,
                "fraction_of_bound": r.fraction_of_bound, "witness": r.witness_norm,
                "samples": r.samples}, EXIT_OK, None
    if args.what == "l1norm":
        if not args.matrix:
            raise UsageError("bounds l1norm needs --matrix")
        A = matrix_from_json(_read_json(args.matrix))
        s = bounds.linf_to_l1_search(A, cfg["grid"])
        return {"value": s.value, "z": s.z, "w": s.w, "sign_value": s.sign_value}, EXIT_OK, None
    raise UsageError(f"unknown bounds experiment {args.what}")


def cmd_opspace(args, cfg, tol):
    if args.what == "demo":
        r = opspace.parrott_oss_demo(cfg["grid"], tol=tol)
        return vars(r), EXIT_OK, None
    if args.what == "refute":
        if not args.thetas:
            raise UsageError("opspace refute needs --thetas")
        r = opspace.finite_embedding_refuter(_read_json(args.thetas))
        return vars(r), EXIT_OK, None
    if args.what == "minnorm":
        if not args.matrices:
            raise UsageError("opspace minnorm needs --matrices")
        mats = [matrix_from_json(m) for m in _read_json(args.matrices)]
        val, z = opspace.min_norm_search(mats, cfg["grid"])
        return {"min_norm": val, "maximizer": z}, EXIT_OK, None
    raise UsageError(f"unknown opspace action {args.what}")


def cmd_norm(args, cfg, tol):
    A = matrix_from_json(_read_json(args.matrix))
    return {"operator_norm": operator_norm(A), "is_contraction": is_contraction(A, tol),
            "rows": A.shape[0], "cols": A.shape[1]}, EXIT_OK, None


def cmd_verify_vn(args, cfg, tol):
    rng = np.random.default_rng(cfg["seed"])
    # instances are drawn serially so the result does not depend on --threads
    cases = []
    for _ in range(args.instances):
        n = int(rng.integers(2, 4))
        p = poly.parse_poly(args.poly) if args.poly else acceptance.random_poly(n, 3, rng)
        cases.append((p, acceptance.random_3x3_class(p.nvars, rng)))

    def check(case):
        p, T = case
        lhs = operator_norm(poly.functional_calculus(p, T, tol))
        sup = poly.sup_norm_torus(p, min(cfg["grid"], 96 if p.nvars == 2 else 40))
        return p.nvars, lhs, sup

    with ThreadPoolExecutor(max_workers=max(1, cfg["threads"])) as pool:
        results = list(pool.map(check, cases))
    rows = [{"instance": i, "nvars": n, "lhs": lhs, "sup": sup, "violation": lhs > sup + tol.grid}
            for i, (n, lhs, sup) in enumerate(results)]
    violations = sum(r["violation"] for r in rows)
    res = {"instances": args.instances, "violations": violations,
           "max_excess": max((r["lhs"] - r["sup"] for r in rows), default=0.0)}
    return res, (EXIT_VIOLATION if violations else EXIT_OK), rows


def cmd_repro(args, cfg, tol):
    ids = sorted(acceptance.CRITERIA) if not args.criteria else [int(s) for s in args.criteria.split(",")]
    checks = [acceptance.CRITERIA[i]() for i in ids]
    res = {str(c.id): {"title": c.title, "passed": c.passed, **c.details} for c in checks}
    anchors = {}
    for c in checks:
        for key in ("pV_supnorm", "AV_l1norm", "vk_value", "ratio_best"):
            if key in c.details:
                anchors[key] = c.details[key]
    summary = {"suite": args.suite, "criteria": res, **anchors,
               "passed": sum(c.passed for c in checks), "failed": sum(not c.passed for c in checks)}
    for c in checks:
        print(c.line(), file=sys.stderr)
    rows = [{"id": c.id, "title": c.title, "passed": c.passed} for c in checks]
    return summary, (EXIT_OK if all(c.passed for c in checks) else EXIT_VIOLATION), rows


# -- parser --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="TOML file with defaults")
    common.add_argument("--seed", type=int)
    common.add_argument("--threads", type=int)
    common.add_argument("--grid", type=int)
    common.add_argument("--window", type=int)
    common.add_argument("--tol-algebraic", type=float)
    common.add_argument("--tol-spectral", type=float)
    common.add_argument("--tol-grid", type=float)
    common.add_argument("--out", help="write the JSON report here instead of stdout")
    common.add_argument("--csv", help="also write tabular results as CSV")

    p = _Parser(prog="cf-lab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("cf1", parents=[common], help="one-variable CF problem")
    s.add_argument("--a1", type=_complex, required=True)
    s.add_argument("--a2", type=_complex, required=True)
    s.add_argument("--theta", type=float, default=0.0)

    s = sub.add_parser("cf2", parents=[common], help="two-variable CF extension")
    s.add_argument("--coeffs", required=True, help="a10,a01,a20,a11,a02")
    s.add_argument("--max-degree", type=int, dest="max_degree")
    s.add_argument("--mode", choices=["periodic", "toeplitz"], default="periodic")

    s = sub.add_parser("nehari", parents=[common], help="Hankel norm and distance bracket")
    s.add_argument("--symbol", required=True)
    s.add_argument("--budget", type=int)

    s = sub.add_parser("bounds", parents=[common], help="extremal experiments")
    s.add_argument("what", choices=["c2", "minips", "d2probe", "l1norm"])
    s.add_argument("--m", type=int, default=3)
    s.add_argument("--n", type=int, default=2)
    s.add_argument("--restarts", type=int, default=10)
    s.add_argument("--samples", type=int, default=2000)
    s.add_argument("--matrix")

    s = sub.add_parser("opspace", parents=[common], help="operator-space demos")
    s.add_argument("what", choices=["demo", "refute", "minnorm"])
    s.add_argument("--thetas")
    s.add_argument("--matrices")

    s = sub.add_parser("norm", parents=[common], help="operator norm of a matrix file")
    s.add_argument("--matrix", required=True)

    s = sub.add_parser("verify-vn", parents=[common], help="random von Neumann checks")
    s.add_argument("--instances", type=int, default=100)
    s.add_argument("--poly", help="fixed polynomial, e.g. 'z1^2 - 2 z1 z2'")

    s = sub.add_parser("repro", parents=[common], help="run the acceptance suite")
    s.add_argument("--suite", default="paper", choices=["paper"])
    s.add_argument("--criteria", help="comma-separated subset of criterion ids")
    return p


HANDLERS = {
    "cf1": cmd_cf1, "cf2": cmd_cf2, "nehari": cmd_nehari, "bounds": cmd_bounds,
    "opspace": cmd_opspace, "norm": cmd_norm, "verify-vn": cmd_verify_vn, "repro": cmd_repro,
}


def _write_csv(path: str, rows):
    rows = [_jsonable(r) for r in rows]
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]))
        w.writeheader()
        w.writerows(rows)


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"cf-lab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    flags = {
        "seed": args.seed, "threads": args.threads, "grid": args.grid, "window": args.window,
        "max_degree": getattr(args, "max_degree", None), "budget": getattr(args, "budget", None),
        "tolerance": {"algebraic": args.tol_algebraic, "spectral": args.tol_spectral,
                      "grid": args.tol_grid},
    }
    cfg, tol = None, None
    try:
        cfg = resolve(args.config, flags)
        tol = tolerance_of(cfg)
        result, code, rows = HANDLERS[args.command](args, cfg, tol)
    except UsageError as exc:
        print(f"cf-lab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CFLabError, ValueError, OSError, KeyError, ArithmeticError) as exc:
        result, code, rows = {"error": type(exc).__name__, "message": str(exc)}, EXIT_ERROR, None
    report = {"schema": SCHEMA, "command": args.command,
              "seed": cfg["seed"] if cfg else None,
              "tolerance": tol.as_dict() if tol else None,
              "config": {k: cfg[k] for k in ("grid", "window", "max_degree", "budget", "threads")}
              if cfg else None,
              "result": result}
    text = json.dumps(_jsonable(report), indent=2, ensure_ascii=False)
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        print(text)
    if args.csv and rows:
        _write_csv(args.csv, rows)
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
