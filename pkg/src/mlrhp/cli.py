"""Command line entry point: `mlrhp <group> <action> [flags]`."""

import argparse
import json
import os
import sys

import mpmath as mp

from . import harness as hz


def _common(p):
    p.add_argument("--config", help="ExperimentConfig JSON file")
    p.add_argument("--n-sweep", help="comma separated list, e.g. 8,16,32,64")
    p.add_argument("--precision-bits", type=int)
    p.add_argument("--out-dir")
    p.add_argument("--format", choices=["json", "csv", "svg", "all"])


def load_config(args):
    cfg = hz.ExperimentConfig.load(args.config) if getattr(args, "config", None) else hz.ExperimentConfig()
    d = cfg.to_dict()
    if getattr(args, "n_sweep", None):
        d["n_sweep"] = [int(v) for v in args.n_sweep.split(",") if v.strip()]
    if getattr(args, "out_dir", None):
        d["out_dir"] = args.out_dir
    if getattr(args, "format", None):
        d["format"] = args.format
    cfg = hz.ExperimentConfig.from_dict(d).with_env()
    if getattr(args, "precision_bits", None):
        d = cfg.to_dict()
        d["precision_bits"] = args.precision_bits
        cfg = hz.ExperimentConfig.from_dict(d)
    return cfg


def _write(cfg, name, doc):
    os.makedirs(cfg.out_dir, exist_ok=True)
    path = os.path.join(cfg.out_dir, name + ".json")
    with open(path, "w") as fh:
        fh.write(json.dumps(hz._clean(doc), indent=2) + "\n")
    return path


def cmd_mop_solve(args, cfg):
    from .model import ModelDescriptor, orthogonality_residuals, poly_zeros, solve_mop
    m = ModelDescriptor(cfg.alpha1, cfg.alpha2, args.n1, args.n2, bits=cfg.precision_bits)
    with mp.workprec(m.working_bits()):
        P = solve_mop(m)
        res = max(orthogonality_residuals(P, m)) if m.n else mp.mpf(0)
        zs = poly_zeros(P)
        digits = int(m.working_bits() * 0.30103)
        doc = {"n1": m.n1, "n2": m.n2, "alpha": [m.alpha1, m.alpha2], "bits": m.working_bits(),
               "max_residual": float(res),
               "coefficients": [mp.nstr(c, digits) for c in P.coefficients],
               "zeros": [mp.nstr(z, 20) for z in zs]}
    print(json.dumps({"max_residual": doc["max_residual"], "largest_zero": doc["zeros"][-1] if zs else None}))
    print(_write(cfg, "mop", doc))
    return 0


def cmd_curve_check(args, cfg):
    from . import curve as cv
    st = hz._Setup(cfg)
    with mp.workprec(cfg.precision_bits):
        sc = cv.sign_chart_check(st.phases, st.cs, cfg.sign_points)
        mono = {name: cv.monodromy(st.curve, ctr, r) for name, ctr, r in
                (("0", 0, 0.05), ("x0", st.curve.x0, 0.05), ("xi", st.curve.xi_star, 0.05))}
    doc = {"curve": st.curve.to_dict(), "sign_chart": sc, "monodromy": {k: list(v) for k, v in mono.items()},
           "disks": [[d.name, d.center, d.radius] for d in st.cs.disks]}
    print(json.dumps({"x0": float(st.curve.x0), "xi_star": float(st.curve.xi_star), "sign_chart": sc["pass"]}))
    print(_write(cfg, "curve", doc))
    return 0 if sc["pass"] else 1


def cmd_outer_jumps(args, cfg):
    from .outer import axis_continuity, build_sheet_matrix, jump_residual, outer_N
    st = hz._Setup(cfg)
    with mp.workprec(cfg.precision_bits):
        m = st.model(cfg.n_sweep[0])
        sm = build_sheet_matrix(st.curve, m)
        N = lambda z, h=None: outer_N(sm, z, h)
        jr = jump_residual(N, st.curve, m, cfg.conductor_points)
        doc = {"max_residual": jr["max_residual"], "nodes": jr["nodes"],
               "axis_continuity": axis_continuity(N, st.curve), "N_infinity": hz._n_infinity(sm),
               "rows": [[name, float(x), float(r)] for name, x, r in jr["rows"]]}
    ok = doc["max_residual"] < cfg.tolerances["jump_residual"] and doc["N_infinity"] < cfg.tolerances["n_infinity"]
    print(json.dumps(hz._clean({k: doc[k] for k in ("max_residual", "nodes", "axis_continuity", "N_infinity")})))
    print(_write(cfg, "outer_jumps", doc))
    return 0 if ok else 1


def cmd_local_match(args, cfg):
    from .curve import ConformalityError
    from .local import build_P0, build_Px0, matching_sup
    from .outer import build_sheet_matrix
    st = hz._Setup(cfg)
    table = {"Ux0": [], "Uxi": [], "U0": []}
    notes = set()
    for n in cfg.n_sweep:
        m = st.model(n)
        with mp.workprec(m.working_bits()):
            sm = build_sheet_matrix(st.curve, m)
            for name in table:
                d = st.cs.disk(name)
                try:
                    P = build_P0(sm, st.phases, n) if name == "U0" else build_Px0(sm, st.phases, n, "x0" if name == "Ux0" else "xi")
                    table[name].append(float(matching_sup(P, sm, d.center, d.radius, cfg.matching_points)))
                except ConformalityError as exc:
                    table[name].append(None)
                    notes.add(str(exc))
    doc = {"ns": cfg.n_sweep, "sup": table, "notes": sorted(notes)}
    print(json.dumps(hz._clean(doc)))
    print(_write(cfg, "matching", doc))
    return 0


def cmd_error_solve(args, cfg):
    from .errorrhp import ParametrixUnavailable
    st = hz._Setup(cfg)
    cf = hz.closed_form_check(cfg.tolerances["closed_form"])
    doc = {"closed_form": cf}
    mode = "omit" if args.omit_hard_edge else cfg.hard_edge
    try:
        doc["error_problem"] = hz._error_problem(st, cfg, mode, cfg.panels)
        doc["mode"] = mode
        rc = 0
    except ParametrixUnavailable as exc:
        doc["error_problem"] = None
        doc["reason"] = str(exc)
        rc = 2
    print(json.dumps(hz._clean(doc)))
    print(_write(cfg, "error", doc))
    return rc


def cmd_verify(args, cfg):
    names = list(hz.EXPERIMENTS) if args.what == "all" else [args.what]
    ok = True
    for name in names:
        for rep in hz.EXPERIMENTS[name](cfg):
            paths = hz.emit(rep, cfg.format, cfg.out_dir)
            print("%-12s %s  %s" % (rep.experiment, "PASS" if rep.passed else "FAIL", " ".join(paths)))
            ok = ok and rep.passed
    return 0 if ok else 1


def build_parser():
    ap = argparse.ArgumentParser(prog="mlrhp", description="Steepest-descent verification toolkit for the multiple Laguerre RHP")
    sub = ap.add_subparsers(dest="group", required=True)

    g = sub.add_parser("mop").add_subparsers(dest="action", required=True)
    p = g.add_parser("solve", help="Gram solve, residuals and zeros")
    p.add_argument("--n1", type=int, required=True)
    p.add_argument("--n2", type=int, required=True)
    _common(p)
    p.set_defaults(func=cmd_mop_solve)

    g = sub.add_parser("curve").add_subparsers(dest="action", required=True)
    p = g.add_parser("check", help="branch points, monodromy and sign chart")
    _common(p)
    p.set_defaults(func=cmd_curve_check)

    g = sub.add_parser("outer").add_subparsers(dest="action", required=True)
    p = g.add_parser("jumps", help="conductor jump residuals of N and N at infinity")
    _common(p)
    p.set_defaults(func=cmd_outer_jumps)

    g = sub.add_parser("local").add_subparsers(dest="action", required=True)
    p = g.add_parser("match", help="sup |P N^-1 - I| on the disk boundaries")
    _common(p)
    p.set_defaults(func=cmd_local_match)

    g = sub.add_parser("error").add_subparsers(dest="action", required=True)
    p = g.add_parser("solve", help="small-norm problem for R")
    p.add_argument("--omit-hard-edge", action="store_true", help="diagnostic run without the U0 circle")
    _common(p)
    p.set_defaults(func=cmd_error_solve)

    p = sub.add_parser("verify", help="run experiments and write reports")
    p.add_argument("what", choices=["outer", "edges", "regularity", "zeros", "all"])
    _common(p)
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    cfg = load_config(args)
    return args.func(args, cfg)


if __name__ == "__main__":
    sys.exit(main())
