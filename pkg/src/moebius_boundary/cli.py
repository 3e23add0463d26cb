"""Command-line entry point.

Every invocation prints one JSON record

    {"command", "inputs", "seed", "results", "residuals", "status"}

with exact rationals written as "p/q".  ``--tsv`` switches the commands
that produce tables (``classify`` orbits, ``schwarzian`` grids) to
tab-separated columns for external plotting.  The exit status is 0 iff
``status`` is "pass".
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction

import numpy as np

from . import boundary_metrics as bm
from . import classifier as cl
from . import disk as dk
from . import extension as ex
from . import schwarzian as sz
from . import suites
from . import tree as tr
from .errors import NotMoebius, ParseError, ProjectionNotConverged


def to_jsonable(obj):
    if isinstance(obj, Fraction):
        return bm.format_fraction(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, tr.TreePoint):
        return {"segment": obj.segment, "offset": bm.format_fraction(obj.offset)}
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    return obj


def record(command, inputs, seed, results, residuals, status):
    return {
        "command": command,
        "inputs": inputs,
        "seed": seed,
        "results": results,
        "residuals": residuals,
        "status": status,
    }


def parse_end_map(text: str) -> dict:
    """'a=b,c=d' -> {'a': 'b', 'c': 'd'}."""
    out = {}
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        if "=" not in item:
            raise ParseError(f"bad end map item {item!r}; expected src=dst")
        k, v = (s.strip() for s in item.split("=", 1))
        out[k] = v
    return out


def matrix_transform(entries, model: str) -> dk.MoebiusTransform:
    if model == "halfplane":
        return dk.MoebiusTransform.from_halfplane(*(float(Fraction(e)) for e in entries))
    a, b = complex(entries[0]), complex(entries[1])
    return dk.MoebiusTransform.from_disk_matrix([[a, b], [b.conjugate(), a.conjugate()]])


# -- commands ----------------------------------------------------------------


def cmd_verify(args):
    reports = suites.run_suite(
        args.suite,
        seed=args.seed,
        cases=args.cases,
        **{k: v for k, v in (("precision", args.precision_bits), ("N", args.N), ("samples", args.samples)) if v is not None},
    )
    results, residuals = [], []
    for rep in reports:
        for p in rep.properties:
            results.append(
                {
                    "suite": rep.suite,
                    "property": p.name,
                    "passed": p.passed,
                    "worst": p.worst,
                    "tolerance": p.tolerance,
                    "cases": p.cases,
                    "seconds": round(p.seconds, 3),
                    "reproducer": p.reproducer,
                    **p.extra,
                }
            )
            residuals.append(p.worst)
    ok = all(r.passed for r in reports)
    inputs = {"suite": args.suite, "cases": args.cases}
    return record("verify", inputs, args.seed, results, residuals, "pass" if ok else "fail")


def cmd_project(args):
    if args.tree:
        T = tr.read_tree(args.tree)
        rho = bm.read_logmetric(args.metric)
        point, gap = tr.project_metric_tree(T, rho)
        res = {"point": point, "gap": gap}
        return record("project", {"tree": args.tree, "metric": args.metric}, args.seed, [res], [gap], "pass" if gap == 0 else "fail")
    h = sz.read_diffeo(args.involution)
    sm = ex.metric_from_involution(h, args.samples or 1024)
    rho = sm.metric
    if args.matrix:
        rho = rho.pushforward(matrix_transform(args.matrix, args.model))
    inputs = {"involution": args.involution, "matrix": args.matrix, "model": args.model}
    if sm.closure_error > 1e-9:
        res = {"error": "involution does not give a closed conformal factor", "closure_error": sm.closure_error}
        return record("project", inputs, args.seed, [res], [sm.closure_error], "fail")
    r = ex.project_disk(rho, tol=args.tol or 1e-8)
    res = {"point": r.point, "gap": r.value, "certified_delta": r.certified_delta, "iterations": r.iterations}
    ok = r.value <= ex.HALF_LOG2 + 1e-3
    return record("project", inputs, args.seed, [res], [r.value], "pass" if ok else "fail")


def _tree_pairs(T, rng, count):
    pts = [tr.random_point(T, rng) for _ in range(max(4, int(math.isqrt(2 * count)) + 2))]
    pairs = [(a, b) for i, a in enumerate(pts) for b in pts[i + 1 :]]
    return rng.sample(pairs, min(count, len(pairs)))


def cmd_extend(args):
    import random

    cases = args.cases or 100
    if args.tree:
        T1 = tr.read_tree(args.tree)
        T2 = tr.read_tree(args.tree2) if args.tree2 else T1
        end_map = parse_end_map(args.ends)
        inputs = {"tree": args.tree, "tree2": args.tree2, "ends": end_map}
        try:
            F = tr.tree_moebius_extend(T1, T2, end_map)
        except NotMoebius as exc:
            res = {"error": str(exc), "witness": exc.witness, "values": exc.values}
            return record("extend", inputs, args.seed, [res], [], "fail")
        rng = random.Random(args.seed)
        defect = F.distance_defect(_tree_pairs(T1, rng, cases))
        coherent = all(F.boundary_coherent(e) for e in T1.end_labels)
        res = {"defect": defect, "pairs": cases, "boundary_coherent": coherent}
        ok = defect == 0 and coherent
        return record("extend", inputs, args.seed, [res], [defect], "pass" if ok else "fail")
    rng = np.random.default_rng(args.seed)
    pts = [suites._random_disk_point(rng, 3.0) for _ in range(max(4, int(math.isqrt(2 * cases)) + 2))]
    pairs = [(a, b) for i, a in enumerate(pts) for b in pts[i + 1 :]][:cases]
    if args.diffeo:
        f = sz.read_diffeo(args.diffeo)
        E = ex.conf_extension(f, samples=args.samples or 1024)
        s_norm = sz.schwarzian_sup(f)
        bound = suites.LOG2 + 12 * s_norm
        defect = E.defect(pairs)
        res = {"defect": defect, "bound": bound, "schwarzian_sup": s_norm, "pairs": len(pairs)}
        ok = defect <= bound + (args.tol or 1e-3)
        return record("extend", {"diffeo": args.diffeo}, args.seed, [res], [defect], "pass" if ok else "fail")
    m = matrix_transform(args.matrix, args.model)
    F = ex.DiskExtension(m, start=0j)
    defect = F.defect(pairs)
    density = F.density([suites._random_disk_point(rng, 3.0) for _ in range(20)])
    coherence = F.boundary_coherence(suites._random_disk_point(rng, 1.0), float(rng.uniform(0, dk.TWO_PI)))
    isometry_error = max(dk.disk_distance(F(p), m.apply_point(p)) for p in pts)
    tol = args.tol or 1e-3
    res = {
        "defect": defect,
        "density": density,
        "boundary_coherence": coherence,
        "distance_to_matrix_isometry": isometry_error,
        "pairs": len(pairs),
    }
    ok = defect <= suites.LOG2 + tol and density <= suites.LOG2 + tol and coherence[-1] <= 1e-3
    inputs = {"matrix": args.matrix, "model": args.model}
    return record("extend", inputs, args.seed, [res], [defect, density], "pass" if ok else "fail")


def cmd_classify(args):
    N = args.N or cl.DEFAULT_N
    if args.tree:
        import random

        T = tr.read_tree(args.tree)
        end_map = parse_end_map(args.ends)
        inputs = {"tree": args.tree, "ends": end_map, "N": N}
        try:
            F = tr.tree_moebius_extend(T, T, end_map)
        except NotMoebius as exc:
            return record("classify", inputs, args.seed, [{"error": str(exc), "witness": exc.witness}], [], "fail")
        x = tr.random_point(T, random.Random(args.seed))
        c = cl.classify_orbit(F, x, N=N)
        res = {"class": c.kind, "N": c.N, "basepoint": x, **c.diagnostics}
        return record("classify", inputs, args.seed, [res], [c.record.consecutive_defect], "pass")
    kw = {"N": N}
    if args.tol is not None:
        kw["cluster_tol"] = args.tol
    if args.precision_bits:
        kw["precision"] = args.precision_bits
    v = cl.classify_matrix(args.matrix, args.model, **kw)
    c = v.classification
    if args.tsv:
        rec = c.record
        rows = ["n\tdisplacement\tdirection\tre\tim"]
        for n in range(-rec.N, rec.N + 1):
            p = rec.at(n)
            rows.append(f"{n}\t{rec.d(n)!r}\t{rec.theta(n)!r}\t{p.real!r}\t{p.imag!r}")
        return "\n".join(rows)
    res = {
        "class": v.kind,
        "orbit_class": c.kind,
        "trace_oracle": v.oracle,
        "near_parabolic": v.in_band,
        "N": c.N,
        "fixed_points": c.fixed_points,
        "cluster_directions": c.cluster,
        **c.diagnostics,
    }
    ok = v.kind == v.oracle or (v.in_band and v.kind == cl.UNDECIDED)
    inputs = {"matrix": args.matrix, "model": args.model, "N": N}
    return record("classify", inputs, args.seed, [res], [c.record.consecutive_defect], "pass" if ok else "fail")


def cmd_schwarzian(args):
    f = sz.read_diffeo(args.diffeo)
    if args.grid:
        S = sz.schwarzian_grid(f, args.grid)
        t = np.arange(args.grid) * (dk.TWO_PI / args.grid)
        if args.tsv:
            rows = ["xi\teta\tS"]
            for i in range(args.grid):
                for j in range(args.grid):
                    if i != j:
                        rows.append(f"{float(t[i])!r}\t{float(t[j])!r}\t{float(S[i, j])!r}")
            return "\n".join(rows)
        sup = float(np.nanmax(np.abs(S)))
        return record("schwarzian", {"diffeo": args.diffeo, "grid": args.grid}, args.seed, [{"sup": sup}], [], "pass")
    v = sz.integrated_schwarzian(f, args.xi, args.eta)
    res = {"xi": args.xi, "eta": args.eta, "S": v.value, "spread": v.spread}
    return record("schwarzian", {"diffeo": args.diffeo, "xi": args.xi, "eta": args.eta}, args.seed, [res], [v.spread], "pass")


def cmd_crossratio(args):
    if args.tree or args.metric:
        if args.metric:
            rho = bm.read_logmetric(args.metric)
        else:
            T = tr.read_tree(args.tree)
            rho = tr.visual_log_metric(T, T.vertex_point(T.vertices[0]))
        value = bm.cross_ratio_log(rho, args.quad)
        inputs = {"tree": args.tree, "metric": args.metric, "quad": args.quad}
        return record("crossratio", inputs, args.seed, [{"log_cross_ratio": value}], [], "pass")
    quad = [float(q) for q in args.quad]
    value = float(dk.log_cross_ratio_disk(quad))
    res = {"log_cross_ratio": value}
    residuals = []
    if args.matrix:
        m = matrix_transform(args.matrix, args.model)
        after = float(dk.log_cross_ratio_disk([float(t) for t in m.apply_angle(quad)]))
        res["after_matrix"] = after
        residuals.append(abs(after - value))
    if args.diffeo:
        f = sz.read_diffeo(args.diffeo)
        after = float(dk.log_cross_ratio_disk([float(f(t)) for t in quad]))
        res["after_diffeo"] = after
        res["distortion_residual"] = sz.distortion_residual(f, quad)
        residuals.append(res["distortion_residual"])
    ok = all(r <= (args.tol or 1e-6) for r in residuals)
    inputs = {"quad": quad, "matrix": args.matrix, "model": args.model, "diffeo": args.diffeo}
    return record("crossratio", inputs, args.seed, [res], residuals, "pass" if ok else "fail")


# -- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--cases", type=int, default=None)
    common.add_argument("--precision-bits", type=int, default=None)
    common.add_argument("--tol", type=float, default=None)
    common.add_argument("--N", type=int, default=None)
    common.add_argument("--samples", type=int, default=None)
    common.add_argument("--tsv", action="store_true", help="columnar output where the command has a table")

    p = argparse.ArgumentParser(prog="moebius-boundary", description="Boundary metrics, extensions and classification.")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", parents=[common], help="run a property suite")
    v.add_argument("--suite", required=True, choices=list(suites.SUITES) + ["all"])
    v.set_defaults(fn=cmd_verify)

    pr = sub.add_parser("project", parents=[common], help="nearest point to a boundary metric")
    g = pr.add_mutually_exclusive_group(required=True)
    g.add_argument("--tree")
    g.add_argument("--involution", help="diffeo file h; the metric has antipode map h o (t+pi) o h^-1")
    pr.add_argument("--metric")
    pr.add_argument("--matrix", nargs=4)
    pr.add_argument("--model", choices=("halfplane", "disk"), default="halfplane")
    pr.set_defaults(fn=cmd_project)

    e = sub.add_parser("extend", parents=[common], help="extend a boundary map and report its defect")
    g = e.add_mutually_exclusive_group(required=True)
    g.add_argument("--tree")
    g.add_argument("--matrix", nargs=4)
    g.add_argument("--diffeo")
    e.add_argument("--tree2")
    e.add_argument("--ends", default="", help="end map src=dst,src=dst,...")
    e.add_argument("--model", choices=("halfplane", "disk"), default="halfplane")
    e.set_defaults(fn=cmd_extend)

    c = sub.add_parser("classify", parents=[common], help="elliptic / parabolic / hyperbolic")
    g = c.add_mutually_exclusive_group(required=True)
    g.add_argument("--matrix", nargs=4)
    g.add_argument("--tree")
    c.add_argument("--ends", default="")
    c.add_argument("--model", choices=("halfplane", "disk"), default="halfplane")
    c.set_defaults(fn=cmd_classify)

    s = sub.add_parser("schwarzian", parents=[common], help="integrated Schwarzian of a diffeo")
    s.add_argument("--diffeo", required=True)
    s.add_argument("--xi", type=float, default=0.0)
    s.add_argument("--eta", type=float, default=math.pi)
    s.add_argument("--grid", type=int, default=None)
    s.set_defaults(fn=cmd_schwarzian)

    x = sub.add_parser("crossratio", parents=[common], help="log cross-ratio of a quadruple")
    x.add_argument("--tree")
    x.add_argument("--metric")
    x.add_argument("--quad", nargs=4, required=True)
    x.add_argument("--matrix", nargs=4)
    x.add_argument("--model", choices=("halfplane", "disk"), default="halfplane")
    x.add_argument("--diffeo")
    x.set_defaults(fn=cmd_crossratio)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "project" and args.tree and not args.metric:
        parser.error("project --tree needs --metric")
    if args.command in ("extend", "classify") and args.tree and not args.ends:
        parser.error(f"{args.command} --tree needs --ends")
    try:
        out = args.fn(args)
    except (ParseError, ValueError, ProjectionNotConverged) as exc:
        out = record(args.command, vars_without_fn(args), args.seed, [{"error": str(exc)}], [], "error")
    if isinstance(out, str):
        print(out)
        return 0
    print(json.dumps(to_jsonable(out), indent=2, sort_keys=True))
    return 0 if out["status"] == "pass" else 1


def vars_without_fn(args):
    return {k: v for k, v in vars(args).items() if k != "fn"}


if __name__ == "__main__":
    sys.exit(main())
