"""Command line driver: run single instances or a corpus and write JSON reports."""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import sys
import time
from fractions import Fraction
from importlib import resources
from pathlib import Path

from .curves import curve_np_and_prank, first_zeta_mismatch, zeta_numerator
from .errors import EnumerationCapError, PrecisionError, ValidationError
from .finite_fields import DEFAULT_ENUMERATION_CAP, build_field, is_prime
from .lseries import l_polynomial, theorem_verdict
from .polygons import Polygon, lies_over, slope_segments, to_svg
from .rational_functions import normalize, validate

ZETA_CAP = 1 << 18


def rat(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def vertices(P: Polygon) -> list:
    return [[x, rat(y)] for x, y in P.vertices]


def segments(P: Polygon) -> list:
    return [[rat(s), n] for s, n in slope_segments(P)]


def parse_polygon(vs) -> Polygon:
    return Polygon(tuple((int(x), Fraction(y)) for x, y in vs))


def decode_instance(spec: dict):
    """Instance JSON -> validated RationalFunction."""
    try:
        p, a = int(spec["p"]), int(spec.get("a", 1))
        poles = spec["poles"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed instance: {exc}") from exc
    if not is_prime(p) or a < 1:
        raise ValidationError(f"need a prime p and a >= 1, got p={p}, a={a}")
    F = build_field(p, a)
    raw = [(P["at"], P["coeffs"]) for P in poles]
    return validate(F, raw, spec.get("constant", 0))


def _options(spec: dict, overrides: dict) -> dict:
    opts = {"dwork": False, "zeta": False, "paranoid": False, "precision": None,
            "cap": DEFAULT_ENUMERATION_CAP, "zeta_cap": ZETA_CAP, "timings": False}
    opts.update(spec.get("options", {}))
    opts.update({k: v for k, v in overrides.items() if v is not None})
    return opts


def run_instance(spec: dict, **overrides) -> dict:
    """Run every enabled pipeline on one instance; ``report["ok"]`` is the
    conjunction of all checks."""
    opts = _options(spec, overrides)
    report = {"instance": {k: spec[k] for k in ("name", "p", "a", "poles", "constant") if k in spec}}
    timings = {}
    checks = {}
    try:
        t0 = time.perf_counter()
        f = decode_instance(spec)
        fn = normalize(f)
        report.update(d=f.d, ell=f.ell, orders=list(f.orders), lcm_d=f.lcm_d)
        L = l_polynomial(fn, cap=opts["cap"], paranoid=opts["paranoid"])
        v = theorem_verdict(fn, L)
        timings["direct"] = time.perf_counter() - t0
        NP, HP = v.newton, v.hodge
        report.update(
            hodge=vertices(HP), newton=vertices(NP), newton_segments=segments(NP),
            lies_over=v.lies_over, equals_hodge=v.equals, criterion_p_mod=v.criterion,
            l_coefficients=[b.to_list() for b in L.coeffs],
        )
        segs = slope_segments(NP)
        checks["lies_over"] = v.lies_over
        checks["equality_iff_criterion"] = v.equals == v.criterion
        checks["endpoints"] = NP.vertices[0] == (0, 0) and NP.endpoint == (f.d, Fraction(f.d, 2))
        if f.ell > 1:
            checks["slope_0_and_1_segments"] = (segs[0] == (0, f.ell - 1) and segs[-1] == (1, f.ell - 1))
        else:
            checks["slope_0_and_1_segments"] = all(0 < s < 1 for s, _ in segs)
        if "expect" in spec:
            exp = spec["expect"]
            if "newton" in exp:
                checks["expected_newton"] = parse_polygon(exp["newton"]) == NP
            if "equals_hodge" in exp:
                checks["expected_equals_hodge"] = exp["equals_hodge"] == v.equals
        if opts["zeta"]:
            t0 = time.perf_counter()
            Z = zeta_numerator(L)
            cp = curve_np_and_prank(Z)
            q = fn.q
            k_max, size = 0, 1
            while k_max < 2 * Z.genus and size * q <= opts["zeta_cap"]:
                k_max, size = k_max + 1, size * q
            mismatch = first_zeta_mismatch(fn, Z, k_max, opts["cap"]) if k_max else None
            report.update(
                zeta_numerator=list(Z.coeffs), genus=Z.genus, zeta_checked_k=k_max,
                p_rank=cp.p_rank, curve_newton=vertices(cp.curve_np), curve_segments=segments(cp.curve_np),
            )
            checks["zeta_functional_equation"] = Z.satisfies_functional_equation()
            checks["zeta_degree"] = Z.degree == f.d * (f.p - 1)
            checks["zeta_point_counts"] = mismatch is None
            shrink = Fraction(1, f.p - 1)
            checks["curve_np_scaling"] = cp.curve_np.scaled(shrink, shrink) == NP
            checks["p_rank"] = cp.p_rank == (f.ell - 1) * (f.p - 1)
            timings["zeta"] = time.perf_counter() - t0
        if opts["dwork"]:
            if f.a != 1:
                report["dwork"] = {"skipped": "the p-adic engine handles a = 1 only"}
            else:
                from .dwork.fredholm import dwork_newton_polygon

                t0 = time.perf_counter()
                res = dwork_newton_polygon(fn, precision=opts["precision"])
                agrees = res.polygon == NP
                report["dwork"] = {
                    "precision_used": res.precision_used,
                    "t_max_used": list(res.t_max_used),
                    "np_lt1_vertices": vertices(res.slope_lt1),
                    "agrees_with_direct": agrees,
                    "stabilized": res.stabilized,
                    "bound_violations": res.bound_violations,
                    "bounds_checked": {k: b.checked for k, b in res.bounds.items()},
                }
                checks["dwork_agrees"] = agrees and res.stabilized
                checks["dwork_bounds"] = not res.bound_violations
                timings["dwork"] = time.perf_counter() - t0
    except (ValidationError, EnumerationCapError, PrecisionError, ArithmeticError) as exc:
        report["error"] = {"type": type(exc).__name__, "module": type(exc).__module__,
                           "message": str(exc)}
        checks["no_error"] = False
    report["checks"] = checks
    report["ok"] = bool(checks) and all(checks.values())
    if opts["timings"]:
        report["timings"] = {k: round(t, 3) for k, t in timings.items()}
    return report


def emit_polygons(report: dict, fmt: str, stem: Path) -> list[Path]:
    polys = {}
    for key in ("newton", "hodge"):
        if key in report:
            polys[key] = parse_polygon(report[key])
    written = []
    if fmt == "csv":
        for key, P in polys.items():
            path = stem.with_name(f"{stem.name}.{key}.csv")
            path.write_text(P.to_csv())
            written.append(path)
    elif fmt == "svg":
        path = stem.with_name(f"{stem.name}.svg")
        path.write_text(to_svg(polys))
        written.append(path)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    return written


def builtin_corpus_dir() -> Path:
    return Path(str(resources.files("newton_hodge") / "corpus"))


def load_corpus(directory: Path) -> list[tuple[str, dict]]:
    return [(path.stem, json.loads(path.read_text())) for path in sorted(Path(directory).glob("*.json"))]


def _run_named(args):
    name, spec, overrides = args
    return name, run_instance(spec, **overrides)


def run_corpus(directory=None, jobs: int = 1, out_dir=None, **overrides) -> dict:
    directory = Path(directory) if directory else builtin_corpus_dir()
    items = [(name, spec, overrides) for name, spec in load_corpus(directory)]
    if jobs > 1 and len(items) > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_run_named, items))
    else:
        results = [_run_named(it) for it in items]
    rows = []
    for name, rep in results:
        failed = sorted(k for k, v in rep["checks"].items() if not v)
        rows.append({"name": name, "ok": rep["ok"], "failed_checks": failed,
                     "equals_hodge": rep.get("equals_hodge"), "criterion_p_mod": rep.get("criterion_p_mod")})
        if out_dir:
            Path(out_dir).mkdir(parents=True, exist_ok=True)
            (Path(out_dir) / f"{name}.report.json").write_text(json.dumps(rep, indent=2) + "\n")
    summary = {"instances": len(rows), "passed": sum(r["ok"] for r in rows),
               "ok": all(r["ok"] for r in rows), "results": rows}
    if out_dir:
        (Path(out_dir) / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    return summary


def summary_table(summary: dict) -> str:
    lines = [f"{'instance':<28} {'ok':<5} {'NP=HP':<6} {'p=1 mod lcm':<12} failed"]
    for r in summary["results"]:
        lines.append(f"{r['name']:<28} {str(r['ok']):<5} {str(r['equals_hodge']):<6} "
                     f"{str(r['criterion_p_mod']):<12} {','.join(r['failed_checks'])}")
    lines.append(f"{summary['passed']}/{summary['instances']} passed")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="newton-hodge",
                                 description="Newton and Hodge polygons of exponential sums of rational functions.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--dwork", action="store_true", default=None, help="run the p-adic cross-check (a = 1)")
        sp.add_argument("--zeta", action="store_true", default=None, help="run the curve zeta pipeline")
        sp.add_argument("--paranoid", action="store_true", default=None, help="also check b_{d+1} = b_{d+2} = 0")
        sp.add_argument("--cap", type=int, default=None, help="largest field enumerated")
        sp.add_argument("--precision", type=int, default=None, help="initial p-adic precision N")
        sp.add_argument("--emit", choices=("csv", "svg"), default=None)
        sp.add_argument("--timings", action="store_true", default=None)
        sp.add_argument("--out", type=Path, default=None, help="output directory")

    r = sub.add_parser("run", help="run one instance file")
    r.add_argument("file", type=Path)
    common(r)
    c = sub.add_parser("corpus", help="run every *.json in a directory (default: built-in corpus)")
    c.add_argument("dir", type=Path, nargs="?", default=None)
    c.add_argument("--jobs", type=int, default=1)
    common(c)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {k: getattr(args, k) for k in ("dwork", "zeta", "paranoid", "cap", "precision", "timings")}
    if args.command == "run":
        spec = json.loads(args.file.read_text())
        rep = run_instance(spec, **overrides)
        text = json.dumps(rep, indent=2) + "\n"
        if args.out:
            args.out.mkdir(parents=True, exist_ok=True)
            (args.out / f"{args.file.stem}.report.json").write_text(text)
        sys.stdout.write(text)
        if args.emit and "newton" in rep:
            emit_polygons(rep, args.emit, (args.out or Path(".")) / args.file.stem)
        return 0 if rep["ok"] else 1
    summary = run_corpus(args.dir, jobs=args.jobs, out_dir=args.out, **overrides)
    if args.emit and args.out:
        for row in summary["results"]:
            rep = json.loads((args.out / f"{row['name']}.report.json").read_text())
            if "newton" in rep:
                emit_polygons(rep, args.emit, args.out / row["name"])
    print(summary_table(summary))
    return 0 if summary["ok"] else 1


if __name__ == "__main__":
    sys.exit(main())
