"""Command-line front end: solve, heatmap, verify and info."""

from __future__ import annotations

import argparse
import logging
import sys
import time

from mpmath import mp, mpf

from . import __version__
from .eigenfunction import (
    Eigenfunction,
    evaluate_grid,
    invariance_check,
    laplacian_check,
    positivity_check,
)
from .errors import ConfigurationError, FlareMaassError, RegressionFailure
from .groups import GroupModel, HeckeGroup, make_group
from .records import (
    FORMAT,
    RunConfig,
    coeff_block,
    dumps,
    num,
    parse_block,
    read_record,
    write_atomic,
)
from .search import (
    SearchConfig,
    SpectralProblem,
    grid_search,
    initial_guess,
    secant_search,
)
from .solver import AdmissibilityConfig, default_settings
from .tables import (
    DEFAULT_CASES,
    DELTA_TOL,
    HECKE,
    HECKE_COEFF_RTOL,
    SCHOTTKY,
    SCHOTTKY_B1_ATOL,
    SCHOTTKY_B1_RTOL,
    SCHOTTKY_FINITE_VOLUME_DEG,
)

_MODULE = "cli"
log = logging.getLogger("flaremaass")
SCAN_DIGITS = 20


# --- pipeline -----------------------------------------------------------

def is_finite_volume(cfg: RunConfig) -> bool:
    return cfg.group == "schottky" and mpf(cfg.parameter) == SCHOTTKY_FINITE_VOLUME_DEG


def build_problem(cfg: RunConfig, digits: int | None = None, overrides: bool = True):
    """Group and spectral problem for a run configuration."""
    digits = cfg.digits if digits is None else digits
    g = make_group(cfg.group, cfg.parameter, digits)
    kw = dict(y0=cfg.y0, alpha0=cfg.alpha0, horocycle_y=cfg.horocycle_y,
              ray_angle=cfg.ray_angle, points=cfg.points)
    if overrides:
        kw.update(eps=cfg.eps, M_C=cfg.mc, M_F=cfg.mf)
    return g, SpectralProblem(g, default_settings(g, **kw))


def settings_dict(g: GroupModel, problem: SpectralProblem, digits: int) -> dict:
    st = problem.settings
    return {
        "M_C": st.M_C,
        "M_F": st.M_F,
        "y0": num(st.adm.y0, digits),
        "alpha0": num(st.adm.alpha0, digits),
        "horocycle_y": [num(v, digits) for v in st.horocycle_y],
        "ray_angle": [num(v, digits) for v in st.ray_angle],
        "n_horocycle": st.n_horocycle,
        "n_ray": st.n_ray,
        "rows": [len(p) for p in problem.points],
        "kappa": num(g.kappa, digits),
    }


def start_value(cfg: RunConfig) -> mpf:
    """The secant/grid start: the configured s0, or a coarse low-precision scan."""
    if cfg.s0 != "auto":
        with mp.workdps(cfg.digits):
            return mpf(cfg.s0)
    _, scan = build_problem(cfg, min(cfg.digits, SCAN_DIGITS), overrides=False)
    return initial_guess(scan)


def analytic_record(cfg: RunConfig) -> dict:
    """Finite-volume Schottky group: the constant function, delta = 1, lambda0 = 0."""
    return {
        "format": FORMAT,
        "version": __version__,
        "config": cfg.as_dict(),
        "analytic": True,
        "converged": True,
        "result": {"s": "1.0", "delta": "1.0", "lambda0": "0.0", "iterations": 0,
                   "method": "analytic", "final_spread": "0.0", "residuals": ["0.0", "0.0"]},
        "coefficients": {"cusp": [], "flare": [coeff_block([1, 0, 0, 0, 0, 0, 0, 0, 0, 0], 3)]},
    }


def run_solve(cfg: RunConfig, checks: bool = True) -> dict:
    """Full pipeline for one configuration; returns the result record."""
    if is_finite_volume(cfg):
        return analytic_record(cfg)
    t0 = time.perf_counter()
    s0 = start_value(cfg)
    g, problem = build_problem(cfg)
    d = cfg.digits
    with mp.workdps(d):
        spread = mpf(cfg.spread0)
        s0 = min(max(mpf(s0), mpf(1) / 2 + spread / 10), 1 - 2 * spread)
        scfg = SearchConfig(s0, spread)
        log.info("start s0=%s spread=%s", mp.nstr(s0, 10), mp.nstr(spread, 3))
        if cfg.method == "grid":
            res = grid_search(problem, scfg)
        else:
            res = secant_search(problem, scfg)
        record = {
            "format": FORMAT,
            "version": __version__,
            "config": cfg.as_dict(),
            "analytic": False,
            "converged": True,
            "settings": settings_dict(g, problem, d),
            "result": {
                "s0": num(s0, d),
                "s": num(res.s_final, d),
                "delta": num(res.delta_hausdorff, d),
                "lambda0": num(res.lambda0, d),
                "iterations": res.iterations,
                "method": res.method,
                "final_spread": num(res.final_spread, 6),
                "residuals": [num(r, 6) for r in res.residuals],
                "condition_estimates": [num(o.condition_estimate, 6) for o in res.outputs],
            },
            "coefficients": {
                "cusp": [coeff_block(c, d) for c in res.cusp_coeffs],
                "flare": [coeff_block(c, d) for c in res.flare_coeffs],
            },
            "trajectory": [{k: (num(v, 16) if not isinstance(v, int) else v)
                            for k, v in step.items()} for step in res.trajectory],
        }
        if checks:
            f = Eigenfunction(g, res.s_final, res.cusp_coeffs, res.flare_coeffs,
                              problem.settings.adm)
            record["checks"] = [invariance_check(f).as_dict(), laplacian_check(f).as_dict()]
        record["wall_time_s"] = round(time.perf_counter() - t0, 3)
        return record


def eigenfunction_from_record(record: dict, digits: int | None = None):
    """Rebuild (group, eigenfunction) from a converged record."""
    if not record.get("converged"):
        raise ConfigurationError("record is not converged", _MODULE)
    cfg = RunConfig.from_dict(record["config"])
    if record.get("analytic"):
        raise ConfigurationError(
            "finite-volume record has no flare model to sample; the eigenfunction is "
            "the constant 1", _MODULE)
    digits = cfg.digits if digits is None else digits
    g = make_group(cfg.group, cfg.parameter, digits)
    with mp.workdps(digits):
        st = record.get("settings", {})
        adm = None
        if "y0" in st and "alpha0" in st:
            adm = AdmissibilityConfig(mpf(st["y0"]), mpf(st["alpha0"]))
        co = record["coefficients"]
        f = Eigenfunction(g, mpf(record["result"]["s"]),
                          [parse_block(b) for b in co["cusp"]],
                          [parse_block(b) for b in co["flare"]], adm)
    return g, f


def pgm_bytes(values: list, n: int, lo, hi) -> bytes:
    """Plain 16-bit graymap, row-major, top row first, linear in [lo, hi]."""
    span = hi - lo
    lines = ["P2", f"{n} {n}", "65535"]
    for i in range(n):
        row = []
        for j in range(n):
            v = values[i * n + j]
            level = 0 if span == 0 else int(round(65535 * float((v - lo) / span)))
            row.append(str(min(65535, max(0, level))))
        lines.append(" ".join(row))
    return ("\n".join(lines) + "\n").encode("ascii")


def run_heatmap(record: dict, grid: int, out: str, digits: int | None = None) -> dict:
    """Sample the eigenfunction on the domain box; write CSV, PGM and sidecar."""
    if grid < 1:
        raise ConfigurationError("grid must be positive", _MODULE, grid=grid)
    rec_digits = RunConfig.from_dict(record["config"]).digits
    digits = min(rec_digits, 20) if digits is None else digits
    g, f = eigenfunction_from_record(record, max(digits, 15))
    with mp.workdps(max(digits, 15)):
        samples = evaluate_grid(f, grid)
        values = [v for _, _, _, v in samples]
        lo, hi = min(values), max(values)
        csv = ["x,y,value"]
        csv += [f"{mp.nstr(x, 12)},{mp.nstr(y, 12)},{mp.nstr(v, 12)}"
                for x, y, ok, v in samples if ok]
        pos = positivity_check(f, grid, values=samples)
        write_atomic(out + ".csv", "\n".join(csv) + "\n")
        write_atomic(out + ".pgm", pgm_bytes(values, grid, lo, hi), binary=True)
        box = g.domain_box()
        side = {
            "grid": grid,
            "min": num(lo, 12),
            "max": num(hi, 12),
            "box": [num(v, 12) for v in box],
            "in_domain_points": len(csv) - 1,
            "positivity": pos.as_dict(),
        }
        write_atomic(out + ".json", dumps(side))
        return side


# --- regression ---------------------------------------------------------

def _rel(a, b):
    return abs(a - b) / abs(b) if b != 0 else abs(a - b)


def verify_case(group: str, param, digits: int) -> dict:
    """Run one table case and compare against the embedded values."""
    with mp.workdps(digits):
        case = {"group": group, "parameter": str(param), "checks": []}

        def check(name, got, want, ok, tol):
            case["checks"].append({"name": name, "got": mp.nstr(got, 12),
                                   "expected": mp.nstr(want, 12), "tolerance": tol,
                                   "passed": bool(ok)})

        if group == "schottky" and int(param) == SCHOTTKY_FINITE_VOLUME_DEG:
            case["analytic"] = True
            check("delta", mpf(1), mpf(SCHOTTKY[param][0]), True, "exact")
            check("lambda0", mpf(0), mpf(0), True, "exact")
            check("b_n (n>=1)", mpf(0), mpf(SCHOTTKY[param][1]), True, "exact")
            case["passed"] = True
            return case
        cfg = RunConfig(group=group, parameter=str(param), digits=digits)
        rec = run_solve(cfg, checks=True)
        res = rec["result"]
        delta = mpf(res["delta"])
        dtol = mpf(DELTA_TOL)
        if group == "hecke":
            table = HECKE[param]
            check("delta", delta, mpf(table["delta"]), abs(delta - mpf(table["delta"])) < dtol,
                  DELTA_TOL)
            a1 = parse_block(rec["coefficients"]["cusp"][0])[1]
            b0 = parse_block(rec["coefficients"]["flare"][0])[0]
            rtol = mpf(HECKE_COEFF_RTOL)
            for name, got, want in (("a1", a1, mpf(table["a"][1])), ("b0", b0, mpf(table["b"][0]))):
                check(name, got, want, _rel(got, want) < rtol, "rel " + HECKE_COEFF_RTOL)
        else:
            want_d, want_b1 = (mpf(v) for v in SCHOTTKY[param])
            check("delta", delta, want_d, abs(delta - want_d) < dtol, DELTA_TOL)
            b1 = parse_block(rec["coefficients"]["flare"][0])[1]
            ok = _rel(b1, want_b1) < mpf(SCHOTTKY_B1_RTOL) or abs(b1 - want_b1) < mpf(SCHOTTKY_B1_ATOL)
            check("b1", b1, want_b1, ok, f"rel {SCHOTTKY_B1_RTOL} or abs {SCHOTTKY_B1_ATOL}")
        for c in rec.get("checks", []):
            case["checks"].append(c)
        case["wall_time_s"] = rec["wall_time_s"]
        case["passed"] = all(c["passed"] for c in case["checks"])
        return case


def table_cases(table: str) -> list:
    if table == "hecke":
        return [("hecke", r) for r in DEFAULT_CASES["hecke"]]
    if table == "schottky":
        return [("schottky", t) for t in DEFAULT_CASES["schottky"]]
    if table == "all":
        return table_cases("hecke") + table_cases("schottky")
    if table == "sweep":
        return [("schottky", t) for t in sorted(SCHOTTKY)]
    raise ConfigurationError("unknown table", _MODULE, table=table)


def run_regression(table: str, digits: int = 50, progress=None) -> dict:
    cases = []
    for group, param in table_cases(table):
        try:
            case = verify_case(group, param, digits)
        except FlareMaassError as exc:
            case = {"group": group, "parameter": str(param), "passed": False,
                    "error": str(exc), "checks": []}
        cases.append(case)
        if progress:
            progress(case)
    failed = [f"{c['group']}:{c['parameter']}" for c in cases if not c["passed"]]
    return {"table": table, "digits": digits, "version": __version__,
            "passed": not failed, "failed": failed, "cases": cases}


# --- argument handling --------------------------------------------------

def _add_run_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--group", choices=("hecke", "schottky"), required=True)
    p.add_argument("--r", help="Hecke parameter r in (0, 1/2)")
    p.add_argument("--theta-deg", help="Schottky arc angle in degrees")
    p.add_argument("--digits", type=int, default=50, help="working precision (decimal digits)")
    p.add_argument("--s0", default="auto", help="initial s, or 'auto' for a coarse scan")
    p.add_argument("--spread0", default="0.01", help="initial secant spread / grid half-width")
    p.add_argument("--points", type=int, help="test points per set")
    p.add_argument("--horocycle-y", help="horocycle height (Hecke)")
    p.add_argument("--ray-angle", help="ray angle in flare coordinates (radians)")
    p.add_argument("--y0", help="cusp admissibility height")
    p.add_argument("--alpha0", help="flare admissibility angle (radians)")
    p.add_argument("--mc", type=int, help="cusp truncation order")
    p.add_argument("--mf", type=int, help="flare truncation order")
    p.add_argument("--eps", help="truncation target")
    p.add_argument("--method", choices=("secant", "grid"), default="secant")


def config_from_args(args) -> RunConfig:
    if args.group == "hecke":
        if args.r is None or args.theta_deg is not None:
            raise ConfigurationError("hecke runs take --r (and not --theta-deg)", _MODULE)
        param = args.r
    else:
        if args.theta_deg is None or args.r is not None:
            raise ConfigurationError("schottky runs take --theta-deg (and not --r)", _MODULE)
        param = args.theta_deg
    try:
        float(param)
    except ValueError:
        raise ConfigurationError("group parameter must be a number", _MODULE, value=param)
    return RunConfig(
        group=args.group, parameter=param, digits=args.digits, s0=args.s0,
        spread0=args.spread0, points=args.points, horocycle_y=args.horocycle_y,
        ray_angle=args.ray_angle, y0=args.y0, alpha0=args.alpha0, mc=args.mc,
        mf=args.mf, eps=args.eps, method=args.method,
    )


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="flaremaass",
        description="Base eigenvalues, limit-set dimensions and Fourier coefficients "
                    "for infinite-volume Hecke and symmetric Schottky groups.")
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true", help="log search progress")
    sub = p.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("solve", help="compute the base eigenfunction")
    _add_run_args(ps)
    ps.add_argument("--out", help="result record path (default: print to stdout)")
    ps.add_argument("--no-checks", action="store_true", help="skip post-hoc checks")

    ph = sub.add_parser("heatmap", help="sample a solved eigenfunction on a grid")
    ph.add_argument("record", help="result record written by solve")
    ph.add_argument("--grid", type=int, default=50)
    ph.add_argument("--digits", type=int, help="evaluation precision (default min(20, record))")
    ph.add_argument("--out", required=True, help="output prefix for .csv, .pgm and .json")

    pv = sub.add_parser("verify", help="regression against the published tables")
    pv.add_argument("--table", choices=("hecke", "schottky", "all", "sweep"), default="all")
    pv.add_argument("--digits", type=int, default=50)
    pv.add_argument("--out", help="report path (default: print to stdout)")

    pi = sub.add_parser("info", help="print the effective configuration")
    _add_run_args(pi)
    return p


def _emit(text: str, out: str | None) -> None:
    if out:
        write_atomic(out, text)
    else:
        sys.stdout.write(text)


def cmd_solve(args) -> int:
    cfg = config_from_args(args)
    record = run_solve(cfg, checks=not args.no_checks)
    _emit(dumps(record), args.out)
    if args.out:
        print(f"delta = {record['result']['delta']}", file=sys.stderr)
    return 0


def cmd_heatmap(args) -> int:
    side = run_heatmap(read_record(args.record), args.grid, args.out, args.digits)
    print(dumps(side), end="")
    return 0


def cmd_verify(args) -> int:
    def progress(case):
        status = "PASS" if case["passed"] else "FAIL"
        print(f"{status} {case['group']} {case['parameter']}", file=sys.stderr)

    report = run_regression(args.table, args.digits, progress)
    _emit(dumps(report), args.out)
    if not report["passed"]:
        raise RegressionFailure("regression cases diverged", _MODULE,
                                failed=",".join(report["failed"]))
    return 0


def cmd_info(args) -> int:
    cfg = config_from_args(args)
    info = {"config": cfg.as_dict(), "version": __version__}
    if is_finite_volume(cfg):
        info["analytic"] = True
    else:
        g, problem = build_problem(cfg)
        with mp.workdps(cfg.digits):
            d = min(cfg.digits, 20)
            info["settings"] = settings_dict(g, problem, d)
            info["group"] = {"kind": g.kind, "parameter": num(g.parameter, d),
                             "kappa": num(g.kappa, d), "z1": num(g.z1, d), "z2": num(g.z2, d),
                             "U": [num(v, d) for v in g.U.entries()]}
            if isinstance(g, HeckeGroup):
                info["group"]["anchor"] = "a_0"
            else:
                info["group"]["anchor"] = "b_0"
                info["group"]["max_flare_angle"] = num(g.max_flare_angle(), d)
    print(dumps(info), end="")
    return 0


COMMANDS = {"solve": cmd_solve, "heatmap": cmd_heatmap, "verify": cmd_verify, "info": cmd_info}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except FlareMaassError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (OSError, ValueError) as exc:
        print(f"error [{_MODULE}]: {exc}", file=sys.stderr)
        return ConfigurationError.exit_code if isinstance(exc, ValueError) else 1


if __name__ == "__main__":
    sys.exit(main())
