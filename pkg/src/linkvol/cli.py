"""Command-line front end for the link-invariant pipeline.

Subcommands: ``analyze`` (diagram combinatorics), ``from-rep`` (volume and
Chern-Simons invariant from a representation file), ``solve`` (numerical
multi-start search at fixed meridians), ``verify`` (re-check solution
files), and ``selftest`` (built-in reproduction suite).

Exit codes: 0 success, 1 verification failure, 2 input error.
Complex numbers on the command line use the form ``a+bi``; JSON files use
``[re, im]`` pairs.
"""

import argparse
import json
import math
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import _examples, coloring, diagram, engine, potential, representation
from .numerics import PI_SQUARED, dilog, mod_pi2_equal, principal_log


class InputError(ValueError):
    """Bad file, flag syntax, or inconsistent options (exit code 2)."""


class VerificationFailure(ValueError):
    """The computation ran but a mathematical check failed (exit code 1)."""


# ---------------------------------------------------------------------------
# Flag parsing helpers
# ---------------------------------------------------------------------------

def parse_complex(text):
    """Parse 'a+bi' (optional signs, either part omittable)."""
    cleaned = text.strip().replace(" ", "")
    if not cleaned:
        raise InputError("empty complex number")
    try:
        return complex(cleaned.replace("i", "j").replace("I", "j"))
    except ValueError:
        raise InputError(f"cannot parse complex number {text!r}; "
                         f"expected the form a+bi") from None


def parse_complex_list(text, expected=None, what="value"):
    vals = [parse_complex(part) for part in text.split(",")]
    if expected is not None and len(vals) != expected:
        raise InputError(f"expected {expected} {what}(s), got {len(vals)}")
    return vals


def parse_vec2(text, flag):
    vals = text.split(",")
    if len(vals) != 2:
        raise InputError(f"{flag} needs two comma-separated complex "
                         f"numbers, e.g. \"1+0i,0+1i\"")
    return np.array([parse_complex(v) for v in vals], dtype=complex)


def parse_filling(text, n_components):
    """'r/s,r/s,inf' positionally per component; 'r' means r/1."""
    parts = text.split(",")
    if len(parts) != n_components:
        raise InputError(f"--filling needs {n_components} slope(s) "
                         f"(one per component), got {len(parts)}")
    slopes = []
    for part in parts:
        part = part.strip()
        if part.lower() in ("inf", "infinity"):
            slopes.append(None)
            continue
        try:
            if "/" in part:
                r_txt, s_txt = part.split("/")
                r, s = int(r_txt), int(s_txt)
            else:
                r, s = int(part), 1
        except ValueError:
            raise InputError(f"cannot parse slope {part!r}; expected "
                             f"r/s, an integer, or inf") from None
        if s == 0:
            raise InputError(f"slope {part!r} has s = 0; meridional "
                             f"filling is not supported")
        if math.gcd(abs(r), abs(s)) != 1:
            raise InputError(f"slope {part!r} is not coprime")
        slopes.append((r, s))
    return slopes


def _read_text(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None


def _read_json(path):
    text = _read_text(path)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from None


def _load_diagram(path):
    try:
        return diagram.load_diagram(_read_text(path))
    except diagram.DiagramError as exc:
        raise InputError(f"{path}: {exc}") from None


# ---------------------------------------------------------------------------
# Run manifest
# ---------------------------------------------------------------------------

@dataclass
class RunManifest:
    command: str
    inputs: list = field(default_factory=list)
    tolerance: float = None
    output: str = None
    rng_seed: int = None

    def to_json(self):
        return {"command": self.command, "inputs": list(self.inputs),
                "tolerance": self.tolerance, "output": self.output,
                "rng_seed": self.rng_seed}


def _write_report(args, doc):
    if getattr(args, "json", None):
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=1)
            fh.write("\n")


def _c2s(z):
    """Human-readable complex."""
    return f"{z.real:.9f}{z.imag:+.9f}i"


# ---------------------------------------------------------------------------
# analyze
# ---------------------------------------------------------------------------

def cmd_analyze(args):
    d = _load_diagram(args.diagram)
    pres = diagram.wirtinger(d)
    print(d.summary())
    print(f"edges: {len(d.succ)}")
    signs = " ".join(f"{x.sign:+d}" for x in d.crossings)
    print(f"crossing signs: {signs}")
    for i, comp in enumerate(d.components):
        print(f"component {i + 1}: edges {[e for e in comp]}, "
              f"writhe {d.writhes[i]}")
    print("over-arcs (Wirtinger generators):")
    for gi, arc in enumerate(d.over_arcs):
        print(f"  g{gi + 1}: edges {list(arc)}")
    print("relations (g_out = g^e g_in g^-e):")
    for (out, over, inn, eps) in pres.relations:
        print(f"  g{out + 1} = g{over + 1}^{eps:+d} g{inn + 1} "
              f"g{over + 1}^{-eps:+d}")
    print("longitude words (canonical, writhe-corrected):")
    for i in range(d.n_components):
        print(f"  component {i + 1}: {diagram.longitude_word(d, i)}")
    doc = {"manifest": RunManifest("analyze", [args.diagram]).to_json(),
           "summary": d.summary(),
           "n_regions": d.n_regions, "n_crossings": d.n_crossings,
           "n_components": d.n_components, "n_edges": len(d.succ),
           "crossing_signs": [x.sign for x in d.crossings],
           "writhes": list(d.writhes),
           "over_arcs": [list(arc) for arc in d.over_arcs],
           "relations": [list(r) for r in pres.relations],
           "longitudes": [str(diagram.longitude_word(d, i))
                          for i in range(d.n_components)]}
    _write_report(args, doc)
    return 0


# ---------------------------------------------------------------------------
# from-rep
# ---------------------------------------------------------------------------

def _pinned_or_random_coloring(args, rep):
    pinned = [args.seedV is not None, args.W is not None,
              args.seed_region is not None]
    if any(pinned) and not all(pinned):
        raise InputError("--seedV, --W and --seed-region must be given "
                         "together (or all omitted for a random generic "
                         "coloring)")
    if all(pinned):
        seedV = parse_vec2(args.seedV, "--seedV")
        Wvec = parse_vec2(args.W, "--W")
        if not (1 <= args.seed_region <= rep.diagram.n_regions):
            raise InputError(f"--seed-region must be in 1.."
                             f"{rep.diagram.n_regions}")
        col = coloring.propagate(rep, args.seed_region - 1, seedV)
        col.Wvec = Wvec
        report = coloring.check_genericity(col, rep)
        if report:
            raise VerificationFailure(
                "pinned coloring is degenerate: " + "; ".join(report))
        return col
    return coloring.random_generic_coloring(rep, args.rng_seed)


def cmd_from_rep(args):
    d = _load_diagram(args.diagram)
    rep = representation.representation_from_json(d, _read_json(args.rep))
    tol = args.tol
    col = _pinned_or_random_coloring(args, rep)
    sol = coloring.assemble_solution(col)
    l_vals = [representation.longitude_eigenvalue(rep, i)
              for i in range(d.n_components)]
    slopes = (parse_filling(args.filling, d.n_components)
              if args.filling else [None] * d.n_components)
    uv = []
    for i, sl in enumerate(slopes):
        if sl is None:
            uv.append(None)
            continue
        try:
            uv.append(representation.solve_uv(
                sol.m[i], l_vals[i], sl[0], sl[1], tol=tol))
        except representation.RepresentationError as exc:
            raise VerificationFailure(
                f"representation does not satisfy the filling "
                f"{sl[0]}/{sl[1]} on component {i + 1}: {exc}") from None
    f = representation.FillingSpec(slopes, l=l_vals, uv=uv)
    doc = engine.solution_report(sol, f, gluing_tol=tol, residual_tol=tol,
                                 filling_tol=tol)
    for i in range(d.n_components):
        line = f"component {i + 1}: m = {_c2s(sol.m[i])}, " \
               f"l = {_c2s(l_vals[i])}"
        if slopes[i] is not None:
            line += f", slope {slopes[i][0]}/{slopes[i][1]}, " \
                    f"(u,v) = {uv[i]}"
        print(line)
    W0 = complex(*doc["W0"])
    print(f"W0  = {_c2s(W0)}")
    print(f"vol = {doc['vol']:.9f}")
    print(f"cs  = {doc['cs']:.9f}  (mod pi^2 = {PI_SQUARED:.9f})")
    print(f"residual_max = {doc['residual_max']:.3g}, gluing max deviation "
          f"= {doc['gluing_report']['max_deviation']:.3g}")
    out = {"manifest": RunManifest(
               "from-rep", [args.diagram, args.rep], tolerance=tol,
               output=args.json, rng_seed=args.rng_seed).to_json(),
           "summary": d.summary(),
           "l": [[z.real, z.imag] for z in l_vals],
           "filling": f.to_json(),
           "solution": doc}
    _write_report(args, out)
    return 0


# ---------------------------------------------------------------------------
# solve
# ---------------------------------------------------------------------------

def cmd_solve(args):
    d = _load_diagram(args.diagram)
    if not args.m:
        raise InputError("solve needs --m (comma-separated meridian "
                         "eigenvalues, one per component)")
    m = parse_complex_list(args.m, expected=d.n_components, what="meridian")
    f = None
    if args.filling:
        if not args.l:
            raise InputError("--filling in solve mode also needs --l "
                             "(longitude eigenvalues cannot be derived "
                             "without a representation)")
        slopes = parse_filling(args.filling, d.n_components)
        l_vals = parse_complex_list(args.l, expected=d.n_components,
                                    what="longitude eigenvalue")
        uv = []
        for i, sl in enumerate(slopes):
            if sl is None:
                uv.append(None)
                continue
            try:
                uv.append(representation.solve_uv(
                    m[i], l_vals[i], sl[0], sl[1], tol=args.tol or 1e-6))
            except representation.RepresentationError as exc:
                raise VerificationFailure(
                    f"(m, l) do not satisfy the filling {sl[0]}/{sl[1]} "
                    f"on component {i + 1}: {exc}") from None
        f = representation.FillingSpec(slopes, l=l_vals, uv=uv)
    elif args.l:
        raise InputError("--l without --filling has no effect; "
                         "give both or neither")

    cfg = engine.SolveConfig(seeds=args.seeds, rng_seed=args.rng_seed)
    if args.tol:
        cfg.residual_tol = args.tol
    sols = engine.multi_start(d, m, cfg)
    print(f"meridians: " + ", ".join(_c2s(z) for z in m))
    print(f"found {len(sols)} distinct solution(s) from {cfg.seeds} seeds")
    docs = []
    for k, s in enumerate(sols):
        doc = engine.solution_report(
            s, f, gluing_tol=max(cfg.residual_tol, 1e-9),
            residual_tol=max(cfg.residual_tol, 1e-9),
            filling_tol=args.tol or 1e-6)
        docs.append(doc)
        print(f"  #{k + 1}: vol = {doc['vol']:+.9f}  cs = {doc['cs']:.9f}  "
              f"residual {doc['residual_max']:.2e}")
    out = {"manifest": RunManifest(
               "solve", [args.diagram], tolerance=args.tol,
               output=args.json, rng_seed=args.rng_seed).to_json(),
           "summary": d.summary(),
           "m": [[z.real, z.imag] for z in m],
           "filling": f.to_json() if f is not None else None,
           "solutions": docs}
    _write_report(args, out)
    return 0


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def _verify_one(d, doc, f, tol):
    """Returns (passed, human lines, json record) for one solution doc."""
    lines = []
    record = {}
    try:
        sol = potential.Solution.from_json(d, doc)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"bad solution record: {exc}") from None
    ok = True
    nondeg, report = potential.is_nondegenerate(sol)
    record["nondegenerate"] = bool(nondeg)
    if not nondeg:
        ok = False
        lines.append("  degenerate point:")
        lines.extend(f"    {r}" for r in report[:6])
        record["degeneracy_report"] = report
        record["passed"] = False
        return False, lines, record

    res = potential.critical_residuals(sol)
    record["residual_max"] = res.residual_max
    if res.residual_max > tol:
        ok = False
        lines.append(f"  criticality FAILED (max residual "
                     f"{res.residual_max:.3g} > {tol:g}); residual table:")
        for j, (a, b) in enumerate(zip(res.exp_form, res.tau_form)):
            lines.append(f"    region {j + 1}: exp-form {abs(a):.3e}, "
                         f"tau-form {abs(b):.3e}")

    gl = engine.gluing_check(sol)
    record["gluing_max_deviation"] = gl.max_deviation
    if not gl.passed(tol):
        ok = False
        lines.append(f"  gluing products FAILED (max deviation "
                     f"{gl.max_deviation:.3g} > {tol:g}): regional "
                     f"{gl.regional_deviation:.3e}, over "
                     f"{gl.over_deviation:.3e}, under "
                     f"{gl.under_deviation:.3e}")

    if f is not None and ok:
        try:
            vr = potential.W0(sol, f, residual_tol=tol, filling_tol=tol)
            record["W0"] = [vr.W0.real, vr.W0.imag]
            record["vol"] = vr.vol
            record["cs"] = vr.cs
            lines.append(f"  vol = {vr.vol:.9f}, cs = {vr.cs:.9f}")
        except (potential.PotentialError,
                representation.RepresentationError) as exc:
            ok = False
            lines.append(f"  filling correction FAILED: {exc}")
    record["passed"] = bool(ok)
    return ok, lines, record


def cmd_verify(args):
    d = _load_diagram(args.diagram)
    payload = _read_json(args.solutions)
    if isinstance(payload, dict) and "solutions" in payload:
        docs = payload["solutions"]
    elif isinstance(payload, dict) and "w" in payload:
        docs = [payload]
    elif isinstance(payload, dict) and "solution" in payload:
        docs = [payload["solution"]]
    else:
        raise InputError(f"{args.solutions}: expected a solution object "
                         f"or a report with a 'solutions' list")
    f = None
    if args.filling_file:
        f = representation.FillingSpec.from_json(_read_json(
            args.filling_file))
    elif isinstance(payload, dict) and payload.get("filling"):
        f = representation.FillingSpec.from_json(payload["filling"])
    tol = args.tol
    all_ok = True
    records = []
    for k, doc in enumerate(docs):
        ok, lines, record = _verify_one(d, doc, f, tol)
        record["index"] = k
        records.append(record)
        all_ok = all_ok and ok
        print(f"solution {k + 1}: {'PASS' if ok else 'FAIL'}")
        for line in lines:
            print(line)
    print(f"overall: {'PASS' if all_ok else 'FAIL'} "
          f"({len(docs)} solution(s), tolerance {tol:g})")
    out = {"manifest": RunManifest(
               "verify",
               [args.diagram, args.solutions]
               + ([args.filling_file] if args.filling_file else []),
               tolerance=tol, output=args.json).to_json(),
           "passed": all_ok, "results": records}
    _write_report(args, out)
    return 0 if all_ok else 1


# ---------------------------------------------------------------------------
# selftest
# ---------------------------------------------------------------------------

def _selftest_checks():
    rng = np.random.default_rng(0)

    def dilog_identities():
        worst = abs(dilog(1.0) - PI_SQUARED / 6)
        worst = max(worst, abs(dilog(-1.0) + PI_SQUARED / 12))
        z = rng.standard_normal(200) + 1j * rng.standard_normal(200)
        z = z[np.abs(z) > 1e-3]
        z = z[np.abs(z - 1) > 1e-3]
        for zz in z:
            zz = complex(zz)
            inv = (dilog(zz) + dilog(1 / zz) + PI_SQUARED / 6
                   + principal_log(-zz) ** 2 / 2)
            refl = (dilog(zz) + dilog(1 - zz) - PI_SQUARED / 6
                    + principal_log(zz) * principal_log(1 - zz))
            worst = max(worst, abs(inv), abs(refl))
        return worst <= 1e-10, f"max identity deviation {worst:.2e}"

    def derivative_checks():
        d = diagram.load_diagram(_examples.FIG8_PD)
        # random non-degenerate point, not a solution
        while True:
            w = rng.standard_normal(d.n_regions) \
                + 1j * rng.standard_normal(d.n_regions)
            m = [complex(1.1, 0.3)]
            cand = potential.Solution(d, w, m)
            if potential.is_nondegenerate(cand)[0]:
                break
        h = 1e-7
        worst = 0.0
        for j in range(d.n_regions):
            wp = cand.w.copy()
            wp[j] *= (1 + h)
            wm = cand.w.copy()
            wm[j] *= (1 - h)
            fd = ((potential.total_potential(potential.Solution(d, wp, m))
                   - potential.total_potential(potential.Solution(d, wm, m)))
                  / (2 * h))
            worst = max(worst, abs(fd - potential.wdW(cand, j)))
        tau_dev = float(np.max(np.abs(
            potential.tau_products(cand) - np.exp(potential.wdW_all(cand)))))
        return (worst <= 1e-6 and tau_dev <= 1e-9,
                f"finite differences {worst:.2e}, tau vs exp {tau_dev:.2e}")

    def golden(ex):
        def check():
            run = _examples.run_pipeline(ex)
            dev = abs(run.result.W0 - ex.regression_W0)
            ok = (dev <= 1e-9
                  and abs(run.result.vol - ex.regression_vol) <= 1e-9
                  and mod_pi2_equal(run.result.W0, ex.reference_W0, 1e-3))
            if ex.regression_w:
                dw = max(abs(a - b) for a, b
                         in zip(run.solution.w, ex.regression_w))
                ok = ok and dw <= 1e-9
            return ok, f"|dW0| = {dev:.2e}"
        return check

    checks = [("dilogarithm identities", dilog_identities),
              ("derivative cross-checks", derivative_checks)]
    for ex in _examples.all_golden():
        checks.append((ex.name, golden(ex)))
    return checks


def cmd_selftest(args):
    t0 = time.perf_counter()
    all_ok = True
    results = []
    for name, fn in _selftest_checks():
        try:
            ok, detail = fn()
        except Exception as exc:          # noqa: BLE001 - report, don't die
            ok, detail = False, f"raised {type(exc).__name__}: {exc}"
        all_ok = all_ok and ok
        results.append({"name": name, "passed": bool(ok), "detail": detail})
        print(f"  {'PASS' if ok else 'FAIL'}  {name}: {detail}")
    dt = time.perf_counter() - t0
    print(f"selftest: {'PASS' if all_ok else 'FAIL'} ({dt:.1f} s)")
    out = {"manifest": RunManifest("selftest", output=args.json).to_json(),
           "passed": all_ok, "seconds": dt, "checks": results}
    _write_report(args, out)
    return 0 if all_ok else 1


# ---------------------------------------------------------------------------
# argument wiring
# ---------------------------------------------------------------------------

def _build_parser():
    p = argparse.ArgumentParser(
        prog="linkvol",
        description="Volume and Chern-Simons invariants of link diagram "
                    "representations via a region-weight potential "
                    "function.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, rng=False, tol=None, out=True):
        if tol is not None:
            sp.add_argument("--tol", type=float, default=tol,
                            help=f"acceptance tolerance (default {tol:g})")
        if rng:
            sp.add_argument("--rng-seed", type=int, default=0,
                            help="random seed (default 0)")
        if out:
            sp.add_argument("--json", metavar="PATH",
                            help="write a machine-readable report here")

    sp = sub.add_parser("analyze", help="diagram combinatorics")
    sp.add_argument("diagram", help="path to a PD-code file")
    common(sp)
    sp.set_defaults(fn=cmd_analyze)

    sp = sub.add_parser("from-rep",
                        help="invariants from a representation file")
    sp.add_argument("diagram")
    sp.add_argument("rep", help="JSON file with generator matrices")
    sp.add_argument("--filling", help="slopes r/s,r/s,inf per component "
                                      "(default: all unfilled)")
    sp.add_argument("--seedV", help="pinned seed vector \"a+bi,c+di\"")
    sp.add_argument("--W", help="pinned auxiliary vector \"a+bi,c+di\"")
    sp.add_argument("--seed-region", type=int,
                    help="1-based region carrying the seed vector")
    common(sp, rng=True, tol=1e-3)
    sp.set_defaults(fn=cmd_from_rep)

    sp = sub.add_parser("solve", help="multi-start numerical solve")
    sp.add_argument("diagram")
    sp.add_argument("--m", help="meridian eigenvalues a+bi, comma-separated")
    sp.add_argument("--filling", help="slopes r/s,r/s,inf per component")
    sp.add_argument("--l", help="longitude eigenvalues (required with "
                                "--filling; no representation available "
                                "to derive them)")
    sp.add_argument("--seeds", type=int, default=64,
                    help="number of random starts (default 64)")
    common(sp, rng=True, tol=None)
    sp.add_argument("--tol", type=float, default=None,
                    help="Newton residual tolerance (default 1e-10)")
    sp.set_defaults(fn=cmd_solve)

    sp = sub.add_parser("verify", help="re-check a solution file")
    sp.add_argument("diagram")
    sp.add_argument("solutions", help="JSON from solve/from-rep, or a "
                                      "single solution object")
    sp.add_argument("filling_file", nargs="?", default=None,
                    help="optional filling JSON (default: taken from the "
                         "solution file when present)")
    common(sp, tol=1e-3)
    sp.set_defaults(fn=cmd_verify)

    sp = sub.add_parser("selftest", help="built-in reproduction suite")
    common(sp)
    sp.set_defaults(fn=cmd_selftest)
    return p


_INPUT_ERRORS = (InputError, diagram.DiagramError)
_VERIFY_ERRORS = (VerificationFailure, potential.PotentialError,
                  representation.RepresentationError, coloring.ColoringError,
                  engine.EngineError)


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except _INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except _VERIFY_ERRORS as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
