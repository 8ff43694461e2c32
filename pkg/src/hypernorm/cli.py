"""``hypernorm`` command line.

Exit codes: 0 success, 1 violation or failed check, 2 usage or input error,
3 evaluation budget exceeded.
"""

from __future__ import annotations

import argparse
import hashlib
import itertools
import json
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, catalog, geometry, inequalities as lab
from ._backend import NAME as BACKEND
from .engine import BudgetExceeded, integrate, norm_report, plan
from .measure import GridFunction
from .pair import HypergraphPair, find_isomorphism
from .structure import classify

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


# -- inputs ----------------------------------------------------------------

class _Inputs:
    """Loads JSON files and records their digests for the manifest."""

    def __init__(self):
        self.digests: dict[str, str] = {}

    def _load(self, path: str):
        try:
            raw = Path(path).read_bytes()
        except OSError as exc:
            raise InputError(f"cannot read {path}: {exc.strerror}") from exc
        self.digests[path] = hashlib.sha256(raw).hexdigest()
        try:
            return json.loads(raw.decode("utf-8"))
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}: malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
        except UnicodeDecodeError as exc:
            raise InputError(f"{path}: not UTF-8 text") from exc

    def pair(self, path: str) -> HypergraphPair:
        data = self._load(path)
        try:
            return HypergraphPair.from_dict(data)
        except (ValueError, KeyError, TypeError) as exc:
            raise InputError(f"{path}: not a hypergraph pair: {exc}") from exc

    def function(self, path: str) -> GridFunction:
        data = self._load(path)
        try:
            return GridFunction.from_dict(data)
        except (ValueError, KeyError, TypeError) as exc:
            raise InputError(f"{path}: not a grid function: {exc}") from exc


def _grid(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise InputError(f"bad numeric list {text!r}") from exc


def _ints(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise InputError(f"bad integer list {text!r}") from exc


def _cfg(args) -> lab.TrialConfig:
    try:
        return lab.TrialConfig(trials=args.trials, seed=args.seed, omega_size=args.omega_size,
                               amplitude=args.amplitude, tolerance=args.tolerance, threads=args.threads)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


# -- oracles ---------------------------------------------------------------

def catalog_oracle(h: HypergraphPair, f: GridFunction) -> tuple[str, float] | None:
    """Closed-form norm for ``L_p`` and Schatten-pattern pairs, when one applies."""
    entries = h.entries()
    if h.k == 1 and len(entries) == 1 and abs(entries[0][1] - entries[0][2]) < 1e-12:
        p = 2 * entries[0][1]
        return f"L_{p:g}", catalog.lp_oracle(f, p)
    size = h.size()
    if h.k == 2 and abs(size - round(size)) < 1e-12 and round(size) % 2 == 0 and round(size) >= 4:
        two_m = int(round(size))
        if np.all(f.space.weights == 1.0) and find_isomorphism(h, catalog.make_schatten(two_m)) is not None:
            return f"S_{two_m}", catalog.schatten_oracle(f, two_m)
    return None


# -- commands --------------------------------------------------------------

def cmd_make(args, inputs):
    fam = args.family
    if fam == "lp":
        h = catalog.make_lp(args.p if args.p is not None else 2.0)
    elif fam == "gowers":
        h = catalog.make_gowers(args.k if args.k is not None else 2)
    elif fam == "schatten":
        h = catalog.make_schatten(args.two_m if args.two_m is not None else 4)
    elif fam == "complete":
        h = catalog.make_complete(args.p if args.p is not None else 1.0, _ints(args.dims or "2,2"))
    elif fam == "two-u2":
        h = catalog.two_u2()
    elif fam == "sqrt2":
        h = catalog.sqrt2_pair()
    else:  # degenerate
        if not args.base:
            raise InputError("degenerate needs --base PAIR.json")
        h = catalog.make_degenerate_extension(inputs.pair(args.base), args.k_new).pair
    return h.to_dict(), EXIT_OK


def cmd_classify(args, inputs):
    res = classify(inputs.pair(args.pair), all_projections=args.all_projections)
    return res.to_dict(), EXIT_OK


def cmd_norm(args, inputs):
    h, f = inputs.pair(args.pair), inputs.function(args.function)
    rep = norm_report(h, f, method=args.method, threads=args.threads)
    out = rep.to_dict()
    code = EXIT_OK
    if args.oracle:
        orc = catalog_oracle(h, f)
        if orc is None:
            out["oracle"] = None
        else:
            name, val = orc
            diff = abs(val - rep.value)
            rel = diff / val if val > 0 else diff
            out["oracle"] = {"family": name, "value": val, "abs_diff": diff, "rel_diff": rel}
            if rel > 1e-9:
                code = EXIT_FAIL
    return out, code


def cmd_integrate(args, inputs):
    h, f = inputs.pair(args.pair), inputs.function(args.function)
    z = integrate(h, f, method=args.method, threads=args.threads)
    return {"integral": [z.real, z.imag], "size": h.size()}, EXIT_OK


VERIFY_IDS = ("first-holder", "general-holder", "monotonicity", "gowers-cs", "gowers-approx",
              "factor-equality", "lattice-concavity", "lattice-convexity", "zero-one", "bonami-beckner",
              "hanner", "clarkson")


def cmd_verify(args, inputs):
    cfg = _cfg(args)
    which = args.inequality
    if which == "bonami-beckner":
        rep = lab.verify_bonami_beckner(args.p, args.q, cfg)
    else:
        if not args.pair:
            raise InputError(f"verify {which} needs --pair")
        h = inputs.pair(args.pair)
        if which == "first-holder":
            rep = lab.verify_first_holder(h, _psi(args, h), cfg, side=args.side)
        elif which == "general-holder":
            if not args.parts:
                raise InputError("general-holder needs --parts A.json,B.json,...")
            parts = [inputs.pair(p) for p in args.parts.split(",")]
            rep = lab.verify_general_holder(h, parts, cfg, mode=args.mode or "nonnegative", climb=args.climb)
        elif which == "monotonicity":
            if not args.kpair:
                raise InputError("monotonicity needs --kpair K.json")
            rep = lab.verify_norm_monotonicity(h, inputs.pair(args.kpair), cfg, mode=args.mode or "a")
        elif which == "gowers-cs":
            rep = lab.verify_gowers_cs(h, _psi(args, h, outside=True), cfg)
        elif which == "gowers-approx":
            rep = lab.verify_gowers_approx(h, cfg)
        elif which == "factor-equality":
            rep = lab.verify_factor_equality(h, cfg)
        elif which == "lattice-concavity":
            rep = lab.verify_lattice_concavity(h, cfg)
        elif which == "lattice-convexity":
            rep = lab.verify_lattice_convexity(h, cfg)
        elif which == "zero-one":
            rep = lab.verify_zero_one_lower_bound(h, cfg)
        elif which == "hanner":
            rep = geometry.check_hanner(h, cfg)
        else:
            rep = geometry.check_clarkson(h, cfg)
    return rep.to_dict(), (EXIT_FAIL if rep.passed is False else EXIT_OK)


def _psi(args, h: HypergraphPair, *, outside: bool = False) -> tuple[int, ...]:
    if args.psi:
        psi = tuple(_ints(args.psi))
        if len(psi) != h.k:
            raise InputError(f"--psi needs {h.k} coordinates")
        return psi
    if outside:
        free = [o for o in itertools.product(*(range(d) for d in h.dims)) if o not in h.support]
        if not free:
            raise InputError("support covers the grid; pass --psi")
        return free[0]
    side = h.alpha if args.side == "alpha" else h.beta
    cands = sorted(o for o, v in side.items() if v > 0)
    if not cands:
        raise InputError(f"{args.side} has empty support; pass --psi")
    return cands[0]


def cmd_search(args, inputs):
    h = inputs.pair(args.pair)
    v = lab.search_triangle_violation(h, _cfg(args), restarts=args.restarts)
    if v is None:
        return {"found": False, "restarts": args.restarts}, EXIT_OK
    return {"found": True, **v.to_dict()}, EXIT_FAIL


def cmd_constants(args, inputs):
    a = args.t if args.kind == "C" else args.r
    b = args.p if args.kind == "C" else args.q
    if a is None or b is None:
        raise InputError("C needs --t and --p; Cstar needs --r and --q")
    res = geometry.two_point_constant(args.kind, a, b).to_dict()
    if abs(a - 2) < 1e-12:
        res["closed_form"] = geometry.figure_values(b)[args.kind]
    return res, EXIT_OK


def cmd_moduli(args, inputs):
    # without --pair the sampled estimate runs on L_2 next to its closed form
    target = catalog.make_lp(2) if args.pair is None else inputs.pair(args.pair)
    grid = _grid(args.tau_grid if args.kind == "smoothness" else args.eps_grid)
    res = geometry.estimate_modulus(target, args.kind, grid, _cfg(args)).to_dict()
    if args.pair is None:
        res["analytic_l2"] = geometry.analytic_l2_modulus(args.kind, grid)
    return res, EXIT_OK


def cmd_hanner(args, inputs):
    rep = geometry.check_hanner(inputs.pair(args.pair), _cfg(args))
    return rep.to_dict(), (EXIT_FAIL if rep.passed is False else EXIT_OK)


def cmd_clarkson(args, inputs):
    rep = geometry.check_clarkson(inputs.pair(args.pair), _cfg(args))
    return rep.to_dict(), (EXIT_FAIL if rep.passed is False else EXIT_OK)


def cmd_estimate_k(args, inputs):
    h = inputs.pair(args.pair)
    est = geometry.estimate_K(h, args.t, args.p, _cfg(args), kind=args.kind)
    code = EXIT_OK
    if est.exact is not None and est.sampled_bound > est.exact + 1e-6:
        code = EXIT_FAIL
    return est.to_dict(), code


def cmd_embed_check(args, inputs):
    rep = geometry.embedding_witness(inputs.pair(args.pair), args.n, seed=args.seed, samples=args.samples)
    return rep.to_dict(), (EXIT_OK if rep.passed else EXIT_FAIL)


def cmd_plan(args, inputs):
    h = inputs.pair(args.pair)
    return plan(h, args.n).to_dict(), EXIT_OK


# -- parser ----------------------------------------------------------------

def _common(p: argparse.ArgumentParser):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    p.add_argument("--pretty", action="store_true", help="aligned text instead of JSON")
    p.add_argument("-o", "--output", help="write the report here instead of stdout")


def _trials(p: argparse.ArgumentParser, trials: int = 1000, omega: int = 2):
    p.add_argument("--trials", type=int, default=trials)
    p.add_argument("--omega-size", type=int, default=omega)
    p.add_argument("--amplitude", type=float, default=1.0)
    p.add_argument("--tolerance", type=float, default=1e-9)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="hypernorm", description="Hypergraph-pair norms on finite grids.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("make", help="emit a catalog pair as JSON")
    p.add_argument("family", choices=["lp", "gowers", "schatten", "complete", "two-u2", "sqrt2", "degenerate"])
    p.add_argument("--p", type=float)
    p.add_argument("--k", type=int)
    p.add_argument("--two-m", type=int)
    p.add_argument("--dims")
    p.add_argument("--base")
    p.add_argument("--k-new", type=int, default=1)
    _common(p)
    p.set_defaults(func=cmd_make, raw=True)

    p = sub.add_parser("classify", help="run the semi-norming screen")
    p.add_argument("pair")
    p.add_argument("--all-projections", action="store_true")
    _common(p)
    p.set_defaults(func=cmd_classify)

    for name, func in (("norm", cmd_norm), ("integrate", cmd_integrate)):
        p = sub.add_parser(name)
        p.add_argument("--pair", required=True)
        p.add_argument("--function", required=True)
        p.add_argument("--method", choices=["auto", "brute", "planned"], default="auto")
        if name == "norm":
            p.add_argument("--oracle", action="store_true", help="also evaluate the closed form and diff")
        _common(p)
        p.set_defaults(func=func)

    p = sub.add_parser("verify", help="randomized inequality check")
    p.add_argument("inequality", choices=VERIFY_IDS)
    p.add_argument("--pair")
    p.add_argument("--psi")
    p.add_argument("--side", choices=["alpha", "beta"], default="alpha")
    p.add_argument("--parts")
    p.add_argument("--kpair")
    p.add_argument("--mode")
    p.add_argument("--climb", type=int, default=0)
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--q", type=float, default=4.0)
    _trials(p)
    _common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("search-violation", help="look for a triangle inequality violation")
    p.add_argument("--pair", required=True)
    p.add_argument("--restarts", type=int, default=10_000)
    _trials(p)
    _common(p)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("constants", help="two-point constants C(t,p) and C*(r,q)")
    p.add_argument("--kind", choices=["C", "Cstar"], default="C")
    p.add_argument("--t", type=float)
    p.add_argument("--p", type=float)
    p.add_argument("--r", type=float)
    p.add_argument("--q", type=float)
    _common(p)
    p.set_defaults(func=cmd_constants)

    p = sub.add_parser("moduli", help="one-sided modulus estimates")
    p.add_argument("--pair", help="pair JSON; omit to sample L_2 next to its closed form")
    p.add_argument("--kind", choices=["smoothness", "convexity"], default="smoothness")
    p.add_argument("--tau-grid", default="0.25,0.5,1")
    p.add_argument("--eps-grid", default="0.25,0.5,1")
    _trials(p, trials=500, omega=3)
    _common(p)
    p.set_defaults(func=cmd_moduli)

    for name, func in (("hanner", cmd_hanner), ("clarkson", cmd_clarkson)):
        p = sub.add_parser(name)
        p.add_argument("--pair", required=True)
        _trials(p)
        _common(p)
        p.set_defaults(func=func)

    p = sub.add_parser("estimate-k", help="lower bound on K_{t,p} or K*_{r,q}")
    p.add_argument("--pair", required=True)
    p.add_argument("--t", type=float, default=2.0)
    p.add_argument("--p", type=float, default=4.0)
    p.add_argument("--kind", choices=["smooth", "convex"], default="smooth")
    _trials(p)
    _common(p)
    p.set_defaults(func=cmd_estimate_k)

    p = sub.add_parser("embed-check", help="diagonal embedding of l_|H|")
    p.add_argument("--pair", required=True)
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--samples", type=int, default=10)
    _common(p)
    p.set_defaults(func=cmd_embed_check)

    p = sub.add_parser("plan", help="show the contraction plan")
    p.add_argument("--pair", required=True)
    p.add_argument("--n", type=int, required=True)
    _common(p)
    p.set_defaults(func=cmd_plan)
    return ap


# -- output ----------------------------------------------------------------

def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.12g}"
    if isinstance(v, (dict, list)):
        return json.dumps(v, sort_keys=True)
    return str(v)


def render_pretty(report: dict) -> str:
    rows = [(str(k), _fmt(v)) for k, v in report.items() if k != "manifest"]
    width = max((len(k) for k, _ in rows), default=0)
    return "\n".join(f"{k.ljust(width)}  {v}" for k, v in rows)


def _manifest(args, inputs: _Inputs, wall: float) -> dict:
    flags = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "raw", "output", "pretty", "command")}
    return {"command": args.command, "flags": flags, "seed": getattr(args, "seed", None), "version": __version__,
            "backend": BACKEND, "inputs": dict(sorted(inputs.digests.items())), "wall_time": wall}


def _emit(text: str, path: str | None):
    if path:
        Path(path).write_text(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    inputs = _Inputs()
    start = time.perf_counter()
    try:
        report, code = args.func(args, inputs)
    except InputError as exc:
        print(f"hypernorm: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as exc:
        print(f"hypernorm: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ValueError, catalog.FamilyError) as exc:
        print(f"hypernorm: {exc}", file=sys.stderr)
        return EXIT_USAGE
    wall = time.perf_counter() - start
    if getattr(args, "raw", False):
        # catalog output stays in the canonical pair format
        _emit(json.dumps(report, sort_keys=True, indent=2 if args.pretty else None), args.output)
        return code
    if args.pretty:
        text = render_pretty(report)
    else:
        text = json.dumps({"manifest": _manifest(args, inputs, wall), "report": _clean(report)}, sort_keys=True)
    _emit(text, args.output)
    return code


def _clean(x):
    """Replace non-finite floats so the report is strict JSON."""
    if isinstance(x, float) and not math.isfinite(x):
        return None if math.isnan(x) else ("inf" if x > 0 else "-inf")
    if isinstance(x, dict):
        return {k: _clean(v) for k, v in x.items()}
    if isinstance(x, list):
        return [_clean(v) for v in x]
    return x


if __name__ == "__main__":
    raise SystemExit(main())
