"""Command-line front end.

Subcommands: render-dynamic, render-param, census, trace-ray, find, symbol,
verify.  Exit codes: 0 success, 1 check failure, 2 invalid configuration.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import kernels
from .boettcher import (
    BoettcherContext,
    ContinuationLostError,
    NotInCaptureError,
    trace_dynamic_ray,
    trace_param_ray,
)
from .coding import Itinerary, itinerary_from_point, prepole_from_itinerary
from .core import FamilyParams
from .landmarks import (
    find_center,
    find_parabolic_t0,
    find_virtual_cycle_param,
    misiurewicz_t_star,
)
from .orbits import NoConvergenceError
from .raster import (
    InvalidConfigError,
    RunConfig,
    component_census,
    render_dynamic,
    render_param,
    write_census_jsonl,
    write_csv,
    write_ppm,
)
from .verify import run_suite


def _parse_complex(text: str) -> complex:
    re, im = (float(part) for part in text.split(","))
    return complex(re, im)


def _parse_window(text: str):
    x0, x1, y0, y1 = (float(part) for part in text.split(","))
    return (x0, x1, y0, y1)


def _parse_res(text: str):
    w, h = text.lower().split("x")
    return int(w), int(h)


def _add_common(sub, need_lambda=False):
    sub.add_argument("--p", type=int, required=True)
    sub.add_argument("--q", type=int, required=True)
    sub.add_argument("--lambda", dest="lam", type=_parse_complex,
                     required=need_lambda, default=None, metavar="RE,IM")
    sub.add_argument("--window", type=_parse_window, default=(-2.0, 2.0, -2.0, 2.0),
                     metavar="X0,X1,Y0,Y1")
    sub.add_argument("--res", type=_parse_res, default=(512, 512), metavar="WxH")
    sub.add_argument("--max-iter", type=int, default=2000)
    sub.add_argument("--mode", choices=("fast", "exact"), default="fast")
    sub.add_argument("--out", default=None, help="PPM image path")
    sub.add_argument("--data", default=None, help="CSV/JSONL data path")
    sub.add_argument("--workers", type=int, default=1)
    sub.add_argument("--aa", type=int, default=1)
    sub.add_argument("--seed-rng", type=int, default=0)


def _config(args) -> RunConfig:
    w, h = args.res
    return RunConfig(p=args.p, q=args.q, lam=args.lam, window=args.window,
                     width=w, height=h, max_iter=args.max_iter, mode=args.mode,
                     workers=args.workers, aa=args.aa,
                     seed_rng=args.seed_rng).validate()


def _emit_raster(ras, args):
    if args.out:
        write_ppm(ras, args.out)
    if args.data:
        write_csv(ras, args.data)
    if not args.out and not args.data:
        counts = {}
        for iy in range(ras.height):
            for ix in range(ras.width):
                counts[ras.class_name(iy, ix)] = counts.get(ras.class_name(iy, ix), 0) + 1
        print(json.dumps({"kind": ras.kind, "cells": ras.width * ras.height,
                          "classes": counts, "backend": kernels.BACKEND}))


def cmd_render_dynamic(args) -> int:
    ras = render_dynamic(_config(args))
    _emit_raster(ras, args)
    return 0


def cmd_render_param(args) -> int:
    ras = render_param(_config(args))
    _emit_raster(ras, args)
    return 0


def cmd_census(args) -> int:
    cfg = _config(args)
    ras = render_dynamic(cfg) if args.lam is not None else render_param(cfg)
    entries = component_census(ras)
    if args.data:
        write_census_jsonl(entries, args.data)
    else:
        for e in entries[:args.top]:
            print(json.dumps(e, sort_keys=True))
    return 0


def cmd_trace_ray(args) -> int:
    if args.space == "dynamic":
        if args.lam is None:
            raise InvalidConfigError("dynamic ray needs --lambda")
        ctx = BoettcherContext.for_params(FamilyParams(args.lam, args.p, args.q))
        trace = trace_dynamic_ray(ctx, args.theta, s_min=args.smin,
                                  steps=args.steps, s_end=args.send)
    else:
        seed = args.seed if args.seed is not None else 0.3 + 0j
        trace = trace_param_ray(args.p, args.q, args.n, args.theta, seed,
                                s_min=args.smin, steps=args.steps, s_end=args.send)
    doc = {
        "space": args.space,
        "theta": trace.theta,
        "landing": [trace.landing.real, trace.landing.imag],
        "landed": trace.landed,
        "max_residual": trace.max_residual,
        "points": [[pt.s, pt.point.real, pt.point.imag] for pt in trace.points],
    }
    if args.data:
        with open(args.data, "w", encoding="ascii") as fh:
            json.dump(doc, fh)
            fh.write("\n")
    else:
        summary = dict(doc)
        summary["points"] = len(doc["points"])
        print(json.dumps(summary))
    return 0


def _landmark_doc(lm):
    cert = {}
    for key, val in lm.certificate.items():
        if isinstance(val, complex):
            cert[key] = [val.real, val.imag]
        else:
            cert[key] = val
    return {"kind": lm.kind, "lambda": [lm.lam.real, lm.lam.imag],
            "order": lm.order, "certificate": cert}


def cmd_find(args) -> int:
    if args.kind == "center":
        if args.seed is None:
            raise InvalidConfigError("center search needs --seed")
        lm = find_center(args.p, args.q, args.n, args.seed)
    elif args.kind == "misiurewicz":
        lm = misiurewicz_t_star(args.p, args.q)
    elif args.kind == "parabolic":
        t0, x0, lm = find_parabolic_t0(args.p, args.q)
    else:
        lm = find_virtual_cycle_param(args.p, args.q, args.n, args.k, args.j,
                                      seed=args.seed)
    print(json.dumps(_landmark_doc(lm)))
    return 0


def cmd_symbol(args) -> int:
    params = FamilyParams(args.lam, args.p, args.q)
    if args.itinerary:
        symbols = tuple(tuple(int(x) for x in chunk.split(","))
                        for chunk in args.itinerary.split(";") if chunk)
        it = Itinerary(symbols)
        z = prepole_from_itinerary(params, it, k_max=args.kmax)
        print(json.dumps({"itinerary": [list(s) for s in it.symbols],
                          "prepole": [z.real, z.imag]}))
    elif args.point is not None:
        it = itinerary_from_point(params, args.point, args.depth, k_max=args.kmax)
        print(json.dumps({"point": [args.point.real, args.point.imag],
                          "itinerary": [list(s) for s in it.symbols]}))
    else:
        raise InvalidConfigError("symbol needs --itinerary or --point")
    return 0


def cmd_verify(args) -> int:
    kwargs = {"seed_rng": args.seed_rng}
    if args.p:
        kwargs["p"] = args.p
    if args.q:
        kwargs["q"] = args.q
    if args.res:
        kwargs["resolution"] = args.res[0]
    result = run_suite(args.suite, **kwargs)
    if "suites" in result:
        for sub in result["suites"]:
            _print_suite(sub)
    else:
        _print_suite(result)
    if args.data:
        with open(args.data, "w", encoding="ascii") as fh:
            json.dump(result, fh, default=str)
            fh.write("\n")
    return 0 if result["passed"] else 1


def _print_suite(res):
    status = "PASS" if res["passed"] else "FAIL"
    failed = [key for key, ok in res["checks"].items() if not ok]
    extra = f" failed={failed}" if failed else ""
    print(f"[{status}] {res['name']}{extra}")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tanatlas",
                                 description="Atlas of the family lambda tan^p(z^q)")
    sp = ap.add_subparsers(dest="command", required=True)

    s = sp.add_parser("render-dynamic", help="orbit-classify a dynamic-plane window")
    _add_common(s, need_lambda=True)
    s.set_defaults(fn=cmd_render_dynamic)

    s = sp.add_parser("render-param", help="classify a parameter-plane window")
    _add_common(s)
    s.set_defaults(fn=cmd_render_param)

    s = sp.add_parser("census", help="connected components of a scan")
    _add_common(s)
    s.add_argument("--top", type=int, default=20)
    s.set_defaults(fn=cmd_census)

    s = sp.add_parser("trace-ray", help="Newton continuation of a ray")
    _add_common(s)
    s.add_argument("--space", choices=("dynamic", "param"), required=True)
    s.add_argument("--theta", type=float, required=True)
    s.add_argument("--n", type=int, default=0)
    s.add_argument("--seed", type=_parse_complex, default=None, metavar="RE,IM")
    s.add_argument("--smin", type=float, default=0.05)
    s.add_argument("--steps", type=int, default=80)
    s.add_argument("--send", type=float, default=1 - 1e-4)
    s.set_defaults(fn=cmd_trace_ray)

    s = sp.add_parser("find", help="locate a distinguished parameter")
    _add_common(s)
    s.add_argument("--kind", choices=("center", "misiurewicz", "parabolic",
                                      "virtual"), required=True)
    s.add_argument("--n", type=int, default=1)
    s.add_argument("--seed", type=_parse_complex, default=None, metavar="RE,IM")
    s.add_argument("--k", type=int, default=0)
    s.add_argument("--j", type=int, default=0)
    s.set_defaults(fn=cmd_find)

    s = sp.add_parser("symbol", help="prepole coding in the shift locus")
    _add_common(s, need_lambda=True)
    s.add_argument("--itinerary", default=None, help="k,j,l;k,j,l;...")
    s.add_argument("--point", type=_parse_complex, default=None, metavar="RE,IM")
    s.add_argument("--depth", type=int, default=3)
    s.add_argument("--kmax", type=int, default=3)
    s.set_defaults(fn=cmd_symbol)

    s = sp.add_parser("verify", help="run a named verification suite")
    s.add_argument("--suite", required=True)
    s.add_argument("--p", type=int, default=None)
    s.add_argument("--q", type=int, default=None)
    s.add_argument("--res", type=_parse_res, default=None, metavar="WxH")
    s.add_argument("--seed-rng", type=int, default=0)
    s.add_argument("--data", default=None)
    s.set_defaults(fn=cmd_verify)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except (InvalidConfigError, ValueError, KeyError) as exc:
        print(f"tanatlas: invalid configuration: {exc}", file=sys.stderr)
        return 2
    except (NoConvergenceError, NotInCaptureError, ContinuationLostError) as exc:
        print(f"tanatlas: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
