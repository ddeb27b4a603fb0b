"""Command line front end: solve / estimate / render / compare.

Options may also come from a plain `key = value` config file (--config);
explicit flags win over the file, the file wins over built-in defaults.
The built-in defaults are the experiment parameters: alpha 0.8, beta 0.6,
gamma 0.5, eps 0.001, cap 12, window [-1.5, 1.5]^2, 600x600.

Exit codes: 0 success, 1 non-convergence, 2 usage or parse error, 3 I/O
failure. All numbers print with 12 significant digits. The only
environment variable honored is POLYBASIN_THREADS (render worker count).
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import time

from . import bracket, poly, schemes
from .render import (RenderConfig, Window, basin_dump, colorize,
                     render as render_image, write_ppm)

THREADS_ENV = "POLYBASIN_THREADS"

DEFAULTS = {
    "alpha": 0.8,
    "beta": 0.6,
    "gamma": 0.5,
    "eps": 1e-3,
    "k": 12,
    "window": (-1.5, 1.5, -1.5, 1.5),
    "size": (600, 600),
    "scheme": "kadioglu",
    "criterion": "displacement",
    "tol": 1e-12,
    "max_iter": 100,
    "root_tol": 1e-12,
}

EXIT_OK = 0
EXIT_NO_CONVERGENCE = 1
EXIT_USAGE = 2
EXIT_IO = 3


def _g(x: float) -> str:
    return format(x, ".12g")


class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


def _read_config(path: str) -> dict:
    values = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise CliError(f"{path}:{lineno}: expected 'key = value'",
                                   EXIT_USAGE)
                key, _, val = line.partition("=")
                values[key.strip().replace("-", "_")] = val.strip()
    except OSError as exc:
        raise CliError(f"cannot read config file: {exc}", EXIT_IO) from exc
    return values


_MULTI = {"window": 4, "size": 2, "interval": 2}
_FLOATS = {"alpha", "beta", "gamma", "eps", "tol", "root_tol", "x0", "sen_m"}
_INTS = {"k", "max_iter"}


def _coerce(key: str, text: str):
    if key in _MULTI:
        parts = text.split()
        if len(parts) != _MULTI[key]:
            raise CliError(f"config key {key!r} needs {_MULTI[key]} values",
                           EXIT_USAGE)
        return tuple(float(p) for p in parts)
    if key in _FLOATS:
        return float(text)
    if key in _INTS:
        return int(text)
    if key == "schemes":
        return text.split()
    return text


def resolve(args: argparse.Namespace) -> argparse.Namespace:
    """Fill unset options from the config file (if given), then from the
    built-in defaults. Flags always win."""
    file_values = _read_config(args.config) if getattr(args, "config", None) else {}
    for key, value in vars(args).items():
        if value is not None:
            continue
        if key in file_values:
            try:
                setattr(args, key, _coerce(key, file_values[key]))
            except ValueError as exc:
                raise CliError(f"config key {key!r}: {exc}", EXIT_USAGE) from exc
        elif key in DEFAULTS:
            setattr(args, key, DEFAULTS[key])
    if isinstance(getattr(args, "interval", None), (list, tuple)):
        args.interval = tuple(args.interval)
    if isinstance(getattr(args, "window", None), (list, tuple)):
        args.window = tuple(args.window)
    if isinstance(getattr(args, "size", None), (list, tuple)):
        args.size = tuple(int(v) for v in args.size)
    return args


def _infer_variable(expr: str, var: str | None) -> str:
    if var is not None:
        return var
    letters = sorted({ch for ch in expr if ch.isalpha()})
    if len(letters) == 1:
        return letters[0]
    raise CliError(
        "cannot infer the variable letter"
        + (f" (found {', '.join(letters)})" if letters else " (none present)")
        + "; pass --var", EXIT_USAGE)


def _parse_poly(expr: str, var: str | None) -> poly.Polynomial:
    v = _infer_variable(expr, var)
    try:
        return poly.parse(expr, v)
    except poly.ParseError as exc:
        raise CliError(f"cannot parse {expr!r}: {exc}", EXIT_USAGE) from exc


def _parse_scheme(text: str, args) -> object:
    try:
        return schemes.parse_scheme(text, alpha=args.alpha, beta=args.beta,
                                    gamma=args.gamma)
    except ValueError as exc:
        raise CliError(str(exc), EXIT_USAGE) from exc


def _workers() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise CliError(f"{THREADS_ENV} must be an integer, got {raw!r}",
                       EXIT_USAGE) from None
    return max(1, n)


def cmd_solve(args) -> int:
    f = _parse_poly(args.f, args.var)
    iv = bracket.Interval(*args.interval)
    stop = schemes.StopRule(criterion=args.criterion, eps=args.tol,
                            max_iter=args.max_iter)
    report = bracket.solve(f, iv, alpha=args.alpha, beta=args.beta,
                           stop=stop, x0=args.x0)
    print(report.conditions.summary())
    if not report.certified:
        print("warning: conditions violated; run is not certified")
    if report.bounds is not None:
        print(f"a-posteriori factor: {_g(report.bounds.karaca_yildirim)}")
    print()
    print(report.table())
    print()
    status = "converged" if report.converged else "did not converge"
    print(f"root = {_g(report.root)}  ({status} in "
          f"{report.orbit.iterations} iterations, "
          f"{'certified' if report.certified else 'uncertified'})")
    return EXIT_OK if report.converged else EXIT_NO_CONVERGENCE


def cmd_estimate(args) -> int:
    f = _parse_poly(args.f, args.var)
    iv = bracket.Interval(*args.interval)
    report = bracket.check_conditions(f, iv)
    print(report.summary())
    if not (report.f2_holds and report.f3_holds):
        print("error bounds unavailable: f2 and f3 must hold")
        return EXIT_NO_CONVERGENCE
    bounds = bracket.error_bounds(report, args.alpha, args.beta)
    print()
    print(f"demidovich (M2/2m)          : {_g(bounds.demidovich)}")
    print(f"berinde (M/m)               : {_g(bounds.berinde)}")
    print(f"two-stage (mM/(M^2-am^2))   : {_g(bounds.pm_bound)}")
    print(f"three-stage chain factor    : {_g(bounds.karaca_yildirim)}")
    return EXIT_OK


def _render_config(args, p, scheme) -> RenderConfig:
    stop = schemes.StopRule(criterion=args.criterion, eps=args.eps,
                            max_iter=args.k)
    return RenderConfig(
        polynomial=p, scheme=scheme,
        window=Window(*args.window),
        width=args.size[0], height=args.size[1],
        stop=stop, root_tol=args.root_tol)


def cmd_render(args) -> int:
    p = _parse_poly(args.p, args.var)
    scheme = _parse_scheme(args.scheme, args)
    config = _render_config(args, p, scheme)
    image = render_image(config, workers=_workers())
    rgb = colorize(image, k=args.k, degree=len(image.roots))
    try:
        write_ppm(rgb, args.out)
        if args.dump:
            with open(args.dump, "w", encoding="ascii") as fh:
                fh.write(basin_dump(image))
    except OSError as exc:
        raise CliError(f"cannot write output: {exc}", EXIT_IO) from exc
    conv = image.root_index >= 0
    n_conv = int(conv.sum())
    mean_it = (float(image.iterations[conv].mean()) if n_conv else float("nan"))
    print(f"wrote {args.out}: {config.width}x{config.height}, "
          f"{image.basin_count()} basins, "
          f"mean iterations {_g(mean_it)}, "
          f"{image.root_index.size - n_conv} non-converged pixels")
    return EXIT_OK


def cmd_compare(args) -> int:
    p = _parse_poly(args.p, args.var)
    specs = [(text, _parse_scheme(text, args)) for text in args.schemes]
    print(f"{'scheme':<24} {'mean_iter':>12} {'converged':>12} {'wall_s':>8}")
    for text, scheme in specs:
        config = _render_config(args, p, scheme)
        t0 = time.perf_counter()
        image = render_image(config, workers=_workers())
        dt = time.perf_counter() - t0
        conv = image.root_index >= 0
        n_conv = int(conv.sum())
        mean_it = float(image.iterations[conv].mean()) if n_conv else float("nan")
        frac = n_conv / image.root_index.size
        print(f"{text:<24} {_g(mean_it):>12} {_g(frac):>12} {dt:>8.2f}")
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="polybasin",
        description="Newton-type root finding and basin rendering for polynomials")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="key = value config file")
        sp.add_argument("--var", help="variable letter (default: inferred)")

    sp = sub.add_parser("solve", help="certified scalar solve on an interval")
    common(sp)
    sp.add_argument("--f", required=True, help="polynomial expression")
    sp.add_argument("--interval", nargs=2, type=float, metavar=("A", "B"),
                    required=True)
    sp.add_argument("--alpha", type=float)
    sp.add_argument("--beta", type=float)
    sp.add_argument("--x0", type=float, help="start point (default midpoint)")
    sp.add_argument("--tol", type=float, help="stop tolerance (default 1e-12)")
    sp.add_argument("--criterion", choices=("displacement", "residual"))
    sp.add_argument("--max-iter", dest="max_iter", type=int)
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("estimate", help="interval conditions and error factors")
    common(sp)
    sp.add_argument("--f", required=True)
    sp.add_argument("--interval", nargs=2, type=float, metavar=("A", "B"),
                    required=True)
    sp.add_argument("--alpha", type=float)
    sp.add_argument("--beta", type=float)
    sp.set_defaults(func=cmd_estimate)

    def render_opts(sp):
        sp.add_argument("--scheme")
        sp.add_argument("--eps", type=float)
        sp.add_argument("--k", type=int, help="iteration cap")
        sp.add_argument("--size", nargs=2, type=int, metavar=("W", "H"))
        sp.add_argument("--window", nargs=4, type=float,
                        metavar=("RE_MIN", "RE_MAX", "IM_MIN", "IM_MAX"))
        sp.add_argument("--criterion", choices=("displacement", "residual"))
        sp.add_argument("--root-tol", dest="root_tol", type=float)
        sp.add_argument("--alpha", type=float)
        sp.add_argument("--beta", type=float)
        sp.add_argument("--gamma", type=float)

    sp = sub.add_parser("render", help="write a basin image as binary PPM")
    common(sp)
    sp.add_argument("--p", required=True, help="polynomial expression")
    render_opts(sp)
    sp.add_argument("--out", required=True, help="output .ppm path")
    sp.add_argument("--dump", help="also write a plain-text basin dump")
    sp.set_defaults(func=cmd_render)

    sp = sub.add_parser("compare", help="per-scheme convergence statistics")
    common(sp)
    sp.add_argument("--p", required=True)
    sp.add_argument("--schemes", nargs="+", required=True, metavar="SPEC")
    render_opts(sp)
    sp.set_defaults(func=cmd_compare)
    return ap


def main(argv=None) -> int:
    logging.basicConfig(format="%(levelname)s: %(message)s")
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        args = resolve(args)
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (ValueError, poly.RootFindingError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
