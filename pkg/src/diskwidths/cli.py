"""Command-line front end.

Exit codes follow sysexits: 0 success, 2 inconclusive certificate, 64 usage,
65 malformed input file, 66 unreadable input file, 70 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from importlib import resources
from typing import Sequence

import jsonschema

from . import billiards, conics, crofton, networks
from .certify import certify
from .domains import Domain
from .errors import GeometryError, InconclusiveCertificate
from .sweepouts import MIN_SAMPLES, sup_length

EX_OK = 0
EX_INCONCLUSIVE = 2
EX_USAGE = 64
EX_DATAERR = 65
EX_NOINPUT = 66
EX_SOFTWARE = 70

DEFAULTS = {"seed": 0, "tol": 1e-9, "grid": "256x512", "samples": 10_000, "out": None}


class UsageError(Exception):
    pass


class FileFormatError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EX_USAGE)


def load_schema(name: str) -> dict:
    text = resources.files("diskwidths").joinpath("schemas", f"{name}.schema.json").read_text()
    return json.loads(text)


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def write_atomic(path: str, text: str):
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def emit(args, text: str):
    if args.out:
        write_atomic(args.out, text)
    else:
        sys.stdout.write(text)


# argument helpers ------------------------------------------------------------


def parse_domain(tokens: Sequence[str]) -> tuple[Domain, list[str]]:
    if not tokens:
        raise UsageError("missing domain: 'disk' or 'ellipse A B'")
    kind = tokens[0]
    try:
        if kind == "disk":
            return Domain.disk(), list(tokens[1:])
        if kind == "ellipse":
            if len(tokens) < 3:
                raise UsageError("ellipse needs two semi-axes")
            return Domain.ellipse(float(tokens[1]), float(tokens[2])), list(tokens[3:])
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    raise UsageError(f"unknown domain {kind!r}")


def parse_grid(text: str) -> crofton.QuadratureGrid:
    try:
        nt, nr = (int(v) for v in text.lower().split("x"))
        return crofton.QuadratureGrid(nt, nr)
    except ValueError as exc:
        raise UsageError(f"bad grid {text!r}: expected NTHETAxNRHO with both >= 8") from exc


def parse_coeffs(text: str) -> list[float]:
    try:
        vals = [float(v) for v in text.replace(",", " ").split()]
        return list(conics.ConicCoeffs.of(vals))
    except ValueError as exc:
        raise UsageError(f"bad conic {text!r}: {exc}") from exc


def resolve(args) -> argparse.Namespace:
    """Fill unset options from --config, then from DEFAULTS."""
    cfg = {}
    if args.config:
        try:
            with open(args.config) as fh:
                cfg = json.load(fh)
        except OSError as exc:
            raise FileNotFoundError(str(exc)) from exc
        except json.JSONDecodeError as exc:
            raise FileFormatError(f"{args.config}: {exc}") from exc
        if not isinstance(cfg, dict):
            raise FileFormatError(f"{args.config}: expected a JSON object")
        unknown = set(cfg) - set(DEFAULTS) - {"radii"}
        if unknown:
            raise FileFormatError(f"{args.config}: unknown keys {sorted(unknown)}")
    for key, default in DEFAULTS.items():
        if getattr(args, key, None) is None:
            setattr(args, key, cfg.get(key, default))
    if getattr(args, "radii", None) is None:
        args.radii = cfg.get("radii", "0.2,0.1,0.05")
    if not (isinstance(args.tol, (int, float)) and args.tol > 0):
        raise UsageError("--tol must be positive")
    if int(args.samples) < MIN_SAMPLES:
        raise UsageError(f"--samples must be at least {MIN_SAMPLES}")
    return args


# SVG ---------------------------------------------------------------------


def _svg(width_units: float, body: list[str]) -> str:
    s = 200.0
    w = 2 * width_units * s + 20
    return ('<?xml version="1.0" encoding="UTF-8"?>\n'
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w:.0f}" height="{w:.0f}" '
            f'viewBox="{-width_units - 0.05:.4f} {-width_units - 0.05:.4f} {2 * width_units + 0.1:.4f} '
            f'{2 * width_units + 0.1:.4f}">\n'
            '<g transform="scale(1,-1)">\n' + "\n".join(body) + "\n</g>\n</svg>\n")


def _points(pts) -> str:
    return " ".join(f"{x:.6f},{y:.6f}" for x, y in pts)


def _boundary(dom: Domain) -> str:
    if dom.is_disk:
        return f'<circle cx="0" cy="0" r="{dom.a:.6f}" fill="none" stroke="black" stroke-width="0.005"/>'
    return (f'<ellipse cx="0" cy="0" rx="{dom.a:.6f}" ry="{dom.b:.6f}" fill="none" stroke="black" '
            'stroke-width="0.005"/>')


def parabola_svg(a: float, n: int = 400) -> str:
    pieces = conics.sample_curve(conics.parabola_coeffs(a), 1.0, n)
    pts = [pt for piece in pieces for pt in piece]
    return _svg(1.0, [_boundary(Domain.disk()),
                      f'<polyline points="{_points(pts)}" fill="none" stroke="red" stroke-width="0.005"/>'])


def network_svg(dom: Domain, net: networks.GeodesicNetwork) -> str:
    body = [_boundary(dom)]
    for s in net.segments:
        p, q = net.endpoints(s)
        body.append(f'<line x1="{p.x:.6f}" y1="{p.y:.6f}" x2="{q.x:.6f}" y2="{q.y:.6f}" stroke="blue" '
                    f'stroke-width="{0.005 * s.multiplicity:.4f}"/>')
    return _svg(dom.a, body)


# commands ------------------------------------------------------------------


def cmd_certify(args) -> int:
    dom, rest = parse_domain(args.domain)
    if rest:
        raise UsageError(f"unexpected arguments {rest}")
    try:
        cert = certify(args.p, dom, samples=int(args.samples), seed=int(args.seed))
    except InconclusiveCertificate as exc:
        print(f"inconclusive: {exc}", file=sys.stderr)
        return EX_INCONCLUSIVE
    data = cert.to_dict()
    emit(args, dumps(data))
    if args.out:
        labels = ", ".join(f"{m:g} ({lab})" for m, lab in zip(cert.conclusion, cert.conclusion_labels))
        print(f"p={cert.p} {dom.describe()['kind']}: width in {{{labels}}}; "
              f"bounds [{cert.lower.value:.6f}, {cert.upper.value:.6f}]")
    return EX_OK


def cmd_maxlen(args) -> int:
    a0, L0 = conics.maximize_parabola()
    data = {"a0": a0, "L0": L0, "z0": 2 * a0 - 1, "crossing_x": conics.parabola_crossing(a0), "svg": args.svg}
    if args.svg:
        write_atomic(args.svg, parabola_svg(a0))
    emit(args, dumps(data))
    return EX_OK


def cmd_billiard(args) -> int:
    dom, rest = parse_domain(args.spec)
    if len(rest) != 2:
        raise UsageError("billiard expects DOMAIN K START_T")
    try:
        k, t0 = int(rest[0]), float(rest[1])
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if k < 2:
        raise UsageError("k must be >= 2")
    orb = billiards.find_closed_orbit(dom, k, t0)
    data = {"domain": dom.describe(), "k": k, "start_t": t0, **orb.to_dict()}
    if args.svg:
        write_atomic(args.svg, network_svg(dom, orb.to_network(dom)))
    emit(args, dumps(data))
    return EX_OK


def cmd_crofton_conic(args) -> int:
    q = parse_coeffs(args.coeffs)
    grid = parse_grid(args.grid)
    res = crofton.crofton_length(crofton.conic_oracle(q), Domain.disk(), grid)
    data = {"coefficients": q, "classification": conics.classify(q),
            "exact": conics.disk_length(q, 1.0, float(args.tol)), **res.to_dict()}
    emit(args, dumps(data))
    return EX_OK


def cmd_crofton_scan(args) -> int:
    try:
        radii = [float(v) for v in str(args.radii).split(",")] if isinstance(args.radii, str) else list(args.radii)
    except ValueError as exc:
        raise UsageError(f"bad radii {args.radii!r}") from exc
    if not 1 <= args.p <= 4:
        raise UsageError("p must be in 1..4")
    try:
        rows = crofton.no_concentration_scan(args.p, samples=args.classes, radii=radii, seed=int(args.seed),
                                             tol=float(args.tol))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    emit(args, crofton.scan_csv(rows))
    return EX_OK


def read_network(path: str) -> networks.GeodesicNetwork:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise FileNotFoundError(str(exc)) from exc
    try:
        data = json.loads(text)
        jsonschema.validate(data, load_schema("network"))
        return networks.GeodesicNetwork.from_dict(data)
    except (json.JSONDecodeError, jsonschema.ValidationError, ValueError, KeyError) as exc:
        raise FileFormatError(f"{path}: {exc}") from exc


def cmd_network(args) -> int:
    net = read_network(args.file)
    dom, rest = parse_domain(args.domain.split())
    if rest:
        raise UsageError(f"unexpected domain arguments {rest}")
    tol = float(args.tol)
    try:
        fb = networks.free_boundary_residual(net, dom)
    except GeometryError as exc:
        raise FileFormatError(f"{args.file}: {exc}") from exc
    ok, bad = networks.integrality_filter(net)
    ir = networks.interior_residual(net)
    data = {
        "domain": dom.describe(),
        "mass": float(networks.mass(net)),
        "interior_residual": float(ir),
        "free_boundary_residual": float(fb),
        "stationary": bool(ir <= tol and fb <= tol),
        "integrality": bool(ok),
        "non_integer_densities": [{"x": float(p.x), "y": float(p.y), "density": float(th)} for p, th in bad],
        "short_junctions": networks.short_junctions(net),
    }
    if args.svg:
        write_atomic(args.svg, network_svg(dom, net))
    emit(args, dumps(data))
    return EX_OK


def cmd_sweepout(args) -> int:
    if not 1 <= args.p <= 4:
        raise UsageError("p must be in 1..4")
    res = sup_length(args.p, samples=int(args.samples), seed=int(args.seed))
    emit(args, dumps({**res.to_dict(), "seed": int(args.seed)}))
    return EX_OK


# parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="seed for sampled quantities (default 0)")
    common.add_argument("--tol", type=float, default=None, help="quadrature / residual tolerance (default 1e-9)")
    common.add_argument("--grid", default=None, help="Crofton grid NTHETAxNRHO (default 256x512)")
    common.add_argument("--samples", type=int, default=None, help="sweepout sampling budget (default 10000)")
    common.add_argument("--out", default=None, help="write the report to this file instead of stdout")
    common.add_argument("--config", default=None, help="JSON file with defaults for the options above")

    p = _Parser(prog="diskwidths", description="Widths of the disk and near-circular ellipses.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("certify", parents=[common], help="width certificate for p in 1..4")
    c.add_argument("p", type=int, choices=[1, 2, 3, 4])
    c.add_argument("domain", nargs="+", help="'disk' or 'ellipse A B'")
    c.set_defaults(func=cmd_certify)

    m = sub.add_parser("maxlen", parents=[common], help="maximal parabola length in the disk")
    m.add_argument("--svg", default="parabola.svg", help="SVG path ('' to skip)")
    m.set_defaults(func=cmd_maxlen)

    b = sub.add_parser("billiard", parents=[common], help="closed billiard orbit")
    b.add_argument("spec", nargs="+", help="DOMAIN K START_T")
    b.add_argument("--svg", default=None)
    b.set_defaults(func=cmd_billiard)

    cr = sub.add_parser("crofton", help="Crofton length estimates")
    crs = cr.add_subparsers(dest="mode", required=True, parser_class=_Parser)
    cc = crs.add_parser("conic", parents=[common], help="length of a conic in the unit disk")
    cc.add_argument("coeffs", help="five coefficients of 1, x, y, x^2, xy")
    cc.set_defaults(func=cmd_crofton_conic)
    cs = crs.add_parser("scan", parents=[common], help="local mass table as CSV")
    cs.add_argument("p", type=int)
    cs.add_argument("--classes", type=int, default=200, help="sampled classes per radius")
    cs.add_argument("--radii", default=None, help="comma-separated decreasing radii")
    cs.set_defaults(func=cmd_crofton_scan)

    n = sub.add_parser("network", help="geodesic network tools")
    ns = n.add_subparsers(dest="mode", required=True, parser_class=_Parser)
    nc = ns.add_parser("check", parents=[common], help="residuals and mass of a network file")
    nc.add_argument("file")
    nc.add_argument("--domain", default="disk", help="'disk' or 'ellipse A B'")
    nc.add_argument("--svg", default=None)
    nc.set_defaults(func=cmd_network)

    s = sub.add_parser("sweepout", parents=[common], help="supremum of lengths in the p-family")
    s.add_argument("p", type=int)
    s.set_defaults(func=cmd_sweepout)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        resolve(args)
        return args.func(args)
    except UsageError as exc:
        print(f"diskwidths: error: {exc}", file=sys.stderr)
        return EX_USAGE
    except FileNotFoundError as exc:
        print(f"diskwidths: cannot read input: {exc}", file=sys.stderr)
        return EX_NOINPUT
    except FileFormatError as exc:
        print(f"diskwidths: bad input file: {exc}", file=sys.stderr)
        return EX_DATAERR
    except InconclusiveCertificate as exc:
        print(f"inconclusive: {exc}", file=sys.stderr)
        return EX_INCONCLUSIVE
    except (GeometryError, ArithmeticError) as exc:
        print(f"diskwidths: numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EX_SOFTWARE


if __name__ == "__main__":
    sys.exit(main())
