"""Command-line front end.

Exit codes: 0 success, 1 domain error (invalid channel, no bound states),
2 numerical failure (non-convergence, failed verification), 64 usage error.
Floats are written with 9 significant digits.
"""
from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import math
import sys

from .errors import DomainError, NumericalError
from .oracle import verify_spectrum
from .potential import (
    PotentialParams, SphericalPoint, eval_potential_parabolic, eval_potential_spherical,
    eval_potential_uv, parabolic_to_uv, spherical_to_cylindrical, spherical_to_parabolic,
)
from .propagator import QuadratureOptions, ResolventQuery, resolvent_element
from .spectrum import ABParams, HartmannParams, enumerate_ab_levels, enumerate_levels, hartmann_levels

EXIT_DOMAIN = 1
EXIT_NUMERICAL = 2
EXIT_USAGE = 64

LEVEL_COLUMNS = ["nu", "n_sum", "degeneracy", "lambda", "n_eff", "energy_hartree"]
AB_COLUMNS = ["nu", "n_sum", "degeneracy", "m_abs", "lambda", "n_eff", "energy_hartree", "coulombian"]
VERIFY_COLUMNS = ["nu", "j", "n_r", "E_closed_form", "E_oracle", "rel_dev"]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return format(x, ".9g")
    return str(x)


def _round9(obj):
    if isinstance(obj, bool) or obj is None:
        return obj
    if isinstance(obj, float):
        return None if not math.isfinite(obj) else float(format(obj, ".9g"))
    if isinstance(obj, dict):
        return {k: _round9(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round9(v) for v in obj]
    return obj


def to_json(payload) -> str:
    return json.dumps(_round9(payload), indent=2, ensure_ascii=False) + "\n"


def to_csv(columns, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([fmt(row[c]) for c in columns])
    return buf.getvalue()


def _params_dict(p: PotentialParams) -> dict:
    return {"Z": p.Z, "B": p.B, "C": p.C, "m": p.m, "hbar": p.hbar, "e2": p.e2}


def _level_row(lv) -> dict:
    return {
        "nu": lv.nu, "n_sum": lv.n_sum, "degeneracy": lv.degeneracy,
        "lambda": lv.lam, "n_eff": lv.n_eff, "energy_hartree": lv.energy,
    }


def _params(args) -> PotentialParams:
    if args.Z is None:
        raise UsageError("--Z is required")
    return PotentialParams(Z=args.Z, B=args.B, C=args.C, m=args.m, hbar=args.hbar, e2=args.e2)


def _cmd_spectrum(args):
    params = _params(args)
    levels = enumerate_levels(params, args.n_sum_max, args.nu_max)
    if not levels:
        raise DomainError(f"no valid channel for nu <= {args.nu_max} (B={params.B}, C={params.C})")
    rows = [_level_row(lv) for lv in levels]
    payload = {"subcommand": "spectrum", "params": _params_dict(params), "levels": rows}
    return payload, LEVEL_COLUMNS, rows, 0


def _cmd_hartmann(args):
    if args.gamma is None or args.sigma is None:
        raise UsageError("--gamma and --sigma are required")
    h = HartmannParams(args.gamma, args.sigma, m=args.m, hbar=args.hbar, e2=args.e2)
    rows = [_level_row(lv) for lv in hartmann_levels(h, args.n_sum_max, args.nu_max)]
    mapped = h.to_params()
    payload = {
        "subcommand": "hartmann",
        "params": {"gamma": h.gamma, "sigma": h.sigma, "mapped": _params_dict(mapped)},
        "levels": rows,
    }
    return payload, LEVEL_COLUMNS, rows, 0


def _cmd_ab(args):
    if args.Z is None or args.alpha is None:
        raise UsageError("--Z and --alpha are required")
    ab = ABParams(args.Z, args.alpha, m=args.m, hbar=args.hbar, e2=args.e2)
    nus = [args.nu] if args.nu is not None else list(range(args.nu_max + 1))
    levels = enumerate_ab_levels(ab, args.n_sum_max, nus)
    rows = []
    for lv in levels:
        row = _level_row(lv)
        row["m_abs"] = lv.m_abs
        row["coulombian"] = lv.is_coulombian
        rows.append(row)
    payload = {
        "subcommand": "ab",
        "params": {"Z": ab.Z, "alpha": ab.alpha},
        "coulombian": all(r["coulombian"] for r in rows),
        "levels": rows,
    }
    return payload, AB_COLUMNS, rows, 0


def _cmd_verify(args):
    params = _params(args)
    report = verify_spectrum(params, args.nu_max, args.levels_per_channel, args.tol,
                             angular_grid=args.angular_grid, radial_nodes=args.radial_nodes)
    payload = report.to_dict()
    payload = {"subcommand": "verify", **payload}
    rows = payload["rows"]
    if not report.rows:
        code = EXIT_DOMAIN
    else:
        code = 0 if report.passed else EXIT_NUMERICAL
    return payload, VERIFY_COLUMNS, rows, code


def _point(text, name):
    try:
        vals = tuple(float(x) for x in text.split(","))
    except ValueError:
        raise UsageError(f"--{name} must be four comma-separated numbers") from None
    if len(vals) != 4:
        raise UsageError(f"--{name} must be four comma-separated numbers u1,u2,v1,v2")
    return vals


def _cmd_greens(args):
    params = _params(args)
    if args.E is None or args.a is None or args.b is None:
        raise UsageError("--E, --a and --b are required")
    opts = QuadratureOptions(max_beta=args.max_beta, rel_tol=args.rel_tol, max_evals=args.max_evals)
    rq = ResolventQuery(args.E, _point(args.a, "a"), _point(args.b, "b"), params, opts, nu=args.nu)
    res = resolvent_element(rq)
    row = dict(res.__dict__)
    payload = {
        "subcommand": "greens", "params": _params_dict(params), "E": args.E,
        "endpoints_a": list(rq.endpoints_a), "endpoints_b": list(rq.endpoints_b),
        "nu": args.nu, "result": row,
    }
    return payload, list(row), [row], 0 if res.converged else EXIT_NUMERICAL


def _cmd_transform(args):
    if args.r is None or args.theta is None:
        raise UsageError("--r and --theta are required")
    sp = SphericalPoint(args.r, args.theta, args.phi)
    rho, z, _ = spherical_to_cylindrical(sp)
    pp = spherical_to_parabolic(sp)
    uv = parabolic_to_uv(pp)
    out = {
        "spherical": {"r": sp.r, "theta": sp.theta, "phi": sp.phi},
        "cylindrical": {"rho": rho, "z": z, "phi": sp.phi},
        "parabolic": {"xi": pp.xi, "eta": pp.eta, "phi": pp.phi},
        "uv": {"u": uv.u, "v": uv.v, "phi1": uv.phi1, "phi2": uv.phi2},
    }
    if args.Z is not None:
        params = _params(args)
        out["potential"] = {
            "spherical": eval_potential_spherical(params, sp),
            "parabolic": eval_potential_parabolic(params, pp),
            "uv": eval_potential_uv(params, uv),
        }
    rows = [{"quantity": f"{group}.{k}", "value": v} for group, d in out.items() for k, v in d.items()]
    return {"subcommand": "transform", **out}, ["quantity", "value"], rows, 0


def _add_units(p):
    p.add_argument("--m", type=float, default=1.0, help="particle mass (default 1, atomic units)")
    p.add_argument("--hbar", type=float, default=1.0)
    p.add_argument("--e2", type=float, default=1.0, help="squared charge e^2")


def _add_potential(p):
    p.add_argument("--Z", type=float, default=None, help="nuclear charge (> 0)")
    p.add_argument("--B", type=float, default=0.0, help="ring coupling")
    p.add_argument("--C", type=float, default=0.0, help="cos(theta) coupling")
    _add_units(p)


def _add_output(p, default_format="json"):
    p.add_argument("--format", choices=["csv", "json"], default=default_format)
    p.add_argument("--output", "-o", default=None, help="output path (default stdout)")
    p.add_argument("--config", default=None, help="flat key = value file; flags override it")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="noncentral",
        description="Spectra and Green's functions for the Coulomb plus ring-shaped potential family.",
    )
    sub = parser.add_subparsers(dest="subcommand", parser_class=_Parser, metavar="SUBCOMMAND")
    sub.required = True

    p = sub.add_parser("spectrum", help="closed-form level table")
    _add_potential(p)
    p.add_argument("--n-sum-max", type=int, default=2)
    p.add_argument("--nu-max", type=int, default=2)
    _add_output(p, "csv")
    p.set_defaults(func=_cmd_spectrum)

    p = sub.add_parser("verify", help="compare the closed form with the ODE oracles")
    _add_potential(p)
    p.add_argument("--nu-max", type=int, default=2)
    p.add_argument("--levels-per-channel", type=int, default=3)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--angular-grid", type=int, default=2000)
    p.add_argument("--radial-nodes", type=int, default=4000)
    _add_output(p)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("greens", help="beta-integrated Euclidean kernel at energy E")
    _add_potential(p)
    p.add_argument("--E", type=float, default=None, help="trial energy (< 0)")
    p.add_argument("--a", default=None, help="start point u1,u2,v1,v2")
    p.add_argument("--b", default=None, help="end point u1,u2,v1,v2")
    p.add_argument("--nu", type=int, default=None, help="restrict to one angular channel")
    p.add_argument("--rel-tol", type=float, default=1e-9)
    p.add_argument("--max-beta", type=float, default=None)
    p.add_argument("--max-evals", type=int, default=500_000)
    _add_output(p)
    p.set_defaults(func=_cmd_greens)

    p = sub.add_parser("transform", help="spherical -> parabolic -> (u, v) coordinates")
    p.add_argument("--r", type=float, default=None)
    p.add_argument("--theta", type=float, default=None)
    p.add_argument("--phi", type=float, default=0.0)
    _add_potential(p)
    _add_output(p)
    p.set_defaults(func=_cmd_transform)

    p = sub.add_parser("hartmann", help="Hartmann ring-shaped potential levels")
    p.add_argument("--gamma", type=float, default=None)
    p.add_argument("--sigma", type=float, default=None)
    p.add_argument("--n-sum-max", type=int, default=2)
    p.add_argument("--nu-max", type=int, default=2)
    _add_units(p)
    _add_output(p, "csv")
    p.set_defaults(func=_cmd_hartmann)

    p = sub.add_parser("ab", help="Coulomb plus Aharonov-Bohm flux levels")
    p.add_argument("--Z", type=float, default=None)
    p.add_argument("--alpha", type=float, default=None, help="flux ratio Z e F / (2 pi hbar c)")
    p.add_argument("--nu", type=int, default=None, help="single azimuthal index")
    p.add_argument("--nu-max", type=int, default=2, help="used when --nu is absent")
    p.add_argument("--n-sum-max", type=int, default=2)
    _add_units(p)
    _add_output(p)
    p.set_defaults(func=_cmd_ab)
    return parser


def read_config(path) -> dict[str, str]:
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    with open(path, encoding="utf-8") as fh:
        cp.read_string("[config]\n" + fh.read())
    return {k.strip().lstrip("-").replace("-", "_"): v.strip() for k, v in cp["config"].items()}


def _apply_config(parser, argv):
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    try:
        cfg = read_config(known.config)
    except (OSError, configparser.Error) as exc:
        parser.error(f"cannot read config {known.config}: {exc}")
    subparsers = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    for name, sp in subparsers.choices.items():
        dests = {a.dest for a in sp._actions}
        unknown = [k for k in cfg if k not in dests]
        if name in argv and unknown:
            parser.error(f"unknown config keys for {name}: {', '.join(sorted(unknown))}")
        sp.set_defaults(**{k: v for k, v in cfg.items() if k in dests})


def run(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    _apply_config(parser, argv)
    args = parser.parse_args(argv)
    try:
        payload, columns, rows, code = args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except DomainError as exc:
        print(f"noncentral: domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except NumericalError as exc:
        print(f"noncentral: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL

    text = to_csv(columns, rows) if args.format == "csv" else to_json(payload)
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


def main(argv=None):
    raise SystemExit(run(argv))


if __name__ == "__main__":
    main()
