"""Batch command-line front door.

Commands: profile, constants, cz, opnorm, verify.  Reports are JSON (CSV for
constant sweeps); identical inputs and seed give byte-identical output.
Exit codes: 0 success, 1 checker violation, 2 input error.
"""
from __future__ import annotations

import argparse
import io
import json
import sys

import numpy as np

from .czdecomp import cz_config, cz_decompose, multi_level_decompose, verify_cz_properties, verify_disjointing
from .errors import InputError
from .space import space_profile, whole_space_ball
from .specio import load_json, parse_field, parse_phi, parse_space, parse_weight
from .suite import run_suite
from .verify import opnorm_lower_bound
from .weights import constants_report, sawyer_constant
from .orlicz import Power, p_conjugate

__all__ = ["main", "build_parser"]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shtlab",
        description="weight constants, stopping-time decompositions and "
        "inequality checks on finite quasimetric measure spaces",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, *, space=True):
        if space:
            sp.add_argument("--space", required=True, help="space spec JSON file")
        sp.add_argument("--out", help="report output path (default: stdout)")
        sp.add_argument("--seed", type=int, default=0, help="seed for randomized behavior")
        sp.add_argument("--format", choices=["json", "csv"], default="json")

    sp = sub.add_parser("profile", help="structural constants of a space")
    common(sp)

    sp = sub.add_parser("constants", help="weight constants for (w, sigma, p, phi)")
    common(sp)
    sp.add_argument("--w", required=True, help="weight spec (JSON file)")
    sp.add_argument("--sigma", required=True, help="weight spec (JSON file)")
    sp.add_argument("--p", required=True, help="exponent, or comma list for a sweep")
    sp.add_argument("--phi", help="Young function: power:s, powerlog:s:a, or file")

    sp = sub.add_parser("cz", help="stopping-time decomposition (single or multi level)")
    common(sp)
    sp.add_argument("--f", required=True, help="function vector (JSON file)")
    sp.add_argument("--lambda", dest="lam", type=float, help="level; omit for multi-level mode")
    sp.add_argument("--a", type=float, help="level base override")
    sp.add_argument("--eta", type=float, help="selection window constant override")
    sp.add_argument("--allow-small-a", action="store_true", help="accept a below the disjointing requirement")

    sp = sub.add_parser("opnorm", help="operator-norm lower-bound search")
    common(sp)
    sp.add_argument("--w", required=True)
    sp.add_argument("--sigma", required=True)
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument(
        "--strategies",
        default="indicators",
        help="comma list from indicators,random,coordinate-ascent",
    )

    sp = sub.add_parser("verify", help="run a manifest of suite instances")
    common(sp, space=False)
    sp.add_argument("--manifest", required=True, help="suite manifest JSON file")
    return parser


def _emit(obj, args, csv_rows=None) -> None:
    if args.format == "csv":
        if csv_rows is None:
            raise InputError("csv format is supported for profile and constants only")
        buf = io.StringIO()
        for row in csv_rows:
            buf.write(",".join(str(x) for x in row) + "\n")
        text = buf.getvalue()
    else:
        text = json.dumps(obj, indent=2, sort_keys=True, default=_jsonable) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _jsonable(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(f"not JSON serializable: {type(x)}")


def _cmd_profile(args) -> int:
    space = parse_space(load_json(args.space))
    prof = space_profile(space)
    obj = {
        "n": space.n,
        "kappa": prof.kappa,
        "c_mu": prof.c_mu,
        "d_mu": prof.d_mu,
        "engulf": prof.engulf,
    }
    rows = [["name", "value"]] + [[k, v] for k, v in sorted(obj.items())]
    _emit(obj, args, csv_rows=rows)
    return 0


def _cmd_constants(args) -> int:
    space = parse_space(load_json(args.space))
    w = parse_weight(args.w, space)
    sigma = parse_weight(args.sigma, space)
    try:
        ps = [float(tok) for tok in str(args.p).split(",") if tok.strip()]
    except ValueError as exc:
        raise InputError(f"malformed --p value {args.p!r}") from exc
    if not ps:
        raise InputError("at least one exponent required in --p")
    reports = []
    for p in ps:
        phi = parse_phi(args.phi) if args.phi else Power(p_conjugate(p))
        reports.append(constants_report(space, w, sigma, p, phi).as_dict())
    obj = reports[0] if len(reports) == 1 else {"sweep": reports}
    header = ["p", "phi", "ap", "two_weight_ap", "ainfty_fw", "ainfty_exp", "bump_ap", "wp", "sawyer"]
    rows = [header] + [[r[k] for k in header] for r in reports]
    _emit(obj, args, csv_rows=rows)
    return 0


def _ball_json(ball, space) -> dict:
    from .space import ball_members

    return {
        "center": int(ball.center),
        "radius": float(ball.radius),
        "members": [int(y) for y in ball_members(space, ball)],
    }


def _cmd_cz(args) -> int:
    space = parse_space(load_json(args.space))
    f = parse_field(args.f, space)
    profile = space_profile(space)
    config = cz_config(profile, eta=args.eta, a=args.a, lam=args.lam)
    base = whole_space_ball(space)
    if args.lam is not None:
        dec = cz_decompose(space, base, f, args.lam, config)
        check = verify_cz_properties(space, dec, f, config)
        obj = {
            "lambda": dec.level,
            "omega": [int(x) for x in dec.omega],
            "balls": [_ball_json(b, space) for b in dec.selected],
            "violations": [_describe(v) for v in check["violations"]],
            "undilated_exceedances": check["undilated_exceedances"],
        }
    else:
        fam = multi_level_decompose(space, base, f, config, allow_small_a=args.allow_small_a)
        check = verify_disjointing(space, fam, config)
        obj = {
            "a": config.a,
            "k0": fam.k0,
            "levels": [
                {
                    "k": e.k,
                    "lambda": e.level,
                    "omega": [int(x) for x in e.omega],
                    "balls": [_ball_json(b, space) for b in e.balls],
                    "pruned": [[int(x) for x in m] for m in e.pruned],
                }
                for e in fam.entries
            ],
            "violations": [_describe(v) for v in check["violations"]],
        }
    _emit(obj, args)
    return 0 if not obj["violations"] else 1


def _describe(v: dict) -> dict:
    out = {}
    for k, val in v.items():
        if hasattr(val, "center"):
            out[k] = {"center": val.center, "radius": val.radius}
        elif isinstance(val, tuple):
            out[k] = [_describe({"b": x})["b"] if hasattr(x, "center") else x for x in val]
        else:
            out[k] = val
    return out


def _cmd_opnorm(args) -> int:
    space = parse_space(load_json(args.space))
    w = parse_weight(args.w, space)
    sigma = parse_weight(args.sigma, space)
    strategies = tuple(s.strip() for s in args.strategies.split(",") if s.strip())
    rng = np.random.default_rng(args.seed)
    est = opnorm_lower_bound(space, w, sigma, args.p, strategies=strategies, rng=rng)
    sawyer = sawyer_constant(space, w, sigma, args.p)
    ordering_ok = bool(sawyer <= est.value + 1e-9)
    obj = {
        "value": est.value,
        "witness": [float(x) for x in est.witness],
        "strategies": list(est.strategies),
        "trials": est.trials,
        "sawyer": sawyer,
        "ordering_ok": ordering_ok,
        "seed": args.seed,
    }
    _emit(obj, args)
    return 0 if ordering_ok else 1


def _cmd_verify(args) -> int:
    manifest = load_json(args.manifest)
    if not isinstance(manifest, dict):
        raise InputError("manifest must be a JSON object")
    if args.seed and "seed" not in manifest:
        manifest["seed"] = args.seed
    report, _ = run_suite(manifest)
    _emit(report, args)
    return 0 if report["summary"]["violations"] == 0 else 1


_HANDLERS = {
    "profile": _cmd_profile,
    "constants": _cmd_constants,
    "cz": _cmd_cz,
    "opnorm": _cmd_opnorm,
    "verify": _cmd_verify,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return _HANDLERS[args.command](args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: unreadable file: {exc.filename}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
