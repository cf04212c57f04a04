"""Command-line front end: ``strobe <mode> [options]``.

Exit status: 0 success, 1 a check ran and failed, 2 invalid input,
3 numerical instability or I/O failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import acceptance, bloch, io, presets, sphere
from .errors import InvalidParameterError, NumericalInstabilityError, OutOfRangeError, UnsupportedInputError
from .sphere import SphereConfig

MODES = ("iterate", "exact", "integrate", "compare", "bounds", "closure", "figure", "acceptance")
DEFAULT_STEPS = 1000

# option name -> default when neither flag, config file nor preset sets it
OPTIONS = {
    "preset": None,
    "alpha": None,
    "beta": None,
    "lambda": None,
    "degrees": False,
    "p": None,
    "q": None,
    "r0": None,
    "chi0": None,
    "omega": None,
    "steps": None,
    "theta_max": None,
    "h": bloch.DEFAULT_STEP,
    "tol": None,
    "format": "csv",
    "out": None,
}


class UsageError(Exception):
    pass


def _vector(text):
    try:
        vals = [float(v) for v in str(text).split(",")] if isinstance(text, str) else [float(v) for v in text]
    except ValueError:
        raise UsageError(f"expected x,y,z, got {text!r}") from None
    if len(vals) != 3:
        raise UsageError(f"expected three components, got {text!r}")
    return np.array(vals)


def build_parser():
    parser = argparse.ArgumentParser(prog="strobe", description="Group-map stroboscopy of the Bloch equation.")
    parser.add_argument("mode", choices=MODES)
    parser.add_argument("target", nargs="?", help="preset id for 'figure', output directory for 'acceptance'")
    parser.add_argument("--preset", choices=sorted(presets.PRESETS))
    parser.add_argument("--alpha", help="strobe angle of Q")
    parser.add_argument("--beta", help="rotation angle of P")
    parser.add_argument("--lambda", dest="lambda", help="lambda = beta / (2 alpha); exact fractions like 41/40 accepted")
    parser.add_argument("--degrees", action="store_true", default=None, help="read --alpha/--beta in degrees")
    parser.add_argument("--p", help="unit vector x,y,z")
    parser.add_argument("--q", help="unit vector x,y,z")
    parser.add_argument("--r0", help="initial unit vector x,y,z")
    parser.add_argument("--chi0", type=float, help="rotation angle of R_0 (radians)")
    parser.add_argument("--omega", type=float, help="angular velocity of theta")
    parser.add_argument("--steps", type=int, help="number of stroboscopic samples")
    parser.add_argument("--theta-max", dest="theta_max", type=float, help="curve span when alpha is not given")
    parser.add_argument("--h", type=float, help="RK4 step in theta")
    parser.add_argument("--tol", type=float, help="tolerance override")
    parser.add_argument("--format", choices=("csv", "json", "svg"))
    parser.add_argument("--out", help="output file (or directory for figure/acceptance)")
    parser.add_argument("--config", help="JSON file with option values; flags override it")
    return parser


def merge_options(args) -> dict:
    opts = dict(OPTIONS)
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(data, dict):
            raise UsageError("config file must hold a JSON object")
        for key, val in data.items():
            key = key.replace("-", "_")
            if key not in opts:
                raise UsageError(f"unknown config key {key!r}")
            opts[key] = val
    for key in OPTIONS:
        val = getattr(args, key, None)
        if val is not None:
            opts[key] = val
    return opts


def _angle(val, degrees):
    if val is None:
        return None
    if isinstance(val, str):
        if "/" in val:
            return Fraction(val) if degrees else float(Fraction(val))
        return val if degrees else float(val)
    return val if degrees and isinstance(val, int) else float(val)


def _lambda(val):
    if val is None or not isinstance(val, str):
        return val
    try:
        return Fraction(val)
    except ValueError:
        return _exact_text(val)


def resolve_config(opts, need_strobe=False) -> SphereConfig:
    vectors = {}
    for key in ("p", "q", "r0"):
        if opts[key] is not None:
            vectors[key] = _vector(opts[key])
    for key in ("chi0", "omega"):
        if opts[key] is not None:
            vectors[key] = float(opts[key])
    angles_given = any(opts[k] is not None for k in ("alpha", "beta", "lambda"))
    if opts["preset"] and not angles_given:
        cfg = presets.get_preset(opts["preset"]).primary.config
        return cfg.with_(**vectors) if vectors else cfg
    if not angles_given:
        if need_strobe:
            raise UsageError("give --preset or angles (--alpha with --beta or --lambda)")
        return SphereConfig(lam=0.0, **vectors)
    degrees = bool(opts["degrees"])
    return SphereConfig.build(
        _angle(opts["alpha"], degrees), _angle(opts["beta"], degrees), _lambda(opts["lambda"]), degrees=degrees, **vectors
    )


def _emit_trajectory(traj, opts, title=None):
    fmt, out = opts["format"], opts["out"]
    if fmt == "svg":
        if not out:
            raise UsageError("--format svg needs --out")
        from . import plotting

        plotting.emit_svg(traj, sphere.bounds(traj.config), out, title=title)
        return
    text = io.trajectory_csv(traj) if fmt == "csv" else io.dumps(io.trajectory_record(traj))
    if out:
        io.write_text(out, text)
    else:
        sys.stdout.write(text)


def _emit_json(obj, opts):
    if opts["out"]:
        io.emit_json(obj, opts["out"])
    else:
        sys.stdout.write(io.dumps(obj))


def _theta_grid(cfg, opts):
    steps = opts["steps"] or DEFAULT_STEPS
    if cfg.has_strobe:
        return np.arange(steps) * cfg.alpha
    if opts["theta_max"] is None:
        raise UsageError("need --alpha or --theta-max to define the sample grid")
    return np.linspace(0.0, float(opts["theta_max"]), steps)


def cmd_iterate(opts):
    cfg = resolve_config(opts, need_strobe=True)
    _emit_trajectory(sphere.direct_trajectory(cfg, opts["steps"] or DEFAULT_STEPS), opts)
    return 0


def cmd_exact(opts):
    cfg = resolve_config(opts)
    _emit_trajectory(sphere.curve_trajectory(cfg, _theta_grid(cfg, opts)), opts)
    return 0


def cmd_integrate(opts):
    cfg = resolve_config(opts)
    theta = _theta_grid(cfg, opts)
    traj = bloch.integrate(bloch.DriveField.from_config(cfg), cfg.r0, theta, float(opts["h"]), cfg=cfg)
    _emit_trajectory(traj, opts)
    return 0


def cmd_compare(opts):
    cfg = resolve_config(opts, need_strobe=True)
    rep = bloch.strobe_check(cfg, opts["steps"] or DEFAULT_STEPS, float(opts["h"]), tolerance=opts["tol"])
    _emit_json(dict(rep.as_dict(), config=io.config_record(cfg)), opts)
    return 0 if rep.passed else 1


def cmd_bounds(opts):
    b = sphere.bounds(resolve_config(opts))
    _emit_json({"a": b.a, "b": b.b, "c": b.c, "A1": b.lower, "A2": b.upper}, opts)
    return 0


def cmd_closure(opts):
    if opts["preset"] and opts["alpha"] is None:
        cfg = presets.get_preset(opts["preset"]).primary.config
        clo = sphere.closure_index(cfg)
    else:
        if opts["alpha"] is None:
            raise UsageError("closure needs --alpha and --beta or --lambda (exact values)")
        unit = "deg" if opts["degrees"] else "rad"
        alpha = _exact_text(opts["alpha"])
        beta = _exact_text(opts["beta"]) if opts["beta"] is not None else None
        lam = _exact_text(opts["lambda"]) if opts["lambda"] is not None else None
        clo = sphere.closure_index(alpha, beta, lam=lam, unit=unit)
    if clo is None:
        _emit_json({"closes": False}, opts)
    else:
        _emit_json({"closes": True, "K": clo.k, "m": clo.m, "n": clo.n}, opts)
    return 0


def _exact_text(val):
    """Parse an exact number: decimals and fractions, or a sympy expression such as ``sqrt(2)-0.389``."""
    import sympy

    if isinstance(val, float):
        return sympy.Rational(repr(val))
    try:
        return sympy.sympify(str(val), rational=True)
    except (sympy.SympifyError, TypeError) as exc:
        raise UsageError(f"cannot parse exact value {val!r}: {exc}") from None


def cmd_figure(opts, target):
    from . import plotting

    name = target or opts["preset"]
    if not name:
        raise UsageError("figure needs a preset id (fig1, fig2, fig3, fig3-ergodic)")
    preset = presets.get_preset(name)
    out = Path(opts["out"] or ".")
    out.mkdir(parents=True, exist_ok=True)
    drawn = []
    for i, layer in enumerate(preset.layers):
        count = layer.count
        if opts["steps"] and layer is preset.layers[0]:
            count = opts["steps"]
        traj = sphere.strobe_trajectory(layer.config, count)
        stem = preset.id if i == 0 else f"{preset.id}-{layer.name}"
        io.emit_csv(traj, out / f"{stem}.csv")
        drawn.append((traj.r, layer.style))
    cfg = preset.layers[0].config
    fig = plotting.sphere_figure(drawn, sphere.bounds(cfg), cfg.q, mark_initial=preset.mark_initial, title=preset.title)
    plotting.save_svg(fig, out / f"{preset.id}.svg")
    print(f"wrote {out / preset.id}.csv and {out / preset.id}.svg", file=sys.stderr)
    return 0


def cmd_acceptance(opts, target):
    out = Path(target or opts["out"] or "acceptance-report")
    results = acceptance.run_all()
    for crit in results:
        print(crit.line())
    path = acceptance.write_report(results, out)
    print(f"report: {path}", file=sys.stderr)
    return 0 if all(c.passed and c.within_runtime for c in results) else 1


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        opts = merge_options(args)
        if args.mode == "figure":
            return cmd_figure(opts, args.target)
        if args.mode == "acceptance":
            return cmd_acceptance(opts, args.target)
        if args.target is not None:
            raise UsageError(f"mode {args.mode} takes no positional argument")
        return globals()[f"cmd_{args.mode}"](opts)
    except (UsageError, InvalidParameterError, UnsupportedInputError, OutOfRangeError) as exc:
        print(f"strobe: error: {exc}", file=sys.stderr)
        return 2
    except NumericalInstabilityError as exc:
        print(f"strobe: numerical instability: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"strobe: I/O failure: {exc}", file=sys.stderr)
        return 3


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
