"""Command-line front end.

Subcommands ``linearize``, ``sweep``, ``chart``, ``transitions`` and
``simulate`` write CSV/JSON datasets plus a ``manifest.json`` into the output
directory (``--out``, else ``$SLEEPING_TOP_OUT``, else ``./sleeping_top_out``).

Settings are resolved as defaults < ``--config`` file < flags.  The config
file is either flat ``key = value`` lines or a previous ``manifest.json``,
whose ``resolved`` block is reused, so a run can be reproduced exactly.

Exit codes: 0 success, 2 invalid usage or parameters, 3 numerical failure.
"""

import argparse
import hashlib
import json
import math
import os
import sys
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .dynamics import (IntegratorConfig, StepRejected, conservation_report,
                       fit_growth_rate, integrate)
from .model import InvalidParameters, TopParameters, tilted_sleeping_point
from .spectrum import (characteristic_polynomial, eigenvalues_closed_form,
                       eigenvalues_numeric, linearization, spectrum_report)
from .symplectic_slice import hessian_coefficients, slice_hessian, slice_symplectic
from .transitions import (EtaRule, InconsistentSpectrum, InvalidRule,
                          default_chart_window, optimal_eta, plane_chart,
                          stability_classify, sweep_eigenvalue_paths,
                          transition_points)

OUT_ENV = "SLEEPING_TOP_OUT"
DEFAULT_OUT = "sleeping_top_out"

DEFAULTS = {
    "m": 1.0, "g": 1.0, "l": 1.0, "i1": 1.0, "i3": 1.5,
    "lambda": None, "eta": None, "eta_rule": None, "eta_range": None,
    "dt": 1e-3, "t_end": 100.0, "scheme": "lierk4", "tilt": 0.0,
    "sample_every": 10, "tol": 1e-9, "out": None,
}
FLOAT_KEYS = {"m", "g", "l", "i1", "i3", "eta", "dt", "t_end", "tilt", "tol"}
INT_KEYS = {"sample_every"}


class UsageError(ValueError):
    pass


def fmt(x):
    """17 significant digits: exact round trip for doubles."""
    return format(float(x), ".17g")


def parse_range(text, name):
    try:
        lo, hi, count = text.split(":")
        lo, hi, count = float(lo), float(hi), int(count)
    except ValueError:
        raise UsageError(f"{name} must look like min:max:count, got {text!r}") from None
    if not lo < hi:
        raise UsageError(f"{name}: need min < max")
    if count < 2:
        raise UsageError(f"{name}: count must be >= 2")
    return lo, hi, count


def read_config(path):
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError:
        data = None
    if isinstance(data, dict):
        return dict(data.get("resolved", data))
    out = {}
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise UsageError(f"{path}:{n}: expected key=value")
        out[key.strip().replace("-", "_")] = value.strip()
    return out


def _coerce(key, value):
    if value is None:
        return None
    try:
        if key in FLOAT_KEYS:
            return float(value)
        if key in INT_KEYS:
            return int(value)
    except (TypeError, ValueError):
        raise UsageError(f"bad value for {key}: {value!r}") from None
    return str(value)


def resolve(args):
    cfg = dict(DEFAULTS)
    if args.config:
        for key, value in read_config(args.config).items():
            if key not in cfg:
                raise UsageError(f"unknown config key {key!r}")
            cfg[key] = value
    for key in cfg:
        flag = getattr(args, key, None)
        if flag is not None:
            cfg[key] = flag
    resolved = {k: _coerce(k, v) for k, v in cfg.items()}
    if resolved["out"] is None:
        resolved["out"] = os.environ.get(OUT_ENV, DEFAULT_OUT)
    return resolved


def params_from(cfg):
    return TopParameters(cfg["m"], cfg["g"], cfg["l"], cfg["i1"], cfg["i3"])


def scalar_lambda(cfg):
    if cfg["lambda"] is None:
        raise UsageError("--lambda is required")
    try:
        return float(cfg["lambda"])
    except ValueError:
        raise UsageError(f"--lambda must be a number here, got {cfg['lambda']!r}") from None


def resolve_eta(cfg, p, lam):
    if cfg["eta_rule"] is not None:
        if cfg["eta"] is not None:
            raise UsageError("give either --eta or --eta-rule, not both")
        return EtaRule.parse(cfg["eta_rule"]).eta(p, lam)
    if cfg["eta"] is not None:
        return cfg["eta"]
    return optimal_eta(p, lam)


def complex_pairs(values):
    return [[z.real, z.imag] for z in values]


def write_text(out_dir, name, text, outputs):
    path = out_dir / name
    data = text.encode()
    path.write_bytes(data)
    outputs[name] = hashlib.sha256(data).hexdigest()
    return path


def write_json(out_dir, name, obj, outputs):
    return write_text(out_dir, name, json.dumps(obj, indent=2, sort_keys=True) + "\n", outputs)


def write_csv(out_dir, name, header, rows, outputs):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(v if isinstance(v, str) else fmt(v) for v in row))
    return write_text(out_dir, name, "\n".join(lines) + "\n", outputs)


# -- commands ----------------------------------------------------------------


def cmd_linearize(cfg, out_dir, outputs):
    p = params_from(cfg)
    lam = scalar_lambda(cfg)
    eta = resolve_eta(cfg, p, lam)
    c = hessian_coefficients(p, lam, eta)
    omega, omega_inv = slice_symplectic(p, lam)
    L = linearization(p, lam, eta)
    rep = spectrum_report(p, lam, eta, cfg["tol"])
    p2, p0 = characteristic_polynomial(p, lam, eta)
    verdict = stability_classify(p, lam)
    result = {
        "lambda": lam, "eta": eta,
        "A": c.A, "B": c.B, "C": c.C,
        "E": rep.invariants.E, "F": rep.invariants.F,
        "hessian": slice_hessian(c).tolist(),
        "omega_N": omega.tolist(), "omega_N_inv": omega_inv.tolist(),
        "L": L.tolist(),
        "charpoly": {"p2": p2, "p0": p0},
        "eigenvalues_closed_form": complex_pairs(rep.eigenvalues),
        "eigenvalues_numeric": complex_pairs(eigenvalues_numeric(L)),
        "class": str(rep.cls), "boundary": rep.boundary,
        "stability": str(verdict.kind), "witness_eta": verdict.witness,
    }
    write_json(out_dir, "linearize.json", result, outputs)
    return result


def cmd_sweep(cfg, out_dir, outputs):
    p = params_from(cfg)
    if cfg["lambda"] is None:
        raise UsageError("--lambda min:max:count is required")
    lo, hi, count = parse_range(cfg["lambda"], "--lambda")
    if cfg["eta"] is not None:
        raise UsageError("sweep takes --eta-rule (use const:c for a fixed eta), not --eta")
    rule = EtaRule.parse(cfg["eta_rule"] or "lewis")
    res = sweep_eigenvalue_paths(p, rule, lo, hi, count, cfg["tol"])
    header = ["lambda", "eta", "E", "F"] + [f"{k}{i}" for i in range(1, 5) for k in ("re", "im")]
    header.append("class")
    rows = []
    for r in res.records:
        row = [r.lam, r.eta, r.E, r.F]
        for z in r.eigenvalues:
            row += [z.real, z.imag]
        rows.append(row + [str(r.cls)])
    write_csv(out_dir, "sweep.csv", header, rows, outputs)
    sidecar = {
        "rule": str(rule),
        "transitions": res.transitions,
        "events": [{"lambda": ev.lam, "kind": ev.kind} for ev in res.events],
        "class_sequence": [str(c) for c in res.class_sequence()],
        "timeline": [[e[0], str(e[1])] + list(e[2:]) for e in res.timeline()],
    }
    write_json(out_dir, "sweep_transitions.json", sidecar, outputs)
    return sidecar


def cmd_chart(cfg, out_dir, outputs):
    p = params_from(cfg)
    (l_lo, l_hi), (e_lo, e_hi) = default_chart_window(p)
    nl = ne = 101
    if cfg["lambda"] is not None:
        l_lo, l_hi, nl = parse_range(cfg["lambda"], "--lambda")
    if cfg["eta_range"] is not None:
        e_lo, e_hi, ne = parse_range(cfg["eta_range"], "--eta-range")
    chart = plane_chart(p, (l_lo, l_hi), (e_lo, e_hi), (nl, ne), cfg["tol"])
    write_csv(out_dir, "chart_grid.csv", ["lambda", "eta", "E", "F", "class"],
              [[n.lam, n.eta, n.E, n.F, str(n.cls)] for n in chart.nodes], outputs)
    for name, pts in chart.series.items():
        write_csv(out_dir, f"chart_{name}.csv", ["lambda", "eta"], pts, outputs)
    summary = {
        "window": {"lambda": [l_lo, l_hi, nl], "eta": [e_lo, e_hi, ne]},
        "series": sorted(chart.series),
        "intersections": {k: [list(pt) for pt in v] for k, v in chart.intersections.items()},
    }
    write_json(out_dir, "chart_intersections.json", summary, outputs)
    return summary


def cmd_transitions(cfg, out_dir, outputs):
    p = params_from(cfg)
    tp = transition_points(p)
    result = {
        "tau_fs": tp.tau_fs,
        "hyperbola": ("eta = ((I3 - I1)*lambda +- sqrt(F)) / (2*I1), "
                      "F = I3^2*lambda^2 - 4*m*g*l*I1, real for |lambda| >= tau_fs"),
    }
    if tp.tau_fsf_lewis is not None:
        result["tau_fsf_lewis"] = tp.tau_fsf_lewis
        result["lewis_point"] = [tp.tau_fsf_lewis, 0.5 * tp.tau_fsf_lewis]
    write_json(out_dir, "transitions.json", result, outputs)
    return result


def cmd_simulate(cfg, out_dir, outputs):
    p = params_from(cfg)
    lam = scalar_lambda(cfg)
    tilt = cfg["tilt"]
    if tilt < 0:
        raise UsageError("--tilt must be >= 0")
    try:
        icfg = IntegratorConfig(cfg["dt"], cfg["t_end"], cfg["scheme"], cfg["sample_every"])
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    traj = integrate(p, tilted_sleeping_point(p, lam, tilt), icfg)
    header = ["t"] + [f"R{i}{j}" for i in range(1, 4) for j in range(1, 4)]
    header += ["pix", "piy", "piz", "energy", "j1", "j2"]
    rows = [[t, *R.ravel(), *pi, e, a, b] for t, R, pi, e, a, b in
            zip(traj.times, traj.attitudes, traj.momenta, traj.energy, traj.j1, traj.j2)]
    write_csv(out_dir, "trajectory.csv", header, rows, outputs)
    report = conservation_report(p, traj).as_dict()
    if tilt > 0:
        tilts = traj.tilt
        rate, window = fit_growth_rate(traj.times, tilts, tilt)
        spectrum = eigenvalues_closed_form(p, lam, optimal_eta(p, lam))
        report["probe"] = {
            "max_tilt": float(tilts.max()),
            "growth_rate": rate,
            "fit_window": list(window) if window else None,
            "linear_max_real_part": max(z.real for z in spectrum),
        }
    write_json(out_dir, "conservation.json", report, outputs)
    return report


COMMANDS = {
    "linearize": cmd_linearize,
    "sweep": cmd_sweep,
    "chart": cmd_chart,
    "transitions": cmd_transitions,
    "simulate": cmd_simulate,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="sleeping-top", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("top parameters")
    for flag in ("m", "g", "l", "i1", "i3"):
        g.add_argument(f"--{flag}", type=float)
    common.add_argument("--config", help="key=value file or a previous manifest.json")
    common.add_argument("--out", help=f"output directory (default ${OUT_ENV} or ./{DEFAULT_OUT})")
    common.add_argument("--tol", type=float, help="relative classification tolerance")

    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("linearize", parents=[common], help="slice linearization at one (lambda, eta)")
    p.add_argument("--lambda", dest="lambda")
    p.add_argument("--eta", type=float)
    p.add_argument("--eta-rule")

    p = sub.add_parser("sweep", parents=[common], help="eigenvalue paths along a lambda range")
    p.add_argument("--lambda", dest="lambda", help="min:max:count")
    p.add_argument("--eta-rule", help="lewis|star|zero-e|linear:a,b|const:c")
    p.add_argument("--eta", type=float, help=argparse.SUPPRESS)

    p = sub.add_parser("chart", parents=[common], help="spectrum classes on the (lambda, eta) plane")
    p.add_argument("--lambda", dest="lambda", help="min:max:count")
    p.add_argument("--eta-range", help="min:max:count")

    sub.add_parser("transitions", parents=[common], help="fast-slow and Lewis fast-superfast points")

    p = sub.add_parser("simulate", parents=[common], help="integrate from a tilted sleeping top")
    p.add_argument("--lambda", dest="lambda")
    p.add_argument("--tilt", type=float)
    p.add_argument("--dt", type=float)
    p.add_argument("--t-end", type=float)
    p.add_argument("--scheme", choices=["lierk4", "liemidpoint"])
    p.add_argument("--sample-every", type=int)
    return parser


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    started = datetime.now(timezone.utc).isoformat()
    try:
        cfg = resolve(args)
        out_dir = Path(cfg["out"])
        out_dir.mkdir(parents=True, exist_ok=True)
        outputs = {}
        result = COMMANDS[args.command](cfg, out_dir, outputs)
    except (UsageError, InvalidParameters, InvalidRule, ValueError) as exc:
        print(f"sleeping-top {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (StepRejected, InconsistentSpectrum, ArithmeticError) as exc:
        print(f"sleeping-top {args.command}: numerical failure: {exc}", file=sys.stderr)
        return 3
    manifest = {
        "tool": "sleeping-top",
        "version": __version__,
        "command": args.command,
        "argv": argv,
        "resolved": cfg,
        "started": started,
        "finished": datetime.now(timezone.utc).isoformat(),
        "outputs": outputs,
    }
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    json.dump(result, sys.stdout, indent=2, sort_keys=True, default=_json_default)
    sys.stdout.write("\n")
    return 0


def _json_default(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return str(obj)


if __name__ == "__main__":
    sys.exit(main())
