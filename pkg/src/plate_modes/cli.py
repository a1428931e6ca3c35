"""``plate-modes`` command-line front end.

Exit codes: 0 success, 2 configuration error, 3 numerical failure, 4 I/O error.
"""

import argparse
import csv
import dataclasses
import datetime
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__
from .errors import (BlowUpError, ConfigError, DomainError, PlateModesError, StepSizeError)
from .modal import (ModalState, ModalSystem, build_single_mode_elliptic, build_two_mode_elliptic,
                    build_two_mode_sinusoid, cn_benchmark, integrate, uniform_load)
from .physical import PhysicalParams, nondimensionalize
from .prevailing import amplitude, prevailing_intervals, symmetric_mode_table
from .spectrum import DEFAULT_HALF_WIDTH, DEFAULT_POISSON, PlateGeometry, least_eigenvalues
from .stability import classify_trajectory

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4

SYSTEMS = ("pair-elliptic", "pair-sinusoid", "single-elliptic", "truncated")

SIMULATE_DEFAULTS = {
    "system": "pair-elliptic", "m": 2, "n": 1, "n_modes": 20,
    "delta": 0.58, "S": 279.0, "P": 0.0, "A": None, "omega": None,
    "ell": DEFAULT_HALF_WIDTH, "sigma": DEFAULT_POISSON,
    "ic": None, "t_end": 60.0, "dt": None, "alpha": 0.0,
    "output_every": 1, "adaptive": False, "rtol": 1e-9,
}

SCAN_DEFAULTS = {
    "m": 2, "n": 2, "delta": 0.4, "S": 250.0, "P": 0.0, "A": None, "omega": None,
    "ell": DEFAULT_HALF_WIDTH, "sigma": DEFAULT_POISSON,
    "ic": None, "t_end": 60.0, "dt": None, "window": None, "tol": 1e-2,
}

DECK_FIELDS = [f.name for f in dataclasses.fields(PhysicalParams)]


# -- configuration ------------------------------------------------------------

@dataclasses.dataclass
class RunConfig:
    command: str
    parameters: dict
    outputs: dict


def _load_json(path):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    return data


def _merge(defaults, given, what):
    unknown = sorted(set(given) - set(defaults))
    if unknown:
        raise ConfigError(f"unknown {what} key(s) {unknown}; valid keys: {sorted(defaults)}")
    out = dict(defaults)
    out.update(given)
    return out


def _positive(cfg, *names):
    for name in names:
        v = cfg.get(name)
        if v is not None and not (isinstance(v, (int, float)) and v > 0):
            raise ConfigError(f"{name} must be positive, got {v!r}")


def _grid(spec, name):
    if isinstance(spec, (int, float)):
        return [float(spec)]
    if isinstance(spec, list) and spec:
        return [float(v) for v in spec]
    if isinstance(spec, dict):
        spec = _merge({"start": None, "stop": None, "num": None, "spacing": "linear"}, spec, name)
        if None in (spec["start"], spec["stop"], spec["num"]):
            raise ConfigError(f"{name} range needs start, stop and num")
        fn = {"linear": np.linspace, "log": np.geomspace}.get(spec["spacing"])
        if fn is None:
            raise ConfigError(f"{name}.spacing must be 'linear' or 'log'")
        return [float(v) for v in fn(spec["start"], spec["stop"], int(spec["num"]))]
    raise ConfigError(f"{name} is mandatory: give a number, a list or a start/stop/num range")


def parse_simulate(data):
    cfg = _merge(SIMULATE_DEFAULTS, data, "simulate")
    if cfg["system"] not in SYSTEMS:
        raise ConfigError(f"system must be one of {list(SYSTEMS)}")
    if cfg["A"] is None:
        raise ConfigError("A is mandatory (forcing amplitude has no default)")
    if cfg["system"] in ("pair-sinusoid", "truncated") and cfg["omega"] is None:
        raise ConfigError(f"omega is mandatory for system {cfg['system']!r}")
    _positive(cfg, "delta", "t_end", "dt", "ell", "output_every", "rtol", "m", "n", "n_modes")
    if cfg["S"] < 0 or cfg["P"] < 0:
        raise ConfigError("S and P must be nonnegative")
    return cfg


def parse_scan(data):
    cfg = _merge(SCAN_DEFAULTS, data, "stability-scan")
    cfg["A"] = _grid(cfg["A"], "A")
    cfg["omega"] = _grid(cfg["omega"], "omega")
    _positive(cfg, "delta", "S", "t_end", "dt", "ell", "window", "tol", "m", "n")
    return cfg


def parse_deck(data):
    unknown = sorted(set(data) - set(DECK_FIELDS))
    if unknown:
        raise ConfigError(f"unknown deck key(s) {unknown}; valid keys: {DECK_FIELDS}")
    try:
        return PhysicalParams(**data)
    except TypeError as exc:
        raise ConfigError(f"deck: {exc}") from exc
    except DomainError as exc:
        raise ConfigError(f"deck: {exc}") from exc


def _geometry(cfg):
    try:
        return PlateGeometry(cfg["ell"], cfg["sigma"])
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc


def _initial_state(cfg, n_modes, default_h):
    ic = cfg["ic"] or {}
    if "h" in ic or "hdot" in ic:
        ic = _merge({"h": None, "hdot": None}, ic, "ic")
        h = ic["h"] if ic["h"] is not None else [0.0] * n_modes
        v = ic["hdot"] if ic["hdot"] is not None else [0.0] * n_modes
        if len(h) != n_modes or len(v) != n_modes:
            raise ConfigError(f"ic.h and ic.hdot need {n_modes} entries")
        return ModalState(0.0, h, v)
    ic = _merge({"alpha": default_h[0], "beta": default_h[1] if n_modes > 1 else 0.0}, ic, "ic")
    h = ([ic["alpha"], ic["beta"]] + [0.0] * n_modes)[:n_modes]
    return ModalState(0.0, h, [0.0] * n_modes)


def build_system(cfg):
    """Modal system and initial state described by a parsed simulate config."""
    geom = _geometry(cfg)
    kind = cfg["system"]
    if kind == "pair-elliptic":
        sys_ = build_two_mode_elliptic(cfg["m"], cfg["n"], cfg["delta"], cfg["S"], cfg["A"], geom)
    elif kind == "pair-sinusoid":
        sys_ = build_two_mode_sinusoid(cfg["m"], cfg["n"], cfg["delta"], cfg["S"], cfg["A"],
                                       cfg["omega"], geom)
    elif kind == "single-elliptic":
        sys_ = build_single_mode_elliptic(cfg["m"], cfg["delta"], cfg["S"], cfg["A"], geom)
    else:
        modes = least_eigenvalues(cfg["n_modes"], geom)
        sys_ = ModalSystem.from_modes(modes, cfg["delta"], 0.0, cfg["S"],
                                      uniform_load(modes, cfg["A"], cfg["omega"]))
    if cfg["P"]:
        sys_ = dataclasses.replace(sys_, P=float(cfg["P"]))
    if kind == "single-elliptic":
        default = (-cfg["A"] / cfg["delta"], 0.0)
    elif kind == "truncated":
        default = (0.0, 0.0)
    else:
        default = (0.0, 0.01)
    return sys_, _initial_state(cfg, sys_.n_modes, default)


def _default_dt(sys_):
    return 0.1 / math.sqrt(float(np.max(sys_.lam)))


def parse_config(command, path=None, flags=None):
    """Validate a config file (or flag dict) for ``command`` into a :class:`RunConfig`."""
    data = _load_json(path) if path else {}
    if command == "simulate":
        params = parse_simulate(data)
    elif command == "stability-scan":
        params = parse_scan(data)
    elif command == "scale":
        params = dataclasses.asdict(parse_deck(data))
    else:
        params = dict(flags or {})
    return RunConfig(command, params, {})


# -- output helpers -------------------------------------------------------------

def _fmt(x):
    return repr(float(x))


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def write_manifest(config, directory):
    manifest = {
        "tool": "plate-modes",
        "version": __version__,
        "command": config.command,
        "parameters": _jsonable(config.parameters),
        "outputs": config.outputs,
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
    }
    path = os.path.join(directory or ".", "manifest.json")
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def _gnuplot_script(csv_path, columns, title):
    lines = [
        "# gnuplot script",
        "set datafile separator ','",
        "set key autotitle columnhead",
        f"set title '{title}'",
        "set xlabel 't'" if columns[0] == "t" else "set xlabel 'omega'",
    ]
    plots = [f"'{os.path.basename(csv_path)}' using 1:{i + 1} with lines"
             for i in range(1, len(columns))]
    lines.append("plot " + ", \\\n     ".join(plots))
    return "\n".join(lines) + "\n"


def _emit_plot(csv_path, columns, title):
    gp = os.path.splitext(csv_path)[0] + ".gp"
    with open(gp, "w") as fh:
        fh.write(_gnuplot_script(csv_path, columns, title))
    return gp


class _Console:
    def __init__(self, quiet):
        self.quiet = quiet

    def info(self, msg):
        if not self.quiet:
            print(msg, file=sys.stderr)


# -- commands -----------------------------------------------------------------

def cmd_spectrum(args, con):
    geom = _geometry({"ell": args.ell, "sigma": args.sigma})
    if args.n < 1:
        raise ConfigError("--n must be at least 1")
    modes = least_eigenvalues(args.n, geom)
    rows = [{"index": i + 1, "kind": md.label, "m": md.m, "k": md.k, "family": md.family,
             "sqrt_lambda": md.sqrt_lambda, "lambda": md.lam, "gamma": md.gamma}
            for i, md in enumerate(modes)]
    config = RunConfig("spectrum", {"n": args.n, "ell": args.ell, "sigma": args.sigma}, {})
    if args.table:
        print(f"{'k':>3}  {'mode':<12}{'sqrt(lambda)':>14}{'lambda':>16}")
        for r in rows:
            print(f"{r['index']:>3}  {r['kind']:<12}{r['sqrt_lambda']:>14.6f}{r['lambda']:>16.6f}")
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(rows, fh, indent=2)
            fh.write("\n")
        config.outputs["modes"] = args.out
    elif not args.table:
        json.dump(rows, sys.stdout, indent=2)
        print()
    write_manifest(config, os.path.dirname(args.out) if args.out else ".")
    return EXIT_OK


def _trajectory_rows(traj, every):
    idx = np.arange(0, len(traj), every)
    if idx[-1] != len(traj) - 1:
        idx = np.append(idx, len(traj) - 1)
    pos = np.searchsorted(traj.energy_index, idx)
    e = traj.energy
    for j, i in zip(pos, idx):
        yield ([traj.t[i], *traj.h[i], *traj.hdot[i]]
               + [e.total[j], e.longitudinal[j], e.torsional[j], e.coupling[j]])


def cmd_simulate(args, con):
    if not args.config:
        raise ConfigError("simulate needs --config")
    config = parse_config("simulate", args.config)
    cfg = config.parameters
    sys_, ic = build_system(cfg)
    dt = cfg["dt"] or _default_dt(sys_)
    cfg["dt"] = dt
    n = sys_.n_modes
    header = (["t"] + [f"h_{i + 1}" for i in range(n)] + [f"hdot_{i + 1}" for i in range(n)]
              + ["E_total", "E_L", "E_T", "E_C"])
    out = args.out or "traj.csv"
    config.outputs["trajectory"] = out
    every = int(cfg["output_every"])
    status = EXIT_OK
    try:
        traj = integrate(sys_, ic, cfg["t_end"], dt, alpha=cfg["alpha"], energy_every=1,
                         adaptive=cfg["adaptive"], rtol=cfg["rtol"])
    except BlowUpError as exc:
        con.info(f"error: {exc}; writing partial trajectory")
        traj = exc.trajectory
        status = EXIT_NUMERIC
    rows = list(_trajectory_rows(traj, every))
    _write_csv(out, header, rows)
    config.parameters["system_description"] = sys_.describe()
    if args.emit_plot:
        config.outputs["plot"] = _emit_plot(out, header, f"simulate {cfg['system']}")
    write_manifest(config, os.path.dirname(out))
    con.info(f"wrote {len(rows)} of {len(traj)} states to {out}")
    return status


def cmd_verify_exact(args, con):
    geom = _geometry({"ell": args.ell, "sigma": args.sigma})
    if args.steps < 4:
        raise ConfigError("--steps must be at least 4")
    res = cn_benchmark(args.m, args.delta, args.S, args.A, args.steps, args.periods, geom)
    config = RunConfig("verify-exact", {k: getattr(args, k) for k in
                                        ("m", "delta", "S", "A", "steps", "periods", "ell", "sigma")}, {})
    text = json.dumps(res, indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
        config.outputs["report"] = args.out
    print(text)
    write_manifest(config, os.path.dirname(args.out) if args.out else ".")
    return EXIT_OK


def _scan_point(job):
    cfg, A, omega = job
    geom = PlateGeometry(cfg["ell"], cfg["sigma"])
    sys_ = build_two_mode_sinusoid(cfg["m"], cfg["n"], cfg["delta"], cfg["S"], A, omega, geom)
    if cfg["P"]:
        sys_ = dataclasses.replace(sys_, P=float(cfg["P"]))
    ic = _initial_state(cfg, 2, (0.0, 0.01))
    dt = cfg["dt"] or _default_dt(sys_)
    try:
        traj = integrate(sys_, ic, cfg["t_end"], dt, record_energy=False)
    except BlowUpError:
        return [A, omega, "BlowUp", math.nan, ""]
    v = classify_trajectory(traj, sys_, cfg["window"], cfg["tol"])
    eta = "" if v.decay_rate_estimate is None else v.decay_rate_estimate
    return [A, omega, v.torsional_decay.value, v.peak_torsional_coord, eta]


def cmd_stability_scan(args, con):
    if not args.config:
        raise ConfigError("stability-scan needs --config")
    config = parse_config("stability-scan", args.config)
    cfg = config.parameters
    _geometry(cfg)
    jobs = [(cfg, A, w) for A in cfg["A"] for w in cfg["omega"]]
    workers = args.workers or 1
    if workers == 1:
        rows = [_scan_point(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_scan_point, jobs))
    out = args.out or "atlas.csv"
    _write_csv(out, ["A", "omega", "verdict", "peak_torsional", "eta_fit"], rows)
    config.outputs["atlas"] = out
    write_manifest(config, os.path.dirname(out))
    con.info(f"wrote {len(rows)} grid points to {out}")
    return EXIT_OK


def cmd_prevailing(args, con):
    geom = _geometry({"ell": args.ell, "sigma": args.sigma})
    if args.omega_max <= 0 or args.delta <= 0 or args.P < 0:
        raise ConfigError("need omega-max > 0, delta > 0 and P >= 0")
    table = symmetric_mode_table(args.m_max, geom, P=args.P, delta=args.delta, weights=args.weights)
    intervals = prevailing_intervals(args.P, args.delta, table, args.omega_max)
    params = {k: getattr(args, k) for k in ("P", "delta", "omega_max", "m_max", "weights", "ell", "sigma")}
    config = RunConfig("prevailing", params, {})
    out = args.out or "table.csv"
    _write_csv(out, ["omega_lo", "omega_hi", "k_p"], [list(iv) for iv in intervals])
    config.outputs["table"] = out
    if args.amplitude_curves:
        grid = np.arange(args.curve_step, args.omega_max + 0.5 * args.curve_step, args.curve_step)
        amps = np.array([amplitude(p, grid) for p in table])
        header = ["omega"] + [f"A_{p.label}" for p in table]
        _write_csv(args.amplitude_curves, header,
                   ([w, *amps[:, i]] for i, w in enumerate(grid)))
        config.outputs["amplitude_curves"] = args.amplitude_curves
        if args.emit_plot:
            config.outputs["plot"] = _emit_plot(args.amplitude_curves, header, "prevailing amplitudes")
    for lo, hi, k in intervals:
        con.info(f"({lo:.2f}, {hi:.2f}) -> {k}")
    write_manifest(config, os.path.dirname(out))
    return EXIT_OK


def cmd_scale(args, con):
    if not args.config:
        raise ConfigError("scale needs --config")
    config = parse_config("scale", args.config)
    deck = PhysicalParams(**config.parameters)
    model = nondimensionalize(deck)
    text = json.dumps(model.to_dict(), indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
        config.outputs["model"] = args.out
    print(text)
    write_manifest(config, os.path.dirname(args.out) if args.out else ".")
    return EXIT_OK


# -- argument parsing -----------------------------------------------------------

def _geometry_flags(p):
    p.add_argument("--ell", type=float, default=DEFAULT_HALF_WIDTH, help="half-width of the strip")
    p.add_argument("--sigma", type=float, default=DEFAULT_POISSON, help="Poisson ratio")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS)
    common.add_argument("--emit-plot", action="store_true", default=argparse.SUPPRESS,
                        help="also write a gnuplot script next to the CSV output")

    parser = argparse.ArgumentParser(prog="plate-modes", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--quiet", action="store_true", default=False)
    parser.add_argument("--emit-plot", action="store_true", default=False)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", parents=[common], help="least eigenvalues of the plate")
    p.add_argument("--n", type=int, default=20)
    _geometry_flags(p)
    p.add_argument("--out")
    p.add_argument("--table", action="store_true", help="print a text table")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("simulate", parents=[common], help="integrate a modal system")
    p.add_argument("--config", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify-exact", parents=[common], help="check the integrator on the cn-wave")
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--delta", type=float, default=0.58)
    p.add_argument("--S", type=float, default=279.0)
    p.add_argument("--A", type=float, default=0.2645)
    p.add_argument("--steps", type=int, default=4096, help="RK4 steps per period")
    p.add_argument("--periods", type=int, default=1)
    _geometry_flags(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify_exact)

    p = sub.add_parser("stability-scan", parents=[common], help="torsional verdicts over an (A, omega) grid")
    p.add_argument("--config", required=True)
    p.add_argument("--out")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_stability_scan)

    p = sub.add_parser("prevailing", parents=[common], help="prevailing-mode intervals")
    p.add_argument("--P", type=float, default=0.0)
    p.add_argument("--delta", type=float, default=0.58)
    p.add_argument("--omega-max", type=float, default=260.0)
    p.add_argument("--m-max", type=int, default=17)
    p.add_argument("--weights", choices=("tabulated", "linf"), default="tabulated")
    _geometry_flags(p)
    p.add_argument("--out")
    p.add_argument("--amplitude-curves", help="CSV path for sampled amplitude curves")
    p.add_argument("--curve-step", type=float, default=0.05)
    p.set_defaults(func=cmd_prevailing)

    p = sub.add_parser("scale", parents=[common], help="nondimensionalize deck data")
    p.add_argument("--config", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_scale)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    con = _Console(args.quiet)
    try:
        return args.func(args, con)
    except (ConfigError, DomainError, StepSizeError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PlateModesError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
