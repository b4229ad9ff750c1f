"""Command-line front end.

    ablowitz-ladik simulate --config run.json --out traj.csv [--plot]
    ablowitz-ladik soliton  --config sol.json --out grid.csv [--f1inf-index 0] [--plot]
    ablowitz-ladik verify   [--seed 0] [--out report.json] [--plot]
    ablowitz-ladik sweep    --config sweep.json --out results/ [--workers 4]

Configs are JSON. Complex numbers may be written as a number, a pair
[re, im] or an object {"re": .., "im": ..}. Exit codes: 0 success, 2 invalid
configuration, 3 numerical failure (including a failed identity check).
"""

import argparse
import copy
import csv
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .dynamics import (
    ExtrinsicState,
    branch_of,
    default_monitors,
    from_extrinsic,
    integrate,
    make_rhs,
    to_extrinsic,
)
from .errors import ALError, BlowUpError, BranchMismatchError, ConfigError, ConstraintViolationError
from .model import BoundaryParams, LatticeState, ModelParams
from .mirror.scattering import DiscreteData, f1_infinity_roots, octet_expand
from .mirror.soliton import certify_root, closure_residual_series, soliton_field
from .verify import SUITES, corrupted_k_minus, run_battery

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3
MODES = ("simulate", "soliton", "verify", "sweep")
FORMATS = ("csv", "json")


# ---------------------------------------------------------------- config


def parse_complex(v, where):
    if isinstance(v, bool):
        raise ConfigError(f"{where}: expected a number, got {v!r}")
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, (list, tuple)) and len(v) == 2 and all(isinstance(x, (int, float)) for x in v):
        return complex(v[0], v[1])
    if isinstance(v, dict) and set(v) <= {"re", "im"}:
        return complex(v.get("re", 0.0), v.get("im", 0.0))
    raise ConfigError(f"{where}: expected a number, [re, im] or {{re, im}}, got {v!r}")


def encode_complex(z):
    z = complex(z)
    return [z.real, z.imag]


def _number(d, key, where, default=None, kind=float):
    if key not in d:
        if default is None:
            raise ConfigError(f"{where}.{key}: required field missing")
        return default
    v = d[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{where}.{key}: expected a number, got {v!r}")
    if kind is int and int(v) != v:
        raise ConfigError(f"{where}.{key}: expected an integer, got {v!r}")
    return kind(v)


def _section(raw, key):
    v = raw.get(key, {})
    if not isinstance(v, dict):
        raise ConfigError(f"{key}: expected an object")
    return v


@dataclass
class RunConfig:
    mode: str
    model: ModelParams
    boundary: BoundaryParams
    N: int = 10
    topology: str = "open"
    picture: str = "intrinsic"
    initial: dict = field(default_factory=lambda: {"kind": "random", "amplitude": 0.1})
    t_start: float = 0.0
    t_end: float = 1.0
    dt: float = 1e-3
    sample_stride: int = 10
    phases: bool = False
    soliton: dict = field(default_factory=dict)
    output_path: str = None
    output_format: str = "csv"
    plot: bool = False
    seed: int = 0


def parse_model(d):
    red = d.get("reduction", "none")
    try:
        if red == "dnls":
            return ModelParams.dnls(int(d.get("nu", -1)))
        if red == "dmkdv":
            return ModelParams.dmkdv(int(d.get("nu", 1)))
        return ModelParams(
            parse_complex(d.get("alpha", 0.5), "model.alpha"),
            parse_complex(d.get("beta", 0.5), "model.beta"),
            parse_complex(d.get("gamma", -1.0), "model.gamma"),
            red,
            int(d.get("nu", -1)),
        )
    except ConstraintViolationError as exc:
        raise ConfigError(f"model: {exc}") from exc


def parse_boundary(d, p):
    a = parse_complex(d.get("a", 1.0), "boundary.a")
    b = parse_complex(d.get("b", 0.0), "boundary.b")
    dd = parse_complex(d.get("d", 0.0), "boundary.d")
    if "c" in d:
        c = parse_complex(d["c"], "boundary.c")
    elif p.reduction == "dnls":
        c = -p.nu * np.conj(dd)
    elif p.reduction == "dmkdv":
        c = -p.nu * dd
    else:
        c = 0j
    try:
        bp = BoundaryParams(a, b, c, dd, d.get("branch", "plus"))
        bp.check_reduction(p)
    except ConstraintViolationError as exc:
        raise ConfigError(f"boundary: {exc}") from exc
    return bp


def build_config(raw, mode, overrides=None):
    """Validate a raw JSON dict into a RunConfig; ``overrides`` come from flags."""
    if not isinstance(raw, dict):
        raise ConfigError("config: expected a JSON object")
    if "mode" in raw and raw["mode"] != mode:
        raise ConfigError(f"mode: config says {raw['mode']!r} but the command is {mode!r}")
    ov = overrides or {}
    model = parse_model(_section(raw, "model"))
    bsec = dict(_section(raw, "boundary"))
    if ov.get("branch"):
        bsec["branch"] = ov["branch"]
    boundary = parse_boundary(bsec, model)
    lat = _section(raw, "lattice")
    tim = _section(raw, "time")
    out = _section(raw, "output")
    cfg = RunConfig(mode=mode, model=model, boundary=boundary)
    cfg.N = _number(lat, "N", "lattice", 10, int)
    if cfg.N < 1:
        raise ConfigError("lattice.N: must be at least 1")
    cfg.topology = lat.get("topology", "open")
    if cfg.topology not in ("open", "periodic"):
        raise ConfigError(f"lattice.topology: expected 'open' or 'periodic', got {cfg.topology!r}")
    cfg.picture = lat.get("picture", "intrinsic")
    if cfg.picture not in ("intrinsic", "extrinsic"):
        raise ConfigError(f"lattice.picture: expected 'intrinsic' or 'extrinsic', got {cfg.picture!r}")
    cfg.initial = lat.get("initial", cfg.initial)
    cfg.t_start = _number(tim, "t_start", "time", 0.0)
    cfg.t_end = _number(tim, "t_end", "time", 1.0)
    cfg.dt = _number(tim, "dt", "time", 1e-3)
    cfg.sample_stride = _number(tim, "sample_stride", "time", 10, int)
    if cfg.dt <= 0:
        raise ConfigError("time.dt: must be positive")
    if cfg.t_end <= cfg.t_start:
        raise ConfigError("time.t_end: must exceed time.t_start")
    if cfg.sample_stride < 1:
        raise ConfigError("time.sample_stride: must be at least 1")
    cfg.phases = bool(out.get("phases", False))
    cfg.soliton = dict(_section(raw, "soliton"))
    if ov.get("f1inf_index") is not None:
        cfg.soliton["f1inf_index"] = ov["f1inf_index"]
    cfg.output_path = ov.get("out") or out.get("path")
    suffix = Path(cfg.output_path).suffix.lstrip(".") if cfg.output_path else ""
    cfg.output_format = ov.get("format") or out.get("format") or (suffix if suffix in FORMATS else "csv")
    if cfg.output_format not in FORMATS:
        raise ConfigError(f"output.format: expected one of {FORMATS}, got {cfg.output_format!r}")
    cfg.plot = bool(ov.get("plot") or out.get("plot", False))
    cfg.seed = ov["seed"] if ov.get("seed") is not None else _number(raw, "seed", "config", 0, int)
    if mode == "soliton":
        _check_soliton_section(cfg.soliton, model, boundary)
    return cfg


def _check_soliton_section(s, p, bp):
    if p.reduction != "dnls" or p.nu != -1:
        raise ConfigError("model: soliton mode needs the focusing dnls reduction (nu = -1)")
    zetas = s.get("zetas", [])
    Ds = s.get("Ds", [])
    if not isinstance(zetas, list) or not isinstance(Ds, list):
        raise ConfigError("soliton.zetas / soliton.Ds: expected lists")
    if len(zetas) != len(Ds):
        raise ConfigError("soliton.Ds: must have the same length as soliton.zetas")
    s["zetas"] = [parse_complex(z, f"soliton.zetas[{k}]") for k, z in enumerate(zetas)]
    s["Ds"] = [parse_complex(z, f"soliton.Ds[{k}]") for k, z in enumerate(Ds)]
    idx = s.get("f1inf_index", 0)
    if isinstance(idx, bool) or not isinstance(idx, int) or not 0 <= idx < 8:
        raise ConfigError(f"soliton.f1inf_index: expected an integer in 0..7, got {idx!r}")
    for key, default in (("j_min", -20), ("j_max", 40), ("n_times", 201)):
        s[key] = _number(s, key, "soliton", default, int)
    for key, default in (("t_min", -10.0), ("t_max", 10.0)):
        s[key] = _number(s, key, "soliton", default)
    if s["j_min"] > -1 or s["j_max"] < 0:
        raise ConfigError("soliton.j_min/j_max: the grid must contain sites -1 and 0")
    if s["n_times"] < 1 or s["t_max"] < s["t_min"]:
        raise ConfigError("soliton.n_times/t_max: empty time grid")


def config_to_json(cfg):
    """Echo of the validated config for JSON reports."""
    s = {k: (encode_complex(v) if isinstance(v, complex) else v) for k, v in cfg.soliton.items()}
    for k in ("zetas", "Ds"):
        if k in s:
            s[k] = [encode_complex(z) for z in s[k]]
    m, b = asdict(cfg.model), asdict(cfg.boundary)
    return {
        "mode": cfg.mode,
        "model": {k: encode_complex(v) if isinstance(v, complex) else v for k, v in m.items()},
        "boundary": {k: encode_complex(v) if isinstance(v, complex) else v for k, v in b.items()},
        "lattice": {"N": cfg.N, "topology": cfg.topology, "picture": cfg.picture, "initial": cfg.initial},
        "time": {"t_start": cfg.t_start, "t_end": cfg.t_end, "dt": cfg.dt, "sample_stride": cfg.sample_stride},
        "soliton": s,
        "output": {"path": cfg.output_path, "format": cfg.output_format, "phases": cfg.phases, "plot": cfg.plot},
        "seed": cfg.seed,
    }


# ---------------------------------------------------------------- emission


def _fmt(x):
    return format(float(x), ".17g")


def write_table(path, header, rows):
    """CSV with a header row; floats in round-trip precision."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) if isinstance(v, (float, np.floating, int, np.integer)) and not isinstance(v, bool)
                    else v for v in row])
    Path(path).write_text(buf.getvalue())


def write_json(path, obj):
    Path(path).write_text(json.dumps(obj, indent=1, sort_keys=True) + "\n")


def _figure_path(out, suffix):
    p = Path(out)
    return p.with_name(p.stem + suffix + ".png")


# ---------------------------------------------------------------- simulate


def initial_state(cfg):
    n = cfg.N + 1
    init = cfg.initial
    if not isinstance(init, dict):
        raise ConfigError("lattice.initial: expected an object")
    kind = init.get("kind", "random")
    p = cfg.model
    rng = np.random.default_rng(cfg.seed)
    if kind == "zeros":
        q = np.zeros(n, dtype=complex)
    elif kind == "random":
        amp = _number(init, "amplitude", "lattice.initial", 0.1)
        q = amp * np.sqrt(rng.uniform(size=n)) * np.exp(2j * np.pi * rng.uniform(size=n))
        if p.reduction == "dmkdv":
            q = amp * rng.uniform(-1, 1, size=n).astype(complex)
    elif kind == "explicit":
        raw_q = init.get("q")
        if not isinstance(raw_q, list) or len(raw_q) != n:
            raise ConfigError(f"lattice.initial.q: expected a list of {n} values")
        q = np.array([parse_complex(v, f"lattice.initial.q[{k}]") for k, v in enumerate(raw_q)])
    else:
        raise ConfigError(f"lattice.initial.kind: expected 'zeros', 'random' or 'explicit', got {kind!r}")
    if p.reduction != "none":
        return LatticeState.from_q(q, p, cfg.topology)
    if kind == "random":
        amp = _number(init, "amplitude", "lattice.initial", 0.1)
        r = amp * np.sqrt(rng.uniform(size=n)) * np.exp(2j * np.pi * rng.uniform(size=n))
    elif kind == "explicit" and "r" in init:
        raw_r = init["r"]
        if not isinstance(raw_r, list) or len(raw_r) != n:
            raise ConfigError(f"lattice.initial.r: expected a list of {n} values")
        r = np.array([parse_complex(v, f"lattice.initial.r[{k}]") for k, v in enumerate(raw_r)])
    else:
        r = np.zeros(n, dtype=complex)
    return LatticeState(q, r, cfg.topology)


def run_simulate(cfg):
    """Integrate the configured chain; returns (exit code, message)."""
    p, bp = cfg.model, cfg.boundary
    s = initial_state(cfg)
    if cfg.topology == "periodic":
        kind, q0, r0 = "periodic", s.q, s.r
    else:
        try:
            bp = bp.with_branch(branch_of(s, bp))
        except BranchMismatchError as exc:
            raise ConfigError(f"boundary.branch: {exc}") from exc
        if cfg.picture == "extrinsic":
            e = to_extrinsic(s, bp)
            kind, q0, r0 = "extrinsic", e.Q, e.R
        else:
            kind, q0, r0 = "intrinsic", s.q, s.r
    rhs = make_rhs(kind, p, bp, cfg.topology)
    mons = default_monitors("intrinsic" if kind != "periodic" else "periodic", p, bp)
    if kind == "extrinsic":
        mons = {k: (lambda st, m=m: m(from_extrinsic(ExtrinsicState(st.q, st.r, bp))))
                for k, m in mons.items()}
    status, msg = EXIT_OK, f"simulated {kind} chain to t={cfg.t_end:g}"
    try:
        tr = integrate(q0, r0, rhs, cfg.t_end, cfg.dt, t_start=cfg.t_start,
                       stride=cfg.sample_stride, monitors=mons, topology=cfg.topology)
    except BlowUpError as exc:
        tr, status, msg = exc.trajectory, EXIT_NUMERIC, f"blow-up: {exc}"
    emit_trajectory(cfg, tr, branch=bp.branch if kind != "periodic" else None)
    return status, msg


def emit_trajectory(cfg, tr, branch=None):
    n = tr.q.shape[1]
    names = sorted(tr.monitors)
    drift = {}
    for k in names:
        v = tr.monitors[k]
        ref = abs(v[0]) if abs(v[0]) > 0 else 1.0
        drift[k] = np.abs(v - v[0]) / ref
    with_r = cfg.model.reduction == "none"
    if cfg.output_format == "csv":
        header = ["t"] + [f"absq_{j}" for j in range(n)]
        if cfg.phases:
            header += [f"argq_{j}" for j in range(n)]
        if with_r:
            header += [f"absr_{j}" for j in range(n)]
        for k in names:
            header += [f"{k}_re", f"{k}_im", f"{k}_drift"]
        header.append("completed")
        rows = []
        for i, t in enumerate(tr.times):
            row = [t] + list(np.abs(tr.q[i]))
            if cfg.phases:
                row += list(np.angle(tr.q[i]))
            if with_r:
                row += list(np.abs(tr.r[i]))
            for k in names:
                v = tr.monitors[k][i]
                row += [v.real, v.imag, drift[k][i]]
            row.append(int(tr.completed))
            rows.append(row)
        write_table(cfg.output_path, header, rows)
    else:
        res = {
            "completed": tr.completed,
            "branch": branch,
            "times": [float(t) for t in tr.times],
            "q": [[encode_complex(v) for v in row] for row in tr.q],
            "monitors": {k: [encode_complex(v) for v in tr.monitors[k]] for k in names},
            "max_drift": {k: float(np.max(drift[k])) for k in names},
        }
        if with_r:
            res["r"] = [[encode_complex(v) for v in row] for row in tr.r]
        write_json(cfg.output_path, {"config": config_to_json(cfg), "results": res})
    if cfg.plot:
        from .plotting import field_heatmap, monitor_plot

        field_heatmap(tr.times, np.abs(tr.q), _figure_path(cfg.output_path, ""))
        if names:
            monitor_plot(tr.times, tr.monitors, _figure_path(cfg.output_path, "_monitors"))


# ---------------------------------------------------------------- soliton


def run_soliton(cfg):
    p, bp = cfg.model, cfg.boundary
    sec = cfg.soliton
    idx = sec.get("f1inf_index", 0)
    roots = f1_infinity_roots(bp, p)
    f1 = roots[idx].value
    _, certified, res = certify_root(bp, p, idx)
    if certified is None:
        return EXIT_NUMERIC, (f"f1inf root {idx} ({f1:.6g}) certifies no closure branch "
                              f"(plus {res['plus']:.2e}, minus {res['minus']:.2e})")
    if certified != "robin":
        bp = bp.with_branch(certified)
    try:
        dd = DiscreteData(sec.get("zetas", []), sec.get("Ds", []), f1, bp)
    except ConstraintViolationError as exc:
        raise ConfigError(f"soliton: {exc}") from exc
    oct = octet_expand(dd, p)
    js = np.arange(sec["j_min"], sec["j_max"] + 1)
    ts = np.linspace(sec["t_min"], sec["t_max"], sec["n_times"])
    grid = np.array([soliton_field(oct, js, t) for t in ts]).reshape(ts.size, js.size)
    closure = closure_residual_series(oct, bp, ts, p)
    emit_grid(cfg, js, ts, grid, closure, certified, f1)
    worst = float(np.max(closure, initial=0.0))
    if worst >= 1e-8:
        return EXIT_NUMERIC, f"boundary closure residual {worst:.2e} exceeds 1e-08"
    return EXIT_OK, f"soliton grid {ts.size} x {js.size}, branch {certified}, closure residual {worst:.2e}"


def emit_grid(cfg, js, ts, grid, closure, branch, f1):
    if cfg.output_format == "csv":
        header = ["t"] + [f"absQ_{j}" for j in js]
        if cfg.phases:
            header += [f"argQ_{j}" for j in js]
        header.append("closure_residual")
        rows = []
        for i, t in enumerate(ts):
            row = [t] + list(np.abs(grid[i]))
            if cfg.phases:
                row += list(np.angle(grid[i]))
            rows.append(row + [closure[i]])
        write_table(cfg.output_path, header, rows)
    else:
        res = {
            "branch": branch,
            "f1inf": encode_complex(f1),
            "sites": [int(j) for j in js],
            "times": [float(t) for t in ts],
            "Q": [[encode_complex(v) for v in row] for row in grid],
            "closure_residual": [float(v) for v in closure],
        }
        write_json(cfg.output_path, {"config": config_to_json(cfg), "results": res})
    if cfg.plot:
        from .plotting import soliton_contour

        soliton_contour(js, ts, np.abs(grid), _figure_path(cfg.output_path, ""),
                        title=f"|Q_j(t)|, branch {branch}")


# ---------------------------------------------------------------- verify


def run_verify(cfg, corrupt_k_minus=0.0, suites=SUITES):
    kfn = corrupted_k_minus(corrupt_k_minus) if corrupt_k_minus else None
    results, timing = run_battery(cfg.seed, suites, kfn)
    for r in results:
        print(r.line())
    failed = [f"{r.suite}/{r.name}" for r in results if not r.passed]
    if cfg.output_path:
        rows = [{"suite": r.suite, "name": r.name, "residual": float(r.residual), "tol": r.tol,
                 "expect_fail": r.expect_fail, "passed": r.passed} for r in results]
        if cfg.output_format == "csv":
            write_table(cfg.output_path, ["suite", "name", "residual", "tol", "expect_fail", "passed"],
                        [[d["suite"], d["name"], d["residual"], d["tol"], int(d["expect_fail"]), int(d["passed"])]
                         for d in rows])
        else:
            write_json(cfg.output_path, {"seed": cfg.seed, "results": rows, "failed": failed})
        if cfg.plot:
            from .plotting import residual_bars

            residual_bars([f"{r.suite}/{r.name}" for r in results], [r.residual for r in results],
                          [r.tol for r in results], _figure_path(cfg.output_path, ""))
    if failed:
        return EXIT_NUMERIC, "failed: " + ", ".join(failed)
    return EXIT_OK, f"all {len(results)} checks passed"


# ---------------------------------------------------------------- sweep


def _set_path(d, dotted, value):
    keys = dotted.split(".")
    for k in keys[:-1]:
        d = d.setdefault(k, {})
        if not isinstance(d, dict):
            raise ConfigError(f"sweep.parameter: {dotted!r} does not name a config field")
    d[keys[-1]] = value


def _sweep_one(args):
    base, mode, out, overrides = args
    try:
        cfg = build_config(base, mode, dict(overrides, out=str(out)))
        code, msg = RUNNERS[mode](cfg)
    except ConfigError as exc:
        code, msg = EXIT_CONFIG, str(exc)
    except ALError as exc:
        code, msg = EXIT_NUMERIC, f"{type(exc).__name__}: {exc}"
    return code, msg


def run_sweep(raw, out_dir, overrides, workers=1):
    sw = raw.get("sweep")
    if not isinstance(sw, dict):
        raise ConfigError("sweep: required object missing")
    mode = sw.get("mode", "simulate")
    if mode not in ("simulate", "soliton"):
        raise ConfigError(f"sweep.mode: expected 'simulate' or 'soliton', got {mode!r}")
    param = sw.get("parameter")
    values = sw.get("values")
    if not isinstance(param, str) or not isinstance(values, list) or not values:
        raise ConfigError("sweep.parameter/values: need a dotted field name and a non-empty list")
    base = {k: v for k, v in raw.items() if k not in ("sweep", "mode")}
    fmt = overrides.get("format") or _section(base, "output").get("format", "csv")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    jobs = []
    for k, v in enumerate(values):
        cfg_k = copy.deepcopy(base)
        _set_path(cfg_k, param, v)
        jobs.append((cfg_k, mode, out_dir / f"run_{k:03d}.{fmt}", overrides))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            outcomes = list(ex.map(_sweep_one, jobs))
    else:
        outcomes = [_sweep_one(j) for j in jobs]
    summary = [[k, json.dumps(v), code, msg] for k, (v, (code, msg)) in enumerate(zip(values, outcomes))]
    write_table(out_dir / "summary.csv", ["run", param, "exit_code", "message"], summary)
    worst = max(code for code, _ in outcomes)
    return worst, f"{len(values)} runs, worst exit code {worst}"


RUNNERS = {"simulate": run_simulate, "soliton": run_soliton}


# ---------------------------------------------------------------- entry point


def build_parser():
    ap = argparse.ArgumentParser(prog="ablowitz-ladik", description=__doc__.split("\n\n")[0])
    sub = ap.add_subparsers(dest="mode", required=True)
    for m in MODES:
        sp = sub.add_parser(m)
        sp.add_argument("--config", type=Path, help="JSON configuration file")
        sp.add_argument("--out", help="output file (directory for sweep)")
        sp.add_argument("--format", choices=FORMATS)
        sp.add_argument("--seed", type=int)
        sp.add_argument("--branch", choices=("plus", "minus"))
        sp.add_argument("--f1inf-index", type=int, dest="f1inf_index")
        sp.add_argument("--plot", action="store_true", help="render PNG figures next to the output")
        if m == "verify":
            sp.add_argument("--corrupt-k-minus", type=float, default=0.0, metavar="EPS",
                            help="perturb one entry of k- (negative control)")
            sp.add_argument("--suites", default=",".join(SUITES), help="comma-separated suite names")
        if m == "sweep":
            sp.add_argument("--workers", type=int, default=1)
    return ap


def _load(path):
    if path is None:
        return {}
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"config: cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config: invalid JSON in {path}: {exc}") from exc


def main(argv=None):
    args = build_parser().parse_args(argv)
    ov = {"out": args.out, "format": args.format, "seed": args.seed, "branch": args.branch,
          "f1inf_index": args.f1inf_index, "plot": args.plot}
    try:
        raw = _load(args.config)
        if args.mode == "sweep":
            if not args.out:
                raise ConfigError("--out: sweep needs an output directory")
            code, msg = run_sweep(raw, args.out, {k: v for k, v in ov.items() if k != "out"}, args.workers)
        else:
            cfg = build_config(raw, args.mode, ov)
            if args.mode == "verify":
                suites = tuple(s for s in args.suites.split(",") if s)
                unknown = [s for s in suites if s not in SUITES]
                if unknown:
                    raise ConfigError(f"--suites: unknown suite(s) {', '.join(unknown)}")
                code, msg = run_verify(cfg, args.corrupt_k_minus, suites)
            else:
                if not cfg.output_path:
                    raise ConfigError("output.path: required (or pass --out)")
                code, msg = RUNNERS[args.mode](cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ALError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    print(msg, file=sys.stderr if code else sys.stdout)
    return code


if __name__ == "__main__":
    sys.exit(main())
