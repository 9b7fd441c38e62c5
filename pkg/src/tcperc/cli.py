"""Command-line interface.

Every run is described by a JSON configuration whose fully resolved form is
echoed into the output; feeding that echo back through ``--config``
reproduces the run.  Explicit flags override values from the file.

Exit codes: 0 success, 1 a check failed, 2 configuration or I/O error.
"""

from __future__ import annotations

import argparse
import copy
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import experiments as ex
from .core import NEVER, Environment, Trajectory, longest_occupied_length, run, run_kd_completion
from .edgeset import EdgeSet
from .env import OpenMode, OpenModel, sample_open
from .families import FamilyKind, FamilySpec, make
from .oracles import catalan, catalan_minimal_sets, chain, run_tilde
from .render import RenderSpec, render_matrix
from .verify import run_verification

COMMANDS = ("simulate", "sweep", "pc", "tc3", "verify", "render", "catalan")

DEFAULTS = {
    "command": None,
    "base_seed": 0,
    "family": {
        "kind": "linear-unoriented",
        "n": 300,
        "d": 2,
        "dim": 0,
        "p_initial": 0.0,
        "seed": None,
        "r": 1,
    },
    "model": {
        "mode": "uniform",
        "p_open": 0.0,
        "p_left": 0.0,
        "p_right": 0.0,
        "unoriented": False,
    },
    "dynamics": {"kind": "transitive", "d": 3},
    "trials": 200,
    "grid": [],
    "alpha": ex.DEFAULT_ALPHA,
    "tolerance": 1 / 256,
    "n_list": [],
    "max_n": 12,
    "instances": 50,
    "ell_max": 7,
    "scale": 1,
    "render": None,
    "save": None,
    "input": None,
    "output": None,
    "csv": None,
}


class ConfigError(ValueError):
    pass


def _merge(base: dict, update: dict, where: str = "") -> dict:
    out = copy.deepcopy(base)
    for key, value in update.items():
        path = f"{where}{key}"
        if key not in base:
            raise ConfigError(f"unknown config key {path!r}")
        if isinstance(base[key], dict):
            if not isinstance(value, dict):
                raise ConfigError(f"config key {path!r} must be an object")
            out[key] = _merge(base[key], value, path + ".")
        else:
            out[key] = value
    return out


def load_config(path) -> dict:
    """Read a config file, or the config echoed inside a previous run's JSON output."""
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as err:
        raise ConfigError(f"{path}: line {err.lineno} column {err.colno}: {err.msg}") from None
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: top level must be an object")
    # an output document carries its resolved config under "config"
    if isinstance(doc.get("config"), dict):
        doc = doc["config"]
    return doc


def _ints(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _grid(text: str) -> list:
    """``0.1,0.2`` for p_open values or ``0.2:0.4,0.35:0.35`` for (p_left, p_right)."""
    cells = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        if ":" in item:
            left, right = item.split(":")
            cells.append([float(left), float(right)])
        else:
            cells.append(float(item))
    return cells


def _common(with_n: bool = True) -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--config", help="JSON configuration file")
    common.add_argument("--seed", dest="base_seed", type=int, help="base seed")
    common.add_argument("--threads", type=int, help="worker threads (output does not depend on it)")
    common.add_argument("--output", "-o", help="JSON output path")
    common.add_argument("--csv", help="CSV output path")
    fam = common.add_argument_group("family")
    fam.add_argument("--family", dest="family.kind", choices=[k.value for k in FamilyKind])
    if with_n:
        fam.add_argument("--n", dest="family.n", type=int)
    fam.add_argument("--d", dest="family.d", type=int)
    fam.add_argument("--dim", dest="family.dim", type=int)
    fam.add_argument("--p-initial", dest="family.p_initial", type=float)
    fam.add_argument("--family-seed", dest="family.seed", type=int)
    fam.add_argument("--r", dest="family.r", type=int)
    mod = common.add_argument_group("open edges")
    mod.add_argument("--p-open", dest="model.p_open", type=float)
    mod.add_argument("--p-left", dest="model.p_left", type=float)
    mod.add_argument("--p-right", dest="model.p_right", type=float)
    mod.add_argument("--unoriented", dest="model.unoriented", action="store_true")
    dyn = common.add_argument_group("dynamics")
    dyn.add_argument("--dynamics", dest="dynamics.kind", choices=["transitive", "kd", "tilde"])
    dyn.add_argument("--kd-d", dest="dynamics.d", type=int)
    return common


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tcperc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help, with_n=True):
        return sub.add_parser(
            name, parents=[_common(with_n)], help=help, argument_default=argparse.SUPPRESS
        )

    p = add("simulate", "run one instance")
    p.add_argument("--alpha", type=float)
    p.add_argument("--render", help="PPM output path")
    p.add_argument("--scale", type=int)
    p.add_argument("--save", help="store the run as .npz for later rendering")

    p = add("sweep", "coupled density sweep")
    p.add_argument("--grid", type=_grid, help="0.1,0.2 or 0.2:0.4,0.35:0.35")
    p.add_argument("--trials", type=int)
    p.add_argument("--alpha", type=float)

    p = add("pc", "bisect for the critical density")
    p.add_argument("--trials", type=int, help="trials per probe")
    p.add_argument("--tolerance", type=float)

    # --n takes a list of sizes here
    p = add("tc3", "Catalan saturation at p = 1 - alpha/sqrt(n)", with_n=False)
    p.add_argument("--alpha", type=float)
    p.add_argument("--n", dest="n_list", type=_ints)
    p.add_argument("--trials", type=int)

    p = add("verify", "randomised lemma checks")
    p.add_argument("--max-n", dest="max_n", type=int)
    p.add_argument("--instances", type=int)

    p = add("render", "render a saved run")
    p.add_argument("--input", help=".npz written by simulate --save")
    p.add_argument("--render", help="PPM output path")
    p.add_argument("--scale", type=int)

    p = add("catalan", "minimal open sets in Catalan percolation")
    p.add_argument("--ell-max", dest="ell_max", type=int)
    return parser


def resolve(argv) -> tuple[dict, int]:
    """Parse ``argv`` into a fully resolved config plus the thread count."""
    args = vars(_parser().parse_args(argv))
    command = args.pop("command")
    threads = int(args.pop("threads", 1))
    if threads < 1:
        raise ConfigError("--threads must be at least 1")
    config = copy.deepcopy(DEFAULTS)
    if "config" in args:
        doc = load_config(args.pop("config"))
        if doc.get("command", command) != command:
            raise ConfigError(f"config is for {doc['command']!r}, not {command!r}")
        config = _merge(config, doc)
    config["command"] = command
    flags: dict = {}
    for key, value in args.items():
        if "." in key:
            outer, inner = key.split(".")
            flags.setdefault(outer, {})[inner] = value
        else:
            flags[key] = value
    config = _merge(config, flags)
    model = flags.get("model", {})
    if "p_open" in model and ({"p_left", "p_right"} & model.keys()):
        raise ConfigError("give either --p-open or --p-left/--p-right")
    if "p_open" in model:
        config["model"]["mode"] = "uniform"
    elif {"p_left", "p_right"} & model.keys():
        config["model"]["mode"] = "left_right"
    if config["family"]["seed"] is None:
        config["family"]["seed"] = config["base_seed"]
    return config, threads


def _family(config) -> FamilySpec:
    try:
        return FamilySpec(**config["family"])
    except (TypeError, ValueError) as err:
        raise ConfigError(f"family: {err}") from None


def _model(config) -> OpenModel:
    m = dict(config["model"])
    try:
        return OpenModel(seed=config["base_seed"], **m)
    except (TypeError, ValueError) as err:
        raise ConfigError(f"model: {err}") from None


def _density(model: OpenModel):
    if model.mode is OpenMode.UNIFORM:
        return model.p_open
    return (model.p_left, model.p_right)


def _dynamics(config) -> ex.Dynamics:
    kind = config["dynamics"]["kind"]
    if kind == "tilde":
        raise ConfigError("tilde dynamics are only available for simulate")
    try:
        return ex.Dynamics(kind, int(config["dynamics"]["d"]))
    except ValueError as err:
        raise ConfigError(f"dynamics: {err}") from None


def _write_json(obj, path) -> str:
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if path:
        Path(path).write_text(text)
    return text


def _csv_text(columns, rows) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def _emit(config, csv_text: str | None, summary: dict, out) -> None:
    """CSV to ``csv`` (or stdout); the JSON summary to ``output``, else stdout when CSV went to a file."""
    summary = {"config": config, **summary}
    json_text = _write_json(summary, config["output"])
    if csv_text is None:
        if not config["output"]:
            out.write(json_text)
        return
    if config["csv"]:
        Path(config["csv"]).write_text(csv_text)
        if not config["output"]:
            out.write(json_text)
    else:
        out.write(csv_text)


def _simulate_env(config) -> tuple[Environment, Trajectory]:
    spec = _family(config)
    model = _model(config)
    kind = config["dynamics"]["kind"]
    e0 = make(spec)
    op = sample_open(e0, model)
    if kind == "tilde":
        if spec.kind is not FamilyKind.LINEAR_ORIENTED:
            raise ConfigError("tilde dynamics run on the linear-oriented family")
        op = op.rightward()
        n = e0.n
        return Environment(chain(n), op), run_tilde(n, op)
    env = Environment(e0, op)
    if kind == "kd":
        if not model.unoriented:
            raise ConfigError("kd dynamics need --unoriented open edges")
        return env, run_kd_completion(env, int(config["dynamics"]["d"]))
    if kind != "transitive":
        raise ConfigError(f"unknown dynamics {kind!r}")
    return env, run(env)


def _cmd_simulate(config, threads, out) -> int:
    env, traj = _simulate_env(config)
    spec = _family(config)
    occ = traj.time != NEVER
    op = env.open.to_dense()
    summary = {
        "n": env.n,
        "initial_edges": len(env.e0),
        "open_edges": len(env.open),
        "occupied_edges": int(occ.sum()),
        "occupied_open_edges": int((occ & op).sum()),
        "saturated": bool(not (op & ~occ).any()),
        "rounds": traj.t_max,
    }
    if spec.has_linear_order:
        lengths = longest_occupied_length(env, traj)
        summary["max_right"] = lengths.right
        summary["max_left"] = lengths.left
        if env.n >= 8:
            summary["regime"] = ex.classify_regime(traj, env, config["alpha"]).regime.value
    if config["render"]:
        render_matrix(env, traj, RenderSpec(scale=config["scale"]), config["render"])
    if config["save"]:
        np.savez_compressed(
            config["save"],
            e0=env.e0.to_dense(),
            open=op,
            time=traj.time,
            t_max=np.int64(traj.t_max),
            config=np.array(json.dumps(config, sort_keys=True)),
        )
    _emit(config, None, summary, out)
    return 0


def _cmd_render(config, threads, out) -> int:
    if not config["input"]:
        raise ConfigError("render needs --input")
    target = config["render"] or config["output"]
    if not target:
        raise ConfigError("render needs --output for the image")
    with np.load(config["input"]) as data:
        env = Environment(EdgeSet.from_dense(data["e0"]), EdgeSet.from_dense(data["open"]))
        time = data["time"].astype(np.int32)
        traj = Trajectory(env.n, time, int(data["t_max"]))
    render_matrix(env, traj, RenderSpec(scale=config["scale"]), target)
    return 0


def _cmd_sweep(config, threads, out) -> int:
    spec = _family(config)
    grid = [tuple(p) if isinstance(p, list) else p for p in config["grid"]]
    if not grid:
        grid = [_density(_model(config))]
    result = ex.sweep(
        spec,
        grid,
        int(config["trials"]),
        int(config["base_seed"]),
        alpha=float(config["alpha"]),
        unoriented=bool(config["model"]["unoriented"]),
        dynamics=_dynamics(config),
        threads=threads,
    )
    _emit(config, result.to_csv(), {"n": result.n, "cells": result.summary()}, out)
    return 0


def _cmd_pc(config, threads, out) -> int:
    try:
        est = ex.estimate_pc(
            _family(config),
            int(config["trials"]),
            float(config["tolerance"]),
            int(config["base_seed"]),
            unoriented=bool(config["model"]["unoriented"]),
            dynamics=_dynamics(config),
            threads=threads,
        )
    except ex.PcNotFound as err:
        _emit(config, None, {"error": str(err)}, out)
        return 1
    rows = [{"p": p, "frequency": f} for p, f in est.probes]
    summary = {
        "p_c": est.p_c,
        "low": est.low,
        "high": est.high,
        "freq_low": est.freq_low,
        "freq_high": est.freq_high,
    }
    _emit(config, _csv_text(("p", "frequency"), rows), summary, out)
    return 0


TC3_COLUMNS = ("n", "p_right", "alpha", "trials", "estimate", "low", "high", "limit")


def _cmd_tc3(config, threads, out) -> int:
    if not config["n_list"]:
        raise ConfigError("tc3 needs --n")
    rows = ex.tc3_curve(
        float(config["alpha"]), config["n_list"], int(config["trials"]),
        int(config["base_seed"]), threads=threads,
    )
    table = [
        {
            "n": r.n, "p_right": r.p_right, "alpha": r.alpha, "trials": r.trials,
            "estimate": r.estimate, "low": r.low, "high": r.high, "limit": r.limit,
        }
        for r in rows
    ]
    _emit(config, _csv_text(TC3_COLUMNS, table), {"rows": table}, out)
    return 0


def _cmd_verify(config, threads, out) -> int:
    report = run_verification(
        int(config["max_n"]), int(config["instances"]), int(config["base_seed"])
    )
    _emit(config, None, report.to_dict(), out)
    return 0 if report.passed else 1


CATALAN_COLUMNS = ("ell", "count", "expected", "sizes", "method")


def _cmd_catalan(config, threads, out) -> int:
    ell_max = int(config["ell_max"])
    if not 1 <= ell_max <= 10:
        raise ConfigError("--ell-max must be in [1, 10]")
    rows = []
    ok = True
    for ell in range(1, ell_max + 1):
        c = catalan_minimal_sets(ell)
        ok &= c.count == catalan(ell - 1) and c.all_sizes_ell_minus_one
        rows.append(
            {
                "ell": ell,
                "count": c.count,
                "expected": catalan(ell - 1),
                "sizes": ";".join(f"{k}:{v}" for k, v in c.sizes.items()),
                "method": c.method,
            }
        )
    _emit(config, _csv_text(CATALAN_COLUMNS, rows), {"rows": rows, "passed": bool(ok)}, out)
    return 0 if ok else 1


_COMMANDS = {
    "simulate": _cmd_simulate,
    "sweep": _cmd_sweep,
    "pc": _cmd_pc,
    "tc3": _cmd_tc3,
    "verify": _cmd_verify,
    "render": _cmd_render,
    "catalan": _cmd_catalan,
}


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    try:
        config, threads = resolve(argv)
        return _COMMANDS[config["command"]](config, threads, out)
    except SystemExit as err:
        return 2 if err.code not in (0, None) else 0
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2
    except (ValueError, TypeError, KeyError) as err:
        print(f"invalid configuration: {err}", file=sys.stderr)
        return 2
    except OSError as err:
        print(f"I/O error: {err}", file=sys.stderr)
        return 2
