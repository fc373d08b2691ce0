"""Command-line entry point: list, run, sweep and check.

Outputs go to ``--out DIR``; when omitted, to ``$BILINSTAB_OUT/<scenario>``
(or ``./runs/<scenario>``).
"""

from __future__ import annotations

import argparse
import configparser
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__, analysis, models, scenarios
from .errors import BilinstabError, BlowUpError, ValidationError
from .integrator import simulate

SWEEP_PARAMS = {"r": "r", "lam": "lam", "lambda": "lam", "λ": "lam", "mu": "mu",
                "rho": "rho", "T_target": "T_target", "x0_scale": "x0_scale"}


# --------------------------------------------------------------------------
# configuration


def parse_set(items):
    out = {}
    for item in items or ():
        if "=" not in item:
            raise ValidationError(item, "expected key=value")
        k, v = item.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def read_config(path):
    """Flatten all sections of an INI-style file into one dict.

    A ``scenario`` key selects the scenario; every other key is a parameter.
    """
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    with open(path, encoding="utf-8") as fh:
        cp.read_file(fh)
    out = {}
    for section in cp.sections():
        for k, v in cp.items(section):
            if k in out and out[k] != v:
                raise ValidationError(k, f"set twice with different values in {path}")
            out[k] = v
    return out


def default_out(name):
    root = os.environ.get("BILINSTAB_OUT", "runs")
    return Path(root) / name


# --------------------------------------------------------------------------
# output


def _fmt(x):
    return "%.17g" % x


def write_csv(path, traj):
    K = traj.obs.shape[1]
    header = ["t", "norm", "control", "b_form"] + [f"obs_{k + 1}" for k in range(K)]
    cols = np.column_stack([traj.t, traj.norm, traj.control, traj.b_form, traj.obs])
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in cols:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def read_csv(path):
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return data


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items() if not str(k).startswith("_")}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        return f if math.isfinite(f) else repr(f)
    return obj


# --------------------------------------------------------------------------
# runs


def run_scenario(name, overrides=None, out_dir=None, quiet=False):
    """Run one scenario, write ``trajectory.csv`` and ``manifest.json``.

    Returns the manifest dict.
    """
    sc = scenarios.get_scenario(name)
    params = scenarios.resolve_params(sc, overrides or {})
    t0 = time.perf_counter()
    setup = scenarios.build(sc, params)
    traj = simulate(setup.model, setup.law, setup.x0, setup.options)
    results = scenarios.evaluate(sc, setup, traj)
    wall = time.perf_counter() - t0
    out = Path(out_dir) if out_dir is not None else default_out(sc.name)
    out.mkdir(parents=True, exist_ok=True)
    write_csv(out / "trajectory.csv", traj)
    manifest = {
        "scenario": sc.name,
        "version": __version__,
        "params": params,
        "derived": setup.derived,
        "model": traj.manifest["model"],
        "law": traj.manifest["law"],
        "options": traj.manifest["options"],
        "zero_tol": traj.manifest["zero_tol"],
        "results": dict(results, extinction_time=traj.extinction_time, n_steps=traj.n_steps,
                        final_norm=float(traj.norm[-1])),
        "wall_time_s": wall,
    }
    manifest = _jsonable(manifest)
    with open(out / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    if not quiet:
        head = results.get(sc.headline)
        print(f"scenario={sc.name} {sc.headline}={_short(head)} "
              f"bound_ok={results.get('bound_ok', '-')} out={out}")
    return manifest


def _short(v):
    if isinstance(v, float):
        return f"{v:.6g}"
    return v


def _sweep_one(args):
    name, overrides, out_dir = args
    return run_scenario(name, overrides, out_dir, quiet=True)


def sweep(name, param, values, overrides=None, out_dir=None, jobs=1):
    """Run ``name`` once per value of ``param``; returns the summary rows."""
    if param not in SWEEP_PARAMS:
        raise ValidationError("param", f"must be one of {', '.join(sorted(set(SWEEP_PARAMS.values())))}")
    if not values:
        raise ValidationError("values", "need at least one value")
    key = SWEEP_PARAMS[param]
    sc = scenarios.get_scenario(name)
    base = dict(overrides or {})
    scenarios.resolve_params(sc, dict(base, **{key: values[0]}))  # validate early
    out = Path(out_dir) if out_dir is not None else default_out(sc.name + "_sweep")
    tasks = [(sc.name, dict(base, **{key: v}), out / f"{key}={v}") for v in values]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            manifests = list(ex.map(_sweep_one, tasks))
    else:
        manifests = [_sweep_one(t) for t in tasks]
    rows = []
    for v, m in zip(values, manifests):
        res = m["results"]
        rows.append({
            "value": v,
            "metric": sc.headline,
            "result": res.get(sc.headline),
            "bound_ok": res.get("bound_ok", res.get("certified", "")),
        })
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "summary.csv", "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{key},{sc.headline},bound_ok\n")
        for r in rows:
            fh.write(f"{r['value']},{_cell(r['result'])},{r['bound_ok']}\n")
    return rows


def _cell(v):
    if isinstance(v, float):
        return _fmt(v)
    return "" if v is None else str(v)


# --------------------------------------------------------------------------
# checks


def run_checks(seed=0):
    """Lemma oracles and assumption verifiers; returns (name, passed, detail) rows."""
    rows = []
    for C, a in [(1.0, 0.0), (0.5, 1.0), (2.0, -0.5)]:
        v3 = analysis.sequence_lemma_oracle(C, a, 1.0, 10**3)
        v4 = analysis.sequence_lemma_oracle(C, a, 1.0, 10**4)
        rel = abs(v4.value / v3.value - 1.0)
        rows.append((f"sequence C={C:g} alpha={a:g}", v4.passed and rel < 0.01,
                     f"sup={v4.value:.6g} change={rel:.2e}"))
    rng = np.random.default_rng(seed)
    worst_bound, worst_num = -math.inf, 0.0
    for _ in range(1000):
        a, b = 10 ** rng.uniform(-1, 1, 2)
        nu = rng.uniform(0.01, 0.49)
        V0 = 10 ** rng.uniform(-3, 3)
        te, tb = analysis.parsegov_extinction_time(a, b, nu, V0)
        tn = analysis.parsegov_numeric_time(a, b, nu, V0)
        worst_bound = max(worst_bound, te - tb)
        worst_num = max(worst_num, abs(tn / te - 1))
    rows.append(("two-power decay closed form <= bound", worst_bound <= 0, f"max(t-T)={worst_bound:.3e}"))
    rows.append(("two-power decay numeric vs closed form", worst_num < 1e-3, f"max rel={worst_num:.2e}"))
    for spec in (models.TransportL1(), models.HeatNeumannSup(), models.WaveDamped(16)):
        m = models.build_model(spec)
        r = analysis.verify_A2(m, 500, seed)
        rows.append((f"A2 {m.name} K={r.constant_name}", r.passed, f"max ratio={r.max_ratio:.4f}"))
    cases = [
        (models.HeatSpectralProjection(8, (2.0, 1.0, 3.0)), analysis.IMPOSSIBLE),
        (models.FiniteDimR4(), analysis.NO_OBSTRUCTION),
        (models.FiniteDimCustom(np.eye(3), np.eye(3)), analysis.NO_OBSTRUCTION),
    ]
    for spec, want in cases:
        v = analysis.fts_necessary_check(models.build_model(spec))
        rows.append((f"FTS necessary check {type(spec).__name__}", v.verdict == want, v.verdict))
    wm = models.build_model(models.WaveDamped(16))
    est = analysis.observability_estimate(wm, 1.0, 50, seed)
    rows.append(("damped wave observability T=1", abs(est.delta_hat - 0.5) <= 1e-4,
                 f"delta={est.delta_hat:.8f}"))
    tm = models.build_model(models.TransportL1())
    est = analysis.observability_estimate(tm, 2.0, 20, seed)
    rows.append(("transport L1 observability T=2", est.delta_hat >= 1.5 - 1e-6,
                 f"delta={est.delta_hat:.6f}"))
    return rows


# --------------------------------------------------------------------------
# argument handling


def build_parser():
    p = argparse.ArgumentParser(prog="bilinstab", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="verb", required=True)

    sub.add_parser("list", help="print the scenario catalog")

    def common(sp):
        sp.add_argument("--scenario", help="scenario name (or set in --config)")
        sp.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override a parameter; repeatable")
        sp.add_argument("--config", help="INI-style file of key = value pairs")
        sp.add_argument("--out", help="output directory")

    run = sub.add_parser("run", help="run one scenario")
    common(run)
    sw = sub.add_parser("sweep", help="run a scenario over several parameter values")
    common(sw)
    sw.add_argument("--param", required=True)
    sw.add_argument("--values", required=True, help="comma-separated values")
    sw.add_argument("--jobs", type=int, default=1)
    ck = sub.add_parser("check", help="run lemma oracles and assumption verifiers")
    ck.add_argument("--seed", type=int, default=0)
    return p


def _gather(args):
    overrides = {}
    name = args.scenario
    if args.config:
        cfg = read_config(args.config)
        cfg_name = cfg.pop("scenario", None)
        name = name or cfg_name
        overrides.update(cfg)
    overrides.update(parse_set(args.set))
    if not name:
        raise ValidationError("scenario", "no scenario given (use --scenario or a config key)")
    return name, overrides


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.verb == "list":
            for sc in scenarios.CATALOG.values():
                print(f"{sc.name:24s} {sc.summary}")
            return 0
        if args.verb == "check":
            rows = run_checks(args.seed)
            width = max(len(r[0]) for r in rows)
            for name, ok, detail in rows:
                print(f"{name:<{width}}  {'PASS' if ok else 'FAIL'}  {detail}")
            return 0 if all(r[1] for r in rows) else 1
        name, overrides = _gather(args)
        if args.verb == "run":
            run_scenario(name, overrides, args.out)
            return 0
        values = [v.strip() for v in args.values.split(",") if v.strip()]
        rows = sweep(name, args.param, values, overrides, args.out, args.jobs)
        for r in rows:
            print(f"{args.param}={r['value']} {r['metric']}={_short(r['result'])} "
                  f"bound_ok={r['bound_ok']}")
        return 0
    except ValidationError as e:
        print(f"error: invalid parameter {e}", file=sys.stderr)
        return 2
    except BlowUpError as e:
        print(f"error: blow-up: {e}", file=sys.stderr)
        return 3
    except BilinstabError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
